#pragma once

#include <string>
#include <vector>

#include "eis/geometry.hpp"

namespace eis {

struct Material {
    double sigma = 0.0;    // conductivity, S/m
    double epsilon = 0.0;  // permittivity, F/m

    Complex admittivity(double omega) const { return {sigma, omega * epsilon}; }
};

// Thin crack: open (or closed, first == last point) polyline with half-thickness
// delta. The physical strip is the union of flat-capped rectangles of width
// 2*delta around each segment, with round joins at interior vertices.
struct Crack {
    std::vector<Vec2> polyline;
    double half_thickness = 0.0;

    bool closed() const;
    double length() const { return polyline_length(polyline); }
};

struct Bar {
    Vec2 center;
    double radius = 0.0;
};

// Region ids: 0 background, 1..Nc crack strips, Nc+1..Nc+Nb bar disks.
inline constexpr int kRegionBackground = 0;
inline int crack_region(int crack_index) { return 1 + crack_index; }
inline int bar_region(int bar_index, int n_cracks) { return 1 + n_cracks + bar_index; }

struct Scene {
    double domain_radius = 0.1;
    double d0 = 0.005;  // minimal separation scale
    Material background{1.0, 1e4 * kVacuumPermittivity};
    Material crack_material{1e-6, 1e2 * kVacuumPermittivity};
    Material bar_material{1e5, 1e6 * kVacuumPermittivity};
    std::vector<Crack> cracks;
    std::vector<Bar> bars;

    const Material& material_of_region(int region) const;
};

struct SeparationReport {
    double crack_crack;
    double crack_bar;
    double bar_bar;
    double crack_boundary;
    double bar_boundary;
};

// Checks geometric sanity and all pairwise separation rules:
// crack-crack, bar-bar, crack-boundary, bar-boundary >= d0; crack-bar >= 2*d0.
// Gaps are measured between strip/disk hulls, not centerlines.
// Throws DegenerateGeometry or SeparationViolation.
SeparationReport validate_scene(const Scene& scene);

// Region id containing p; throws PointOutsideDomain if |p| > R.
int region_at(const Scene& scene, const Vec2& p);

// gamma(p, omega) = sigma + i*omega*epsilon of the region containing p.
Complex admittivity_at(const Scene& scene, const Vec2& p, double omega);

// Built-in test configurations 1..3; throws UnknownModel otherwise.
Scene builtin_model(int model);

// Copy with all defects removed (background only).
Scene without_defects(const Scene& scene);

// Copy with every crack half-thickness replaced by delta (used for resolution
// studies at magnified thickness).
Scene with_crack_thickness(const Scene& scene, double delta);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

}  // namespace eis
