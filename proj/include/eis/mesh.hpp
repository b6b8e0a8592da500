#pragma once

#include <vector>

#include "eis/geometry.hpp"
#include "eis/scene.hpp"

namespace eis {

inline constexpr int kNumElectrodes = 16;

struct MeshTri {
    int v[3];    // CCW node ids
    int region;  // 0 background, then cracks, then bars (see scene.hpp)
};

// Duplicated-node chain along one crack centerline. plus[i] and minus[i]
// share coordinates; at the endpoints of an open crack they are the same
// node. The plus side is the one perp(tangent) points into.
struct CrackInterface {
    int crack = 0;
    bool closed = false;
    std::vector<int> plus;
    std::vector<int> minus;
    std::vector<double> arc;  // arclength from the chain start
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<MeshTri> tris;
    std::vector<std::vector<int>> electrodes;  // node chains, CCW within each arc
    std::vector<int> boundary_loop;            // all rim nodes, CCW from angle 0
    std::vector<CrackInterface> interfaces;    // empty when cracks are meshed as strips
    double domain_radius = 0.0;
    double target_h = 0.0;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_tris() const { return static_cast<int>(tris.size()); }
};

struct MeshOptions {
    double target_h = 0.0;            // background spacing, 0 = domain_radius / 25
    double electrode_coverage = 0.5;  // fraction of the rim covered by the 16 arcs
    int element_cap = 200000;
    // true: crack strips are meshed as thin resolved regions (triangle
    // diameter below the half thickness). false: cracks become zero-width
    // node-duplicated interfaces.
    bool resolve_crack_strips = true;
    double interface_spacing = 0.0;  // along-crack spacing in interface mode, 0 = target_h / 2
};

// Deterministic: identical scene + options give an identical mesh.
// Throws InfeasibleResolution when resolving the strips cannot fit in
// element_cap, MeshBudgetExceeded when the built mesh overruns it.
Mesh build_mesh(const Scene& scene, const MeshOptions& opts);

double tri_area(const Mesh& mesh, int t);
Vec2 tri_centroid(const Mesh& mesh, int t);
std::vector<double> region_areas(const Mesh& mesh, int n_regions);
double median_edge_length(const Mesh& mesh);
int find_node_near(const Mesh& mesh, const Vec2& p);

}  // namespace eis
