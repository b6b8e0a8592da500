#include <cmath>

#include "doctest.h"
#include "eis/errors.hpp"
#include "eis/scene.hpp"

using namespace eis;

TEST_CASE("built-in models validate and unknown ids are rejected") {
    for (int m = 1; m <= 3; ++m) {
        const Scene s = builtin_model(m);
        CHECK_NOTHROW(validate_scene(s));
        CHECK(s.bars.size() == 2);
        CHECK(!s.cracks.empty());
    }
    CHECK_THROWS_AS(builtin_model(0), UnknownModel);
    CHECK_THROWS_AS(builtin_model(4), UnknownModel);
}

TEST_CASE("region lookup hits bars, strips and background") {
    const Scene s = builtin_model(1);
    const int nc = static_cast<int>(s.cracks.size());
    for (int b = 0; b < static_cast<int>(s.bars.size()); ++b)
        CHECK(region_at(s, s.bars[b].center) == bar_region(b, nc));
    for (int c = 0; c < nc; ++c) {
        const Vec2 p = s.cracks[c].polyline.front();
        const Vec2 q = s.cracks[c].polyline.back();
        const Vec2 mid = (p + q) / 2.0;
        CHECK(region_at(s, mid) == crack_region(c));
        const Vec2 off = mid + perp(normalized(q - p)) * (4.0 * s.cracks[c].half_thickness);
        CHECK(region_at(s, off) == kRegionBackground);
    }
    CHECK(region_at(s, {0.0, 0.0}) == kRegionBackground);
    CHECK_THROWS_AS(region_at(s, {0.2, 0.0}), PointOutsideDomain);
}

TEST_CASE("admittivity lookup uses the region material") {
    const Scene s = builtin_model(1);
    const double omega = 2.0 * kPi * 1e4;
    const Complex gb = admittivity_at(s, {0.0, 0.0}, omega);
    CHECK(gb.real() == doctest::Approx(1.0));
    const Complex gd = admittivity_at(s, s.bars[0].center, omega);
    CHECK(gd.real() == doctest::Approx(1e5));
    CHECK(gd.imag() == doctest::Approx(omega * 1e6 * kVacuumPermittivity));
}

TEST_CASE("separation rules reject bad layouts") {
    Scene s;
    s.bars.push_back({{0.0, 0.0}, 0.02});
    s.bars.push_back({{0.041, 0.0}, 0.02});  // 1 mm gap < d0
    CHECK_THROWS_AS(validate_scene(s), SeparationViolation);

    Scene near_rim;
    near_rim.bars.push_back({{0.09, 0.0}, 0.008});  // 2 mm to the rim < d0
    CHECK_THROWS_AS(validate_scene(near_rim), SeparationViolation);

    Scene bad_crack;
    bad_crack.cracks.push_back({{{0.0, 0.0}, {1e-5, 0.0}}, 5e-5});  // shorter than 4*delta
    CHECK_THROWS_AS(validate_scene(bad_crack), DegenerateGeometry);

    Scene crack_on_bar;
    crack_on_bar.cracks.push_back({{{-0.03, 0.0}, {0.03, 0.0}}, 5e-5});
    crack_on_bar.bars.push_back({{0.0, 0.005}, 0.01});
    CHECK_THROWS_AS(validate_scene(crack_on_bar), SeparationViolation);
}

TEST_CASE("scene json round trip") {
    const Scene s = builtin_model(3);
    const std::string text = scene_to_json(s);
    const Scene r = scene_from_json(text);
    CHECK(r.domain_radius == s.domain_radius);
    CHECK(r.cracks.size() == s.cracks.size());
    CHECK(r.bars.size() == s.bars.size());
    for (std::size_t c = 0; c < s.cracks.size(); ++c) {
        CHECK(r.cracks[c].half_thickness == s.cracks[c].half_thickness);
        CHECK(r.cracks[c].polyline.size() == s.cracks[c].polyline.size());
        for (std::size_t k = 0; k < s.cracks[c].polyline.size(); ++k) {
            CHECK(r.cracks[c].polyline[k].x == s.cracks[c].polyline[k].x);
            CHECK(r.cracks[c].polyline[k].y == s.cracks[c].polyline[k].y);
        }
    }
    CHECK(r.bar_material.sigma == s.bar_material.sigma);
    CHECK_THROWS_AS(scene_from_json("{ not json"), ParseError);
    CHECK_THROWS_AS(scene_from_json("{}"), ParseError);
}

TEST_CASE("thickness override and defect removal helpers") {
    const Scene s = builtin_model(2);
    const Scene fat = with_crack_thickness(s, 5e-4);
    for (const Crack& c : fat.cracks) CHECK(c.half_thickness == 5e-4);
    const Scene empty = without_defects(s);
    CHECK(empty.cracks.empty());
    CHECK(empty.bars.empty());
    CHECK(empty.domain_radius == s.domain_radius);
}

TEST_CASE("closed polylines are recognized") {
    Crack loop;
    loop.polyline = {{0.0, 0.0}, {0.02, 0.0}, {0.02, 0.02}, {0.0, 0.02}, {0.0, 0.0}};
    loop.half_thickness = 1e-4;
    CHECK(loop.closed());
    Crack open;
    open.polyline = {{0.0, 0.0}, {0.02, 0.0}};
    open.half_thickness = 1e-4;
    CHECK(!open.closed());
}
