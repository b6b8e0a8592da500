#include <cmath>
#include <set>

#include "doctest.h"
#include "eis/errors.hpp"
#include "eis/mesh.hpp"

using namespace eis;

namespace {

int count_directed_edge(const Mesh& m, int a, int b) {
    int n = 0;
    for (const MeshTri& t : m.tris)
        for (int k = 0; k < 3; ++k)
            if (t.v[k] == a && t.v[(k + 1) % 3] == b) ++n;
    return n;
}

}  // namespace

TEST_CASE("homogeneous disk mesh covers the domain") {
    Scene s;
    MeshOptions o;
    o.target_h = s.domain_radius / 12.0;
    const Mesh m = build_mesh(s, o);
    CHECK(m.n_tris() > 100);
    for (const MeshTri& t : m.tris) CHECK(t.region == kRegionBackground);
    double area = 0.0;
    for (int t = 0; t < m.n_tris(); ++t) {
        CHECK(tri_area(m, t) > 0.0);
        area += tri_area(m, t);
    }
    const double disk = kPi * s.domain_radius * s.domain_radius;
    CHECK(area == doctest::Approx(disk).epsilon(3e-3));
    CHECK(m.boundary_loop.size() % 32 == 0);
    REQUIRE(m.electrodes.size() == kNumElectrodes);
    for (const auto& chain : m.electrodes) CHECK(chain.size() >= 3);
    // Electrode arcs start on the 1/16 grid and span half a sector.
    for (int e = 0; e < kNumElectrodes; ++e) {
        const double start = 2.0 * kPi * e / kNumElectrodes;
        for (const int i : m.electrodes[e]) {
            double th = std::atan2(m.nodes[i].y, m.nodes[i].x);
            if (th < -1e-12) th += 2.0 * kPi;
            CHECK(th > start - 1e-6);
            CHECK(th < start + kPi / kNumElectrodes + 1e-6);
        }
    }
}

TEST_CASE("mesh construction is deterministic") {
    const Scene s = builtin_model(1);
    const Scene fat = with_crack_thickness(s, 5e-4);
    MeshOptions o;
    const Mesh a = build_mesh(fat, o);
    const Mesh b = build_mesh(fat, o);
    REQUIRE(a.n_nodes() == b.n_nodes());
    REQUIRE(a.n_tris() == b.n_tris());
    for (int i = 0; i < a.n_nodes(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
    }
    for (int t = 0; t < a.n_tris(); ++t) {
        CHECK(a.tris[t].region == b.tris[t].region);
        for (int k = 0; k < 3; ++k) CHECK(a.tris[t].v[k] == b.tris[t].v[k]);
    }
}

TEST_CASE("resolved strips carry the right areas") {
    const Scene s = with_crack_thickness(builtin_model(1), 5e-4);
    MeshOptions o;
    const Mesh m = build_mesh(s, o);
    CHECK(m.n_tris() <= o.element_cap);
    CHECK(m.interfaces.empty());
    const int nr = 1 + static_cast<int>(s.cracks.size() + s.bars.size());
    const auto areas = region_areas(m, nr);
    for (std::size_t c = 0; c < s.cracks.size(); ++c) {
        const double want = 2.0 * s.cracks[c].half_thickness * s.cracks[c].length();
        CHECK(areas[crack_region(static_cast<int>(c))] ==
              doctest::Approx(want).epsilon(0.05));
    }
    for (std::size_t b = 0; b < s.bars.size(); ++b) {
        const double want = kPi * s.bars[b].radius * s.bars[b].radius;
        CHECK(areas[bar_region(static_cast<int>(b), static_cast<int>(s.cracks.size()))] ==
              doctest::Approx(want).epsilon(0.01));
    }
}

TEST_CASE("true hairline thickness is refused under the default cap") {
    const Scene s = builtin_model(1);
    MeshOptions o;
    CHECK_THROWS_AS(build_mesh(s, o), InfeasibleResolution);
    MeshOptions zt = o;
    zt.resolve_crack_strips = false;
    CHECK_NOTHROW(build_mesh(s, zt));
}

TEST_CASE("tiny element cap is reported") {
    Scene s;
    MeshOptions o;
    o.target_h = s.domain_radius / 12.0;
    o.element_cap = 120;
    CHECK_THROWS_AS(build_mesh(s, o), MeshBudgetExceeded);
    o.element_cap = 50;
    CHECK_THROWS_AS(build_mesh(s, o), BadConfig);
}

TEST_CASE("interface meshes duplicate the crack centerlines") {
    const Scene s = builtin_model(1);
    MeshOptions o;
    o.resolve_crack_strips = false;
    const Mesh m = build_mesh(s, o);
    REQUIRE(m.interfaces.size() == s.cracks.size());
    for (const CrackInterface& ci : m.interfaces) {
        REQUIRE(ci.plus.size() == ci.minus.size());
        REQUIRE(ci.plus.size() == ci.arc.size());
        REQUIRE(ci.plus.size() >= 5);
        CHECK(!ci.closed);
        CHECK(ci.plus.front() == ci.minus.front());
        CHECK(ci.plus.back() == ci.minus.back());
        for (std::size_t i = 1; i + 1 < ci.plus.size(); ++i) {
            CHECK(ci.plus[i] != ci.minus[i]);
            CHECK(m.nodes[ci.plus[i]].x == m.nodes[ci.minus[i]].x);
            CHECK(m.nodes[ci.plus[i]].y == m.nodes[ci.minus[i]].y);
        }
        for (std::size_t i = 1; i < ci.arc.size(); ++i) CHECK(ci.arc[i] > ci.arc[i - 1]);
        // One triangle on each side of every interface segment, and the plus
        // side is the one turned left of travel.
        for (std::size_t i = 0; i + 1 < ci.plus.size(); ++i) {
            CHECK(count_directed_edge(m, ci.plus[i], ci.plus[i + 1]) == 1);
            CHECK(count_directed_edge(m, ci.plus[i + 1], ci.plus[i]) == 0);
            CHECK(count_directed_edge(m, ci.minus[i + 1], ci.minus[i]) == 1);
            CHECK(count_directed_edge(m, ci.minus[i], ci.minus[i + 1]) == 0);
        }
    }
    for (int t = 0; t < m.n_tris(); ++t) CHECK(tri_area(m, t) > 0.0);
    // Bars keep their regions, strips to be replaced by jumps carry none.
    const int nr = 1 + static_cast<int>(s.cracks.size() + s.bars.size());
    const auto areas = region_areas(m, nr);
    for (std::size_t c = 0; c < s.cracks.size(); ++c)
        CHECK(areas[crack_region(static_cast<int>(c))] == 0.0);
    for (std::size_t b = 0; b < s.bars.size(); ++b)
        CHECK(areas[bar_region(static_cast<int>(b), static_cast<int>(s.cracks.size()))] >
              0.5 * kPi * s.bars[b].radius * s.bars[b].radius);
}
