#include <cmath>

#include "doctest.h"
#include "eis/errors.hpp"
#include "eis/forward.hpp"
#include "eis/spectro.hpp"

using namespace eis;

namespace {

// Largest relative deviation of the rim trace from a cos(theta) profile of
// the given amplitude.
double rim_profile_err(const Mesh& m, const std::vector<Complex>& u, Complex amp) {
    const auto tr = rim_trace(m, u);
    const auto th = rim_angles(m);
    double err = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        err = std::max(err, std::abs(tr[i] - amp * std::cos(th[i])));
    return err / std::abs(amp);
}

Crack circle_crack(double rho, int segs, double delta) {
    Crack c;
    for (int i = 0; i <= segs; ++i) {
        const double th = 2.0 * kPi * i / segs;
        c.polyline.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
    c.polyline.back() = c.polyline.front();
    c.half_thickness = delta;
    return c;
}

}  // namespace

TEST_CASE("homogeneous disk reproduces the linear potential") {
    Scene s;
    MeshOptions o;
    o.target_h = s.domain_radius / 25.0;
    const Mesh m = build_mesh(s, o);
    const ForwardSolver fw(m, s, 0.0);
    const auto u = fw.solve_continuous({1.0, 0.0});
    CHECK(rim_profile_err(m, u, s.domain_radius) < 5e-3);
}

TEST_CASE("concentric conducting disk matches the closed form") {
    Scene s;
    s.bars.push_back({{0.0, 0.0}, 0.03});
    MeshOptions o;
    o.target_h = s.domain_radius / 50.0;
    const Mesh m = build_mesh(s, o);
    const ForwardSolver fw(m, s, 0.0);
    const auto u = fw.solve_continuous({1.0, 0.0});
    CHECK(rim_profile_err(m, u, 0.08348654153437801) < 5e-3);
}

TEST_CASE("zero-width circular interface matches the closed form") {
    // c = 2 delta / lambda = 2e-5 / 1e-3 = 0.02 at zero frequency.
    Scene s;
    s.crack_material = {1e-3, 0.0};
    s.cracks.push_back(circle_crack(0.05, 96, 1e-5));
    MeshOptions o;
    o.resolve_crack_strips = false;
    const Mesh m = build_mesh(s, o);
    REQUIRE(m.interfaces.size() == 1);
    CHECK(m.interfaces[0].closed);

    const ForwardSolver fw(m, s, 0.0);
    const auto u = fw.solve_continuous({1.0, 0.0});
    CHECK(rim_profile_err(m, u, 0.10869565217391307) < 5e-3);

    // Same mesh, defects closed: plain linear potential, and the normalized
    // difference signature carries amplitude -c rho / (2 R) to leading order
    // (exactly 2B/R * (-1/2) with B = 1/2300 here).
    const ForwardSolver hw(m, s, 0.0, {false, true});
    const auto uh = hw.solve_continuous({1.0, 0.0});
    CHECK(rim_profile_err(m, uh, 0.1) < 5e-3);
    const auto w = boundary_perturbation(m, u, uh, fw.gamma_background());
    const auto th = rim_angles(m);
    const double amp = -1.0 / 2300.0 / 0.1;
    double werr = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        werr = std::max(werr, std::abs(w[i] - amp * std::cos(th[i])));
    CHECK(werr / std::abs(amp) < 0.02);

    // Jump and one-sided flux against the same solution: interior plus side,
    // [u] = -2B/rho cos(theta), flux = beta [u].
    const CrackInterface& ci = m.interfaces[0];
    const double B = 1.0 / 2300.0;
    for (std::size_t i = 0; i < ci.plus.size(); ++i) {
        const double thn = std::atan2(m.nodes[ci.plus[i]].y, m.nodes[ci.plus[i]].x);
        const Complex jump = u[ci.plus[i]] - u[ci.minus[i]];
        CHECK(std::abs(jump - Complex{-2.0 * B / 0.05 * std::cos(thn), 0.0}) <
              0.05 * 2.0 * B / 0.05);
    }
    const auto flux = fw.interface_flux(u, 0);
    const double A = 2.0 * B / (0.02 * 0.05);
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const Vec2 mid = (m.nodes[ci.plus[i]] + m.nodes[ci.plus[(i + 1) % ci.plus.size()]]) / 2.0;
        const double thm = std::atan2(mid.y, mid.x);
        CHECK(std::abs(flux[i] - Complex{-A * std::cos(thm), 0.0}) < 0.10 * A);
    }
}

TEST_CASE("complex admittivity interface agrees with the closed form") {
    // Same geometry at 250 kHz with the built-in materials; the closed form
    // u(R) = (4 + 50 c) / ((40 + 300 c) gamma_b) cos(theta) follows from the
    // radial transmission solve with c = 2 delta / lambda_c.
    Scene s;
    s.cracks.push_back(circle_crack(0.05, 96, 5e-5));
    MeshOptions o;
    o.resolve_crack_strips = false;
    const Mesh m = build_mesh(s, o);
    const double omega = 2.0 * kPi * 2.5e5;
    const ForwardSolver fw(m, s, omega);
    const auto u = fw.solve_continuous({1.0, 0.0});
    const Complex lam = lambda_c(s.crack_material, s.background, omega);
    const Complex c = 2.0 * s.cracks[0].half_thickness / lam;
    const Complex amp = (4.0 + 50.0 * c) / ((40.0 + 300.0 * c) * fw.gamma_background());
    CHECK(rim_profile_err(m, u, amp) < 6e-3);
}

TEST_CASE("huge-contrast interface merges into continuity") {
    Scene s;
    s.crack_material = {1e12, 0.0};
    s.cracks.push_back(circle_crack(0.05, 64, 5e-5));
    MeshOptions o;
    o.resolve_crack_strips = false;
    const Mesh m = build_mesh(s, o);
    const ForwardSolver fw(m, s, 0.0);
    const ForwardSolver hw(m, s, 0.0, {false, true});
    const auto ud = fw.solve_continuous({1.0, 0.0});
    const auto uh = hw.solve_continuous({1.0, 0.0});
    for (std::size_t i = 0; i < ud.size(); ++i) CHECK(std::abs(ud[i] - uh[i]) < 1e-14);
}

TEST_CASE("electrode frames are reciprocal and telescoping") {
    const Scene s = with_crack_thickness(builtin_model(1), 5e-4);
    MeshOptions o;
    const Mesh m = build_mesh(s, o);
    for (const double f : {0.0, 1e4, 8e5}) {
        const ForwardSolver fw(m, s, 2.0 * kPi * f, {true, false});
        const Frame fr = fw.measure_frame();
        const double vmax = frame_max(fr);
        CHECK(vmax > 0.0);
        CHECK(reciprocity_defect(fr) < 1e-8 * vmax);
        CHECK(telescope_defect(fr) < 1e-12 * vmax);
        for (int j = 0; j < kNumElectrodes; ++j) {
            double rowmax = 0.0;
            for (int k = 0; k < kNumElectrodes; ++k)
                rowmax = std::max(rowmax, std::abs(fr.v[j][k]));
            CHECK(std::abs(fr.v[j][j]) == doctest::Approx(rowmax));
            CHECK(fr.v[j][j].real() < 0.0);
        }
    }
}

TEST_CASE("pair drives demand shunted electrodes") {
    Scene s;
    MeshOptions o;
    o.target_h = s.domain_radius / 12.0;
    const Mesh m = build_mesh(s, o);
    const ForwardSolver fw(m, s, 0.0);
    CHECK_THROWS_AS(fw.solve_pair(0), BadConfig);
    CHECK_THROWS_AS(fw.interface_flux(std::vector<Complex>(m.n_nodes()), 0), MissingFluxData);
}
