#include "eis/reconstruct.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "eis/errors.hpp"

using namespace eis;

namespace {

Mesh disk_mesh(double h) {
    Scene bg;
    MeshOptions mo;
    mo.target_h = h;
    return build_mesh(bg, mo);
}

Frame constant_frame(double freq, Complex base) {
    Frame f;
    f.frequency = freq;
    f.v.assign(kNumElectrodes, std::vector<Complex>(kNumElectrodes, base));
    return f;
}

// Frames whose difference equals the given 256-vector, row 16*j+k.
std::pair<Frame, Frame> frames_with_difference(double freq, const Eigen::VectorXcd& rhs) {
    Frame ref = constant_frame(freq, Complex{0.1, -0.05});
    Frame f = ref;
    for (int j = 0; j < kNumElectrodes; ++j)
        for (int k = 0; k < kNumElectrodes; ++k) f.v[j][k] += rhs(j * kNumElectrodes + k);
    return {f, ref};
}

double image_norm(const AdmittivityImage& img) {
    double acc = 0.0;
    for (double v : img.delta_sigma) acc += v * v;
    for (double v : img.delta_epsilon) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("sensitivity matrix is symmetric and carries the injection energy") {
    const Mesh mesh = disk_mesh(0.1 / 12.0);
    const SensitivityMatrix S = sensitivity_matrix(mesh);
    REQUIRE(S.rows == 256);
    REQUIRE(S.cols == mesh.n_tris());
    for (double v : S.a) CHECK(std::isfinite(v));

    // Row (j,k) equals row (k,j) exactly.
    for (int j = 0; j < kNumElectrodes; ++j)
        for (int k = j + 1; k < kNumElectrodes; ++k)
            for (int t = 0; t < S.cols; t += 17)
                CHECK(S.at(j * 16 + k, t) == S.at(k * 16 + j, t));

    // Row sums of the diagonal pairs reproduce the dissipated power of the
    // unit-conductivity injection, which the shunt model reads off as the
    // (negative) self voltage.
    Scene unit;
    unit.background = Material{1.0, 0.0};
    ForwardOptions fo;
    fo.shunt_electrodes = true;
    fo.homogenize = true;
    ForwardSolver solver(mesh, unit, 0.0, fo);
    const Frame frame = solver.measure_frame();
    std::vector<double> power(kNumElectrodes);
    for (int j = 0; j < kNumElectrodes; ++j) {
        double acc = 0.0;
        for (int t = 0; t < S.cols; ++t) acc += S.at(j * 16 + j, t);
        power[j] = acc;
        const double expect = -frame.v[j][j].real();
        CHECK(std::abs(acc - expect) <= 1e-10 * std::abs(expect));
    }
    // Rotational layout keeps the injection powers close to one another.
    const auto [lo, hi] = std::minmax_element(power.begin(), power.end());
    CHECK(*hi - *lo <= 0.05 * *hi);
}

TEST_CASE("reconstruction basics: zero data, linearity, damping, guards") {
    const Mesh mesh = disk_mesh(0.1 / 10.0);
    const SensitivityMatrix S = sensitivity_matrix(mesh);

    const Frame ref = constant_frame(100.0, Complex{0.2, 0.01});
    const AdmittivityImage zero = reconstruct_frame(S, ref, ref);
    CHECK(image_norm(zero) == 0.0);
    CHECK(zero.frequency == 100.0);
    CHECK(zero.alpha > 0.0);

    Eigen::VectorXcd rhs(S.rows);
    for (int r = 0; r < S.rows; ++r)
        rhs(r) = Complex{std::sin(0.37 * r + 0.2), std::cos(0.11 * r)} * 1e-4;
    auto [f1, r1] = frames_with_difference(100.0, rhs);
    auto [f2, r2] = frames_with_difference(100.0, (2.0 * rhs).eval());
    const AdmittivityImage img1 = reconstruct_frame(S, f1, r1);
    const AdmittivityImage img2 = reconstruct_frame(S, f2, r2);
    double s_peak = 0.0, e_peak = 0.0;
    for (int t = 0; t < S.cols; ++t) {
        s_peak = std::max(s_peak, std::abs(img1.delta_sigma[t]));
        e_peak = std::max(e_peak, std::abs(img1.delta_epsilon[t]));
    }
    for (int t = 0; t < S.cols; ++t) {
        CHECK(std::abs(img2.delta_sigma[t] - 2.0 * img1.delta_sigma[t]) <= 1e-10 * s_peak);
        CHECK(std::abs(img2.delta_epsilon[t] - 2.0 * img1.delta_epsilon[t]) <= 1e-10 * e_peak);
    }

    ReconstructionOptions heavy;
    heavy.alpha_rel = 1e9;
    const AdmittivityImage damped = reconstruct_frame(S, f1, r1, heavy);
    CHECK(image_norm(damped) <= 1e-8 * image_norm(img1));

    ReconstructionOptions bad;
    bad.alpha_rel = 0.0;
    CHECK_THROWS_AS(reconstruct_frame(S, f1, r1, bad), NonPositiveAlpha);
    ReconstructionOptions badrank;
    badrank.use_tsvd = true;
    badrank.tsvd_rank = 0;
    CHECK_THROWS_AS(reconstruct_frame(S, f1, r1, badrank), BadConfig);

    Frame mism = f1;
    mism.frequency = 200.0;
    CHECK_THROWS_AS(reconstruct_frame(S, mism, r1), BadConfig);
    Frame shape = f1;
    shape.v.pop_back();
    CHECK_THROWS_AS(reconstruct_frame(S, shape, r1), ShapeMismatch);
    SensitivityMatrix Sbad = S;
    Sbad.rows = 255;
    CHECK_THROWS_AS(reconstruct_frame(Sbad, f1, r1), ShapeMismatch);

    const AdmittivityImage dc = reconstruct_frame(S, constant_frame(0.0, Complex{0.3, 0.0}),
                                                  constant_frame(0.0, Complex{0.2, 0.0}));
    for (double v : dc.delta_epsilon) CHECK(v == 0.0);  // omega = 0 convention
}

TEST_CASE("well conditioned row space data is recovered sharply") {
    const Mesh mesh = disk_mesh(0.1 / 10.0);
    const SensitivityMatrix S = sensitivity_matrix(mesh);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Sm(
        S.a.data(), S.rows, S.cols);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sm * Sm.transpose());  // ascending
    const int n = S.rows;

    // Target image built from the three strongest left singular directions.
    Eigen::VectorXd y = eig.eigenvectors().col(n - 1) + 0.5 * eig.eigenvectors().col(n - 2) -
                        0.25 * eig.eigenvectors().col(n - 3);
    const Eigen::VectorXd target = Sm.transpose() * y;
    const Eigen::VectorXd data = Sm * target;
    const double omega = 2.0 * kPi * 1000.0;
    Eigen::VectorXcd rhs(n);
    for (int r = 0; r < n; ++r) rhs(r) = Complex{data(r), 0.5 * omega * data(r)};
    auto [f, ref] = frames_with_difference(1000.0, rhs);

    ReconstructionOptions tiny;
    tiny.alpha_rel = 1e-12;
    const AdmittivityImage img = reconstruct_frame(S, f, ref, tiny);
    double worst = 0.0, scale = 0.0;
    for (int t = 0; t < S.cols; ++t) {
        scale = std::max(scale, std::abs(target(t)));
        worst = std::max(worst, std::abs(img.delta_sigma[t] - target(t)));
        worst = std::max(worst, std::abs(omega * img.delta_epsilon[t] - 0.5 * omega * target(t)));
    }
    CHECK(worst <= 1e-6 * scale);

    ReconstructionOptions tsvd;
    tsvd.use_tsvd = true;
    tsvd.tsvd_rank = 16;  // target lives in the top three directions
    const AdmittivityImage imgs = reconstruct_frame(S, f, ref, tsvd);
    double worst2 = 0.0;
    for (int t = 0; t < S.cols; ++t)
        worst2 = std::max(worst2, std::abs(imgs.delta_sigma[t] - target(t)));
    CHECK(worst2 <= 1e-8 * scale);
}

TEST_CASE("visibility scores defects through the dilated neighborhoods") {
    const Scene scene = builtin_model(1);
    MeshOptions mo;
    mo.target_h = 0.1 / 16.0;
    mo.resolve_crack_strips = false;
    const Mesh mesh = build_mesh(scene, mo);

    AdmittivityImage zero;
    zero.delta_sigma.assign(mesh.n_tris(), 0.0);
    zero.delta_epsilon.assign(mesh.n_tris(), 0.0);
    const VisibilityScores z = visibility(zero, scene, mesh);
    REQUIRE(z.crack.size() == 2);
    REQUIRE(z.bar.size() == 2);
    for (double v : z.crack) CHECK(v == 0.0);
    for (double v : z.bar) CHECK(v == 0.0);

    AdmittivityImage ind = zero;
    for (int t = 0; t < mesh.n_tris(); ++t) {
        if (norm(tri_centroid(mesh, t) - scene.bars[0].center) <= scene.bars[0].radius)
            ind.delta_sigma[t] = 1.0;
    }
    const VisibilityScores s = visibility(ind, scene, mesh);
    CHECK(s.bar[0] >= 5.0);
    CHECK(s.bar[1] == 0.0);
    CHECK(s.crack[0] == 0.0);
    CHECK(s.crack[1] == 0.0);

    // a conductive (positive) blob on a crack band is not crack evidence, and
    // an insulating (negative) band is not bar evidence
    AdmittivityImage band = zero;
    for (int t = 0; t < mesh.n_tris(); ++t) {
        if (point_polyline_dist(tri_centroid(mesh, t), scene.cracks[0].polyline) <= 0.005)
            band.delta_sigma[t] = -1.0;
    }
    const VisibilityScores sb = visibility(band, scene, mesh);
    CHECK(sb.crack[0] >= 5.0);
    CHECK(sb.crack[1] == 0.0);
    CHECK(sb.bar[0] == 0.0);
    CHECK(sb.bar[1] == 0.0);
    for (double& v : band.delta_sigma) v = -v;
    const VisibilityScores sp = visibility(band, scene, mesh);
    CHECK(sp.crack[0] == 0.0);
    CHECK(sp.crack[1] == 0.0);

    AdmittivityImage bad = zero;
    bad.delta_sigma.pop_back();
    CHECK_THROWS_AS(visibility(bad, scene, mesh), ShapeMismatch);
}

TEST_CASE("sweep validates input and composes reconstruct_frame") {
    Scene scene;
    scene.bars = {{{0.0, 0.0}, 0.015}};
    validate_scene(scene);
    MeshOptions mo;
    mo.target_h = 0.1 / 10.0;
    const Mesh mesh = build_mesh(scene, mo);

    CHECK_THROWS_AS(sweep(scene, mesh, {}), BadConfig);
    CHECK_THROWS_AS(sweep(scene, mesh, {-1.0}), BadConfig);

    const std::vector<double> freqs{1e4};
    const auto images = sweep(scene, mesh, freqs);
    REQUIRE(images.size() == 1);

    const SensitivityMatrix S = sensitivity_matrix(mesh);
    ForwardOptions measure;
    measure.shunt_electrodes = true;
    ForwardSolver defect(mesh, scene, 2.0 * kPi * 1e4, measure);
    ForwardOptions homog = measure;
    homog.homogenize = true;
    ForwardSolver reference(mesh, scene, 2.0 * kPi * 1e4, homog);
    const AdmittivityImage direct =
        reconstruct_frame(S, defect.measure_frame(), reference.measure_frame());
    REQUIRE(images[0].delta_sigma.size() == direct.delta_sigma.size());
    for (size_t t = 0; t < direct.delta_sigma.size(); ++t) {
        CHECK(images[0].delta_sigma[t] == direct.delta_sigma[t]);
        CHECK(images[0].delta_epsilon[t] == direct.delta_epsilon[t]);
    }
}

TEST_CASE("high frequency image peaks inside a bar") {
    const Scene scene = builtin_model(1);
    MeshOptions data_mo;
    data_mo.resolve_crack_strips = false;
    const Mesh data_mesh = build_mesh(scene, data_mo);
    MeshOptions inv_mo;
    inv_mo.target_h = 0.1 / 10.0;
    const Mesh inverse_mesh = build_mesh(without_defects(scene), inv_mo);

    SweepOptions so;
    so.inverse_mesh = &inverse_mesh;
    const auto images = sweep(scene, data_mesh, {8e5}, so);
    REQUIRE(images.size() == 1);
    REQUIRE(images[0].delta_sigma.size() == static_cast<size_t>(inverse_mesh.n_tris()));

    int best = 0;
    for (int t = 1; t < inverse_mesh.n_tris(); ++t)
        if (std::abs(images[0].delta_sigma[t]) > std::abs(images[0].delta_sigma[best])) best = t;
    const Vec2 c = tri_centroid(inverse_mesh, best);
    const bool in_bar = norm(c - scene.bars[0].center) <= scene.bars[0].radius + 0.01 ||
                        norm(c - scene.bars[1].center) <= scene.bars[1].radius + 0.01;
    CHECK(in_bar);
}
