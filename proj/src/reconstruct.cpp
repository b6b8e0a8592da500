#include "eis/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "eis/errors.hpp"

namespace eis {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> as_eigen(const SensitivityMatrix& S) {
    return {S.a.data(), S.rows, S.cols};
}

Eigen::VectorXcd frame_difference(const SensitivityMatrix& S, const Frame& frame,
                                  const Frame& reference) {
    if (frame.v.size() != kNumElectrodes || reference.v.size() != kNumElectrodes)
        throw ShapeMismatch("frames must carry 16x16 voltage tables");
    for (int j = 0; j < kNumElectrodes; ++j) {
        if (frame.v[j].size() != kNumElectrodes || reference.v[j].size() != kNumElectrodes)
            throw ShapeMismatch("frames must carry 16x16 voltage tables");
    }
    if (frame.frequency != reference.frequency)
        throw BadConfig("frame and reference were taken at different frequencies");
    if (S.rows != kNumElectrodes * kNumElectrodes)
        throw ShapeMismatch("sensitivity matrix must have 256 rows");
    Eigen::VectorXcd b(S.rows);
    for (int j = 0; j < kNumElectrodes; ++j)
        for (int k = 0; k < kNumElectrodes; ++k)
            b(j * kNumElectrodes + k) = frame.v[j][k] - reference.v[j][k];
    return b;
}

}  // namespace

SensitivityMatrix sensitivity_matrix(const Mesh& mesh) {
    Scene unit;
    unit.domain_radius = mesh.domain_radius;
    unit.background = Material{1.0, 0.0};
    ForwardOptions fo;
    fo.shunt_electrodes = true;
    fo.homogenize = true;
    ForwardSolver solver(mesh, unit, 0.0, fo);

    const int nt = mesh.n_tris();
    // Per-triangle gradients of the sixteen injection potentials.
    std::vector<std::vector<Vec2>> grad(kNumElectrodes, std::vector<Vec2>(nt));
    for (int j = 0; j < kNumElectrodes; ++j) {
        const std::vector<Complex> u = solver.solve_pair(j);
        for (int t = 0; t < nt; ++t) {
            const MeshTri& tr = mesh.tris[t];
            const Vec2 p0 = mesh.nodes[tr.v[0]];
            const Vec2 p1 = mesh.nodes[tr.v[1]];
            const Vec2 p2 = mesh.nodes[tr.v[2]];
            const double area = 0.5 * cross(p1 - p0, p2 - p0);
            const Vec2 g[3] = {perp(p2 - p1) / (2.0 * area), perp(p0 - p2) / (2.0 * area),
                               perp(p1 - p0) / (2.0 * area)};
            Vec2 gu{0.0, 0.0};
            for (int a = 0; a < 3; ++a) gu += u[tr.v[a]].real() * g[a];
            grad[j][t] = gu;
        }
    }

    SensitivityMatrix S;
    S.rows = kNumElectrodes * kNumElectrodes;
    S.cols = nt;
    S.a.resize(static_cast<std::size_t>(S.rows) * nt);
    for (int j = 0; j < kNumElectrodes; ++j) {
        for (int k = 0; k < kNumElectrodes; ++k) {
            double* row = S.a.data() + static_cast<std::size_t>(j * kNumElectrodes + k) * nt;
            for (int t = 0; t < nt; ++t)
                row[t] = tri_area(mesh, t) * dot(grad[j][t], grad[k][t]);
        }
    }
    return S;
}

AdmittivityImage reconstruct_frame(const SensitivityMatrix& S, const Frame& frame,
                                   const Frame& reference, const ReconstructionOptions& opts) {
    const Eigen::VectorXcd b = frame_difference(S, frame, reference);
    const auto Sm = as_eigen(S);

    const Eigen::VectorXd br = b.real();
    const Eigen::VectorXd bi = b.imag();

    AdmittivityImage img;
    img.frequency = frame.frequency;
    Eigen::VectorXd xr, xi;
    if (opts.use_tsvd) {
        if (opts.tsvd_rank < 1) throw BadConfig("truncated SVD rank must be positive");
        Eigen::BDCSVD<Eigen::MatrixXd> svd(Sm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int rank = std::min<int>(opts.tsvd_rank, svd.singularValues().size());
        Eigen::VectorXd cr = svd.matrixU().leftCols(rank).transpose() * br;
        Eigen::VectorXd ci = svd.matrixU().leftCols(rank).transpose() * bi;
        for (int i = 0; i < rank; ++i) {
            const double sv = svd.singularValues()(i);
            if (sv <= 0.0) throw RankDeficient("sensitivity matrix rank below requested cut");
            cr(i) /= sv;
            ci(i) /= sv;
        }
        xr = svd.matrixV().leftCols(rank) * cr;
        xi = svd.matrixV().leftCols(rank) * ci;
    } else {
        if (!(opts.alpha_rel > 0.0))
            throw NonPositiveAlpha("relative regularization must be positive");
        const Eigen::MatrixXd gram = Sm * Sm.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const double smax2 = eig.eigenvalues().maxCoeff();
        const double alpha = opts.alpha_rel * smax2;
        img.alpha = alpha;
        Eigen::MatrixXd reg = gram;
        reg.diagonal().array() += alpha;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
        if (ldlt.info() != Eigen::Success)
            throw SingularSystem("regularized normal system failed to factorize");
        xr = Sm.transpose() * ldlt.solve(br);
        xi = Sm.transpose() * ldlt.solve(bi);
    }

    const double omega = 2.0 * kPi * frame.frequency;
    img.delta_sigma.resize(S.cols);
    img.delta_epsilon.assign(S.cols, 0.0);
    for (int t = 0; t < S.cols; ++t) {
        img.delta_sigma[t] = xr(t);
        if (omega > 0.0) img.delta_epsilon[t] = xi(t) / omega;
    }
    return img;
}

std::vector<AdmittivityImage> sweep(const Scene& scene, const Mesh& mesh,
                                    const std::vector<double>& frequencies_hz,
                                    const SweepOptions& opts) {
    if (frequencies_hz.empty()) throw BadConfig("frequency list is empty");
    for (double f : frequencies_hz)
        if (!(f >= 0.0)) throw BadConfig("frequencies must be nonnegative");

    const Mesh& inv = opts.inverse_mesh ? *opts.inverse_mesh : mesh;
    const SensitivityMatrix S = sensitivity_matrix(inv);

    std::vector<AdmittivityImage> images;
    images.reserve(frequencies_hz.size());
    ForwardOptions measure;
    measure.shunt_electrodes = true;
    for (double f : frequencies_hz) {
        const double omega = 2.0 * kPi * f;
        ForwardSolver defect(mesh, scene, omega, measure);
        ForwardOptions homog = measure;
        homog.homogenize = true;
        ForwardSolver reference(mesh, scene, omega, homog);
        const Frame frame = defect.measure_frame();
        const Frame ref = reference.measure_frame();
        images.push_back(reconstruct_frame(S, frame, ref, opts.recon));
    }
    return images;
}

VisibilityScores visibility(const AdmittivityImage& image, const Scene& scene, const Mesh& mesh) {
    if (static_cast<int>(image.delta_sigma.size()) != mesh.n_tris())
        throw ShapeMismatch("image triangle count differs from the mesh");
    const double dilate = 2.0 * median_edge_length(mesh);

    const int nt = mesh.n_tris();
    const int nc = static_cast<int>(scene.cracks.size());
    const int nb = static_cast<int>(scene.bars.size());
    std::vector<char> near_any(nt, 0);
    std::vector<std::vector<int>> crack_tris(nc), bar_tris(nb);
    // A triangle inside two defects' dilated hulls is attributable to neither;
    // it still leaves the background pool so it cannot skew the median.
    for (int t = 0; t < nt; ++t) {
        const Vec2 c = tri_centroid(mesh, t);
        int hits = 0;
        int crack_owner = -1, bar_owner = -1;
        for (int k = 0; k < nc; ++k) {
            const double d =
                point_polyline_dist(c, scene.cracks[k].polyline) - scene.cracks[k].half_thickness;
            if (d <= dilate) {
                ++hits;
                crack_owner = k;
            }
        }
        for (int b = 0; b < nb; ++b) {
            const double d = norm(c - scene.bars[b].center) - scene.bars[b].radius;
            if (d <= dilate) {
                ++hits;
                bar_owner = b;
            }
        }
        if (hits == 0) continue;
        near_any[t] = 1;
        if (hits > 1) continue;
        if (bar_owner >= 0)
            bar_tris[bar_owner].push_back(t);
        else
            crack_tris[crack_owner].push_back(t);
    }

    std::vector<double> bg;
    double peak = 0.0;
    for (int t = 0; t < nt; ++t) {
        const double v = std::abs(image.delta_sigma[t]);
        peak = std::max(peak, v);
        if (!near_any[t]) bg.push_back(v);
    }
    double med = 0.0;
    if (!bg.empty()) {
        std::sort(bg.begin(), bg.end());
        med = bg[bg.size() / 2];
    }
    VisibilityScores out;
    out.background_median = med;
    const double denom = std::max({med, 1e-30 * peak, 1e-300});

    // Cracks are insulating (they can only push delta_sigma down) and bars are
    // conducting (up), so each defect is scored on its own sign. Rectifying the
    // full magnitude would credit a crack for conductive sidelobes parked on top
    // of its band and vice versa.
    const auto mean_signed = [&](const std::vector<int>& tris, double sign) {
        if (tris.empty()) return 0.0;
        double acc = 0.0;
        for (int t : tris) acc += std::max(sign * image.delta_sigma[t], 0.0);
        return acc / static_cast<double>(tris.size());
    };
    for (int k = 0; k < nc; ++k) out.crack.push_back(mean_signed(crack_tris[k], -1.0) / denom);
    for (int b = 0; b < nb; ++b) out.bar.push_back(mean_signed(bar_tris[b], +1.0) / denom);
    return out;
}

}  // namespace eis
