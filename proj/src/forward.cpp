#include "eis/forward.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "eis/errors.hpp"
#include "eis/spectro.hpp"

namespace eis {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

std::vector<double> rim_weights(const Mesh& mesh) {
    const auto& loop = mesh.boundary_loop;
    const int n = static_cast<int>(loop.size());
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Vec2 a = mesh.nodes[loop[i]];
        const Vec2 b = mesh.nodes[loop[(i + 1) % n]];
        const double len = norm(b - a);
        w[i] += 0.5 * len;
        w[(i + 1) % n] += 0.5 * len;
    }
    return w;
}

}  // namespace

double reciprocity_defect(const Frame& f) {
    double d = 0.0;
    for (std::size_t j = 0; j < f.v.size(); ++j)
        for (std::size_t k = 0; k < f.v.size(); ++k)
            d = std::max(d, std::abs(f.v[j][k] - f.v[k][j]));
    return d;
}

double telescope_defect(const Frame& f) {
    double d = 0.0;
    for (const auto& row : f.v) {
        Complex s = 0.0;
        for (const Complex& x : row) s += x;
        d = std::max(d, std::abs(s));
    }
    return d;
}

double frame_max(const Frame& f) {
    double m = 0.0;
    for (const auto& row : f.v)
        for (const Complex& x : row) m = std::max(m, std::abs(x));
    return m;
}

struct ForwardSolver::Impl {
    std::vector<int> dof;  // node -> dof after merging
    int n_dofs = 0;
    int pin = -1;
    std::vector<int> electrode_dof;
    SpMat A;
    Eigen::SparseLU<SpMat> lu;
};

ForwardSolver::~ForwardSolver() = default;
ForwardSolver::ForwardSolver(ForwardSolver&&) noexcept = default;

Complex ForwardSolver::gamma_background() const { return scene_.background.admittivity(omega_); }

ForwardSolver::ForwardSolver(const Mesh& mesh, const Scene& scene, double omega,
                             const ForwardOptions& opts)
    : mesh_(mesh), scene_(scene), omega_(omega), opts_(opts), impl_(new Impl) {
    if (omega < 0.0) throw BadConfig("frequency must be nonnegative");
    const int n = mesh.n_nodes();
    std::vector<int> rep(n);
    std::iota(rep.begin(), rep.end(), 0);
    if (opts.shunt_electrodes)
        for (const auto& chain : mesh.electrodes)
            for (const int v : chain) rep[v] = chain.front();

    const Complex gb = gamma_background();
    std::vector<Complex> chain_beta(mesh.interfaces.size(), Complex{0.0, 0.0});
    std::vector<char> chain_merged(mesh.interfaces.size(), 0);
    for (std::size_t k = 0; k < mesh.interfaces.size(); ++k) {
        const CrackInterface& ci = mesh.interfaces[k];
        bool merge = opts.homogenize;
        if (!merge) {
            const Complex lam = lambda_c(scene.crack_material, scene.background, omega);
            if (std::abs(lam) == 0.0) throw ZeroLambda("crack contrast vanishes");
            const Complex c = 2.0 * scene.cracks[ci.crack].half_thickness / lam;
            if (std::abs(c) < 1e-10 * mesh.domain_radius) {
                merge = true;
            } else {
                chain_beta[k] = gb / c;
            }
        }
        if (merge) {
            chain_merged[k] = 1;
            for (std::size_t i = 0; i < ci.plus.size(); ++i) rep[ci.minus[i]] = ci.plus[i];
        }
    }
    for (int i = 0; i < n; ++i) rep[i] = rep[rep[i]];

    std::vector<int>& dof = impl_->dof;
    dof.assign(n, -1);
    int nd = 0;
    for (int i = 0; i < n; ++i)
        if (rep[i] == i) dof[i] = nd++;
    for (int i = 0; i < n; ++i) dof[i] = dof[rep[i]];
    impl_->n_dofs = nd;
    impl_->pin = dof[find_node_near(mesh, {0.0, 0.0})];

    const int pin = impl_->pin;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.n_tris()) * 9 + 16);
    const auto add = [&](int r, int c, Complex v) {
        if (r == pin || c == pin) return;
        trip.emplace_back(r, c, v);
    };
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const MeshTri& tr = mesh.tris[t];
        const Vec2 p0 = mesh.nodes[tr.v[0]];
        const Vec2 p1 = mesh.nodes[tr.v[1]];
        const Vec2 p2 = mesh.nodes[tr.v[2]];
        const double area = 0.5 * cross(p1 - p0, p2 - p0);
        const Vec2 g[3] = {perp(p2 - p1) / (2.0 * area), perp(p0 - p2) / (2.0 * area),
                           perp(p1 - p0) / (2.0 * area)};
        const Complex gamma =
            opts.homogenize ? gb : scene.material_of_region(tr.region).admittivity(omega);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                add(dof[tr.v[a]], dof[tr.v[b]], gamma * area * dot(g[a], g[b]));
    }
    for (std::size_t k = 0; k < mesh.interfaces.size(); ++k) {
        if (chain_merged[k]) continue;
        const CrackInterface& ci = mesh.interfaces[k];
        const Complex beta = chain_beta[k];
        const int m = static_cast<int>(ci.plus.size());
        const int segs = ci.closed ? m : m - 1;
        for (int i = 0; i < segs; ++i) {
            const int j = (i + 1) % m;
            const double len = norm(mesh.nodes[ci.plus[j]] - mesh.nodes[ci.plus[i]]);
            const double mass[2][2] = {{len / 3.0, len / 6.0}, {len / 6.0, len / 3.0}};
            const int pn[2] = {ci.plus[i], ci.plus[j]};
            const int mn[2] = {ci.minus[i], ci.minus[j]};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Complex w = beta * mass[a][b];
                    add(dof[pn[a]], dof[pn[b]], w);
                    add(dof[pn[a]], dof[mn[b]], -w);
                    add(dof[mn[a]], dof[pn[b]], -w);
                    add(dof[mn[a]], dof[mn[b]], w);
                }
        }
    }
    trip.emplace_back(pin, pin, Complex{1.0, 0.0});

    impl_->A.resize(nd, nd);
    impl_->A.setFromTriplets(trip.begin(), trip.end());
    impl_->A.makeCompressed();
    impl_->lu.analyzePattern(impl_->A);
    impl_->lu.factorize(impl_->A);
    if (impl_->lu.info() != Eigen::Success)
        throw SingularSystem("forward operator factorization failed");

    impl_->electrode_dof.clear();
    for (const auto& chain : mesh.electrodes) impl_->electrode_dof.push_back(dof[chain.front()]);
}

std::vector<Complex> ForwardSolver::solve_rhs(const std::vector<Complex>& rhs) const {
    Eigen::VectorXcd b(impl_->n_dofs);
    for (int i = 0; i < impl_->n_dofs; ++i) b[i] = rhs[i];
    b[impl_->pin] = 0.0;
    Eigen::VectorXcd x = impl_->lu.solve(b);
    const Eigen::VectorXcd r = b - impl_->A * x;
    x += impl_->lu.solve(r);  // one refinement step tightens reciprocity

    std::vector<Complex> u(mesh_.n_nodes());
    for (int i = 0; i < mesh_.n_nodes(); ++i) u[i] = x[impl_->dof[i]];
    const auto w = rim_weights(mesh_);
    Complex mean = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < mesh_.boundary_loop.size(); ++i) {
        mean += w[i] * u[mesh_.boundary_loop[i]];
        wsum += w[i];
    }
    mean /= wsum;
    for (Complex& v : u) v -= mean;
    return u;
}

std::vector<Complex> ForwardSolver::solve_pair(int j) const {
    if (!opts_.shunt_electrodes) throw BadConfig("pair drives need shunted electrodes");
    if (j < 0 || j >= kNumElectrodes) throw BadConfig("electrode index out of range");
    std::vector<Complex> rhs(impl_->n_dofs, Complex{0.0, 0.0});
    rhs[impl_->electrode_dof[j]] -= 1.0;
    rhs[impl_->electrode_dof[(j + 1) % kNumElectrodes]] += 1.0;
    return solve_rhs(rhs);
}

std::vector<Complex> ForwardSolver::solve_continuous(const Vec2& a) const {
    std::vector<Complex> rhs(impl_->n_dofs, Complex{0.0, 0.0});
    const auto& loop = mesh_.boundary_loop;
    const int n = static_cast<int>(loop.size());
    const double R = mesh_.domain_radius;
    for (int i = 0; i < n; ++i) {
        const int n1 = loop[i];
        const int n2 = loop[(i + 1) % n];
        const double len = norm(mesh_.nodes[n2] - mesh_.nodes[n1]);
        const double g1 = dot(a, mesh_.nodes[n1]) / R;
        const double g2 = dot(a, mesh_.nodes[n2]) / R;
        rhs[impl_->dof[n1]] += len / 6.0 * (2.0 * g1 + g2);
        rhs[impl_->dof[n2]] += len / 6.0 * (g1 + 2.0 * g2);
    }
    return solve_rhs(rhs);
}

Frame ForwardSolver::measure_frame() const {
    Frame f;
    f.frequency = omega_ / (2.0 * kPi);
    f.v.assign(kNumElectrodes, std::vector<Complex>(kNumElectrodes));
    for (int j = 0; j < kNumElectrodes; ++j) {
        const std::vector<Complex> u = solve_pair(j);
        for (int k = 0; k < kNumElectrodes; ++k) {
            const int a = mesh_.electrodes[k].front();
            const int b = mesh_.electrodes[(k + 1) % kNumElectrodes].front();
            f.v[j][k] = u[a] - u[b];
        }
    }
    return f;
}

std::vector<Complex> ForwardSolver::interface_flux(const std::vector<Complex>& u,
                                                   int chain) const {
    if (mesh_.interfaces.empty())
        throw MissingFluxData("mesh carries no crack interfaces");
    if (chain < 0 || chain >= static_cast<int>(mesh_.interfaces.size()))
        throw BadConfig("interface chain index out of range");
    std::unordered_map<long long, int> dir_edge;
    for (int t = 0; t < mesh_.n_tris(); ++t)
        for (int k = 0; k < 3; ++k) {
            const long long key = (static_cast<long long>(mesh_.tris[t].v[k]) << 32) |
                                  static_cast<unsigned>(mesh_.tris[t].v[(k + 1) % 3]);
            dir_edge[key] = t;
        }
    const CrackInterface& ci = mesh_.interfaces[chain];
    const int m = static_cast<int>(ci.plus.size());
    const int segs = ci.closed ? m : m - 1;
    std::vector<Complex> flux(segs);
    for (int i = 0; i < segs; ++i) {
        const int a = ci.plus[i];
        const int b = ci.plus[(i + 1) % m];
        const auto it = dir_edge.find((static_cast<long long>(a) << 32) | static_cast<unsigned>(b));
        if (it == dir_edge.end()) throw MissingFluxData("interface segment lost its plus triangle");
        const MeshTri& tr = mesh_.tris[it->second];
        const Vec2 p0 = mesh_.nodes[tr.v[0]];
        const Vec2 p1 = mesh_.nodes[tr.v[1]];
        const Vec2 p2 = mesh_.nodes[tr.v[2]];
        const double area = 0.5 * cross(p1 - p0, p2 - p0);
        const Vec2 g[3] = {perp(p2 - p1) / (2.0 * area), perp(p0 - p2) / (2.0 * area),
                           perp(p1 - p0) / (2.0 * area)};
        Complex gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            gx += u[tr.v[k]] * g[k].x;
            gy += u[tr.v[k]] * g[k].y;
        }
        const Complex gamma = opts_.homogenize
                                  ? gamma_background()
                                  : scene_.material_of_region(tr.region).admittivity(omega_);
        const Vec2 nu = perp(normalized(mesh_.nodes[b] - mesh_.nodes[a]));
        flux[i] = gamma * (gx * nu.x + gy * nu.y);
    }
    return flux;
}

std::vector<Complex> rim_trace(const Mesh& mesh, const std::vector<Complex>& u) {
    std::vector<Complex> tr;
    tr.reserve(mesh.boundary_loop.size());
    for (const int i : mesh.boundary_loop) tr.push_back(u[i]);
    return tr;
}

std::vector<double> rim_angles(const Mesh& mesh) {
    std::vector<double> th;
    th.reserve(mesh.boundary_loop.size());
    for (const int i : mesh.boundary_loop) {
        double a = std::atan2(mesh.nodes[i].y, mesh.nodes[i].x);
        if (a < -1e-12) a += 2.0 * kPi;
        th.push_back(a);
    }
    return th;
}

std::vector<Complex> boundary_perturbation(const Mesh& mesh, const std::vector<Complex>& u_defect,
                                           const std::vector<Complex>& u_homog, Complex gamma_b) {
    if (u_defect.size() != u_homog.size() || u_defect.size() < mesh.nodes.size())
        throw MeshMismatch("defect and reference solutions live on different meshes");
    const auto w = rim_weights(mesh);
    std::vector<Complex> out(mesh.boundary_loop.size());
    Complex mean = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < mesh.boundary_loop.size(); ++i) {
        const int node = mesh.boundary_loop[i];
        out[i] = -0.5 * gamma_b * (u_defect[node] - u_homog[node]);
        mean += w[i] * out[i];
        wsum += w[i];
    }
    mean /= wsum;
    for (Complex& v : out) v -= mean;
    return out;
}

}  // namespace eis
