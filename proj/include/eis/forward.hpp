#pragma once

#include <memory>
#include <vector>

#include "eis/mesh.hpp"
#include "eis/scene.hpp"

namespace eis {

// One multi-electrode measurement at a single frequency:
// v[j][k] = u_j(E_k) - u_j(E_{k+1}) for the pair drive into (E_j, E_{j+1}).
struct Frame {
    double frequency = 0.0;
    std::vector<std::vector<Complex>> v;
};

double reciprocity_defect(const Frame& f);  // max |v[j][k] - v[k][j]|
double telescope_defect(const Frame& f);    // max_j |sum_k v[j][k]|
double frame_max(const Frame& f);           // max |v[j][k]|

struct ForwardOptions {
    // Merge each electrode arc into one dof (ideal shunt). Required for
    // pair drives and frames; leave off for smooth rim drives.
    bool shunt_electrodes = false;
    // Solve with the background material everywhere and all crack interfaces
    // closed; used for same-mesh defect-free references.
    bool homogenize = false;
};

// P1 FEM operator for -div(gamma grad u) with Neumann drive, assembled and
// factorized once per frequency. Crack interfaces (when the mesh carries
// them) couple through beta [u][v] with beta = gamma_b / c, c = 2 delta /
// lambda_c(omega); |c| below 1e-10 R collapses to node merging. The nullspace
// is fixed by pinning the node nearest the center; returned solutions are
// shifted to arclength-zero-mean on the rim.
class ForwardSolver {
  public:
    ForwardSolver(const Mesh& mesh, const Scene& scene, double omega,
                  const ForwardOptions& opts = {});
    ~ForwardSolver();
    ForwardSolver(ForwardSolver&&) noexcept;

    // Nodal solution, one value per mesh node, for the +1/-1 pair injection
    // into electrodes (j, j+1 mod 16). Requires shunt_electrodes.
    std::vector<Complex> solve_pair(int j) const;

    // Nodal solution for the smooth rim current density g = a . nu.
    std::vector<Complex> solve_continuous(const Vec2& a) const;

    Frame measure_frame() const;

    // One-sided flux gamma du/dnu on the plus side of interface chain k, one
    // value per chain segment. Throws MissingFluxData without interfaces.
    std::vector<Complex> interface_flux(const std::vector<Complex>& u, int chain) const;

    const Mesh& mesh() const { return mesh_; }
    double omega() const { return omega_; }
    Complex gamma_background() const;

  private:
    struct Impl;
    std::vector<Complex> solve_rhs(const std::vector<Complex>& rhs) const;

    const Mesh& mesh_;
    Scene scene_;
    double omega_ = 0.0;
    ForwardOptions opts_;
    std::unique_ptr<Impl> impl_;
};

// Trace at the rim nodes in boundary_loop order.
std::vector<Complex> rim_trace(const Mesh& mesh, const std::vector<Complex>& u);

// Rim node angles in [0, 2 pi), boundary_loop order.
std::vector<double> rim_angles(const Mesh& mesh);

// Normalized defect signature on the rim: -1/2 gamma_b (u_defect - u_homog),
// arclength mean removed; both solutions must live on the same mesh.
std::vector<Complex> boundary_perturbation(const Mesh& mesh, const std::vector<Complex>& u_defect,
                                           const std::vector<Complex>& u_homog, Complex gamma_b);

}  // namespace eis
