#pragma once

#include <vector>

#include "eis/forward.hpp"
#include "eis/mesh.hpp"
#include "eis/scene.hpp"

namespace eis {

// Sensitivity of the 256 electrode voltage differences to per-triangle
// admittivity changes, assembled from the sixteen unit-conductivity
// injections: row 16*j + k holds area(T_p) grad U_j . grad U_k per column p.
struct SensitivityMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

SensitivityMatrix sensitivity_matrix(const Mesh& mesh);

struct AdmittivityImage {
    double frequency = 0.0;  // Hz
    double alpha = 0.0;      // absolute Tikhonov weight applied (0 for TSVD)
    std::vector<double> delta_sigma;    // per triangle, S/m
    std::vector<double> delta_epsilon;  // per triangle, F/m
};

struct ReconstructionOptions {
    double alpha_rel = 1e-4;  // alpha = alpha_rel * sigma_max(S)^2
    bool use_tsvd = false;    // truncated SVD instead of Tikhonov
    int tsvd_rank = 48;
};

// Regularized difference image from a measured frame and its defect-free
// reference at the same frequency: minimizes
//   |S dgamma - (frame - reference)|^2 + alpha |dgamma|^2
// over complex per-triangle dgamma and splits delta_sigma = Re(dgamma),
// delta_epsilon = Im(dgamma)/omega (all-zero at omega = 0). Throws
// ShapeMismatch / NonPositiveAlpha / BadConfig on inconsistent inputs.
AdmittivityImage reconstruct_frame(const SensitivityMatrix& S, const Frame& frame,
                                   const Frame& reference,
                                   const ReconstructionOptions& opts = {});

struct SweepOptions {
    ReconstructionOptions recon;
    // When set, the sensitivity matrix is assembled on this (typically
    // coarser) mesh and images live on its triangles; electrode layouts of
    // both meshes must share the domain radius.
    const Mesh* inverse_mesh = nullptr;
};

// Measures defect and defect-free frames on the mesh at every frequency and
// reconstructs one image per frequency, in input order.
std::vector<AdmittivityImage> sweep(const Scene& scene, const Mesh& mesh,
                                    const std::vector<double>& frequencies_hz,
                                    const SweepOptions& opts = {});

// Per-defect contrast-to-background scores of the delta_sigma channel. Each
// defect owns the triangles within two median edge lengths of its hull that
// belong to no other defect's dilation; over that set cracks average the
// negative part of delta_sigma and bars the positive part (insulators darken,
// conductors brighten). Both are divided by the median |delta_sigma| over the
// triangles outside every dilated hull.
struct VisibilityScores {
    std::vector<double> crack;
    std::vector<double> bar;
    double background_median = 0.0;
};

VisibilityScores visibility(const AdmittivityImage& image, const Scene& scene, const Mesh& mesh);

}  // namespace eis
