#pragma once

#include <string>

#include "eis/scene.hpp"

namespace eis {

// Crack contrast: gamma_crack / gamma_background at angular frequency omega.
Complex lambda_c(const Material& crack, const Material& background, double omega);

// Bar contrast scalar entering the disk polarization strength:
//   ((s_d+s_b) + i w (e_d+e_b)) / (2 ((s_d-s_b) - i w (e_d-e_b))).
// Throws DegenerateContrast when bar and background materials coincide.
Complex lambda_d(const Material& bar, const Material& background, double omega);

enum class Regime { High, Low, Intermediate };

struct RegimeThresholds {
    double c0 = 1e-3;       // |lambda_c| >= c0  => High
    double beta_lo = 1e-3;  // Low requires beta = delta/|lambda_c| in [beta_lo, beta_hi]
    double beta_hi = 1e3;
};

Regime classify_regime(double crack_half_thickness, const Material& crack,
                       const Material& background, double omega,
                       const RegimeThresholds& thr = {});

std::string regime_name(Regime r);

// Coefficients of the boundary meromorphic representation, one crack term per
// straight crack (endpoints P -> Q), one bar term per bar:
//   G^re(X) = sum_k c_re_k log((X-Q_k)/(X-P_k)) + sum_k d_re_k/(X-Z_k)
// and the analogous G^im; Re G^re / Re G^im reproduce Re/Im of the boundary
// perturbation. Derivative residues: Res(dG^re, Q_k) = +c_re_k, at P_k: -c_re_k.
struct CrackCoefficients {
    Complex c_re;
    Complex c_im;
};
struct BarCoefficients {
    Complex d_re;
    Complex d_im;
};

// Crack must be a single straight segment (NotASegment otherwise); lambda
// must be nonzero (ZeroLambda). a is the unit drive direction of g = a.nu.
CrackCoefficients crack_coefficients(const Crack& crack, const Vec2& a, Complex lambda);

BarCoefficients bar_coefficients(const Bar& bar, const Vec2& a, Complex lambda);

}  // namespace eis
