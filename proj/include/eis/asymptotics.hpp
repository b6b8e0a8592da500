#pragma once

#include <vector>

#include "eis/scene.hpp"

namespace eis {

// Free-space log potential 1/(2 pi) ln|x| and its gradient.
double log_potential(const Vec2& x);
Vec2 grad_log_potential(const Vec2& x);

// Trace integral operator on a centered circle applied to uniformly sampled
// rim data. The circle collapses its kernel to the constant 1/(4 pi R), so
// the image is the constant mean(w)/2 regardless of the radius: constants map
// to half themselves, mean-free data to zero.
std::vector<Complex> disk_trace_operator(const std::vector<Complex>& w);

struct CVec2 {
    Complex x, y;
};

// Thin-strip polarization applied to the drive direction:
//   A(lambda) a = 2 (1 - 1/lambda)(a . nu) nu + 2 (lambda - 1)(a . tau) tau.
CVec2 crack_polarization_apply(Complex lambda, const Vec2& tau, const Vec2& a);

// First-order rim signature of thin strips and bar disks under the smooth
// drive g = a . nu, normalized to a unit background:
//   Phi(x) = 1/(2 pi) sum_k delta_k int_Lk (A_k a).(x-x')/|x-x'|^2 ds'
//          + sum_b r_b^2/(2 lambda_d) (a.(x-z_b))/|x-z_b|^2.
// Matches -1/2 gamma_b (u_defect - u_homog) on the rim to leading order.
std::vector<Complex> strip_signature(const std::vector<Crack>& cracks,
                                     const std::vector<Bar>& bars, Complex lambda_c,
                                     Complex lambda_d, const Vec2& a,
                                     const std::vector<Vec2>& pts);

// Vanishing-thickness limit at fixed contact parameter c_k = 2 delta_k /
// lambda: the crack kernel becomes -c_k (a.nu') nu'.(x-x')/|x-x'|^2.
std::vector<Complex> contact_signature(const std::vector<Crack>& cracks,
                                       const std::vector<Bar>& bars,
                                       const std::vector<Complex>& contact,
                                       Complex lambda_d, const Vec2& a,
                                       const std::vector<Vec2>& pts);

// Scene-level wrappers deriving the contrast scalars at omega.
std::vector<Complex> strip_signature(const Scene&, double omega, const Vec2& a,
                                     const std::vector<Vec2>& pts);
std::vector<Complex> contact_signature(const Scene&, double omega, const Vec2& a,
                                       const std::vector<Vec2>& pts);

// Rational boundary model
//   G(X) = sum_k c_k log((X - q_k)/(X - p_k)) + sum_b d_b/(X - z_b);
// Re G on the rim reproduces one real channel of the signature. dG has
// simple poles of residue +-c_k at q_k/p_k and double poles at z_b.
struct MeromorphicModel {
    struct CrackTerm {
        Complex p, q, c;
    };
    struct BarTerm {
        Complex z, d;
    };
    std::vector<CrackTerm> cracks;
    std::vector<BarTerm> bars;

    Complex evaluate(Complex X) const;    // OnBranchCut / AtPole near singular sets
    Complex derivative(Complex X) const;  // AtPole near p, q, z
};

// Model of the channel picked by real_channel (true: Re of the signature,
// false: Im). Cracks must be straight segments.
MeromorphicModel model_from_terms(const std::vector<Crack>& cracks, const std::vector<Bar>& bars,
                                  Complex lambda_c, Complex lambda_d, const Vec2& a,
                                  bool real_channel);
MeromorphicModel model_from_scene(const Scene&, double omega, const Vec2& a, bool real_channel);

// One real data channel sampled at uniformly spaced rim angles.
struct BoundarySamples {
    double radius = 0.0;
    std::vector<double> theta;
    std::vector<double> values;
};

// Scaled harmonic moments m_n = -n (alpha_n + i beta_n), n = 1..count, from
// the cos/sin transform of the samples; these coincide with the power sums
//   m_n = sum_i a_i (xi_i/R)^n + sum_b b_b n (z_b/R)^(n-1)
// of the model poles. Throws NonUniformSampling / CoincidentPoints.
std::vector<Complex> harmonic_moments(const BoundarySamples& s, int count);

// Prony-type recovery of the model from one sampled channel: Hankel least
// squares for the annihilating polynomial (4(2nc+2nb) moments), companion
// eigenvalues, double roots averaged into bar centers, strengths by least
// squares, crack endpoints paired by strength cancellation. Throws
// RankDeficient / PoleOutsideCircle on unusable data.
MeromorphicModel recover_terms(const BoundarySamples& s, int n_cracks, int n_bars);

}  // namespace eis
