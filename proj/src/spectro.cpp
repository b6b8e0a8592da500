#include "eis/spectro.hpp"

#include <cmath>

#include "eis/errors.hpp"

namespace eis {

Complex lambda_c(const Material& crack, const Material& background, double omega) {
    const Complex den = background.admittivity(omega);
    if (den == Complex{0.0, 0.0}) throw DegenerateContrast("background admittivity is zero");
    return crack.admittivity(omega) / den;
}

Complex lambda_d(const Material& bar, const Material& background, double omega) {
    const Complex den = 2.0 * Complex{bar.sigma - background.sigma,
                                      -omega * (bar.epsilon - background.epsilon)};
    if (std::abs(den) == 0.0)
        throw DegenerateContrast("bar and background materials coincide");
    const Complex num{bar.sigma + background.sigma, omega * (bar.epsilon + background.epsilon)};
    return num / den;
}

Regime classify_regime(double crack_half_thickness, const Material& crack,
                       const Material& background, double omega,
                       const RegimeThresholds& thr) {
    const double lc = std::abs(lambda_c(crack, background, omega));
    if (lc >= thr.c0) return Regime::High;
    if (lc == 0.0) return Regime::Intermediate;
    const double beta = crack_half_thickness / lc;
    if (beta >= thr.beta_lo && beta <= thr.beta_hi) return Regime::Low;
    return Regime::Intermediate;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::High: return "High";
        case Regime::Low: return "Low";
        default: return "Intermediate";
    }
}

CrackCoefficients crack_coefficients(const Crack& crack, const Vec2& a, Complex lambda) {
    if (crack.polyline.size() != 2)
        throw NotASegment("crack polyline has " + std::to_string(crack.polyline.size()) +
                          " points, need exactly 2");
    if (std::abs(lambda) == 0.0) throw ZeroLambda("lambda_c is zero");
    const Vec2 tau = normalized(crack.polyline[1] - crack.polyline[0]);
    const Vec2 nu = perp(tau);
    const double a_tau = dot(a, tau);
    const double a_nu = dot(a, nu);
    const Complex lm1 = lambda - 1.0;
    const Complex one_m_inv = 1.0 - 1.0 / lambda;
    const double scale = crack.half_thickness / kPi;
    // Sign fixed by exact transmission solutions; see tests.
    CrackCoefficients c;
    c.c_re = -scale * Complex{lm1.real() * a_tau, one_m_inv.real() * a_nu};
    c.c_im = -scale * Complex{lm1.imag() * a_tau, one_m_inv.imag() * a_nu};
    return c;
}

BarCoefficients bar_coefficients(const Bar& bar, const Vec2& a, Complex lambda) {
    if (std::abs(lambda) == 0.0) throw ZeroLambda("lambda_d is zero");
    const Complex strength = bar.radius * bar.radius / (2.0 * lambda);
    const Complex av = to_complex(a);
    return {strength.real() * av, strength.imag() * av};
}

}  // namespace eis
