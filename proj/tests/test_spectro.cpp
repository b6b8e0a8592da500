#include <cmath>

#include "doctest.h"
#include "eis/errors.hpp"
#include "eis/spectro.hpp"

using namespace eis;

namespace {

const Scene kTable = {};  // built-in material table

double w(double hz) { return 2.0 * kPi * hz; }

bool close(Complex a, Complex b, double rel) {
    return std::abs(a - b) <= rel * std::max(1e-300, std::abs(b));
}

}  // namespace

TEST_CASE("crack contrast scalar against precomputed values") {
    const Complex l8 = lambda_c(kTable.crack_material, kTable.background, w(8e5));
    CHECK(close(l8, {1.652830511975e-3, 3.713234338006e-3}, 1e-9));
    CHECK(std::abs(l8) == doctest::Approx(4.064475113746e-3).epsilon(1e-9));
    const Complex l10 = lambda_c(kTable.crack_material, kTable.background, w(1e6));
    CHECK(std::abs(l10) == doctest::Approx(4.859810618419e-3).epsilon(1e-9));
}

TEST_CASE("bar contrast scalar against precomputed values") {
    const Complex l0 = lambda_d(kTable.bar_material, kTable.background, 0.0);
    CHECK(l0.real() == doctest::Approx(0.500010000100001).epsilon(1e-12));
    CHECK(l0.imag() == 0.0);
    const Complex l8 = lambda_d(kTable.bar_material, kTable.background, w(8e5));
    CHECK(close(l8, {0.5000098041819968, 0.000444858286102972}, 1e-9));
    const double m10 = std::abs(lambda_d(kTable.bar_material, kTable.background, w(1e6)));
    CHECK(m10 > 0.4);
    CHECK(m10 < 0.6);
    CHECK_THROWS_AS(lambda_d(kTable.background, kTable.background, 0.0), DegenerateContrast);
}

TEST_CASE("crack contrast magnitude grows with frequency") {
    const double freqs[] = {10.0, 100.0, 1e4, 2.5e5, 8e5, 1e6};
    double prev = 0.0;
    for (const double f : freqs) {
        const double mag = std::abs(lambda_c(kTable.crack_material, kTable.background, w(f)));
        CHECK(mag > prev);
        prev = mag;
    }
}

TEST_CASE("regime classification over the standard frequency ladder") {
    const double freqs[] = {10.0, 100.0, 1e4, 2.5e5, 8e5, 1e6};
    const Regime want[] = {Regime::Low,  Regime::Low,  Regime::Low,
                           Regime::High, Regime::High, Regime::High};
    for (const double delta : {5e-5, 2.5e-5})
        for (int i = 0; i < 6; ++i) {
            const Regime got =
                classify_regime(delta, kTable.crack_material, kTable.background, w(freqs[i]));
            CHECK(regime_name(got) == regime_name(want[i]));
        }
    // beta = delta/|lambda| far out of range drops to Intermediate.
    const Regime odd = classify_regime(1e2, kTable.crack_material, kTable.background, 0.0);
    CHECK(regime_name(odd) == "Intermediate");
}

TEST_CASE("crack term coefficients, static and 800 kHz") {
    Crack crack;
    crack.polyline = {{0.0, 0.0}, {0.01, 0.0}};  // tangent (1,0), normal (0,1)
    crack.half_thickness = 5e-5;

    const CrackCoefficients tang = crack_coefficients(crack, {1.0, 0.0}, {1e-6, 0.0});
    CHECK(close(tang.c_re, {1.5915478393695225e-05, 0.0}, 1e-12));
    CHECK(std::abs(tang.c_im) < 1e-300);

    const CrackCoefficients norm = crack_coefficients(crack, {0.0, 1.0}, {1e-6, 0.0});
    CHECK(close(norm.c_re, {0.0, 15.915478393695224}, 1e-12));

    const Complex l8 = lambda_c(kTable.crack_material, kTable.background, w(8e5));
    const Vec2 a{std::cos(kPi / 6.0), std::sin(kPi / 6.0)};
    const CrackCoefficients ac = crack_coefficients(crack, a, l8);
    CHECK(close(ac.c_re, {1.3760441055032639e-05, 0.0007882190556736404}, 1e-9));
    CHECK(close(ac.c_im, {-5.118033465037498e-08, -0.0017886837288919161}, 1e-9));

    Crack bent = crack;
    bent.polyline.push_back({0.02, 0.01});
    CHECK_THROWS_AS(crack_coefficients(bent, {1.0, 0.0}, {1e-6, 0.0}), NotASegment);
    CHECK_THROWS_AS(crack_coefficients(crack, {1.0, 0.0}, {0.0, 0.0}), ZeroLambda);
}

TEST_CASE("bar term coefficients, static and 800 kHz") {
    const Bar bar{{0.02, -0.01}, 0.015};
    const BarCoefficients st = bar_coefficients(bar, {1.0, 0.0}, {0.5, 0.0});
    CHECK(close(st.d_re, {0.000225, 0.0}, 1e-12));
    CHECK(std::abs(st.d_im) < 1e-300);

    const Complex l8 = lambda_d(kTable.bar_material, kTable.background, w(8e5));
    const Vec2 a{std::cos(kPi / 6.0), std::sin(kPi / 6.0)};
    const BarCoefficients ac = bar_coefficients(bar, a, l8);
    CHECK(close(ac.d_re, {0.00019485174088688638, 0.00011249770505311105}, 1e-9));
    CHECK(close(ac.d_im, {-1.733594236955598e-07, -1.0008910993718983e-07}, 1e-9));
}
