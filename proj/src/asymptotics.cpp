#include "eis/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "eis/errors.hpp"
#include "eis/spectro.hpp"

namespace eis {

namespace {

struct GlRule {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes by Newton iteration on the recurrence; standard
// symmetric construction, deterministic.
GlRule make_gl_rule(int n) {
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

const GlRule& gl48() {
    static const GlRule rule = make_gl_rule(48);
    return rule;
}

// int_segment (w . (x - x'))/|x - x'|^2 ds' for a constant complex vector
// field w, by Gauss-Legendre quadrature.
Complex segment_kernel_integral(const Vec2& x, const Vec2& p0, const Vec2& p1, const CVec2& w) {
    const GlRule& gl = gl48();
    const double len = norm(p1 - p0);
    Complex acc{0.0, 0.0};
    for (size_t q = 0; q < gl.x.size(); ++q) {
        const double s = 0.5 * (gl.x[q] + 1.0);
        const Vec2 xp = p0 + s * (p1 - p0);
        const Vec2 d = x - xp;
        const double d2 = norm2(d);
        acc += gl.w[q] * (w.x * d.x + w.y * d.y) / d2;
    }
    return acc * (0.5 * len);
}

Complex bar_dipole_term(const Vec2& x, const Bar& bar, Complex lambda, const Vec2& a) {
    const Complex strength = bar.radius * bar.radius / (2.0 * lambda);
    const Vec2 d = x - bar.center;
    return strength * dot(a, d) / norm2(d);
}

double pole_tol(Complex X, Complex ref) { return 1e-12 * (std::abs(X) + std::abs(ref) + 1e-300); }

}  // namespace

double log_potential(const Vec2& x) { return std::log(norm(x)) / (2.0 * kPi); }

Vec2 grad_log_potential(const Vec2& x) { return x / (2.0 * kPi * norm2(x)); }

std::vector<Complex> disk_trace_operator(const std::vector<Complex>& w) {
    if (w.empty()) return {};
    Complex mean{0.0, 0.0};
    for (const Complex& v : w) mean += v;
    mean /= static_cast<double>(w.size());
    return std::vector<Complex>(w.size(), 0.5 * mean);
}

CVec2 crack_polarization_apply(Complex lambda, const Vec2& tau, const Vec2& a) {
    if (std::abs(lambda) == 0.0) throw ZeroLambda("polarization of a zero-contrast strip");
    const Vec2 nu = perp(tau);
    const Complex sn = 2.0 * (1.0 - 1.0 / lambda) * dot(a, nu);
    const Complex st = 2.0 * (lambda - 1.0) * dot(a, tau);
    return {sn * nu.x + st * tau.x, sn * nu.y + st * tau.y};
}

std::vector<Complex> strip_signature(const std::vector<Crack>& cracks,
                                     const std::vector<Bar>& bars, Complex lambda_c,
                                     Complex lambda_d, const Vec2& a,
                                     const std::vector<Vec2>& pts) {
    std::vector<Complex> out(pts.size(), Complex{0.0, 0.0});
    for (size_t i = 0; i < pts.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (const Crack& crack : cracks) {
            for (size_t s = 0; s + 1 < crack.polyline.size(); ++s) {
                const Vec2& p0 = crack.polyline[s];
                const Vec2& p1 = crack.polyline[s + 1];
                const Vec2 tau = normalized(p1 - p0);
                const CVec2 w = crack_polarization_apply(lambda_c, tau, a);
                acc += crack.half_thickness * segment_kernel_integral(pts[i], p0, p1, w) /
                       (2.0 * kPi);
            }
        }
        for (const Bar& bar : bars) acc += bar_dipole_term(pts[i], bar, lambda_d, a);
        out[i] = acc;
    }
    return out;
}

std::vector<Complex> contact_signature(const std::vector<Crack>& cracks,
                                       const std::vector<Bar>& bars,
                                       const std::vector<Complex>& contact, Complex lambda_d,
                                       const Vec2& a, const std::vector<Vec2>& pts) {
    if (contact.size() != cracks.size())
        throw ShapeMismatch("one contact parameter per crack expected");
    std::vector<Complex> out(pts.size(), Complex{0.0, 0.0});
    for (size_t i = 0; i < pts.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (size_t k = 0; k < cracks.size(); ++k) {
            const Crack& crack = cracks[k];
            for (size_t s = 0; s + 1 < crack.polyline.size(); ++s) {
                const Vec2& p0 = crack.polyline[s];
                const Vec2& p1 = crack.polyline[s + 1];
                const Vec2 nu = perp(normalized(p1 - p0));
                const Complex sn = -contact[k] * dot(a, nu);
                const CVec2 w{sn * nu.x, sn * nu.y};
                acc += segment_kernel_integral(pts[i], p0, p1, w) / (2.0 * kPi);
            }
        }
        for (const Bar& bar : bars) acc += bar_dipole_term(pts[i], bar, lambda_d, a);
        out[i] = acc;
    }
    return out;
}

std::vector<Complex> strip_signature(const Scene& scene, double omega, const Vec2& a,
                                     const std::vector<Vec2>& pts) {
    const Complex lc = lambda_c(scene.crack_material, scene.background, omega);
    const Complex ld =
        scene.bars.empty() ? Complex{1.0, 0.0}
                           : lambda_d(scene.bar_material, scene.background, omega);
    return strip_signature(scene.cracks, scene.bars, lc, ld, a, pts);
}

std::vector<Complex> contact_signature(const Scene& scene, double omega, const Vec2& a,
                                       const std::vector<Vec2>& pts) {
    const Complex lc = lambda_c(scene.crack_material, scene.background, omega);
    if (std::abs(lc) == 0.0) throw ZeroLambda("crack contrast vanishes");
    std::vector<Complex> contact(scene.cracks.size());
    for (size_t k = 0; k < scene.cracks.size(); ++k)
        contact[k] = 2.0 * scene.cracks[k].half_thickness / lc;
    const Complex ld =
        scene.bars.empty() ? Complex{1.0, 0.0}
                           : lambda_d(scene.bar_material, scene.background, omega);
    return contact_signature(scene.cracks, scene.bars, contact, ld, a, pts);
}

Complex MeromorphicModel::evaluate(Complex X) const {
    Complex acc{0.0, 0.0};
    for (const CrackTerm& t : cracks) {
        const Complex num = X - t.q;
        const Complex den = X - t.p;
        if (std::abs(num) < pole_tol(X, t.q) || std::abs(den) < pole_tol(X, t.p))
            throw AtPole("log endpoint hit");
        const Complex r = num / den;
        if (r.real() < 0.0 && std::abs(r.imag()) <= 1e-12 * std::abs(r))
            throw OnBranchCut("evaluation point on the segment between the log endpoints");
        acc += t.c * std::log(r);
    }
    for (const BarTerm& t : bars) {
        const Complex den = X - t.z;
        if (std::abs(den) < pole_tol(X, t.z)) throw AtPole("bar pole hit");
        acc += t.d / den;
    }
    return acc;
}

Complex MeromorphicModel::derivative(Complex X) const {
    Complex acc{0.0, 0.0};
    for (const CrackTerm& t : cracks) {
        const Complex dq = X - t.q;
        const Complex dp = X - t.p;
        if (std::abs(dq) < pole_tol(X, t.q) || std::abs(dp) < pole_tol(X, t.p))
            throw AtPole("log endpoint hit");
        acc += t.c * (1.0 / dq - 1.0 / dp);
    }
    for (const BarTerm& t : bars) {
        const Complex dz = X - t.z;
        if (std::abs(dz) < pole_tol(X, t.z)) throw AtPole("bar pole hit");
        acc -= t.d / (dz * dz);
    }
    return acc;
}

MeromorphicModel model_from_terms(const std::vector<Crack>& cracks, const std::vector<Bar>& bars,
                                  Complex lambda_c, Complex lambda_d, const Vec2& a,
                                  bool real_channel) {
    MeromorphicModel m;
    for (const Crack& crack : cracks) {
        const CrackCoefficients cc = crack_coefficients(crack, a, lambda_c);
        MeromorphicModel::CrackTerm t;
        t.p = to_complex(crack.polyline.front());
        t.q = to_complex(crack.polyline.back());
        t.c = real_channel ? cc.c_re : cc.c_im;
        m.cracks.push_back(t);
    }
    for (const Bar& bar : bars) {
        const BarCoefficients bc = bar_coefficients(bar, a, lambda_d);
        MeromorphicModel::BarTerm t;
        t.z = to_complex(bar.center);
        t.d = real_channel ? bc.d_re : bc.d_im;
        m.bars.push_back(t);
    }
    return m;
}

MeromorphicModel model_from_scene(const Scene& scene, double omega, const Vec2& a,
                                  bool real_channel) {
    const Complex lc = scene.cracks.empty()
                           ? Complex{1.0, 0.0}
                           : lambda_c(scene.crack_material, scene.background, omega);
    const Complex ld = scene.bars.empty()
                           ? Complex{1.0, 0.0}
                           : lambda_d(scene.bar_material, scene.background, omega);
    return model_from_terms(scene.cracks, scene.bars, lc, ld, a, real_channel);
}

std::vector<Complex> harmonic_moments(const BoundarySamples& s, int count) {
    const size_t n = s.theta.size();
    if (s.values.size() != n) throw ShapeMismatch("angle and value arrays differ in length");
    if (count < 1) throw BadConfig("moment count must be positive");
    if (s.radius <= 0.0) throw BadConfig("sample radius must be positive");
    if (n < 2 * static_cast<size_t>(count) + 2)
        throw BadConfig("need at least 2*(count+1) rim samples for " + std::to_string(count) +
                        " moments");
    const double step = 2.0 * kPi / static_cast<double>(n);
    for (size_t j = 0; j + 1 < n; ++j) {
        if (std::abs(s.theta[j + 1] - s.theta[j]) < 1e-12)
            throw CoincidentPoints("duplicate rim sample angle");
    }
    for (size_t j = 0; j < n; ++j) {
        const double expect = s.theta[0] + step * static_cast<double>(j);
        if (std::abs(s.theta[j] - expect) > 1e-9)
            throw NonUniformSampling("rim samples must be uniformly spaced in angle");
    }
    std::vector<Complex> m(count);
    for (int k = 1; k <= count; ++k) {
        double alpha = 0.0, beta = 0.0;
        for (size_t j = 0; j < n; ++j) {
            alpha += s.values[j] * std::cos(k * s.theta[j]);
            beta += s.values[j] * std::sin(k * s.theta[j]);
        }
        alpha *= 2.0 / static_cast<double>(n);
        beta *= 2.0 / static_cast<double>(n);
        m[k - 1] = -static_cast<double>(k) * Complex{alpha, beta};
    }
    return m;
}

namespace {

// Min-cost perfect matching of endpoint strengths, cost |a_i + a_j|; counts
// stay tiny so exhaustive recursion is fine.
void match_endpoints(const std::vector<Complex>& a, std::vector<char>& used,
                     std::vector<std::pair<int, int>>& cur, double cost,
                     std::vector<std::pair<int, int>>& best, double& best_cost) {
    int first = -1;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        if (!used[i]) {
            first = i;
            break;
        }
    }
    if (first < 0) {
        if (cost < best_cost) {
            best_cost = cost;
            best = cur;
        }
        return;
    }
    used[first] = 1;
    for (int j = first + 1; j < static_cast<int>(a.size()); ++j) {
        if (used[j]) continue;
        const double c = cost + std::abs(a[first] + a[j]);
        if (c >= best_cost) continue;
        used[j] = 1;
        cur.emplace_back(first, j);
        match_endpoints(a, used, cur, c, best, best_cost);
        cur.pop_back();
        used[j] = 0;
    }
    used[first] = 0;
}

bool complex_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

MeromorphicModel recover_terms(const BoundarySamples& s, int n_cracks, int n_bars) {
    if (n_cracks < 0 || n_bars < 0 || n_cracks + n_bars == 0)
        throw BadConfig("need at least one crack or bar term to recover");
    const int M = 2 * n_cracks + 2 * n_bars;
    const int K = 4 * M;
    const std::vector<Complex> mom = harmonic_moments(s, K);

    // Annihilating polynomial from the Hankel least squares system.
    Eigen::MatrixXcd H(K - M, M);
    Eigen::VectorXcd rhs(K - M);
    for (int r = 0; r < K - M; ++r) {
        for (int l = 0; l < M; ++l) H(r, l) = mom[r + l];
        rhs(r) = -mom[r + M];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(H);
    qr.setThreshold(1e-10);
    if (qr.rank() < M)
        throw RankDeficient("moment sequence supports only rank " + std::to_string(qr.rank()) +
                            " of " + std::to_string(M) + " requested pole terms");
    const Eigen::VectorXcd poly = qr.solve(rhs);

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(M, M);
    for (int i = 1; i < M; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < M; ++i) comp(i, M - 1) = -poly(i);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
    if (es.info() != Eigen::Success) throw NonConvergence("companion eigenvalue iteration");
    std::vector<Complex> roots(M);
    for (int i = 0; i < M; ++i) roots[i] = es.eigenvalues()(i);
    std::sort(roots.begin(), roots.end(), complex_less);
    for (const Complex& r : roots) {
        if (std::abs(r) > 1.0 + 1e-6)
            throw PoleOutsideCircle("recovered pole at radius " + std::to_string(std::abs(r)) +
                                    " of the rim radius");
    }

    // Bars appear as double roots: pick the tightest disjoint pairs.
    std::vector<char> taken(M, 0);
    std::vector<Complex> bar_pole(n_bars);
    if (n_bars > 0) {
        std::vector<std::tuple<double, int, int>> dist;
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) dist.emplace_back(std::abs(roots[i] - roots[j]), i, j);
        std::sort(dist.begin(), dist.end());
        int picked = 0;
        for (const auto& [d, i, j] : dist) {
            if (picked == n_bars) break;
            if (taken[i] || taken[j]) continue;
            taken[i] = taken[j] = 1;
            bar_pole[picked++] = 0.5 * (roots[i] + roots[j]);
        }
        if (picked < n_bars) throw RankDeficient("could not isolate the requested bar poles");
    }
    std::vector<Complex> crack_pole;
    for (int i = 0; i < M; ++i)
        if (!taken[i]) crack_pole.push_back(roots[i]);

    // Strengths by least squares against the moment sequence.
    const int nu = 2 * n_cracks + n_bars;
    Eigen::MatrixXcd S(K, nu);
    Eigen::VectorXcd b(K);
    for (int n = 1; n <= K; ++n) {
        for (int i = 0; i < 2 * n_cracks; ++i) S(n - 1, i) = std::pow(crack_pole[i], n);
        for (int j = 0; j < n_bars; ++j)
            S(n - 1, 2 * n_cracks + j) =
                static_cast<double>(n) * std::pow(bar_pole[j], n - 1);
        b(n - 1) = mom[n - 1];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> sqr(S);
    sqr.setThreshold(1e-10);
    if (sqr.rank() < nu) throw RankDeficient("pole strengths are not identifiable");
    const Eigen::VectorXcd strength = sqr.solve(b);

    MeromorphicModel out;
    const double R = s.radius;
    if (n_cracks > 0) {
        std::vector<Complex> a(2 * n_cracks);
        for (int i = 0; i < 2 * n_cracks; ++i) a[i] = strength(i);
        std::vector<char> used(a.size(), 0);
        std::vector<std::pair<int, int>> cur, best;
        double best_cost = std::numeric_limits<double>::infinity();
        match_endpoints(a, used, cur, 0.0, best, best_cost);
        for (const auto& [i, j] : best) {
            int pi = i, qi = j;
            if (!complex_less(crack_pole[pi], crack_pole[qi])) std::swap(pi, qi);
            MeromorphicModel::CrackTerm t;
            t.p = crack_pole[pi] * R;
            t.q = crack_pole[qi] * R;
            t.c = 0.5 * (a[qi] - a[pi]);
            out.cracks.push_back(t);
        }
        std::sort(out.cracks.begin(), out.cracks.end(),
                  [](const auto& l, const auto& r) { return complex_less(l.p, r.p); });
    }
    for (int j = 0; j < n_bars; ++j) {
        MeromorphicModel::BarTerm t;
        t.z = bar_pole[j] * R;
        t.d = -strength(2 * n_cracks + j) * R;
        out.bars.push_back(t);
    }
    std::sort(out.bars.begin(), out.bars.end(),
              [](const auto& l, const auto& r) { return complex_less(l.z, r.z); });
    return out;
}

}  // namespace eis
