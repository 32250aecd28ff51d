#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "obc/dynamics.hpp"
#include "obc/geometry.hpp"

namespace obc {

// Real polynomial with coefficients confined to [-alpha, alpha]; membership
// in the class F_alpha additionally requires constant term 1.
struct BoundedPoly {
    std::vector<double> coefficients; // constant term first
    double alpha = 0.0;

    int degree() const {
        int n = static_cast<int>(coefficients.size()) - 1;
        while (n > 0 && coefficients[static_cast<std::size_t>(n)] == 0.0) --n;
        return n;
    }

    bool in_f_alpha() const {
        if (coefficients.empty() || coefficients[0] != 1.0) return false;
        for (std::size_t i = 1; i < coefficients.size(); ++i)
            if (std::abs(coefficients[i]) > alpha) return false;
        return true;
    }

    double eval(double x) const {
        double v = 0.0;
        for (std::size_t i = coefficients.size(); i-- > 0;) v = v * x + coefficients[i];
        return v;
    }
};

// Derivative ladder p(x), p'(x), ..., p^{(j)}(x) by repeated synthetic
// division (Taylor coefficients times factorials).
inline std::vector<double> eval_derivatives(const BoundedPoly& p, double x, int up_to) {
    std::vector<double> taylor(static_cast<std::size_t>(up_to) + 1, 0.0);
    for (std::size_t i = p.coefficients.size(); i-- > 0;) {
        for (std::size_t m = taylor.size() - 1; m >= 1; --m) taylor[m] = taylor[m] * x + taylor[m - 1];
        taylor[0] = taylor[0] * x + p.coefficients[i];
    }
    double factorial = 1.0;
    for (std::size_t m = 1; m < taylor.size(); ++m) {
        factorial *= static_cast<double>(m);
        taylor[m] *= factorial;
    }
    return taylor;
}

struct RAlphaBounds {
    double lower, upper;
};

// Two-sided estimate of r_alpha(k), the smallest positive point where some
// member of F_alpha vanishes to order k:
//   lower = (1 + 1/(k+1))^(-1/2) * (alpha^2 (k+1) + 1)^(-1/(2(k+1)))
//   upper = (1 - 1/(k+2))^(min(alpha/9, 1))
inline RAlphaBounds r_alpha_bounds(double alpha, int k) {
    if (!(alpha > 0.0) || k < 0) throw domain_error("ParameterOutOfRange", "need alpha > 0 and k >= 0");
    const double k1 = static_cast<double>(k) + 1.0;
    const double lower = std::pow(1.0 + 1.0 / k1, -0.5) * std::pow(alpha * alpha * k1 + 1.0, -1.0 / (2.0 * k1));
    const double upper = std::pow(1.0 - 1.0 / (k1 + 1.0), std::min(alpha / 9.0, 1.0));
    return {lower, upper};
}

// (delta,k)-transversality at a point: |p(x)| < delta forces some derivative
// of order 1..k to have magnitude >= delta.
inline bool check_delta_k(const BoundedPoly& p, double x, double delta, int k) {
    const std::vector<double> ders = eval_derivatives(p, x, k);
    if (std::abs(ders[0]) >= delta) return true;
    for (int j = 1; j <= k; ++j)
        if (std::abs(ders[static_cast<std::size_t>(j)]) >= delta) return true;
    return false;
}

enum class MeasureMode { Grid, Roots };

// Lebesgue measure of {x in [a,b] : |p(x)| < epsilon}. Grid mode uses a
// midpoint rule with 10^6 samples; roots mode isolates the crossings of
// p -+ epsilon by sign-change bisection on a fine grid.
inline double sublevel_measure(const BoundedPoly& p, double epsilon, double a, double b,
                               MeasureMode mode = MeasureMode::Roots) {
    if (!(b > a)) return 0.0;
    if (mode == MeasureMode::Grid) {
        constexpr int kSamples = 1'000'000;
        const double h = (b - a) / kSamples;
        long count = 0;
        for (int i = 0; i < kSamples; ++i)
            if (std::abs(p.eval(a + (i + 0.5) * h)) < epsilon) ++count;
        return count * h;
    }
    constexpr int kBrackets = 1 << 17;
    std::vector<double> cuts{a, b};
    const double h = (b - a) / kBrackets;
    auto add_roots = [&](double shift) {
        double x0 = a;
        double f0 = p.eval(x0) + shift;
        for (int i = 1; i <= kBrackets; ++i) {
            const double x1 = (i == kBrackets) ? b : a + i * h;
            const double f1 = p.eval(x1) + shift;
            if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
                double lo = x0, hi = x1, flo = f0;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = p.eval(mid) + shift;
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push_back(0.5 * (lo + hi));
            } else if (f1 == 0.0 && i < kBrackets) {
                cuts.push_back(x1);
            }
            x0 = x1;
            f0 = f1;
        }
    };
    add_roots(-epsilon);
    add_roots(+epsilon);
    std::sort(cuts.begin(), cuts.end());
    double measure = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        if (std::abs(p.eval(mid)) < epsilon) measure += cuts[i + 1] - cuts[i];
    }
    return measure;
}

struct MeasureBound {
    double epsilon;
    int k;
    double delta;
    double constant; // C (or the rescaled C' on sub-intervals)
    double bound;    // C * epsilon^(1/k)
    double a, b;
};

namespace detail {
inline double max_abs_on_interval(const BoundedPoly& p, double a, double b) {
    constexpr int kSamples = 1 << 16;
    double m = 0.0;
    for (int i = 0; i <= kSamples; ++i)
        m = std::max(m, std::abs(p.eval(a + (b - a) * i / kSamples)));
    return m;
}
} // namespace detail

// Explicit sublevel-measure estimate under (delta,d)-transversality:
//   Leb{x in I : |p(x)| < eps} <= C * eps^(1/d),
//   C = 2^(d+3)/delta^2 * (4 n^(2(d+1)) max_I |p| + 1)
// on [-1,1]; sub-intervals get the rescaled constant
//   C' = (2/(b-a))^(2d-1) * C.
// The transversality hypothesis is the caller's responsibility (grids via
// check_delta_k); it is not certified here.
inline MeasureBound lojasiewicz_bound(const BoundedPoly& p, int d, double delta, double epsilon, double a, double b) {
    if (!(delta > 0.0 && delta < 1.0)) throw domain_error("ParameterOutOfRange", "delta must lie in (0,1)");
    if (!(epsilon > 0.0)) throw domain_error("ParameterOutOfRange", "epsilon must be positive");
    const int n = p.degree();
    if (n < d) throw domain_error("DegreeBelowD", "polynomial degree " + std::to_string(n) +
                                                      " is below the transversality order " + std::to_string(d));
    const double max_p = detail::max_abs_on_interval(p, a, b);
    double c = std::pow(2.0, d + 3) / (delta * delta) *
               (4.0 * std::pow(static_cast<double>(n), 2.0 * (d + 1)) * max_p + 1.0);
    if (!(a == -1.0 && b == 1.0)) c *= std::pow(2.0 / (b - a), 2.0 * d - 1.0);
    return {epsilon, d, delta, c, c * std::pow(epsilon, 1.0 / d), a, b};
}

// Smallest m with (1 + 1/(m+1))^(1/2) (alpha^2(m+1) + 1)^(1/(2(m+1))) below
// 1/(b+tau); equivalently the smallest m whose lower bound for r_alpha(m)
// clears b + tau.
inline int polyestimate_k(double alpha, double b, double tau, int cap = 1'000'000) {
    if (!(b >= 0.0 && b < 1.0 && tau > 0.0 && tau < 1.0 - b))
        throw domain_error("ParameterOutOfRange", "need 0 <= b < 1 and 0 < tau < 1 - b");
    for (int m = 0; m <= cap; ++m)
        if (r_alpha_bounds(alpha, m).lower > b + tau) return m;
    throw domain_error("NotFoundWithinCap", "no k below the search cap satisfies the bound inequality");
}

// Conservative default for tau: the theorem wants tau below both 1-b and
// r_alpha(1) - r_alpha(0); r_alpha(1) is unknown, so its lower bound stands
// in, with (1-b)/2 as fallback when that bound does not clear r_alpha(0).
inline double default_tau(double alpha, double b) {
    const double cand = r_alpha_bounds(alpha, 1).lower - 1.0 / (1.0 + alpha);
    if (cand > 0.0) return std::min(cand, 0.5 * (1.0 - b));
    return 0.5 * (1.0 - b);
}

// Empirical (delta,k)-transversality level on [0, r_alpha(k)-tau]: minimum
// over random F_alpha polynomials and a grid of max(|p|, |p'|, ..., |p^(k)|).
// Heuristic only; it never substitutes for the compactness argument.
inline double estimate_delta(double alpha, int k, double tau, int n_polys = 64, int poly_degree = 30,
                             int grid_points = 2048, std::uint64_t seed = 20240915) {
    const double upper_x = r_alpha_bounds(alpha, k).lower - tau;
    if (!(upper_x > 0.0)) throw domain_error("ParameterOutOfRange", "tau leaves an empty interval");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-alpha, alpha);
    double delta = std::numeric_limits<double>::infinity();
    for (int pi = 0; pi < n_polys; ++pi) {
        BoundedPoly p;
        p.alpha = alpha;
        p.coefficients.assign(static_cast<std::size_t>(poly_degree) + 1, 0.0);
        p.coefficients[0] = 1.0;
        for (int i = 1; i <= poly_degree; ++i) p.coefficients[static_cast<std::size_t>(i)] = coeff(rng);
        for (int gi = 0; gi <= grid_points; ++gi) {
            const double x = upper_x * gi / grid_points;
            const std::vector<double> ders = eval_derivatives(p, x, k);
            double strength = std::abs(ders[0]);
            for (int j = 1; j <= k; ++j) strength = std::max(strength, std::abs(ders[static_cast<std::size_t>(j)]));
            delta = std::min(delta, strength);
        }
    }
    return delta;
}

// ---------------------------------------------------------------------------
// Itinerary polynomial: the side-line coordinate of the branch translation,
//   h_j(lambda) = <H(P,lambda,itinerary) - v_j, eta_j>
//               = c_0 - c_1 lambda + c_2 lambda^2 + ... + c_n (-lambda)^n,
// with
//   c_0 = <v_{i_{n-1}} - v_j, eta_j>
//   c_l = <v_{i_{n-l-1}} - v_{i_{n-l}}, eta_j>,  l = 1..n-1
//   c_n = -<v_{i_0}, eta_j>.
inline BoundedPoly itinerary_polynomial(const ConvexPolygon& poly, std::span<const std::uint8_t> itinerary, int side) {
    const std::size_t n = itinerary.size();
    if (n == 0) throw domain_error("ParameterOutOfRange", "itinerary must be nonempty");
    const Point eta = poly.side_normal(side);
    const Point vj = poly.vertex(side);
    BoundedPoly p;
    p.alpha = 2.0 * poly.max_vertex_modulus();
    p.coefficients.resize(n + 1);
    p.coefficients[0] = dot(poly.vertex(itinerary[n - 1]) - vj, eta);
    for (std::size_t l = 1; l <= n - 1; ++l)
        p.coefficients[l] = dot(poly.vertex(itinerary[n - l - 1]) - poly.vertex(itinerary[n - l]), eta);
    p.coefficients[n] = -dot(poly.vertex(itinerary[0]), eta);
    return p;
}

// Evaluates sum_l c_l (-lambda)^l.
inline double eval_itinerary_polynomial(std::span<const double> coefficients, double lambda) {
    double v = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) v = v * (-lambda) + coefficients[i];
    return v;
}

struct FactoredPoly {
    int ell;                        // order of the factored leading power
    double c_ell;                   // its coefficient
    std::vector<double> normalized; // hat-h coefficients in lambda, constant term 1
};

// Factors h(lambda) = c_ell * (-lambda)^ell * hat-h(lambda) with hat-h(0) = 1,
// where ell <= max_index is the first position with |c_ell| >= tau_threshold.
// The normalized coefficients are bounded by max|c| / tau_threshold.
inline FactoredPoly factor_leading(std::span<const double> coefficients, int max_index, double tau_threshold) {
    const int limit = std::min<int>(max_index, static_cast<int>(coefficients.size()) - 1);
    int ell = -1;
    for (int l = 0; l <= limit; ++l)
        if (std::abs(coefficients[static_cast<std::size_t>(l)]) >= tau_threshold) {
            ell = l;
            break;
        }
    if (ell < 0)
        throw domain_error("AllLeadingCoefficientsBelowThreshold",
                           "no coefficient up to index " + std::to_string(limit) + " reaches the threshold");
    FactoredPoly out;
    out.ell = ell;
    out.c_ell = coefficients[static_cast<std::size_t>(ell)];
    out.normalized.resize(coefficients.size() - static_cast<std::size_t>(ell));
    for (std::size_t t = 0; t < out.normalized.size(); ++t) {
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        out.normalized[t] = sign * coefficients[static_cast<std::size_t>(ell) + t] / out.c_ell;
    }
    return out;
}

} // namespace obc
