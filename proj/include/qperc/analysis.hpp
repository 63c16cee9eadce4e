#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qperc/errors.hpp"

namespace qperc {

using boost::multiprecision::cpp_int;

// Survival probability of a Poisson(alpha) branching process: the root of
// zeta = 1 - exp(-alpha*zeta) in (0,1) for alpha > 1, and 0 otherwise.
// Fixed-point iteration seeds a bracket, bisection drives the residual
// below tol.
inline double survival_probability(double alpha, double tol = 1e-12) {
    if (!(alpha > 0)) throw invalid_parameter_error("survival_probability requires alpha > 0");
    if (!(tol > 0)) throw invalid_parameter_error("survival_probability requires tol > 0");
    if (alpha <= 1.0) return 0.0;

    auto f = [alpha](long double z) { return 1.0L - std::exp(-static_cast<long double>(alpha) * z) - z; };

    long double z = 0.5L;
    for (int i = 0; i < 128; ++i) z = 1.0L - std::exp(-static_cast<long double>(alpha) * z);

    long double lo = std::max<long double>(tol, z * 0.5L);
    long double hi = std::min<long double>(1.0L - tol, (z + 1.0L) * 0.5L);
    if (f(lo) <= 0) lo = tol;
    if (f(hi) >= 0) {
        // the root sits within tol of hi; the residual there is already small
        hi = 1.0L - tol;
        if (f(hi) >= 0) return static_cast<double>(hi);
    }
    long double mid = z;
    for (int i = 0; i < 200; ++i) {
        mid = (lo + hi) / 2;
        long double fm = f(mid);
        if (std::fabs(static_cast<double>(fm)) <= tol * 0.5 && (hi - lo) <= tol) break;
        if (fm > 0)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>(mid);
}

// The infimum delta* in (0,1) such that
// (alpha/e) * (2/(1-delta))^((1-delta)/delta) < 1 for all delta in (delta*, 1).
// In log form the bracket is ln(alpha) - 1 + ((1-delta)/delta)*ln(2/(1-delta)),
// which is strictly decreasing on (0,1), so a plain bisection finds the
// unique sign change.
inline double subcritical_delta(double alpha) {
    if (!(alpha > 0)) throw invalid_parameter_error("subcritical_delta requires alpha > 0");
    constexpr double e = 2.718281828459045235;
    if (alpha >= e) throw invalid_parameter_error("subcritical_delta requires alpha < e");

    auto log_g = [alpha](long double delta) {
        long double t = (1.0L - delta) / delta;
        return std::log(static_cast<long double>(alpha)) - 1.0L + t * std::log(2.0L / (1.0L - delta));
    };

    long double lo = 1e-9L, hi = 1.0L - 1e-12L;
    for (int i = 0; i < 200; ++i) {
        long double mid = (lo + hi) / 2;
        if (log_g(mid) > 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13L) break;
    }
    return static_cast<double>((lo + hi) / 2);
}

// Exact expected number of increasing paths with m edges in Q^d_p:
// 2^(d-m) * d!/(d-m)! * p^m, evaluated in log space. The exponent is the
// path's edge count m.
inline long double expected_path_count(unsigned d, unsigned m, double p) {
    if (m > d) throw invalid_parameter_error("expected_path_count requires m <= d");
    if (p < 0 || p > 1) throw invalid_parameter_error("edge probability must lie in [0,1]");
    if (p == 0.0) return m == 0 ? std::exp2(static_cast<long double>(d)) : 0.0L;
    long double log_e = (d - m) * std::log(2.0L) + std::lgamma(static_cast<long double>(d) + 1) -
                        std::lgamma(static_cast<long double>(d - m) + 1) +
                        m * std::log(static_cast<long double>(p));
    return std::exp(log_e);
}

inline constexpr unsigned overlap_enumeration_cap = 9;
inline constexpr unsigned overlap_enumeration_hard_cap = 11;

// Y_k: the number of full increasing paths sharing exactly k edges with the
// identity path (the one flipping coordinates in ascending order), computed
// by enumerating all d! paths as coordinate permutations. A permutation
// shares edge i with the identity exactly when its first i coordinates are
// {0..i-1} and its i-th coordinate is i.
inline std::vector<cpp_int> overlap_profile(unsigned d, unsigned cap = overlap_enumeration_cap) {
    if (d < 1) throw invalid_parameter_error("overlap_profile requires d >= 1");
    cap = std::min(cap, overlap_enumeration_hard_cap);
    if (d > cap)
        throw dimension_too_large_error("overlap_profile enumeration capped at d=" + std::to_string(cap));

    std::vector<std::uint64_t> counts(d + 1, 0);
    std::vector<unsigned> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        unsigned shared = 0;
        unsigned running_max = 0;
        bool prefix_canonical = true;
        for (unsigned j = 0; j < d; ++j) {
            if (prefix_canonical && perm[j] == j) ++shared;
            running_max = std::max(running_max, perm[j]);
            prefix_canonical = (running_max == j);
        }
        ++counts[shared];
    } while (std::next_permutation(perm.begin(), perm.end()));

    return std::vector<cpp_int>(counts.begin(), counts.end());
}

inline cpp_int factorial_big(unsigned n) {
    cpp_int r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline cpp_int binomial_big(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    cpp_int r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

// Combinatorial upper bound on Y_k for k < d:
// sum over l of C(d, 2l) * 2^(l-1) * (d-k-2l+2)!  with 1 <= l <= (d-k)/2.
inline cpp_int yk_upper_bound(unsigned d, unsigned k) {
    if (k >= d) throw invalid_parameter_error("yk_upper_bound requires k < d");
    cpp_int total = 0;
    unsigned lmax = (d - k) / 2;
    for (unsigned l = 1; l <= lmax; ++l) {
        cpp_int term = binomial_big(d, 2 * l);
        term <<= (l - 1);
        term *= factorial_big(d - k - 2 * l + 2);
        total += term;
    }
    return total;
}

// Exact overlap profile with the probability-weighted moments:
// E[X] = d! p^d and E[X^2] = d! p^(2d) * sum_k p^(-k) Y_k.
struct moment_table {
    unsigned d = 0;
    double alpha = 0.0;
    double p = 0.0;
    std::vector<cpp_int> y;
    long double e_x = 0.0L;
    long double e_x2 = 0.0L;
    double pz_lower = 0.0;
};

struct second_moment_result {
    long double e_x2;
    double pz_lower;
};

inline second_moment_result second_moment_exact(unsigned d, double p,
                                                unsigned cap = overlap_enumeration_cap) {
    if (p < 0 || p > 1) throw invalid_parameter_error("edge probability must lie in [0,1]");
    auto y = overlap_profile(d, cap);
    long double fact = 1.0L;
    for (unsigned i = 2; i <= d; ++i) fact *= i;

    long double e_x2 = 0.0L;
    for (unsigned k = 0; k <= d; ++k) {
        if (y[k] == 0) continue;
        // d! * Y_k * p^(2d-k), grouped to stay in range
        long double term = fact * y[k].convert_to<long double>() *
                           std::pow(static_cast<long double>(p), static_cast<long double>(2 * d - k));
        e_x2 += term;
    }
    long double e_x = fact * std::pow(static_cast<long double>(p), static_cast<long double>(d));
    double pz = (e_x2 > 0.0L) ? static_cast<double>(e_x * e_x / e_x2) : 0.0;

    constexpr double e = 2.718281828459045235;
    if (p * d >= e - 1e-12) {
        double floor_bound = std::pow(static_cast<double>(d), -5.0);
        if (pz < floor_bound)
            throw invariant_violation_error("Paley-Zygmund lower bound fell below d^-5");
    }
    return {e_x2, pz};
}

inline moment_table compute_moments(unsigned d, double alpha, unsigned cap = overlap_enumeration_cap) {
    moment_table t;
    t.d = d;
    t.alpha = alpha;
    t.p = std::min(1.0, alpha / d);
    t.y = overlap_profile(d, cap);
    long double fact = 1.0L;
    for (unsigned i = 2; i <= d; ++i) fact *= i;
    t.e_x = fact * std::pow(static_cast<long double>(t.p), static_cast<long double>(d));
    auto sm = second_moment_exact(d, t.p, cap);
    t.e_x2 = sm.e_x2;
    t.pz_lower = sm.pz_lower;
    return t;
}

}  // namespace qperc
