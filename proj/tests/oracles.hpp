// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "qperc/sampler.hpp"

namespace qperc::test {

// Exhaustive depth-first search over increasing present-edge paths, no
// memoization; gated to small d.
inline unsigned dfs_longest_path(const qperc::random_subgraph<64>& g) {
    unsigned d = g.dim();
    if (d > 9) throw std::logic_error("dfs oracle gated to d <= 9");
    unsigned best = 0;
    struct walker {
        const qperc::random_subgraph<64>& g;
        unsigned d;
        unsigned& best;
        void go(std::uint64_t u, unsigned len) {
            best = std::max(best, len);
            for (unsigned c = 0; c < d; ++c) {
                if ((u >> c) & 1u) continue;
                if (g.present_value(u, c)) go(u | (std::uint64_t{1} << c), len + 1);
            }
        }
    } w{g, d, best};
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << d); ++v) w.go(v, 0);
    return best;
}

inline bool dfs_path_exists(const qperc::random_subgraph<64>& g, std::uint64_t from, std::uint64_t to) {
    if (from == to) return true;
    unsigned d = g.dim();
    for (unsigned c = 0; c < d; ++c) {
        if ((from >> c) & 1u) continue;
        std::uint64_t nxt = from | (std::uint64_t{1} << c);
        if ((nxt & ~to) != 0) continue;
        if (g.present_value(from, c) && dfs_path_exists(g, nxt, to)) return true;
    }
    return false;
}

// Plain fixed-point iteration for zeta = 1 - exp(-alpha*zeta).
inline long double fixed_point_zeta(double alpha, int iters = 20000) {
    if (alpha <= 1.0) return 0.0L;
    long double z = 0.5L;
    for (int i = 0; i < iters; ++i) z = 1.0L - std::exp(-static_cast<long double>(alpha) * z);
    return z;
}

// Bisection oracle for ((1-delta)/delta) * ln(2/(1-delta)) = target.
inline double delta_star_oracle(double target) {
    auto u = [](long double delta) {
        return (1.0L - delta) / delta * std::log(2.0L / (1.0L - delta));
    };
    long double lo = 1e-9L, hi = 1.0L - 1e-12L;
    for (int i = 0; i < 200; ++i) {
        long double mid = (lo + hi) / 2;
        if (u(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>((lo + hi) / 2);
}

// Overlap profile by explicit edge-set intersection of path pairs, a second
// algebraic route next to the prefix-counting implementation.
inline std::vector<std::uint64_t> overlap_profile_edge_sets(unsigned d) {
    using edge = std::pair<std::uint64_t, unsigned>;
    std::vector<unsigned> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    auto edges_of = [&](const std::vector<unsigned>& p) {
        std::set<edge> es;
        std::uint64_t v = 0;
        for (unsigned c : p) {
            es.insert({v, c});
            v |= std::uint64_t{1} << c;
        }
        return es;
    };
    std::vector<unsigned> ident(d);
    std::iota(ident.begin(), ident.end(), 0);
    auto id_edges = edges_of(ident);

    std::vector<std::uint64_t> counts(d + 1, 0);
    do {
        auto es = edges_of(perm);
        unsigned shared = 0;
        for (const auto& e : es) shared += id_edges.count(e);
        ++counts[shared];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return counts;
}

// Kolmogorov-Smirnov distance of a sample to Uniform[0,1).
inline double ks_statistic(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double ks = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = (i + 1) / n;
        double f0 = i / n;
        ks = std::max({ks, std::fabs(f - xs[i]), std::fabs(xs[i] - f0)});
    }
    return ks;
}

// Upper critical values of chi-square at significance 1e-3, df = 2^k - 1.
inline double chi2_crit_1e3(unsigned df) {
    static const std::map<unsigned, double> table = {
        {1, 10.828}, {3, 16.266}, {7, 24.322}, {15, 37.697}, {31, 61.098}, {63, 99.607},
    };
    return table.at(df);
}

}  // namespace qperc::test
