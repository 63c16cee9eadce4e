#include "qperc/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qperc/paths.hpp"
#include "oracles.hpp"

using namespace qperc;

constexpr double kE = 2.718281828459045;

TEST(Survival, SubcriticalIsZero) {
    EXPECT_EQ(survival_probability(0.5), 0.0);
    EXPECT_EQ(survival_probability(1.0), 0.0);
    EXPECT_THROW(survival_probability(0.0), invalid_parameter_error);
    EXPECT_THROW(survival_probability(-2.0), invalid_parameter_error);
}

TEST(Survival, KnownValues) {
    EXPECT_NEAR(survival_probability(2.0), 0.79681, 1e-4);
    EXPECT_NEAR(survival_probability(4.0), 0.98017, 1e-4);
    // against the independent fixed-point oracle
    for (double alpha : {1.1, 2.0, kE, 4.0, 10.0}) {
        double z = survival_probability(alpha, 1e-12);
        EXPECT_NEAR(z, static_cast<double>(test::fixed_point_zeta(alpha)), 1e-9) << "alpha=" << alpha;
        double residual = std::fabs(z - (1.0 - std::exp(-alpha * z)));
        EXPECT_LE(residual, 1e-12) << "alpha=" << alpha;
    }
}

TEST(Survival, StrictlyIncreasingInAlpha) {
    double prev = 0;
    for (double alpha = 1.05; alpha < 8.0; alpha += 0.05) {
        double z = survival_probability(alpha);
        EXPECT_GT(z, prev);
        prev = z;
    }
}

TEST(Delta, DomainErrors) {
    EXPECT_THROW(subcritical_delta(0.0), invalid_parameter_error);
    EXPECT_THROW(subcritical_delta(kE), invalid_parameter_error);
    EXPECT_THROW(subcritical_delta(3.0), invalid_parameter_error);
}

TEST(Delta, MatchesBisectionOracle) {
    // the defining bracket: ((1-delta)/delta) ln(2/(1-delta)) = 1 - ln(alpha)
    EXPECT_NEAR(subcritical_delta(2.0), test::delta_star_oracle(1.0 - std::log(2.0)), 1e-6);
    EXPECT_NEAR(subcritical_delta(2.0), 0.910, 2e-3);
    EXPECT_NEAR(subcritical_delta(1.0), test::delta_star_oracle(1.0), 1e-6);
    // exponent factor drops below one beyond delta*
    for (double alpha : {1.0, 2.0, 2.5}) {
        double ds = subcritical_delta(alpha);
        for (double delta = ds + 0.01; delta < 0.999; delta += 0.05) {
            double g = (alpha / kE) * std::pow(2.0 / (1.0 - delta), (1.0 - delta) / delta);
            EXPECT_LT(g, 1.0) << "alpha=" << alpha << " delta=" << delta;
        }
    }
}

TEST(Delta, MonotoneInAlpha) {
    EXPECT_GT(subcritical_delta(2.7), subcritical_delta(2.0));
    EXPECT_GT(subcritical_delta(2.0), subcritical_delta(1.0));
}

TEST(ExpectedPathCount, ClosedFormCases) {
    EXPECT_NEAR(static_cast<double>(expected_path_count(10, 0, 0.37)), 1024.0, 1e-6);
    EXPECT_NEAR(static_cast<double>(expected_path_count(6, 6, 4.0 / 6.0)), 63.20987654320988, 1e-9);
    // m = d is d! p^d
    for (unsigned d : {3u, 5u, 8u}) {
        double p = 0.3;
        long double fact = 1;
        for (unsigned i = 2; i <= d; ++i) fact *= i;
        EXPECT_NEAR(static_cast<double>(expected_path_count(d, d, p)),
                    static_cast<double>(fact * std::pow((long double)p, (long double)d)), 1e-9);
    }
    EXPECT_EQ(static_cast<double>(expected_path_count(12, 3, 0.0)), 0.0);
    EXPECT_THROW(expected_path_count(4, 5, 0.5), invalid_parameter_error);
}

TEST(ExpectedPathCount, LogConcaveInM) {
    for (unsigned d : {10u, 20u, 30u}) {
        double p = 2.0 / d;
        for (unsigned m = 1; m < d; ++m) {
            long double a = expected_path_count(d, m - 1, p);
            long double b = expected_path_count(d, m, p);
            long double c = expected_path_count(d, m + 1, p);
            EXPECT_GE(static_cast<double>(b * b), static_cast<double>(a * c) * (1 - 1e-12));
        }
    }
}

TEST(Overlap, FrozenProfileAtD4) {
    auto y = overlap_profile(4);
    ASSERT_EQ(y.size(), 5u);
    EXPECT_EQ(y[0], 14);
    EXPECT_EQ(y[1], 6);
    EXPECT_EQ(y[2], 3);
    EXPECT_EQ(y[3], 0);
    EXPECT_EQ(y[4], 1);
}

TEST(Overlap, MatchesEdgeSetOracle) {
    for (unsigned d : {2u, 3u, 4u, 5u, 6u}) {
        auto got = overlap_profile(d);
        auto want = test::overlap_profile_edge_sets(d);
        ASSERT_EQ(got.size(), want.size());
        for (unsigned k = 0; k <= d; ++k) EXPECT_EQ(got[k], want[k]) << "d=" << d << " k=" << k;
    }
}

TEST(Overlap, StructuralInvariants) {
    for (unsigned d = 2; d <= 9; ++d) {
        auto y = overlap_profile(d);
        cpp_int total = 0;
        for (const auto& v : y) total += v;
        EXPECT_EQ(total, factorial_big(d));
        EXPECT_EQ(y[d], 1);
        EXPECT_EQ(y[d - 1], 0);
    }
    EXPECT_THROW(overlap_profile(10), dimension_too_large_error);
    EXPECT_NO_THROW(overlap_profile(10, 11));
}

TEST(YkBound, DominatesProfileEverywhere) {
    for (unsigned d = 2; d <= 9; ++d) {
        auto y = overlap_profile(d);
        for (unsigned k = 0; k < d; ++k)
            EXPECT_LE(y[k], yk_upper_bound(d, k)) << "d=" << d << " k=" << k;
    }
}

TEST(YkBound, ClosedFormCorners) {
    // k = d-2 has the single l=1 term C(d,2) * 2^0 * 2!
    EXPECT_EQ(yk_upper_bound(6, 4), 30);
    // k = d-1 is an empty sum
    EXPECT_EQ(yk_upper_bound(6, 5), 0);
    EXPECT_EQ(yk_upper_bound(9, 8), 0);
}

TEST(SecondMoment, DeterministicCubeAtPOne) {
    for (unsigned d : {3u, 5u, 7u}) {
        auto r = second_moment_exact(d, 1.0);
        long double fact = 1;
        for (unsigned i = 2; i <= d; ++i) fact *= i;
        EXPECT_NEAR(static_cast<double>(r.e_x2), static_cast<double>(fact * fact), 1e-6);
        EXPECT_NEAR(r.pz_lower, 1.0, 1e-12);
    }
}

TEST(SecondMoment, PaleyZygmundFloorHoldsAtSmallD) {
    for (unsigned d = 3; d <= 9; ++d) {
        for (double alpha : {kE, 4.0, 6.0}) {
            if (alpha >= d) continue;
            EXPECT_NO_THROW(second_moment_exact(d, alpha / d)) << "d=" << d << " alpha=" << alpha;
        }
    }
}

TEST(SecondMoment, MonteCarloAgreementAtD5) {
    const unsigned d = 5;
    const double p = kE / d;
    auto exact = second_moment_exact(d, p);
    const int n = 20000;
    double sum = 0, sumsq = 0;
    for (int s = 0; s < n; ++s) {
        random_subgraph<64> g(d, p, derive_seed(515151, s));
        double x = count_antipodal_paths(g).convert_to<double>();
        sum += x * x;
        sumsq += x * x * x * x;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    EXPECT_NEAR(mean, static_cast<double>(exact.e_x2), 4 * se);
}

TEST(MomentTable, FieldsConsistent) {
    auto t = compute_moments(7, kE);
    EXPECT_EQ(t.d, 7u);
    EXPECT_EQ(t.y.size(), 8u);
    EXPECT_GT(t.pz_lower, 0.0);
    EXPECT_LT(t.pz_lower, 1.0);
    long double fact = 5040.0L;
    EXPECT_NEAR(static_cast<double>(t.e_x), static_cast<double>(fact * std::pow((long double)t.p, 7.0L)),
                1e-9);
    EXPECT_GE(static_cast<double>(t.e_x2), static_cast<double>(t.e_x * t.e_x));
}
