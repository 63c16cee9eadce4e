// Acceptance suite: one test per criterion, each printing a pass/fail line.

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qperc/analysis.hpp"
#include "qperc/experiments.hpp"
#include "qperc/paths.hpp"
#include "qperc/pipeline.hpp"
#include "qperc/treegrow.hpp"
#include "oracles.hpp"

using namespace qperc;

namespace {

constexpr double kE = 2.718281828459045;

class criterion_printer : public ::testing::EmptyTestEventListener {
    void OnTestEnd(const ::testing::TestInfo& info) override {
        std::printf("[%s] %s\n", info.result()->Passed() ? "PASS" : "FAIL", info.name());
        std::fflush(stdout);
    }
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TEST(Acceptance, criterion_01_oracle_equivalence) {
    auto start = std::chrono::steady_clock::now();
    const double alphas[] = {1.0, kE, 4.0};
    std::mt19937_64 rng(10101);
    for (int i = 0; i < 500; ++i) {
        unsigned d = 2 + i % 7;  // d in [2,8]
        double alpha = alphas[i % 3];
        random_subgraph<64> g(d, std::min(1.0, alpha / d), rng());
        auto res = longest_increasing_path(g);
        ASSERT_EQ(res.length, test::dfs_longest_path(g)) << "instance " << i;
        ASSERT_TRUE(verify_witness(g, res.witness));
    }
    double secs = elapsed_seconds(start);
    RecordProperty("seconds", static_cast<int>(secs));
    EXPECT_LT(secs, 60.0);
}

TEST(Acceptance, criterion_02_solver_correctness) {
    for (double alpha : {1.1, 2.0, kE, 4.0, 10.0}) {
        double z = survival_probability(alpha, 1e-10);
        double residual = std::fabs(z - (1.0 - std::exp(-alpha * z)));
        EXPECT_LE(residual, 1e-10) << "alpha=" << alpha;
    }
    double z2 = survival_probability(2.0, 1e-12);
    double z4 = survival_probability(4.0, 1e-12);
    EXPECT_NEAR(z2, 0.79681, 1e-4);
    EXPECT_NEAR(z4, 0.98017, 1e-4);
    EXPECT_NEAR(z2, static_cast<double>(test::fixed_point_zeta(2.0)), 1e-9);
    EXPECT_NEAR(z4, static_cast<double>(test::fixed_point_zeta(4.0)), 1e-9);

    double ds = subcritical_delta(2.0);
    EXPECT_NEAR(ds, 0.910, 2e-3);
    EXPECT_NEAR(ds, test::delta_star_oracle(1.0 - std::log(2.0)), 1e-6);
}

TEST(Acceptance, criterion_03_first_moment) {
    auto start = std::chrono::steady_clock::now();
    const unsigned d = 6;
    const int n = 10000;
    std::vector<double> xs(n);
    parallel_for(n, [&](std::size_t s) {
        random_subgraph<64> g(d, 4.0 / 6.0, derive_seed(30303, s));
        xs[s] = count_antipodal_paths(g).convert_to<double>();
    });
    double sum = 0, sumsq = 0;
    for (double x : xs) {
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    RecordProperty("mean_x1000", static_cast<int>(mean * 1000));
    EXPECT_NEAR(mean, 63.20987654320988, 4 * se);
    EXPECT_LT(elapsed_seconds(start), 120.0);
}

TEST(Acceptance, criterion_04_second_moment) {
    const unsigned d = 7;
    const double p = kE / d;
    auto exact = second_moment_exact(d, p);

    const int n = 100000;
    std::vector<double> xs(n);
    parallel_for(n, [&](std::size_t s) {
        random_subgraph<64> g(d, p, derive_seed(40404, s));
        xs[s] = count_antipodal_paths(g).convert_to<double>();
    });
    double sum = 0, sumsq = 0;
    for (double x : xs) {
        sum += x * x;
        sumsq += x * x * x * x;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    EXPECT_NEAR(mean, static_cast<double>(exact.e_x2), 4 * se);

    for (unsigned dd = 2; dd <= 9; ++dd) {
        auto y = overlap_profile(dd);
        cpp_int total = 0;
        for (const auto& v : y) total += v;
        EXPECT_EQ(total, factorial_big(dd));
        EXPECT_EQ(y[dd], 1);
        EXPECT_EQ(y[dd - 1], 0);
        for (unsigned k = 0; k < dd; ++k) EXPECT_LE(y[k], yk_upper_bound(dd, k));
    }
}

TEST(Acceptance, criterion_05_paley_zygmund) {
    const unsigned d = 7;
    const double p = kE / d;
    auto exact = second_moment_exact(d, p);

    const int n = 100000;
    std::atomic<int> positive{0};
    parallel_for(n, [&](std::size_t s) {
        random_subgraph<64> g(d, p, derive_seed(40404, s));
        if (count_antipodal_paths(g) > 0) positive.fetch_add(1);
    });
    double p_hat = positive.load() / static_cast<double>(n);
    double se = std::sqrt(p_hat * (1 - p_hat) / n);
    RecordProperty("p_hat_x1000", static_cast<int>(p_hat * 1000));
    RecordProperty("pz_lower_x1000", static_cast<int>(exact.pz_lower * 1000));
    EXPECT_GE(p_hat, exact.pz_lower - 3 * se);
    EXPECT_GE(p_hat, std::pow(7.0, -5.0));
}

TEST(Acceptance, criterion_06_subcritical_markov) {
    const unsigned d = 20;
    const double p = 0.1;
    const int n = 10000;
    std::vector<unsigned> lengths(n);
    parallel_for(n, [&](std::size_t s) {
        random_subgraph<64> g(d, p, derive_seed(60606, s));
        dp_workspace ws;
        lengths[s] = longest_increasing_path_length(g, ws);
    });
    for (unsigned m = 0; m <= d; ++m) {
        std::size_t ge = 0;
        for (auto l : lengths) ge += (l >= m);
        double p_ge = ge / static_cast<double>(n);
        double se = std::sqrt(p_ge * (1 - p_ge) / n);
        double bound = static_cast<double>(std::min<long double>(expected_path_count(d, m, p), 1e300L));
        EXPECT_LE(p_ge, bound + 3 * se) << "m=" << m;
    }
    std::size_t ge95 = 0;
    for (auto l : lengths) ge95 += (l >= 19);  // ceil(0.95 * 20)
    double tail = ge95 / static_cast<double>(n);
    RecordProperty("p_ge_19_x10000", static_cast<int>(tail * 10000));
    EXPECT_LT(tail, 0.01);
}

TEST(Acceptance, criterion_07_supercritical_trend) {
    const double alpha = 4.0;
    const int n = 2000;
    const unsigned dims[] = {12, 16, 20, 24};
    double zeta_sq = std::pow(survival_probability(alpha), 2);

    std::vector<double> p_full, p_ge_dm2;
    for (unsigned d : dims) {
        std::vector<unsigned> lengths(n);
        parallel_for(n, [&](std::size_t s) {
            random_subgraph<64> g(d, alpha / d, derive_seed(70707 + d, s));
            dp_workspace ws;
            lengths[s] = longest_increasing_path_length(g, ws);
        });
        std::size_t full = 0, ge = 0;
        for (auto l : lengths) {
            full += (l == d);
            ge += (l + 2 >= d);
        }
        p_full.push_back(full / static_cast<double>(n));
        p_ge_dm2.push_back(ge / static_cast<double>(n));
        RecordProperty(("p_full_d" + std::to_string(d) + "_x10000").c_str(),
                       static_cast<int>(p_full.back() * 10000));
    }
    for (std::size_t i = 1; i < p_ge_dm2.size(); ++i)
        EXPECT_GE(p_ge_dm2[i], p_ge_dm2[i - 1]) << "d=" << dims[i];
    for (std::size_t i = 1; i < p_full.size(); ++i)
        EXPECT_LE(std::fabs(p_full[i] - zeta_sq), std::fabs(p_full[i - 1] - zeta_sq)) << "d=" << dims[i];
}

TEST(Acceptance, criterion_08_treegrow_determinism) {
    const unsigned d = 500;
    const int n = 1000;
    using V = vertex<512>;
    std::atomic<int> failures{0};
    parallel_for(n, [&](std::size_t s) {
        tree_grow_input<512> in(subcube<512>::full(d), V::zero(d), {}, 4);
        random_subgraph<512> g(d, 4.0 / d, derive_seed(80808, s));
        auto [t1, tr1] = tree_construct(in, g);
        auto [t2, tr2] = tree_construct(in, g);
        if (!(t1 == t2) || !(tr1 == tr2)) failures.fetch_add(1);
        auto report = verify_proposition_22(t1, tr1, in);
        if (!report.all()) failures.fetch_add(1);
    });
    EXPECT_EQ(failures.load(), 0);
}

TEST(Acceptance, criterion_09_prop22d_band) {
    // d=1000, alpha=4, C empty, l=6 exposed layers (truncation at L_7);
    // band [(pd)^(0.9*6), (pd)^(1.1*6)] on the leaf count of the last
    // reached layer
    const unsigned d = 1000;
    const int n = 2000;
    const double lo = std::pow(4.0, 0.9 * 6), hi = std::pow(4.0, 1.1 * 6);
    using V = vertex<1024>;
    std::atomic<int> in_band{0};
    parallel_for(n, [&](std::size_t s) {
        tree_grow_input<1024> in(subcube<1024>::full(d), V::zero(d), {}, 7);
        random_subgraph<1024> g(d, 4.0 / d, derive_seed(90909, s));
        auto [tree, trace] = tree_construct(in, g);
        auto it = tree.layer_vertices.find(6);
        std::size_t leaves = (it == tree.layer_vertices.end()) ? 0 : it->second.size();
        if (leaves >= lo && leaves <= hi) in_band.fetch_add(1);
    });
    double frac = in_band.load() / static_cast<double>(n);
    RecordProperty("fraction_x10000", static_cast<int>(frac * 10000));
    EXPECT_NEAR(frac, 0.98017, 0.07);
}

TEST(Acceptance, criterion_10_pipeline_validity) {
    const unsigned d = 24;
    const double alpha = 5.0;
    const int n = 200;
    pipeline_params params;  // h0=3, h1=3, leaf_target=8, budget=16
    std::atomic<int> found{0}, validity_failures{0};
    parallel_for(n, [&](std::size_t s) {
        std::uint64_t seed = derive_seed(101010, s);
        auto out = build_witness(d, alpha, seed, params);
        for (std::size_t i = 0; i < out.pairs.size(); ++i)
            for (std::size_t j = i + 1; j < out.pairs.size(); ++j) {
                subcube<64> qi(out.pairs[i].first, out.pairs[i].second);
                subcube<64> qj(out.pairs[j].first, out.pairs[j].second);
                if (!subcubes_certified_disjoint(qi, qj)) validity_failures.fetch_add(1);
            }
        if (out.stage_reached == pipeline_stage::witness_found) {
            found.fetch_add(1);
            random_subgraph<64> g(d, alpha / d, seed);
            if (!out.witness || out.witness->size() != d + 1 || !verify_witness(g, *out.witness))
                validity_failures.fetch_add(1);
        }
    });
    RecordProperty("witnesses_found_of_200", found.load());
    std::printf("  criterion 10: %d/%d runs produced a witness, all validated\n", found.load(), n);
    EXPECT_EQ(validity_failures.load(), 0);
}

TEST(Acceptance, criterion_11_coupling_monotonicity) {
    const unsigned d = 16;
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(i / 19.0);
    std::atomic<int> violations{0};
    parallel_for(100, [&](std::size_t s) {
        auto curve = coupled_transition_curve(d, derive_seed(111111, s), grid);
        for (std::size_t i = 1; i < curve.size(); ++i)
            if (curve[i].second < curve[i - 1].second) violations.fetch_add(1);
    });
    EXPECT_EQ(violations.load(), 0);
}

TEST(Acceptance, criterion_12_sweep_reproducibility) {
    sweep_config cfg;
    cfg.alphas = {4.0, 2.0};
    cfg.dims = {8, 12};
    cfg.replicas = 100;
    cfg.master_seed = 20240101;
    cfg.master_seed_text = "20240101";
    cfg.tasks = {"classify"};

    namespace fs = std::filesystem;
    auto read_without_walltime = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream os;
        std::string line;
        while (std::getline(in, line)) {
            auto pos = line.rfind(',');
            os << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
        }
        return os.str();
    };

    auto d1 = fs::temp_directory_path() / "qperc_acc12_a";
    auto d2 = fs::temp_directory_path() / "qperc_acc12_b";
    fs::remove_all(d1);
    fs::remove_all(d2);
    run_sweep(cfg, d1);
    run_sweep(cfg, d2);
    EXPECT_EQ(read_without_walltime(d1 / "sweep.csv"), read_without_walltime(d2 / "sweep.csv"));
}

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    ::testing::UnitTest::GetInstance()->listeners().Append(new criterion_printer);
    return RUN_ALL_TESTS();
}
