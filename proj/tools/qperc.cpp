// Command-line laboratory for longest increasing paths in random hypercube
// subgraphs: solvers, exact moment tables, single-instance simulation, tree
// exploration, the witness pipeline, and Monte Carlo sweeps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qperc/analysis.hpp"
#include "qperc/experiments.hpp"
#include "qperc/paths.hpp"
#include "qperc/pipeline.hpp"
#include "qperc/treegrow.hpp"

using nlohmann::json;

namespace {

std::uint64_t parse_seed(const std::string& text) {
    try {
        return std::stoull(text, nullptr, 0);  // decimal or 0x-hex
    } catch (const std::exception&) {
        throw CLI::ValidationError("seed", "seed must be a decimal or 0x-hex integer");
    }
}

json vertex_list_json(const std::vector<qperc::vertex64>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(v.to_string());
    return a;
}

template <std::size_t W>
int emit_treegrow(unsigned d, double alpha, std::uint64_t seed, const std::string& root_side,
                  unsigned trunc, const std::vector<unsigned>& avoid, unsigned cap,
                  const std::string& lo_str, const std::string& hi_str) {
    using V = qperc::vertex<W>;
    V lo = lo_str.empty() ? V::zero(d) : V::parse(lo_str);
    V hi = hi_str.empty() ? V::ones(d) : V::parse(hi_str);
    qperc::subcube<W> cube(lo, hi);
    V root = root_side == "one" ? hi : lo;
    std::vector<std::uint16_t> avoided(avoid.begin(), avoid.end());

    qperc::random_subgraph<W> g(d, std::min(1.0, alpha / d), seed);
    qperc::tree_grow_input<W> in(cube, root, avoided, trunc, cap);
    auto [tree, trace] = qperc::tree_construct(in, g);

    json out;
    out["d"] = d;
    out["alpha"] = alpha;
    out["seed"] = std::to_string(seed);
    out["root"] = root.to_string();
    out["orientation"] = tree.increasing ? "increasing" : "decreasing";
    out["size"] = tree.size();
    json parents = json::object();
    for (const auto& [v, lk] : tree.parent)
        parents[v.to_string()] = {{"parent", lk.parent.to_string()}, {"coord", lk.coord}};
    out["parent"] = parents;
    json leaves = json::array();
    json csets = json::object();
    std::vector<V> leaf_list(tree.leaves.begin(), tree.leaves.end());
    std::sort(leaf_list.begin(), leaf_list.end());
    for (const auto& leaf : leaf_list) {
        leaves.push_back(leaf.to_string());
        csets[leaf.to_string()] = qperc::c_set(tree, leaf, qperc::c_flavor::all);
    }
    out["leaves"] = leaves;
    out["c_set"] = csets;
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percolation laboratory for increasing paths in Q^d_p"};
    app.require_subcommand(1);

    // --- zeta ---
    auto* zeta_cmd = app.add_subcommand("zeta", "survival probability zeta_alpha");
    double z_alpha = 2.0, z_tol = 1e-12;
    zeta_cmd->add_option("--alpha", z_alpha, "branching parameter")->required();
    zeta_cmd->add_option("--tol", z_tol, "residual tolerance");

    // --- delta ---
    auto* delta_cmd = app.add_subcommand("delta", "subcritical exponent delta(alpha)");
    double d_alpha = 2.0;
    delta_cmd->add_option("--alpha", d_alpha, "branching parameter, 0 < alpha < e")->required();

    // --- simulate ---
    auto* sim_cmd = app.add_subcommand("simulate", "one sampled instance as a JSON record");
    unsigned s_d = 16;
    double s_alpha = 4.0;
    std::string s_seed = "1";
    std::size_t s_budget_mb = 512;
    sim_cmd->add_option("--d", s_d, "dimension")->required();
    sim_cmd->add_option("--alpha", s_alpha, "p = alpha/d")->required();
    sim_cmd->add_option("--seed", s_seed, "seed (decimal or 0x-hex)")->required();
    sim_cmd->add_option("--budget-mb", s_budget_mb, "DP memory budget in MiB");

    // --- sweep ---
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config");
    std::string sw_config, sw_out = "sweep_out";
    sweep_cmd->add_option("--config", sw_config, "JSON config file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sw_out, "output directory");

    // --- moments ---
    auto* mom_cmd = app.add_subcommand("moments", "exact moment table as CSV");
    unsigned m_d = 7;
    double m_alpha = 2.718281828459045;
    unsigned m_cap = qperc::overlap_enumeration_cap;
    mom_cmd->add_option("--d", m_d, "dimension")->required();
    mom_cmd->add_option("--alpha", m_alpha, "p = alpha/d")->required();
    mom_cmd->add_option("--max-d", m_cap, "enumeration cap override (max 11)");

    // --- treegrow ---
    auto* tg_cmd = app.add_subcommand("treegrow", "run the tree construction and emit JSON");
    unsigned t_d = 64, t_trunc = 6, t_cap = 0;
    double t_alpha = 4.0;
    std::string t_seed = "1", t_root = "zero", t_lo, t_hi;
    std::vector<unsigned> t_avoid;
    tg_cmd->add_option("--d", t_d, "dimension")->required();
    tg_cmd->add_option("--alpha", t_alpha, "p = alpha/d")->required();
    tg_cmd->add_option("--seed", t_seed, "seed")->required();
    tg_cmd->add_option("--root", t_root, "zero|one")->check(CLI::IsMember({"zero", "one"}));
    tg_cmd->add_option("--trunc", t_trunc, "truncation layer")->required();
    tg_cmd->add_option("--avoid", t_avoid, "avoided coordinates");
    tg_cmd->add_option("--cap", t_cap, "child cap (default ceil(ln d))");
    tg_cmd->add_option("--lo", t_lo, "subcube lower corner as a bit string");
    tg_cmd->add_option("--hi", t_hi, "subcube upper corner as a bit string");

    // --- pipeline ---
    auto* pl_cmd = app.add_subcommand("pipeline", "supercritical witness pipeline, JSON outcome");
    unsigned p_d = 24;
    double p_alpha = 5.0;
    std::string p_seed = "1";
    qperc::pipeline_params pp;
    pl_cmd->add_option("--d", p_d, "dimension")->required();
    pl_cmd->add_option("--alpha", p_alpha, "p = alpha/d")->required();
    pl_cmd->add_option("--seed", p_seed, "seed")->required();
    pl_cmd->add_option("--h0", pp.h0, "lower tree leaf height");
    pl_cmd->add_option("--h1", pp.h1, "upper tree leaf height");
    pl_cmd->add_option("--leaf-target", pp.leaf_target, "extension leaves requested");
    pl_cmd->add_option("--half", pp.half_split, "half-split coordinate (default d/2)");
    pl_cmd->add_option("--budget", pp.subcube_budget, "max subcubes tested");
    pl_cmd->add_option("--cap", pp.child_cap, "child cap override");

    // --- curve ---
    auto* cv_cmd = app.add_subcommand("curve", "coupled transition curve as CSV");
    unsigned c_d = 16;
    std::string c_seed = "1";
    std::vector<double> c_grid;
    unsigned c_points = 21;
    cv_cmd->add_option("--d", c_d, "dimension")->required();
    cv_cmd->add_option("--seed", c_seed, "seed")->required();
    cv_cmd->add_option("--grid", c_grid, "explicit ascending p values");
    cv_cmd->add_option("--points", c_points, "grid size over [0,1] when --grid is absent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*zeta_cmd) {
            double z = qperc::survival_probability(z_alpha, z_tol);
            std::printf("%.12f\n", z);
        } else if (*delta_cmd) {
            std::printf("%.12f\n", qperc::subcritical_delta(d_alpha));
        } else if (*sim_cmd) {
            std::uint64_t seed = parse_seed(s_seed);
            double p = std::min(1.0, s_alpha / s_d);
            qperc::random_subgraph<64> g(s_d, p, seed);
            auto res = qperc::longest_increasing_path(g, s_budget_mb << 20);
            json out;
            out["d"] = s_d;
            out["alpha"] = s_alpha;
            out["seed"] = s_seed;  // echoed verbatim
            out["length"] = res.length;
            out["classification"] = qperc::to_string(res.classification);
            if (s_d <= 20)
                out["antipodal_count"] = qperc::count_antipodal_paths(g, s_budget_mb << 20).str();
            else
                out["antipodal_count"] = nullptr;
            std::cout << out.dump(2) << '\n';
        } else if (*sweep_cmd) {
            std::ifstream in(sw_config);
            json jcfg = json::parse(in);
            auto cfg = qperc::sweep_config::from_json(jcfg);
            auto result = qperc::run_sweep(cfg, sw_out);
            std::cout << "wrote " << result.csv_path.string() << " and " << result.summary_path.string()
                      << '\n';
        } else if (*mom_cmd) {
            if (m_cap > qperc::overlap_enumeration_cap)
                std::cerr << "warning: enumeration above d=" << qperc::overlap_enumeration_cap
                          << " may take a while\n";
            auto table = qperc::compute_moments(m_d, m_alpha, m_cap);
            std::cout << "k,Y_k,bound_k\n";
            for (unsigned k = 0; k <= table.d; ++k) {
                std::cout << k << ',' << table.y[k].str() << ',';
                if (k < table.d) std::cout << qperc::yk_upper_bound(table.d, k).str();
                std::cout << '\n';
            }
            std::printf("E_X,%.12Lg,\n", table.e_x);
            std::printf("E_X2,%.12Lg,\n", table.e_x2);
            std::printf("pz_lower,%.12g,\n", table.pz_lower);
        } else if (*tg_cmd) {
            std::uint64_t seed = parse_seed(t_seed);
            if (t_d <= 64) return emit_treegrow<64>(t_d, t_alpha, seed, t_root, t_trunc, t_avoid, t_cap, t_lo, t_hi);
            if (t_d <= 512) return emit_treegrow<512>(t_d, t_alpha, seed, t_root, t_trunc, t_avoid, t_cap, t_lo, t_hi);
            if (t_d <= 2048) return emit_treegrow<2048>(t_d, t_alpha, seed, t_root, t_trunc, t_avoid, t_cap, t_lo, t_hi);
            throw qperc::invalid_parameter_error("treegrow supports d <= 2048");
        } else if (*pl_cmd) {
            std::uint64_t seed = parse_seed(p_seed);
            auto out = qperc::build_witness(p_d, p_alpha, seed, pp);
            json j;
            j["d"] = p_d;
            j["alpha"] = p_alpha;
            j["seed"] = p_seed;
            j["stage_reached"] = qperc::to_string(out.stage_reached);
            j["subcubes_tested"] = out.subcubes_tested;
            j["witness"] = out.witness ? vertex_list_json(*out.witness) : json(nullptr);
            j["v0"] = vertex_list_json(out.lower_leaves);
            j["v1"] = vertex_list_json(out.upper_leaves);
            json pairs = json::array();
            for (const auto& [a, b] : out.pairs) pairs.push_back({a.to_string(), b.to_string()});
            j["pairs"] = pairs;
            std::cout << j.dump(2) << '\n';
        } else if (*cv_cmd) {
            std::uint64_t seed = parse_seed(c_seed);
            std::vector<double> grid = c_grid;
            if (grid.empty())
                for (unsigned i = 0; i < c_points; ++i)
                    grid.push_back(c_points > 1 ? static_cast<double>(i) / (c_points - 1) : 0.0);
            auto curve = qperc::coupled_transition_curve(c_d, seed, grid);
            std::cout << "p,length\n";
            for (auto [pv, len] : curve) std::cout << qperc::fmt_double(pv) << ',' << len << '\n';
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
