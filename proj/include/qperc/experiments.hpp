#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qperc/analysis.hpp"
#include "qperc/paths.hpp"
#include "qperc/svg.hpp"

namespace qperc {

inline unsigned worker_count() {
    if (const char* env = std::getenv("QPERC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs f(0..n-1) on the worker pool. Callers store results by index, so the
// completion order never shows in the output.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct sweep_config {
    std::vector<double> alphas;
    std::vector<unsigned> dims;
    unsigned replicas = 100;
    std::uint64_t master_seed = 1;
    std::string master_seed_text = "1";
    std::vector<std::string> tasks = {"classify"};
    std::vector<double> p_grid;  // coupling grid; empty -> 21 points over [0,1]
    std::size_t budget_bytes = default_dp_budget;

    bool has_task(const std::string& t) const {
        for (const auto& s : tasks)
            if (s == t) return true;
        return false;
    }

    bool wants_runs() const { return has_task("classify") || has_task("markov") || has_task("counts"); }

    std::vector<double> grid() const {
        if (!p_grid.empty()) return p_grid;
        std::vector<double> g;
        for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
        return g;
    }

    void validate() const {
        if (alphas.empty() || dims.empty()) throw invalid_parameter_error("sweep needs alphas and dims");
        if (replicas < 1) throw invalid_parameter_error("sweep needs at least one replica");
        for (auto t : tasks)
            if (t != "classify" && t != "markov" && t != "counts" && t != "coupling")
                throw invalid_parameter_error("unknown sweep task: " + t);
        for (auto d : dims) {
            if (d < 1) throw invalid_parameter_error("dimension must be positive");
            detail::check_budget(d, 2, budget_bytes);
            if (has_task("counts") && d > 20)
                throw invalid_parameter_error("counts task capped at d=20");
        }
        for (std::size_t i = 1; i < p_grid.size(); ++i)
            if (p_grid[i] < p_grid[i - 1]) throw invalid_parameter_error("p_grid must ascend");
    }

    static sweep_config from_json(const nlohmann::json& j) {
        sweep_config cfg;
        cfg.alphas = j.at("alphas").get<std::vector<double>>();
        cfg.dims = j.at("dims").get<std::vector<unsigned>>();
        cfg.replicas = j.value("replicas", 100u);
        if (j.contains("master_seed")) {
            if (j["master_seed"].is_string()) {
                cfg.master_seed_text = j["master_seed"].get<std::string>();
                cfg.master_seed = std::stoull(cfg.master_seed_text, nullptr, 0);
            } else {
                cfg.master_seed = j["master_seed"].get<std::uint64_t>();
                cfg.master_seed_text = std::to_string(cfg.master_seed);
            }
        }
        if (j.contains("tasks")) cfg.tasks = j["tasks"].get<std::vector<std::string>>();
        if (j.contains("p_grid")) cfg.p_grid = j["p_grid"].get<std::vector<double>>();
        return cfg;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["alphas"] = alphas;
        j["dims"] = dims;
        j["replicas"] = replicas;
        j["master_seed"] = master_seed_text;
        j["tasks"] = tasks;
        if (!p_grid.empty()) j["p_grid"] = p_grid;
        return j;
    }
};

// One Monte Carlo observation.
struct run_record {
    unsigned d = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    unsigned length = 0;
    path_class cls = path_class::shorter;
    std::optional<big_int> count;
    std::int64_t ms = 0;
    bool failed = false;
};

// shortest fixed-precision form that parses back to the same double
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* run_csv_header = "d,alpha,seed,length,class,count,ms";

inline std::string csv_row(const run_record& r) {
    std::ostringstream os;
    os << r.d << ',' << fmt_double(r.alpha) << ',' << r.seed << ',' << r.length << ','
       << (r.failed ? "error" : to_string(r.cls)) << ',';
    if (r.count) os << r.count->str();
    os << ',' << r.ms;
    return os.str();
}

inline run_record parse_csv_row(const std::string& line) {
    run_record r;
    std::istringstream is(line);
    std::string field;
    std::getline(is, field, ',');
    r.d = static_cast<unsigned>(std::stoul(field));
    std::getline(is, field, ',');
    r.alpha = std::stod(field);
    std::getline(is, field, ',');
    r.seed = std::stoull(field);
    std::getline(is, field, ',');
    r.length = static_cast<unsigned>(std::stoul(field));
    std::getline(is, field, ',');
    if (field == "error")
        r.failed = true;
    else
        r.cls = field == "full"  ? path_class::full
              : field == "d-1"   ? path_class::d_minus_1
              : field == "d-2"   ? path_class::d_minus_2
                                 : path_class::shorter;
    std::getline(is, field, ',');
    if (!field.empty()) r.count = big_int(field);
    std::getline(is, field, ',');
    r.ms = std::stoll(field);
    return r;
}

// Longest path length as a function of p along the monotone coupling:
// nondecreasing by construction because the per-edge thresholds are fixed
// by the seed.
inline std::vector<std::pair<double, unsigned>> coupled_transition_curve(unsigned d, std::uint64_t seed,
                                                                         const std::vector<double>& p_grid,
                                                                         std::size_t budget = default_dp_budget) {
    for (std::size_t i = 1; i < p_grid.size(); ++i)
        if (p_grid[i] < p_grid[i - 1]) throw invalid_parameter_error("p_grid must ascend");
    std::vector<std::pair<double, unsigned>> out;
    dp_workspace ws;
    for (double p : p_grid) {
        random_subgraph<64> g(d, p, seed);
        out.emplace_back(p, longest_increasing_path_length(g, ws, budget));
    }
    return out;
}

namespace detail {

inline std::string cell_file_name(double alpha, unsigned d) {
    std::ostringstream os;
    os << "cell_a" << fmt_double(alpha) << "_d" << d << ".csv";
    return os.str();
}

inline double se_of_proportion(double p, std::size_t n) {
    return n ? std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n)) : 0.0;
}

}  // namespace detail

// N independent runs of one (alpha, d) cell. Replica seeds derive from the
// master seed through a bijection of a global replica counter, so no two
// rows of a sweep share a seed.
inline std::vector<run_record> run_cell(const sweep_config& cfg, double alpha, unsigned d,
                                        std::uint64_t first_global_index) {
    std::vector<run_record> records(cfg.replicas);
    const bool want_counts = cfg.has_task("counts");
    const double p = std::min(1.0, alpha / d);
    parallel_for(cfg.replicas, [&](std::size_t r) {
        auto t0 = std::chrono::steady_clock::now();
        run_record rec;
        rec.d = d;
        rec.alpha = alpha;
        rec.seed = derive_seed(cfg.master_seed, first_global_index + r);
        try {
            random_subgraph<64> g(d, p, rec.seed);
            dp_workspace ws;
            rec.length = longest_increasing_path_length(g, ws, cfg.budget_bytes);
            rec.cls = classify_length(rec.length, d);
            if (want_counts) rec.count = count_antipodal_paths(g, cfg.budget_bytes);
        } catch (const std::exception&) {
            rec.failed = true;
        }
        rec.ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                     .count();
        records[r] = std::move(rec);
    });
    return records;
}

inline nlohmann::json summarize_cell(const sweep_config& cfg, double alpha, unsigned d,
                                     const std::vector<run_record>& records) {
    nlohmann::json cell;
    const double p = std::min(1.0, alpha / d);
    cell["d"] = d;
    cell["alpha"] = alpha;
    cell["p"] = p;
    cell["n"] = records.size();
    std::size_t failures = 0;
    for (const auto& r : records) failures += r.failed;
    cell["failures"] = failures;

    const double n = static_cast<double>(records.size());
    if (cfg.has_task("classify")) {
        std::size_t full = 0, dm1 = 0, dm2 = 0;
        for (const auto& r : records) {
            full += (!r.failed && r.cls == path_class::full);
            dm1 += (!r.failed && r.cls == path_class::d_minus_1);
            dm2 += (!r.failed && r.cls == path_class::d_minus_2);
        }
        double p_full = full / n, p_dm1 = dm1 / n, p_dm2 = dm2 / n;
        double p_ge_dm2 = p_full + p_dm1 + p_dm2;
        double zeta = survival_probability(p * d);
        nlohmann::json c;
        c["p_full"] = p_full;
        c["p_dm1"] = p_dm1;
        c["p_dm2"] = p_dm2;
        c["p_shorter"] = 1.0 - p_ge_dm2;
        c["p_ge_dm2"] = p_ge_dm2;
        c["se_full"] = detail::se_of_proportion(p_full, records.size());
        c["se_dm1"] = detail::se_of_proportion(p_dm1, records.size());
        c["se_ge_dm2"] = detail::se_of_proportion(p_ge_dm2, records.size());
        c["zeta"] = zeta;
        c["pred_full"] = zeta * zeta;
        c["pred_dm1"] = 2 * zeta * (1 - zeta);
        c["pred_ge_dm2"] = zeta * zeta + 2 * zeta * (1 - zeta);
        cell["classify"] = c;
    }
    if (cfg.has_task("markov")) {
        nlohmann::json rows = nlohmann::json::array();
        for (unsigned m = 0; m <= d; ++m) {
            std::size_t ge = 0;
            for (const auto& r : records) ge += (!r.failed && r.length >= m);
            double p_ge = ge / n;
            double bound = static_cast<double>(std::min<long double>(expected_path_count(d, m, p), 1e300L));
            rows.push_back({{"m", m},
                            {"p_ge", p_ge},
                            {"se", detail::se_of_proportion(p_ge, records.size())},
                            {"bound", bound}});
        }
        cell["markov"] = rows;
    }
    if (cfg.has_task("counts")) {
        double mean = 0, m2 = 0;
        std::size_t k = 0;
        for (const auto& r : records) {
            if (r.failed || !r.count) continue;
            double x = r.count->convert_to<double>();
            ++k;
            double delta = x - mean;
            mean += delta / k;
            m2 += delta * (x - mean);
        }
        double zeta = survival_probability(p * d);
        nlohmann::json c;
        c["mean"] = mean;
        c["variance"] = k > 1 ? m2 / (k - 1) : 0.0;
        c["pred_mean"] = zeta * zeta * std::ldexp(1.0, static_cast<int>(d) - 1);
        cell["counts"] = c;
    }
    return cell;
}

struct sweep_result {
    nlohmann::json summary;
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
};

// Full sweep over the (alpha, d) grid. Every cell flushes its own CSV as it
// completes, so an interrupted sweep resumes from the finished cells; the
// merged CSV, summary JSON, SVG chart and gnuplot data file are rebuilt at
// the end. Output is byte-identical across runs of the same config except
// for the wall-time column.
inline sweep_result run_sweep(const sweep_config& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    nlohmann::json summary;
    summary["schema"] = 1;
    summary["master_seed"] = cfg.master_seed_text;
    summary["config"] = cfg.to_json();
    summary["cells"] = nlohmann::json::array();

    std::vector<std::string> merged_rows;
    std::uint64_t cell_ordinal = 0;

    std::ofstream curves;
    if (cfg.has_task("coupling")) {
        curves.open(out_dir / "curves.csv");
        curves << "d,alpha,seed,p,length\n";
    }

    for (double alpha : cfg.alphas) {
        for (unsigned d : cfg.dims) {
            std::uint64_t first_index = cell_ordinal * cfg.replicas;
            ++cell_ordinal;

            std::vector<run_record> records;
            if (cfg.wants_runs()) {
                auto cell_path = out_dir / detail::cell_file_name(alpha, d);
                bool cached = false;
                if (std::filesystem::exists(cell_path)) {
                    std::ifstream in(cell_path);
                    std::string line;
                    std::getline(in, line);  // header
                    while (std::getline(in, line))
                        if (!line.empty()) records.push_back(parse_csv_row(line));
                    cached = records.size() == cfg.replicas;
                    if (!cached) records.clear();
                }
                if (!cached) {
                    records = run_cell(cfg, alpha, d, first_index);
                    std::ofstream out(cell_path);
                    out << run_csv_header << '\n';
                    for (const auto& r : records) out << csv_row(r) << '\n';
                }
                for (const auto& r : records) merged_rows.push_back(csv_row(r));
            }

            nlohmann::json cell = summarize_cell(cfg, alpha, d, records);

            if (cfg.has_task("coupling")) {
                auto grid = cfg.grid();
                std::vector<std::vector<std::pair<double, unsigned>>> all(cfg.replicas);
                parallel_for(cfg.replicas, [&](std::size_t r) {
                    std::uint64_t seed = derive_seed(cfg.master_seed, first_index + r);
                    all[r] = coupled_transition_curve(d, seed, grid, cfg.budget_bytes);
                });
                double crossing_sum = 0;
                std::size_t crossed = 0;
                for (std::size_t r = 0; r < all.size(); ++r) {
                    std::uint64_t seed = derive_seed(cfg.master_seed, first_index + r);
                    for (auto [pv, len] : all[r])
                        curves << d << ',' << fmt_double(alpha) << ',' << seed << ',' << fmt_double(pv) << ','
                               << len << '\n';
                    for (auto [pv, len] : all[r])
                        if (len + 2 >= d) {
                            crossing_sum += pv;
                            ++crossed;
                            break;
                        }
                }
                nlohmann::json c;
                c["n_curves"] = all.size();
                c["n_crossed"] = crossed;
                if (crossed) {
                    c["mean_crossing_p"] = crossing_sum / crossed;
                    c["mean_crossing_alpha"] = crossing_sum / crossed * d;
                }
                cell["coupling"] = c;
            }

            summary["cells"].push_back(std::move(cell));
        }
    }

    sweep_result result;
    result.csv_path = out_dir / "sweep.csv";
    {
        std::ofstream out(result.csv_path);
        out << run_csv_header << '\n';
        for (const auto& row : merged_rows) out << row << '\n';
    }
    result.summary_path = out_dir / "summary.json";
    {
        std::ofstream out(result.summary_path);
        out << summary.dump(2) << '\n';
    }

    if (cfg.has_task("classify")) {
        svg_chart chart("P(l = d) across dimensions", "d", "probability");
        std::ofstream dat(out_dir / "chart.dat");
        dat << "# d alpha p_full se_full pred_full p_ge_dm2 pred_ge_dm2\n";
        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
        std::size_t ai = 0;
        for (double alpha : cfg.alphas) {
            std::vector<std::pair<double, double>> pts, pred;
            std::vector<std::tuple<double, double, double>> band;
            for (const auto& cell : summary["cells"]) {
                if (cell["alpha"].get<double>() != alpha || !cell.contains("classify")) continue;
                double dd = cell["d"].get<double>();
                const auto& c = cell["classify"];
                double pf = c["p_full"].get<double>(), se = c["se_full"].get<double>();
                pts.emplace_back(dd, pf);
                pred.emplace_back(dd, c["pred_full"].get<double>());
                band.emplace_back(dd, pf - 2 * se, pf + 2 * se);
                dat << dd << ' ' << fmt_double(alpha) << ' ' << fmt_double(pf) << ' ' << fmt_double(se) << ' '
                    << fmt_double(c["pred_full"].get<double>()) << ' '
                    << fmt_double(c["p_ge_dm2"].get<double>()) << ' '
                    << fmt_double(c["pred_ge_dm2"].get<double>()) << '\n';
            }
            if (pts.empty()) continue;
            const char* color = palette[ai++ % 5];
            chart.add_band(std::move(band), color);
            chart.add_series("alpha=" + fmt_double(alpha), std::move(pts), color);
            chart.add_series("zeta^2 (a=" + fmt_double(alpha) + ")", std::move(pred), color, true);
        }
        std::ofstream svg(out_dir / "chart.svg");
        chart.write(svg);
    }

    result.summary = std::move(summary);
    return result;
}

}  // namespace qperc
