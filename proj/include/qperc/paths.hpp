#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qperc/sampler.hpp"
#include "qperc/vertex.hpp"

namespace qperc {

using big_int = boost::multiprecision::cpp_int;

enum class path_class { full, d_minus_1, d_minus_2, shorter };

inline const char* to_string(path_class c) {
    switch (c) {
        case path_class::full: return "full";
        case path_class::d_minus_1: return "d-1";
        case path_class::d_minus_2: return "d-2";
        default: return "shorter";
    }
}

inline path_class classify_length(unsigned length, unsigned d) {
    if (length == d) return path_class::full;
    if (length + 1 == d) return path_class::d_minus_1;
    if (length + 2 == d) return path_class::d_minus_2;
    return path_class::shorter;
}

struct path_result {
    unsigned length = 0;
    std::vector<vertex64> witness;
    path_class classification = path_class::shorter;
};

inline constexpr std::size_t default_dp_budget = std::size_t{512} << 20;

namespace detail {

// Every edge of the block [base, base + 2^k) is handled exactly once, in an
// order where all edges into a vertex precede any edge out of it: recurse
// into the lower half, push across coordinate k-1, recurse into the upper
// half. The cross pass streams two contiguous ranges, which keeps the
// full-cube DP memory-bandwidth friendly at d near 28. step(u, c, from, to)
// decides itself whether the edge presence even needs to be sampled.
template <typename Cell, typename Step>
void dp_block(std::vector<Cell>& val, std::uint64_t base, unsigned k, Step&& step) {
    constexpr unsigned leaf_k = 6;
    if (k <= leaf_k) {
        std::uint64_t n = std::uint64_t{1} << k;
        for (std::uint64_t off = 1; off < n; ++off) {
            std::uint64_t v = base + off;
            std::uint64_t rest = off;
            while (rest) {
                unsigned c = std::countr_zero(rest);
                rest &= rest - 1;
                std::uint64_t u = v - (std::uint64_t{1} << c);
                step(u, c, val[u], val[v]);
            }
        }
        return;
    }
    std::uint64_t half = std::uint64_t{1} << (k - 1);
    dp_block(val, base, k - 1, step);
    for (std::uint64_t u = base; u < base + half; ++u) step(u, k - 1, val[u], val[u + half]);
    dp_block(val, base + half, k - 1, step);
}

template <typename Present>
void fill_lengths(std::vector<std::uint16_t>& len, unsigned d, Present&& present) {
    len.assign(std::uint64_t{1} << d, 0);
    // sampling first keeps the cross loops branch-light and vectorizable
    dp_block(len, 0, d,
             [&present](std::uint64_t u, unsigned c, const std::uint16_t& from, std::uint16_t& to) {
                 if (present(u, c)) {
                     std::uint16_t cand = static_cast<std::uint16_t>(from + 1);
                     if (cand > to) to = cand;
                 }
             });
}

inline void check_budget(unsigned d, std::size_t bytes_per_vertex, std::size_t budget) {
    if (d >= 63 || ((std::uint64_t{1} << d) * bytes_per_vertex) > budget)
        throw dimension_too_large_error("full-cube table for d=" + std::to_string(d) +
                                        " exceeds the memory budget");
}

}  // namespace detail

// Reusable scratch space for repeated full-cube DP runs.
struct dp_workspace {
    std::vector<std::uint16_t> len;
};

// Exact length of a longest increasing path, layered DP over the whole cube.
template <std::size_t MaxDim>
unsigned longest_increasing_path_length(const random_subgraph<MaxDim>& g, dp_workspace& ws,
                                        std::size_t budget_bytes = default_dp_budget) {
    static_assert(random_subgraph<MaxDim>::word_count == 1, "full-cube DP needs a single-word instantiation");
    unsigned d = g.dim();
    detail::check_budget(d, 2, budget_bytes);
    detail::fill_lengths(ws.len, d, [&g](std::uint64_t u, unsigned c) { return g.present_value(u, c); });
    std::uint16_t best = 0;
    for (auto v : ws.len) best = std::max(best, v);
    return best;
}

// Longest increasing path with a reconstructed witness. The witness is
// rebuilt by a backward pass that re-queries edge presence; ties choose the
// smallest-numeric-value predecessor, and the endpoint is the smallest
// vertex attaining the maximum.
template <std::size_t MaxDim>
path_result longest_increasing_path(const random_subgraph<MaxDim>& g,
                                    std::size_t budget_bytes = default_dp_budget) {
    static_assert(random_subgraph<MaxDim>::word_count == 1);
    unsigned d = g.dim();
    dp_workspace ws;
    path_result res;
    res.length = longest_increasing_path_length(g, ws, budget_bytes);
    res.classification = classify_length(res.length, d);

    std::uint64_t end = 0;
    for (std::uint64_t v = 0; v < ws.len.size(); ++v) {
        if (ws.len[v] == res.length) {
            end = v;
            break;
        }
    }
    std::vector<std::uint64_t> chain{end};
    std::uint64_t v = end;
    for (unsigned step = res.length; step > 0; --step) {
        std::uint64_t best_u = 0;
        bool found = false;
        // removing the highest set bit yields the smallest predecessor value
        for (int c = static_cast<int>(d) - 1; c >= 0; --c) {
            if (!((v >> c) & 1u)) continue;
            std::uint64_t u = v - (std::uint64_t{1} << c);
            if (ws.len[u] == step - 1 && g.present_value(u, static_cast<unsigned>(c))) {
                best_u = u;
                found = true;
                break;
            }
        }
        if (!found) throw invariant_violation_error("witness backtracking failed");
        chain.push_back(best_u);
        v = best_u;
    }
    res.witness.reserve(chain.size());
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        res.witness.push_back(vertex<MaxDim>::from_value(d, *it));
    return res;
}

// Re-checks a witness edge by edge against the oracle.
template <std::size_t MaxDim>
bool verify_witness(const random_subgraph<MaxDim>& g, const std::vector<vertex<MaxDim>>& witness) {
    if (witness.empty()) return false;
    for (std::size_t i = 0; i + 1 < witness.size(); ++i) {
        const auto& a = witness[i];
        const auto& b = witness[i + 1];
        if (b.layer() != a.layer() + 1) return false;
        unsigned c;
        try {
            c = coord_diff(a, b);
        } catch (const not_adjacent_error&) {
            return false;
        }
        if (!a.is_subset_of(b)) return false;
        if (!g.edge_state(edge_id<MaxDim>(a, c))) return false;
    }
    return true;
}

namespace detail {

template <typename Acc, typename Present>
Acc count_paths_impl(unsigned d, Present&& present) {
    std::vector<Acc> cnt(std::uint64_t{1} << d);
    cnt[0] = 1;
    dp_block(cnt, 0, d, [&present](std::uint64_t u, unsigned c, const Acc& from, Acc& to) {
        if (from != 0 && present(u, c)) to += from;
    });
    return cnt.back();
}

}  // namespace detail

// Exact number of increasing paths from the all-zero to the all-one vertex
// whose edges are all present. Counts fit a 64-bit accumulator up to d=20
// (they are bounded by d!); larger d switches to arbitrary precision.
template <std::size_t MaxDim>
big_int count_antipodal_paths(const random_subgraph<MaxDim>& g,
                              std::size_t budget_bytes = default_dp_budget) {
    static_assert(random_subgraph<MaxDim>::word_count == 1);
    unsigned d = g.dim();
    auto present = [&g](std::uint64_t u, unsigned c) { return g.present_value(u, c); };
    if (d <= 20) {
        detail::check_budget(d, 8, budget_bytes);
        return big_int(detail::count_paths_impl<std::uint64_t>(d, present));
    }
    detail::check_budget(d, sizeof(big_int), budget_bytes);
    return detail::count_paths_impl<big_int>(d, present);
}

enum class pole_side { from_zero, from_one };

// True iff an increasing path of present edges joins the pole to (its side
// of) layer k. Explores only the reachable set, so it scales to large d.
template <std::size_t MaxDim>
bool percolates_to_layer(const random_subgraph<MaxDim>& g, pole_side side, unsigned k) {
    unsigned d = g.dim();
    if (k > d) throw invalid_input_error("layer distance exceeds dimension");
    if (k == 0) return true;

    using V = vertex<MaxDim>;
    std::vector<V> frontier{side == pole_side::from_zero ? V::zero(d) : V::ones(d)};
    std::unordered_set<V, vertex_hash<MaxDim>> next;
    for (unsigned step = 0; step < k; ++step) {
        next.clear();
        for (const auto& u : frontier) {
            std::uint64_t fu = g.fold(u);
            for (unsigned c = 0; c < d; ++c) {
                if (side == pole_side::from_zero) {
                    if (u.test(c)) continue;
                    if (g.present_from_fold(fu, c)) next.insert(u.with(c));
                } else {
                    if (!u.test(c)) continue;
                    // the edge is keyed by its lower endpoint
                    std::uint64_t fl = g.fold_flip(fu, u, c);
                    if (g.present_from_fold(fl, c)) next.insert(u.without(c));
                }
            }
        }
        if (next.empty()) return false;
        frontier.assign(next.begin(), next.end());
    }
    return true;
}

// Increasing path from u to v inside Q(u, v), if one exists in the sample.
// Backtracking prefers removing the highest free coordinate, matching the
// witness tie-break of the full-cube DP.
template <std::size_t MaxDim>
std::optional<std::vector<vertex<MaxDim>>> find_increasing_path_between(const random_subgraph<MaxDim>& g,
                                                                        const vertex<MaxDim>& u,
                                                                        const vertex<MaxDim>& v,
                                                                        std::size_t budget_bytes = default_dp_budget) {
    if (u.dim() != v.dim() || u.dim() != g.dim())
        throw invalid_input_error("path endpoints must match the sample dimension");
    if (!u.is_subset_of(v)) throw not_comparable_error("endpoints are not comparable");

    subcube<MaxDim> cube(u, v);
    subcube_view<MaxDim> view(g, cube);
    unsigned k = view.dimension();
    if (k == 0) return std::vector<vertex<MaxDim>>{u};
    if (k >= 48 || (std::uint64_t{1} << k) > budget_bytes)
        throw dimension_too_large_error("subcube reachability table exceeds the memory budget");

    std::vector<std::uint8_t> reach(std::uint64_t{1} << k, 0);
    reach[0] = 1;
    for (std::uint64_t local = 1; local < reach.size(); ++local) {
        std::uint64_t rest = local;
        while (rest) {
            unsigned c = std::countr_zero(rest);
            rest &= rest - 1;
            std::uint64_t prev = local ^ (std::uint64_t{1} << c);
            if (reach[prev] && view.present_local(prev, c)) {
                reach[local] = 1;
                break;
            }
        }
    }
    std::uint64_t top = reach.size() - 1;
    if (!reach[top]) return std::nullopt;

    std::vector<std::uint64_t> chain{top};
    std::uint64_t cur = top;
    while (cur != 0) {
        bool found = false;
        for (int c = static_cast<int>(k) - 1; c >= 0; --c) {
            if (!((cur >> c) & 1u)) continue;
            std::uint64_t prev = cur ^ (std::uint64_t{1} << c);
            if (reach[prev] && view.present_local(prev, static_cast<unsigned>(c))) {
                chain.push_back(prev);
                cur = prev;
                found = true;
                break;
            }
        }
        if (!found) throw invariant_violation_error("subcube backtracking failed");
    }
    std::vector<vertex<MaxDim>> path;
    path.reserve(chain.size());
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) path.push_back(view.embed(*it));
    return path;
}

template <std::size_t MaxDim>
bool exists_increasing_path_between(const random_subgraph<MaxDim>& g, const vertex<MaxDim>& u,
                                    const vertex<MaxDim>& v,
                                    std::size_t budget_bytes = default_dp_budget) {
    return find_increasing_path_between(g, u, v, budget_bytes).has_value();
}

}  // namespace qperc
