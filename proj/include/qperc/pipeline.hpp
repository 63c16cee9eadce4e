#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qperc/paths.hpp"
#include "qperc/treegrow.hpp"

namespace qperc {

// Scaled stand-ins for the asymptotic heights and cardinalities of the
// witness construction. half_split = 0 and child_cap = 0 pick d/2 and
// ceil(ln d).
struct pipeline_params {
    unsigned h0 = 3;             // leaf height of the lower base tree
    unsigned h1 = 3;             // mirror height of the upper base tree
    unsigned leaf_target = 8;    // extension leaves requested per run
    unsigned half_split = 0;     // lower extension grows on [0, half_split)
    unsigned subcube_budget = 16;
    unsigned child_cap = 0;

    void validate(unsigned d) const {
        if (h0 + h1 >= d) throw invalid_parameter_error("pipeline requires h0 + h1 < d");
        if (leaf_target < 1) throw invalid_parameter_error("leaf_target must be positive");
        if (subcube_budget < 1) throw invalid_parameter_error("subcube_budget must be positive");
        if (half_split > d) throw invalid_parameter_error("half_split exceeds dimension");
    }
};

enum class pipeline_stage {
    lower_tree_died,
    upper_tree_died,
    no_disjoint_pairs,
    no_subcube_path,
    witness_found,
};

inline const char* to_string(pipeline_stage s) {
    switch (s) {
        case pipeline_stage::lower_tree_died: return "lower_tree_died";
        case pipeline_stage::upper_tree_died: return "upper_tree_died";
        case pipeline_stage::no_disjoint_pairs: return "no_disjoint_pairs";
        case pipeline_stage::no_subcube_path: return "no_subcube_path";
        default: return "witness_found";
    }
}

struct pipeline_outcome {
    pipeline_stage stage_reached = pipeline_stage::lower_tree_died;
    unsigned subcubes_tested = 0;
    std::optional<std::vector<vertex64>> witness;
    std::vector<vertex64> lower_leaves;                      // V_0
    std::vector<vertex64> upper_leaves;                      // V_1 (paired endpoints)
    std::vector<std::pair<vertex64, vertex64>> pairs;        // chosen (v_i0, v_i1)
};

struct pair_candidate {
    vertex64 v0;
    std::vector<std::uint16_t> c_list;  // C_T0(v0, 0)
    vertex64 v1;
};

// Greedy maximal list of pairs whose upper endpoint avoids the lower
// endpoint's branch list and whose spanned subcubes are pairwise
// certifiably disjoint.
inline std::vector<std::pair<vertex64, vertex64>> select_disjoint_pairs(
    const std::vector<pair_candidate>& candidates) {
    std::vector<std::pair<vertex64, vertex64>> chosen;
    std::vector<subcube<64>> cubes;
    for (const auto& cand : candidates) {
        if (!cand.v0.is_subset_of(cand.v1)) continue;
        bool clean = true;
        for (auto c : cand.c_list)
            if (cand.v1.test(c)) {
                clean = false;
                break;
            }
        if (!clean) continue;
        subcube<64> q(cand.v0, cand.v1);
        bool disjoint = true;
        for (const auto& other : cubes)
            if (!subcubes_certified_disjoint(q, other)) {
                disjoint = false;
                break;
            }
        if (!disjoint) continue;
        cubes.push_back(q);
        chosen.emplace_back(cand.v0, cand.v1);
    }
    return chosen;
}

namespace detail {

inline constexpr unsigned pipeline_extension_height = 8;

struct found_pair {
    pair_candidate cand;
    vertex64 base_leaf_upper;            // w, the upper base leaf
    vertex64 pre_walk;                   // y, the per-pair tree vertex the walk started from
    std::vector<std::uint16_t> walk;     // coordinates removed, in removal order
    std::vector<vertex64> upper_chain;   // y -> w in the per-pair tree (ascending)
};

inline vertex64 coords_to_mask(unsigned d, const std::vector<std::uint16_t>& cs) {
    vertex64 m(d);
    for (auto c : cs) m.set(c);
    return m;
}

}  // namespace detail

// The staged witness construction: grow a base tree from the all-zero
// vertex, grow a base tree from the all-one vertex above it, extend the
// lower tree on the first-half coordinates, pick distinguishable leaf pairs
// spanning certifiably disjoint subcubes, and hunt for an antipodal path
// inside each subcube. Any witness is re-validated edge by edge.
inline pipeline_outcome build_witness(unsigned d, double alpha, std::uint64_t seed,
                                      const pipeline_params& params = {}) {
    params.validate(d);
    const double p = std::min(1.0, alpha / d);
    random_subgraph<64> g(d, p, seed);
    const unsigned cap = params.child_cap ? params.child_cap : default_child_cap(d);
    const unsigned half = params.half_split ? params.half_split : d / 2;
    const unsigned select_cap = std::max(1u, default_child_cap(d));

    pipeline_outcome out;
    using V = vertex64;
    auto full = subcube<64>::full(d);

    // stage 1: lower base tree, leaves at layer h0
    tree_grow_input<64> in0(full, V::zero(d), {}, params.h0 + 1, cap);
    auto [t0, tr0] = tree_construct(in0, g);
    auto it0 = t0.layer_vertices.find(params.h0);
    if (it0 == t0.layer_vertices.end() || it0->second.empty()) return out;  // lower_tree_died
    std::vector<V> u0 = it0->second;
    std::sort(u0.begin(), u0.end());
    if (u0.size() > select_cap) u0.resize(select_cap);

    V i0_mask(d);
    for (const auto& u : u0)
        u.for_each_set([&](unsigned c) { i0_mask.set(c); });

    // stage 2: upper base tree avoiding I_0, so all its vertices dominate
    // every selected lower leaf
    tree_grow_input<64> in1(full, V::ones(d), i0_mask.set_coords(), d - params.h1 - 1, cap);
    auto [t1, tr1] = tree_construct(in1, g);
    out.stage_reached = pipeline_stage::upper_tree_died;
    auto it1 = t1.layer_vertices.find(d - params.h1);
    if (it1 == t1.layer_vertices.end() || it1->second.empty()) return out;
    std::vector<V> u1 = it1->second;
    std::sort(u1.begin(), u1.end());

    // coordinates present in every core upper leaf; the lower extension
    // stays inside them so its leaves sit below those upper leaves
    std::vector<V> u1_core(u1.begin(), u1.begin() + std::min<std::size_t>(u1.size(), select_cap));
    V i1_common = V::ones(d);
    for (const auto& w : u1_core) {
        V next(d);
        for (unsigned c = 0; c < d; ++c)
            if (i1_common.test(c) && w.test(c)) next.set(c);
        i1_common = next;
    }

    // stage 3a: extend some lower leaf on the first-half coordinates inside
    // the subcube that preserves its distinguishing branch list
    out.stage_reached = pipeline_stage::lower_tree_died;
    std::vector<std::uint16_t> ext_avoid;
    for (unsigned c = 0; c < d; ++c)
        if (c >= half || !i1_common.test(c)) ext_avoid.push_back(static_cast<std::uint16_t>(c));

    std::optional<monotone_tree<64>> ext_tree;
    V ext_root(d);
    std::vector<V> v0s;
    const unsigned ext_trunc_cap = std::min(params.h0 + detail::pipeline_extension_height, d - params.h1 - 1);
    std::vector<V> fallback;
    V fallback_root(d);
    if (ext_trunc_cap <= params.h0) return out;
    for (const auto& u : u0) {
        V span_hi = V::ones(d);
        for (auto c : c_set(t0, u, c_flavor::zero_side)) span_hi.reset(c);
        tree_grow_input<64> ein(subcube<64>(u, span_hi), u, ext_avoid, ext_trunc_cap, cap);
        auto [bt, btr] = tree_construct(ein, g);
        for (unsigned j = params.h0 + 1; j < ext_trunc_cap; ++j) {
            auto jt = bt.layer_vertices.find(j);
            if (jt == bt.layer_vertices.end() || jt->second.empty()) break;
            std::vector<V> layer = jt->second;
            std::sort(layer.begin(), layer.end());
            if (layer.size() >= params.leaf_target) {
                layer.resize(params.leaf_target);
                v0s = std::move(layer);
                ext_tree = std::move(bt);
                ext_root = u;
                break;
            }
            if (layer.size() > fallback.size()) {
                fallback = layer;
                fallback_root = u;
                ext_tree = bt;
            }
        }
        if (!v0s.empty()) break;
    }
    if (v0s.empty() && !fallback.empty()) {
        v0s = fallback;
        ext_root = fallback_root;
    }
    if (v0s.empty() || !ext_tree) return out;  // no extension grew at all

    out.lower_leaves = v0s;

    // stage 3b/4: per-pair upper growth (rooted at assigned upper base
    // leaves, never removing the lower leaf's coordinates) plus the
    // offending-coordinate refinement walk
    std::vector<detail::found_pair> found;
    std::vector<pair_candidate> candidates;
    for (std::size_t i = 0; i < v0s.size(); ++i) {
        const V& v0 = v0s[i];
        auto cl = c_set(*ext_tree, v0, c_flavor::zero_side);
        for (auto c : c_set(t0, ext_root, c_flavor::zero_side)) cl.push_back(c);
        std::sort(cl.begin(), cl.end());
        cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
        V cl_mask = detail::coords_to_mask(d, cl);

        std::optional<detail::found_pair> best;
        for (std::size_t gi = i; gi < u1.size() && !best; gi += v0s.size()) {
            const V& w = u1[gi];
            if (!v0.is_subset_of(w)) continue;

            V w_lo = detail::coords_to_mask(d, c_set(t1, w, c_flavor::one_side));
            unsigned trunc = std::max<unsigned>(
                w.layer() > detail::pipeline_extension_height ? w.layer() - detail::pipeline_extension_height : 0,
                v0.layer());
            trunc = std::max(trunc, w_lo.layer());
            tree_grow_input<64> pin(subcube<64>(w_lo, w), w, v0.set_coords(), trunc, cap);
            auto [bt1, btr1] = tree_construct(pin, g);

            for (const auto& [layer, vs] : bt1.layer_vertices) {
                std::vector<V> sorted_vs = vs;
                std::sort(sorted_vs.begin(), sorted_vs.end());
                for (const auto& y : sorted_vs) {
                    V z = y;
                    std::vector<std::uint16_t> walk;
                    bool ok = true;
                    while (ok) {
                        int offending = -1;
                        for (auto c : cl)
                            if (z.test(c)) {
                                offending = c;
                                break;
                            }
                        if (offending < 0) break;
                        if (walk.size() >= cl.size() + 2) {
                            ok = false;
                            break;
                        }
                        V zl = z.without(static_cast<unsigned>(offending));
                        if (!g.edge_state(zl, static_cast<unsigned>(offending))) {
                            ok = false;
                            break;
                        }
                        walk.push_back(static_cast<std::uint16_t>(offending));
                        z = zl;
                    }
                    if (!ok) continue;
                    detail::found_pair fp;
                    fp.cand = pair_candidate{v0, cl, z};
                    fp.base_leaf_upper = w;
                    fp.pre_walk = y;
                    fp.walk = std::move(walk);
                    fp.upper_chain = bt1.path_from_root(y);  // w -> ... -> y, descending
                    best = std::move(fp);
                    break;
                }
                if (best) break;
            }
        }
        if (best) {
            candidates.push_back(best->cand);
            found.push_back(std::move(*best));
        }
    }

    // stage 5: greedy certified-disjoint selection
    out.stage_reached = pipeline_stage::no_disjoint_pairs;
    auto chosen = select_disjoint_pairs(candidates);
    if (chosen.empty()) return out;
    out.pairs = chosen;
    for (const auto& [v0, v1] : chosen) out.upper_leaves.push_back(v1);

    // stage 6: probe each subcube for an antipodal path, then stitch
    out.stage_reached = pipeline_stage::no_subcube_path;
    for (const auto& [v0, v1] : chosen) {
        if (out.subcubes_tested >= params.subcube_budget) break;
        ++out.subcubes_tested;
        auto mid = find_increasing_path_between(g, v0, v1);
        if (!mid) continue;

        const detail::found_pair* fp = nullptr;
        for (const auto& f : found)
            if (f.cand.v0 == v0 && f.cand.v1 == v1) {
                fp = &f;
                break;
            }
        if (!fp) throw invariant_violation_error("chosen pair lost its construction record");

        std::vector<V> witness = t0.path_from_root(ext_root);               // 0 .. u
        {
            auto seg = ext_tree->path_from_root(v0);                        // u .. v0
            witness.insert(witness.end(), seg.begin() + 1, seg.end());
        }
        witness.insert(witness.end(), mid->begin() + 1, mid->end());        // v0 .. v1
        {
            V cur = v1;
            for (auto it = fp->walk.rbegin(); it != fp->walk.rend(); ++it) {
                cur = cur.with(*it);                                        // v1 .. y
                witness.push_back(cur);
            }
            for (auto it = fp->upper_chain.rbegin() + 1; it < fp->upper_chain.rend(); ++it)
                witness.push_back(*it);                                     // y .. w
            auto seg = t1.path_from_root(fp->base_leaf_upper);              // 1 .. w
            for (auto it = seg.rbegin() + 1; it < seg.rend(); ++it) witness.push_back(*it);
        }

        if (witness.size() != d + 1 || !verify_witness(g, witness))
            throw invariant_violation_error("stitched witness failed validation");
        out.witness = std::move(witness);
        out.stage_reached = pipeline_stage::witness_found;
        return out;
    }
    return out;
}

}  // namespace qperc
