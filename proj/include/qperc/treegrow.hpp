#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qperc/sampler.hpp"
#include "qperc/vertex.hpp"

namespace qperc {

// Default per-vertex child cap: ceil(ln d) of the ambient dimension,
// never below 1.
inline unsigned default_child_cap(unsigned d) {
    return std::max(1u, static_cast<unsigned>(std::ceil(std::log(static_cast<double>(d)))));
}

template <std::size_t MaxDim = 64>
struct tree_grow_input {
    subcube<MaxDim> cube;                 // the subcube H, explored in canonical order
    vertex<MaxDim> root;                  // one of cube.lo, cube.hi
    std::vector<std::uint16_t> avoided;   // coordinate set C
    unsigned trunc_layer;                 // the layer L_i at which growth truncates
    unsigned child_cap = 0;               // 0 -> ceil(ln d)

    tree_grow_input(subcube<MaxDim> c, vertex<MaxDim> r, std::vector<std::uint16_t> av, unsigned trunc,
                    unsigned cap = 0)
        : cube(std::move(c)), root(std::move(r)), avoided(std::move(av)), trunc_layer(trunc), child_cap(cap) {}

    bool rooted_at_lo() const { return root == cube.lo(); }

    unsigned resolved_cap() const { return child_cap ? child_cap : default_child_cap(root.dim()); }

    void validate() const {
        if (!(root == cube.lo()) && !(root == cube.hi()))
            throw invalid_input_error("root must be an endpoint of the subcube");
        if (trunc_layer < cube.lo().layer() || trunc_layer > cube.hi().layer())
            throw invalid_input_error("truncation layer outside the subcube layer span");
        for (auto c : avoided)
            if (c >= root.dim()) throw invalid_input_error("avoided coordinate out of range");
    }
};

enum class c_flavor { all, zero_side, one_side };

// Rooted monotone tree in Q^d with per-vertex branch-coordinate bookkeeping.
template <std::size_t MaxDim = 64>
struct monotone_tree {
    using V = vertex<MaxDim>;

    struct link {
        V parent;
        std::uint16_t coord;
        friend bool operator==(const link& a, const link& b) { return a.coord == b.coord && a.parent == b.parent; }
    };

    V root;
    bool increasing = true;
    std::unordered_map<V, link, vertex_hash<MaxDim>> parent;
    std::unordered_map<V, std::vector<std::uint16_t>, vertex_hash<MaxDim>> children_coords;
    std::unordered_set<V, vertex_hash<MaxDim>> leaves;
    std::map<unsigned, std::vector<V>> layer_vertices;  // accept order within a layer

    bool contains(const V& v) const { return v == root || parent.count(v); }
    std::size_t size() const { return parent.size() + 1; }

    std::vector<V> path_from_root(const V& v) const {
        if (!contains(v)) throw vertex_not_in_tree_error("vertex not in tree");
        std::vector<V> rev{v};
        V cur = v;
        while (!(cur == root)) {
            cur = parent.at(cur).parent;
            rev.push_back(cur);
        }
        return {rev.rbegin(), rev.rend()};
    }

    friend bool operator==(const monotone_tree& a, const monotone_tree& b) {
        return a.root == b.root && a.increasing == b.increasing && a.parent == b.parent &&
               a.children_coords == b.children_coords && a.leaves == b.leaves &&
               a.layer_vertices == b.layer_vertices;
    }
};

// One dequeue event: the explored vertex, a monotone counter snapshot that
// identifies the A/B sets at that moment, the candidate set Y_x (equal to
// the queried edges, ascending coordinate), and the accepted children.
template <std::size_t MaxDim = 64>
struct grow_event {
    vertex<MaxDim> x;
    std::uint32_t snapshot;  // vertices enqueued strictly before this dequeue
    std::vector<std::uint16_t> candidate_coords;
    std::vector<std::uint16_t> accepted_coords;

    friend bool operator==(const grow_event& a, const grow_event& b) {
        return a.snapshot == b.snapshot && a.x == b.x && a.candidate_coords == b.candidate_coords &&
               a.accepted_coords == b.accepted_coords;
    }
};

template <std::size_t MaxDim = 64>
struct grow_trace {
    std::vector<grow_event<MaxDim>> events;
    std::unordered_map<vertex<MaxDim>, std::uint32_t, vertex_hash<MaxDim>> enqueue_seq;

    friend bool operator==(const grow_trace& a, const grow_trace& b) {
        return a.events == b.events && a.enqueue_seq == b.enqueue_seq;
    }
};

// C_T(v): branch coordinates hanging off the root-to-v path, computed by
// walking the path and unioning each strict ancestor's children coordinates
// minus the coordinate the path continues through. Flavors intersect with
// the complement of I(v) (zero_side) or with I(v) (one_side).
template <std::size_t MaxDim>
std::vector<std::uint16_t> c_set(const monotone_tree<MaxDim>& tree, const vertex<MaxDim>& v, c_flavor flavor) {
    if (!tree.contains(v)) throw vertex_not_in_tree_error("c_set: vertex not in tree");
    vertex<MaxDim> acc(v.dim());
    auto path = tree.path_from_root(v);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        unsigned continue_coord = coord_diff(path[i], path[i + 1]);
        auto it = tree.children_coords.find(path[i]);
        if (it != tree.children_coords.end())
            for (auto c : it->second)
                if (c != continue_coord) acc.set(c);
    }
    std::vector<std::uint16_t> out;
    acc.for_each_set([&](unsigned c) {
        bool in_v = v.test(c);
        if (flavor == c_flavor::all || (flavor == c_flavor::zero_side && !in_v) ||
            (flavor == c_flavor::one_side && in_v))
            out.push_back(static_cast<std::uint16_t>(c));
    });
    return out;
}

// The Tree Construction algorithm: a modified BFS. Each dequeued vertex x
// queries, in ascending coordinate order, every unvisited neighbor in the
// next layer whose connecting coordinate avoids C and the branch set C_x;
// at most child_cap present edges are accepted, the rest are queried but
// rejected. Candidates are emptied once the next layer reaches the
// truncation layer, so reached leaves sit one layer before it.
template <std::size_t MaxDim>
std::pair<monotone_tree<MaxDim>, grow_trace<MaxDim>> tree_construct(const tree_grow_input<MaxDim>& in,
                                                                    const random_subgraph<MaxDim>& g) {
    using V = vertex<MaxDim>;
    in.validate();
    if (g.dim() != in.root.dim()) throw invalid_input_error("oracle dimension mismatch");

    const unsigned d = g.dim();
    const unsigned cap = in.resolved_cap();
    const bool up = in.rooted_at_lo();
    const V& lo = in.cube.lo();
    const V& hi = in.cube.hi();

    V avoided_mask(d);
    for (auto c : in.avoided) avoided_mask.set(c);

    monotone_tree<MaxDim> tree;
    tree.root = in.root;
    tree.increasing = up;
    tree.layer_vertices[in.root.layer()].push_back(in.root);

    grow_trace<MaxDim> trace;
    trace.enqueue_seq.emplace(in.root, 0);
    std::uint32_t next_seq = 1;

    // C_T(x, side) per dequeued vertex; parents finish before children start,
    // so a parent's entry is final when its child is dequeued.
    std::unordered_map<V, V, vertex_hash<MaxDim>> branch_set;

    std::deque<V> queue{in.root};
    while (!queue.empty()) {
        V x = std::move(queue.front());
        queue.pop_front();

        V cx(d);
        if (!(x == in.root)) {
            const auto& lk = tree.parent.at(x);
            cx = branch_set.at(lk.parent);
            for (auto c : tree.children_coords[lk.parent])
                if (c != lk.coord) cx.set(c);
        }
        branch_set.emplace(x, cx);

        grow_event<MaxDim> ev;
        ev.x = x;
        ev.snapshot = next_seq;

        unsigned j = x.layer();
        unsigned jx = up ? j + 1 : j - 1;
        // candidates are emptied once the child layer reaches the truncation layer
        bool truncated = up ? (j + 1 >= in.trunc_layer) : (j == 0 || j - 1 <= in.trunc_layer);

        if (!truncated) {
            unsigned accepted = 0;
            std::uint64_t fold_x = g.fold(x);
            for (std::size_t w = 0; w < V::word_count; ++w) {
                std::uint64_t allowed = up ? (hi.word(w) & ~x.word(w)) : (x.word(w) & ~lo.word(w));
                allowed &= ~avoided_mask.word(w) & ~cx.word(w);
                while (allowed) {
                    unsigned c = static_cast<unsigned>(w * 64) + std::countr_zero(allowed);
                    allowed &= allowed - 1;
                    V y = up ? x.with(c) : x.without(c);
                    if (trace.enqueue_seq.count(y)) continue;  // visited: not in Y_x
                    ev.candidate_coords.push_back(static_cast<std::uint16_t>(c));
                    // the edge is keyed by its lower endpoint
                    bool present = up ? g.present_from_fold(fold_x, c)
                                      : g.present_from_fold(g.fold_flip(fold_x, x, c), c);
                    if (present && accepted < cap) {
                        ++accepted;
                        ev.accepted_coords.push_back(static_cast<std::uint16_t>(c));
                        tree.parent.emplace(y, typename monotone_tree<MaxDim>::link{x, static_cast<std::uint16_t>(c)});
                        tree.children_coords[x].push_back(static_cast<std::uint16_t>(c));
                        tree.layer_vertices[jx].push_back(y);
                        trace.enqueue_seq.emplace(y, next_seq++);
                        queue.push_back(y);
                    }
                }
            }
        }
        trace.events.push_back(std::move(ev));
    }

    for (const auto& [layer, vs] : tree.layer_vertices)
        for (const auto& v : vs)
            if (!tree.children_coords.count(v)) tree.leaves.insert(v);

    return {std::move(tree), std::move(trace)};
}

struct prop22_report {
    bool a = false;  // branch-list size bound
    bool b = false;  // pairwise leaf distinguishability
    bool c = false;  // queried-structure observation
    bool all() const { return a && b && c; }
};

// Checks Proposition 2.2(a)-(c) on an instrumented run. Throws
// trace_mismatch_error when the trace does not describe the tree.
template <std::size_t MaxDim>
prop22_report verify_proposition_22(const monotone_tree<MaxDim>& tree, const grow_trace<MaxDim>& trace,
                                    const tree_grow_input<MaxDim>& in) {
    using V = vertex<MaxDim>;
    const unsigned d = in.root.dim();
    const bool up = tree.increasing;
    const c_flavor side = up ? c_flavor::zero_side : c_flavor::one_side;

    // --- structural trace checks ---
    if (trace.events.size() != tree.size())
        throw trace_mismatch_error("event count differs from tree size");
    std::uint32_t prev_seq = 0;
    bool first = true;
    for (const auto& ev : trace.events) {
        if (!tree.contains(ev.x)) throw trace_mismatch_error("event vertex not in tree");
        auto it = trace.enqueue_seq.find(ev.x);
        if (it == trace.enqueue_seq.end()) throw trace_mismatch_error("event vertex missing enqueue sequence");
        if (!first && it->second <= prev_seq) throw trace_mismatch_error("events out of queue order");
        prev_seq = it->second;
        first = false;

        auto cit = tree.children_coords.find(ev.x);
        const std::vector<std::uint16_t> none;
        const auto& children = (cit == tree.children_coords.end()) ? none : cit->second;
        if (children != ev.accepted_coords) throw trace_mismatch_error("accepted children disagree with tree");
        std::size_t pos = 0;
        for (auto c : ev.accepted_coords) {
            while (pos < ev.candidate_coords.size() && ev.candidate_coords[pos] != c) ++pos;
            if (pos == ev.candidate_coords.size())
                throw trace_mismatch_error("accepted coordinate missing from candidate list");
        }
    }

    prop22_report report;

    // (a) |C_T(v, side)| <= (layers to truncation) * cap for every vertex
    const unsigned span = up ? (in.trunc_layer - in.cube.lo().layer()) : (in.cube.hi().layer() - in.trunc_layer);
    const unsigned cap = in.resolved_cap();
    report.a = true;
    auto check_vertex_a = [&](const V& v) {
        if (c_set(tree, v, side).size() > static_cast<std::size_t>(span) * cap) report.a = false;
    };
    check_vertex_a(tree.root);
    for (const auto& [v, lk] : tree.parent) check_vertex_a(v);

    // (b) every ordered pair of distinct leaves w1, w2 satisfies
    //     I(w2) cap C_T(w1, 0) != empty (mirrored on the one side)
    report.b = true;
    std::vector<V> leaves(tree.leaves.begin(), tree.leaves.end());
    std::vector<V> masks;
    masks.reserve(leaves.size());
    for (const auto& w : leaves) {
        V m(d);
        for (auto c : c_set(tree, w, side)) m.set(c);
        masks.push_back(m);
    }
    for (std::size_t i = 0; i < leaves.size() && report.b; ++i) {
        for (std::size_t j = 0; j < leaves.size(); ++j) {
            if (i == j) continue;
            bool hit = up ? leaves[j].intersects(masks[i]) : !masks[i].is_subset_of(leaves[j]);
            if (!hit) {
                report.b = false;
                break;
            }
        }
    }

    // (c) for each dequeue event and each next-layer neighbor y of x inside
    //     the subcube that was already in A cup B, c(x,y) lies in C_x
    report.c = true;
    for (const auto& ev : trace.events) {
        unsigned j = ev.x.layer();
        if ((up && j + 1 > in.cube.hi().layer()) || (!up && j == in.cube.lo().layer())) continue;
        V cx_mask(d);
        for (auto c : c_set(tree, ev.x, side)) cx_mask.set(c);
        for (unsigned c = 0; c < d; ++c) {
            bool inside = up ? (in.cube.hi().test(c) && !ev.x.test(c)) : (ev.x.test(c) && !in.cube.lo().test(c));
            if (!inside) continue;
            V y = up ? ev.x.with(c) : ev.x.without(c);
            auto it = trace.enqueue_seq.find(y);
            if (it == trace.enqueue_seq.end() || it->second >= ev.snapshot) continue;
            if (!cx_mask.test(c)) {
                report.c = false;
                break;
            }
        }
        if (!report.c) break;
    }

    return report;
}

}  // namespace qperc
