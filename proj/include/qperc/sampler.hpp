#pragma once

#include <cstdint>
#include <cmath>
#include <optional>
#include <vector>

#include "qperc/vertex.hpp"

namespace qperc {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Stafford mix 13).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

inline constexpr double to_unit(std::uint64_t z) {
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Reproducible replica seeds: a bijection of the index space, so seeds never
// collide for distinct indices under one master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ (golden_gamma * (index + 1)));
}

enum class sample_mode { lazy, materialized };

// Deterministic seeded Bernoulli(p) edge oracle for Q^d_p. The per-edge
// uniform value is a pure function of (seed, edge), which realizes the
// monotone coupling: the graph at p' >= p contains the graph at p for the
// same seed. Single-word instantiations encode an edge as
// (lower value)*d + coord; wider ones fold the lower endpoint's words.
template <std::size_t MaxDim = 64>
class random_subgraph {
public:
    static constexpr std::size_t word_count = vertex<MaxDim>::word_count;

    random_subgraph(unsigned d, double p, std::uint64_t seed, sample_mode mode = sample_mode::lazy,
                    std::size_t budget_bytes = std::size_t{256} << 20)
        : d_(d), p_(p), seed_(seed), mode_(mode) {
        if (d < 1 || d > MaxDim) throw invalid_parameter_error("dimension out of supported range");
        if (!(p >= 0.0 && p <= 1.0)) throw invalid_parameter_error("edge probability must lie in [0,1]");
        // (mix >> 11) < ceil(p * 2^53) is exactly to_unit(mix) < p; p * 2^53
        // is a power-of-two scaling, so the ceil argument is exact
        p53_ = static_cast<std::uint64_t>(std::ceil(p * 9007199254740992.0));
        if (mode == sample_mode::materialized) materialize(budget_bytes);
    }

    // Test-fixture oracle with an explicit presence bit per edge slot
    // (index = lower*d + coord). coupled_threshold is unavailable on it.
    static random_subgraph from_edge_bits(unsigned d, std::vector<std::uint64_t> bits) {
        random_subgraph g(d, 0.5, 0);
        g.mode_ = sample_mode::materialized;
        bits.resize(bit_word_count(d), 0);
        g.bits_ = std::move(bits);
        g.synthetic_ = true;
        return g;
    }

    unsigned dim() const { return d_; }
    double edge_probability() const { return p_; }
    std::uint64_t seed() const { return seed_; }
    sample_mode mode() const { return mode_; }

    // --- single-word hot path -------------------------------------------

    double threshold_value(std::uint64_t lower_value, unsigned coord) const
        requires(word_count == 1)
    {
        return to_unit(mix64(seed_ ^ (lower_value * d_ + coord)));
    }

    bool present_value(std::uint64_t lower_value, unsigned coord) const
        requires(word_count == 1)
    {
        if (mode_ == sample_mode::materialized) {
            std::uint64_t e = lower_value * d_ + coord;
            return (bits_[e >> 6] >> (e & 63)) & 1u;
        }
        return (mix64(seed_ ^ (lower_value * d_ + coord)) >> 11) < p53_;
    }

    // --- generic interface ----------------------------------------------

    // Partial hash of a lower endpoint; one fold per vertex amortizes the
    // per-candidate cost in exploration loops. Word-additive, so flipping a
    // single bit updates it in O(1).
    std::uint64_t fold(const vertex<MaxDim>& v) const {
        if constexpr (word_count == 1) {
            return v.word(0);
        } else {
            std::uint64_t h = 0;
            for (std::size_t i = 0; i < word_count; ++i)
                h += mix64(v.word(i) ^ (golden_gamma * (i + 1)));
            return h;
        }
    }

    std::uint64_t fold_flip(std::uint64_t fold_value, const vertex<MaxDim>& v, unsigned coord) const {
        if constexpr (word_count == 1) {
            return fold_value ^ (std::uint64_t{1} << coord);
        } else {
            std::size_t i = coord >> 6;
            std::uint64_t w = v.word(i);
            std::uint64_t flipped = w ^ (std::uint64_t{1} << (coord & 63));
            return fold_value - mix64(w ^ (golden_gamma * (i + 1))) + mix64(flipped ^ (golden_gamma * (i + 1)));
        }
    }

    double threshold_from_fold(std::uint64_t fold_value, unsigned coord) const {
        if constexpr (word_count == 1) {
            return threshold_value(fold_value, coord);
        } else {
            return to_unit(mix64(mix64(seed_ ^ fold_value) ^ (golden_gamma * (coord + 1))));
        }
    }

    bool present_from_fold(std::uint64_t fold_value, unsigned coord) const {
        if constexpr (word_count == 1) {
            return present_value(fold_value, coord);
        } else {
            return threshold_from_fold(fold_value, coord) < p_;
        }
    }

    double coupled_threshold(const edge_id<MaxDim>& e) const {
        if (synthetic_) throw invalid_input_error("synthetic oracle has no coupled thresholds");
        check_edge(e);
        return threshold_from_fold(fold(e.lower), e.coord);
    }

    double coupled_threshold(const vertex<MaxDim>& lower, unsigned coord) const {
        return coupled_threshold(edge_id<MaxDim>(lower, coord));
    }

    bool edge_state(const edge_id<MaxDim>& e) const {
        check_edge(e);
        if (mode_ == sample_mode::materialized) {
            if constexpr (word_count == 1) {
                std::uint64_t idx = e.lower.value() * d_ + e.coord;
                return (bits_[idx >> 6] >> (idx & 63)) & 1u;
            }
        }
        return threshold_from_fold(fold(e.lower), e.coord) < p_;
    }

    bool edge_state(const vertex<MaxDim>& lower, unsigned coord) const {
        return edge_state(edge_id<MaxDim>(lower, coord));
    }

private:
    static std::size_t bit_word_count(unsigned d) {
        return ((std::uint64_t{1} << d) * d + 63) / 64;
    }

    void materialize(std::size_t budget_bytes) {
        static_assert(MaxDim >= 1);
        if constexpr (word_count != 1) {
            throw invalid_parameter_error("materialized mode requires a single-word instantiation");
        } else {
            if (d_ >= 40 || bit_word_count(d_) * 8 > budget_bytes)
                throw dimension_too_large_error("materialized edge table exceeds memory budget");
            bits_.assign(bit_word_count(d_), 0);
            std::uint64_t n = std::uint64_t{1} << d_;
            for (std::uint64_t u = 0; u < n; ++u) {
                for (unsigned c = 0; c < d_; ++c) {
                    if ((u >> c) & 1u) continue;
                    if (threshold_value(u, c) < p_) {
                        std::uint64_t idx = u * d_ + c;
                        bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
                    }
                }
            }
        }
    }

    void check_edge(const edge_id<MaxDim>& e) const {
        if (e.lower.dim() != d_) throw invalid_input_error("edge dimension mismatch");
    }

    unsigned d_;
    double p_;
    std::uint64_t seed_;
    std::uint64_t p53_ = 0;
    sample_mode mode_;
    bool synthetic_ = false;
    std::vector<std::uint64_t> bits_;
};

// Edge oracle restricted to an induced subcube, answering through the
// ambient sample (no re-randomization). Local vertices are indexed by the
// subcube's free coordinates, ascending.
template <std::size_t MaxDim = 64>
class subcube_view {
public:
    subcube_view(const random_subgraph<MaxDim>& g, subcube<MaxDim> cube)
        : g_(&g), cube_(std::move(cube)), free_(cube_.free_coords()) {
        if (cube_.ambient_dim() != g.dim()) throw invalid_input_error("subcube dimension mismatch");
    }

    unsigned dimension() const { return static_cast<unsigned>(free_.size()); }
    const subcube<MaxDim>& cube() const { return cube_; }
    const std::vector<std::uint16_t>& free_coords() const { return free_; }

    vertex<MaxDim> embed(std::uint64_t local) const {
        vertex<MaxDim> v = cube_.lo();
        for (std::size_t i = 0; i < free_.size(); ++i)
            if ((local >> i) & 1u) v.set(free_[i]);
        return v;
    }

    // Presence of the ambient edge between embed(local) and
    // embed(local | 1<<local_coord).
    bool present_local(std::uint64_t local, unsigned local_coord) const {
        if constexpr (random_subgraph<MaxDim>::word_count == 1) {
            std::uint64_t lo = cube_.lo().value();
            std::uint64_t amb = lo;
            for (std::size_t i = 0; i < free_.size(); ++i)
                if ((local >> i) & 1u) amb |= std::uint64_t{1} << free_[i];
            return g_->present_value(amb, free_[local_coord]);
        } else {
            vertex<MaxDim> amb = embed(local);
            return g_->edge_state(edge_id<MaxDim>(amb, free_[local_coord]));
        }
    }

    bool edge_state(const edge_id<MaxDim>& e) const {
        if (!cube_.contains(e.lower) || !cube_.contains(e.lower.with(e.coord)))
            throw invalid_input_error("edge not inside the subcube");
        return g_->edge_state(e);
    }

    // All edges of the subcube, for small dimensions.
    std::vector<edge_id<MaxDim>> all_edges() const {
        if (dimension() > 24) throw dimension_too_large_error("subcube edge enumeration capped");
        std::vector<edge_id<MaxDim>> out;
        std::uint64_t n = std::uint64_t{1} << dimension();
        for (std::uint64_t local = 0; local < n; ++local) {
            vertex<MaxDim> v = embed(local);
            for (std::size_t i = 0; i < free_.size(); ++i)
                if (!((local >> i) & 1u)) out.emplace_back(v, free_[i]);
        }
        return out;
    }

private:
    const random_subgraph<MaxDim>* g_;
    subcube<MaxDim> cube_;
    std::vector<std::uint16_t> free_;
};

template <std::size_t MaxDim>
subcube_view<MaxDim> restrict_to_subcube(const random_subgraph<MaxDim>& g, const subcube<MaxDim>& s) {
    return subcube_view<MaxDim>(g, s);
}

}  // namespace qperc
