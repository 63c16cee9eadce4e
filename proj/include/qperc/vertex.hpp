#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qperc/errors.hpp"

namespace qperc {

// Vertices of Q^d as fixed-width bit-sets. MaxDim is the compile-time
// capacity; the runtime dimension d <= MaxDim is checked at construction.
// Hot full-cube code instantiates MaxDim = 64 so every operation is a
// single-word operation; the tree-exploration code uses wider instantiations
// (d up to 2048) where a vertex is a small stack array of words.
template <std::size_t MaxDim = 64>
class vertex {
    static_assert(MaxDim >= 1 && MaxDim % 64 == 0, "MaxDim must be a positive multiple of 64");

public:
    static constexpr std::size_t max_dim = MaxDim;
    static constexpr std::size_t word_count = MaxDim / 64;

    vertex() : dim_(0) {}

    explicit vertex(unsigned dim) : dim_(dim) {
        if (dim < 1 || dim > MaxDim)
            throw invalid_input_error("vertex dimension " + std::to_string(dim) +
                                      " outside supported range [1, " + std::to_string(MaxDim) + "]");
    }

    static vertex zero(unsigned dim) { return vertex(dim); }

    static vertex ones(unsigned dim) {
        vertex v(dim);
        for (unsigned c = 0; c < dim; ++c) v.set(c);
        return v;
    }

    // Requires dim <= 64; bits above dim must be clear.
    static vertex from_value(unsigned dim, std::uint64_t value) {
        vertex v(dim);
        if (dim < 64 && (value >> dim) != 0)
            throw invalid_input_error("vertex value has bits at index >= dim");
        v.words_[0] = value;
        return v;
    }

    static vertex from_coords(unsigned dim, const std::vector<std::uint16_t>& coords) {
        vertex v(dim);
        for (auto c : coords) v.set(c);
        return v;
    }

    unsigned dim() const { return dim_; }

    bool test(unsigned c) const { return (words_[c >> 6] >> (c & 63)) & 1u; }

    void set(unsigned c) {
        check_coord(c);
        words_[c >> 6] |= std::uint64_t{1} << (c & 63);
    }

    void reset(unsigned c) {
        check_coord(c);
        words_[c >> 6] &= ~(std::uint64_t{1} << (c & 63));
    }

    vertex with(unsigned c) const {
        vertex v = *this;
        v.set(c);
        return v;
    }

    vertex without(unsigned c) const {
        vertex v = *this;
        v.reset(c);
        return v;
    }

    // |I(v)|, the layer index.
    unsigned layer() const {
        unsigned n = 0;
        for (auto w : words_) n += std::popcount(w);
        return n;
    }

    // I(this) subseteq I(o)
    bool is_subset_of(const vertex& o) const {
        for (std::size_t i = 0; i < word_count; ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    bool intersects(const vertex& o) const {
        for (std::size_t i = 0; i < word_count; ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    std::uint64_t value() const {
        static_assert(true);
        if (dim_ > 64) throw invalid_input_error("value() requires dim <= 64");
        return words_[0];
    }

    const std::array<std::uint64_t, word_count>& words() const { return words_; }
    std::uint64_t word(std::size_t i) const { return words_[i]; }

    // Canonical order sigma: ascending numeric value of the bit-set.
    friend bool operator<(const vertex& a, const vertex& b) {
        for (std::size_t i = word_count; i-- > 0;)
            if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i];
        return false;
    }

    friend bool operator==(const vertex& a, const vertex& b) {
        return a.dim_ == b.dim_ && a.words_ == b.words_;
    }

    std::vector<std::uint16_t> set_coords() const {
        std::vector<std::uint16_t> out;
        out.reserve(layer());
        for_each_set([&](unsigned c) { out.push_back(static_cast<std::uint16_t>(c)); });
        return out;
    }

    std::vector<std::uint16_t> free_coords() const {
        std::vector<std::uint16_t> out;
        out.reserve(dim_ - layer());
        for (unsigned c = 0; c < dim_; ++c)
            if (!test(c)) out.push_back(static_cast<std::uint16_t>(c));
        return out;
    }

    template <typename F>
    void for_each_set(F&& f) const {
        for (std::size_t i = 0; i < word_count; ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                unsigned c = static_cast<unsigned>(i * 64) + std::countr_zero(w);
                f(c);
                w &= w - 1;
            }
        }
    }

    vertex complement() const {
        vertex v(dim_);
        for (unsigned c = 0; c < dim_; ++c)
            if (!test(c)) v.set(c);
        return v;
    }

    // Fixed-width binary string, most-significant coordinate first:
    // d=4, I(v)={0,2} -> "0101".
    std::string to_string() const {
        std::string s(dim_, '0');
        for (unsigned c = 0; c < dim_; ++c)
            if (test(c)) s[dim_ - 1 - c] = '1';
        return s;
    }

    static vertex parse(std::string_view s) {
        if (s.empty()) throw invalid_input_error("empty vertex string");
        vertex v(static_cast<unsigned>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                v.set(static_cast<unsigned>(s.size() - 1 - i));
            else if (s[i] != '0')
                throw invalid_input_error("vertex string must be binary");
        }
        return v;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull * (dim_ + 1);
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    void check_coord(unsigned c) const {
        if (c >= dim_)
            throw invalid_input_error("coordinate " + std::to_string(c) +
                                      " out of range for dimension " + std::to_string(dim_));
    }

    std::array<std::uint64_t, word_count> words_{};
    std::uint32_t dim_;
};

template <std::size_t MaxDim>
struct vertex_hash {
    std::size_t operator()(const vertex<MaxDim>& v) const { return static_cast<std::size_t>(v.hash()); }
};

// An edge of Q^d named by its lower endpoint and the flipped coordinate.
template <std::size_t MaxDim = 64>
struct edge_id {
    vertex<MaxDim> lower;
    std::uint16_t coord;

    edge_id(vertex<MaxDim> lo, unsigned c) : lower(std::move(lo)), coord(static_cast<std::uint16_t>(c)) {
        if (c >= lower.dim()) throw invalid_input_error("edge coordinate out of range");
        if (lower.test(c)) throw invalid_input_error("edge coordinate already set in lower endpoint");
    }

    vertex<MaxDim> upper() const { return lower.with(coord); }

    friend bool operator==(const edge_id& a, const edge_id& b) {
        return a.coord == b.coord && a.lower == b.lower;
    }
    friend bool operator<(const edge_id& a, const edge_id& b) {
        if (a.lower == b.lower) return a.coord < b.coord;
        return a.lower < b.lower;
    }
};

// Induced subcube Q(lo, hi): all u with lo <= u <= hi.
template <std::size_t MaxDim = 64>
class subcube {
public:
    subcube(vertex<MaxDim> lo, vertex<MaxDim> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.dim() != hi_.dim()) throw invalid_input_error("subcube endpoints differ in dimension");
        if (!lo_.is_subset_of(hi_)) throw invalid_input_error("subcube requires I(lo) subseteq I(hi)");
    }

    static subcube full(unsigned d) { return subcube(vertex<MaxDim>::zero(d), vertex<MaxDim>::ones(d)); }

    const vertex<MaxDim>& lo() const { return lo_; }
    const vertex<MaxDim>& hi() const { return hi_; }
    unsigned ambient_dim() const { return lo_.dim(); }
    unsigned dimension() const { return hi_.layer() - lo_.layer(); }

    bool contains(const vertex<MaxDim>& v) const {
        return lo_.is_subset_of(v) && v.is_subset_of(hi_);
    }

    // Coordinates free to vary inside the subcube, ascending.
    std::vector<std::uint16_t> free_coords() const {
        std::vector<std::uint16_t> out;
        out.reserve(dimension());
        for (unsigned c = 0; c < lo_.dim(); ++c)
            if (hi_.test(c) && !lo_.test(c)) out.push_back(static_cast<std::uint16_t>(c));
        return out;
    }

    friend bool operator==(const subcube& a, const subcube& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

private:
    vertex<MaxDim> lo_, hi_;
};

// The unique coordinate where adjacent u, v differ.
template <std::size_t MaxDim>
unsigned coord_diff(const vertex<MaxDim>& u, const vertex<MaxDim>& v) {
    if (u.dim() != v.dim()) throw invalid_input_error("coord_diff requires equal dimensions");
    unsigned diff_count = 0;
    unsigned coord = 0;
    for (std::size_t i = 0; i < vertex<MaxDim>::word_count; ++i) {
        std::uint64_t x = u.word(i) ^ v.word(i);
        if (x) {
            diff_count += std::popcount(x);
            coord = static_cast<unsigned>(i * 64) + std::countr_zero(x);
        }
    }
    if (diff_count != 1) throw not_adjacent_error("vertices are not adjacent in Q^d");
    return coord;
}

template <std::size_t MaxDim>
std::vector<std::pair<std::uint16_t, vertex<MaxDim>>> up_neighbors(const vertex<MaxDim>& v) {
    std::vector<std::pair<std::uint16_t, vertex<MaxDim>>> out;
    out.reserve(v.dim() - v.layer());
    for (unsigned c = 0; c < v.dim(); ++c)
        if (!v.test(c)) out.emplace_back(static_cast<std::uint16_t>(c), v.with(c));
    return out;
}

template <std::size_t MaxDim>
std::vector<std::pair<std::uint16_t, vertex<MaxDim>>> down_neighbors(const vertex<MaxDim>& v) {
    std::vector<std::pair<std::uint16_t, vertex<MaxDim>>> out;
    out.reserve(v.layer());
    for (unsigned c = 0; c < v.dim(); ++c)
        if (v.test(c)) out.emplace_back(static_cast<std::uint16_t>(c), v.without(c));
    return out;
}

// Sufficient condition for vertex disjointness: I(a.lo) not subseteq I(b.hi)
// or I(b.lo) not subseteq I(a.hi).
template <std::size_t MaxDim>
bool subcubes_certified_disjoint(const subcube<MaxDim>& a, const subcube<MaxDim>& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw invalid_input_error("subcubes live in different ambient dimensions");
    return !a.lo().is_subset_of(b.hi()) || !b.lo().is_subset_of(a.hi());
}

// Streams the vertices of layer k of Q^d in canonical (ascending numeric,
// i.e. colex) order without materializing the layer.
template <std::size_t MaxDim = 64>
class layer_range {
public:
    layer_range(unsigned d, unsigned k) : d_(d), k_(k) {
        if (d < 1 || d > MaxDim) throw invalid_input_error("layer_range dimension out of range");
        if (k > d) throw invalid_input_error("layer index exceeds dimension");
    }

    class iterator {
    public:
        using value_type = vertex<MaxDim>;

        iterator() : d_(0), done_(true) {}
        iterator(unsigned d, unsigned k) : d_(d), done_(false) {
            pos_.resize(k);
            for (unsigned i = 0; i < k; ++i) pos_[i] = static_cast<std::uint16_t>(i);
        }

        value_type operator*() const {
            vertex<MaxDim> v(d_);
            for (auto c : pos_) v.set(c);
            return v;
        }

        iterator& operator++() {
            if (pos_.empty()) {
                done_ = true;
                return *this;
            }
            std::size_t k = pos_.size();
            std::size_t i = 0;
            while (i < k) {
                unsigned limit = (i + 1 < k) ? pos_[i + 1] : d_;
                if (pos_[i] + 1u < limit) break;
                ++i;
            }
            if (i == k) {
                done_ = true;
                return *this;
            }
            ++pos_[i];
            for (std::size_t j = 0; j < i; ++j) pos_[j] = static_cast<std::uint16_t>(j);
            return *this;
        }

        friend bool operator==(const iterator& a, const iterator& b) {
            if (a.done_ != b.done_) return false;
            if (a.done_) return true;
            return a.pos_ == b.pos_;
        }

    private:
        std::vector<std::uint16_t> pos_;
        unsigned d_;
        bool done_;
    };

    iterator begin() const { return iterator(d_, k_); }
    iterator end() const { return iterator(); }

private:
    unsigned d_, k_;
};

// C(d, k) as uint64; d <= 64 keeps every value in range.
inline std::uint64_t layer_size(unsigned d, unsigned k) {
    if (k > d) return 0;
    if (k > d - k) k = d - k;
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r / i * (d - k + i) + r % i * (d - k + i) / i;
    }
    return r;
}

using vertex64 = vertex<64>;

}  // namespace qperc
