#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "topoeval/error.hpp"

namespace topoeval {

/// Dense fixed-width bitset over item indices. All set algebra the topology
/// needs (intersection, union, subset test, popcount) runs word-wise over
/// 64-bit blocks.
class DenseBitset {
public:
    DenseBitset() = default;

    explicit DenseBitset(std::size_t n_bits)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

    std::size_t size() const { return n_bits_; }

    void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }

    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    bool none() const { return !any(); }

    DenseBitset& operator&=(const DenseBitset& other) {
        check_same_width(other);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }

    DenseBitset& operator|=(const DenseBitset& other) {
        check_same_width(other);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    friend DenseBitset operator&(DenseBitset lhs, const DenseBitset& rhs) {
        lhs &= rhs;
        return lhs;
    }

    friend DenseBitset operator|(DenseBitset lhs, const DenseBitset& rhs) {
        lhs |= rhs;
        return lhs;
    }

    bool operator==(const DenseBitset& other) const {
        return n_bits_ == other.n_bits_ && words_ == other.words_;
    }

    /// True when every member of *this also lies in `other`.
    bool is_subset_of(const DenseBitset& other) const {
        check_same_width(other);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    std::size_t intersection_count(const DenseBitset& other) const {
        check_same_width(other);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return c;
    }

    std::size_t intersection_count(const DenseBitset& a, const DenseBitset& b) const {
        check_same_width(a);
        check_same_width(b);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(
                std::popcount(words_[i] & a.words_[i] & b.words_[i]));
        return c;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t w : words_) {
            h ^= w;
            h *= 1099511628211ull;
            h ^= h >> 29;
        }
        return h;
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&out](std::size_t i) { out.push_back(i); });
        return out;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                int b = std::countr_zero(w);
                fn(wi * 64 + static_cast<std::size_t>(b));
                w &= w - 1;
            }
        }
    }

private:
    void check_same_width(const DenseBitset& other) const {
        if (n_bits_ != other.n_bits_) fail("bitset width mismatch");
    }

    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace topoeval
