#pragma once

#include <boost/container/small_vector.hpp>

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>

namespace worldlet {

/// Fixed-size bit set with inline storage for up to 128 bits.
///
/// Ordering treats the bit set as an unsigned integer whose bit i has weight
/// 2^i, so the highest differing bit decides. Worlds and cells inherit this
/// order, which is what canonical forms minimize over.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void assign(std::size_t i, bool value) noexcept { value ? set(i) : reset(i); }
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const noexcept {
        for (auto w : words_) if (w) return false;
        return true;
    }

    /// Low 64 bits; only meaningful when size() <= 64.
    std::uint64_t to_u64() const noexcept { return words_.empty() ? 0 : words_[0]; }
    static BitVector from_u64(std::size_t size, std::uint64_t value) {
        BitVector b(size);
        if (!b.words_.empty()) b.words_[0] = size >= 64 ? value : value & ((std::uint64_t{1} << size) - 1);
        return b;
    }

    template <class Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word) {
                fn(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
    }

    std::size_t hash() const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ull ^ size_;
        for (auto w : words_) {
            h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

    friend bool operator==(const BitVector& a, const BitVector& b) noexcept {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }
    friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) noexcept {
        if (a.size_ != b.size_) return a.size_ <=> b.size_;
        for (std::size_t w = a.words_.size(); w-- > 0;) {
            if (a.words_[w] != b.words_[w]) return a.words_[w] <=> b.words_[w];
        }
        return std::strong_ordering::equal;
    }

private:
    std::size_t size_ = 0;
    boost::container::small_vector<std::uint64_t, 2> words_;
};

}  // namespace worldlet
