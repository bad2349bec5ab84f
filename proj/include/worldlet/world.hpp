#pragma once

#include "worldlet/bits.hpp"
#include "worldlet/signature.hpp"

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace worldlet {

/// Tuple of domain elements. Elements are 0-based in the C++ API; JSON and the
/// C API use 1-based labels.
using Tuple = boost::container::small_vector<int, 4>;

inline std::span<const int> as_span(const Tuple& t) noexcept { return {t.data(), t.size()}; }

/// Maps (relation, tuple) pairs of an n-world onto a flat bit index.
///
/// Relations are laid out in signature order; within a relation the index of
/// (t_1,...,t_a) is sum_j t_j * n^(a-j), so index order is lexicographic tuple order.
class TupleLayout {
public:
    TupleLayout(const Signature& signature, int n);

    int domain_size() const noexcept { return n_; }
    std::size_t bit_count() const noexcept { return total_; }
    std::size_t offset(std::size_t relation) const { return offsets_[relation]; }

    std::size_t index(std::size_t relation, std::span<const int> tuple) const;
    std::size_t index(std::size_t relation, const Tuple& tuple) const { return index(relation, as_span(tuple)); }
    /// Inverse of index(); writes the tuple into `tuple` and returns the relation.
    std::size_t decode(std::size_t bit, Tuple& tuple) const;

private:
    int n_;
    std::vector<int> arities_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// A finite relational structure over the domain {0,...,n-1}.
///
/// Stored densely as one bit per (relation, tuple); equality is equality of
/// signature, size and adjacency.
class World {
public:
    World() = default;
    /// The empty world (no tuple holds).
    World(SignaturePtr signature, int n);
    World(SignaturePtr signature, int n, BitVector bits);

    /// Builds a world from explicit tuple lists, one list per relation in signature order.
    static World from_tuples(SignaturePtr signature, int n, const std::vector<std::vector<Tuple>>& tuples);

    int size() const noexcept { return n_; }
    const Signature& signature() const noexcept { return *signature_; }
    const SignaturePtr& signature_ptr() const noexcept { return signature_; }
    const BitVector& bits() const noexcept { return bits_; }
    TupleLayout layout() const { return TupleLayout(*signature_, n_); }

    bool holds(std::size_t relation, std::span<const int> tuple) const;
    bool holds(std::size_t relation, const Tuple& tuple) const { return holds(relation, as_span(tuple)); }
    void set(std::size_t relation, std::span<const int> tuple, bool value = true);
    void set(std::size_t relation, const Tuple& tuple, bool value = true) { set(relation, as_span(tuple), value); }

    /// Tuples of one relation, in lexicographic order.
    std::vector<Tuple> tuples(std::size_t relation) const;
    std::size_t tuple_count() const noexcept { return bits_.count(); }

    friend bool operator==(const World& a, const World& b);
    /// Total order: by size, then by adjacency bits (see BitVector).
    friend std::strong_ordering operator<=>(const World& a, const World& b) {
        if (a.n_ != b.n_) return a.n_ <=> b.n_;
        return a.bits_ <=> b.bits_;
    }

    std::size_t hash() const noexcept { return bits_.hash() ^ static_cast<std::size_t>(n_) * 0x100000001B3ull; }

private:
    SignaturePtr signature_;
    int n_ = 0;
    BitVector bits_;
};

struct WorldHash {
    std::size_t operator()(const World& w) const noexcept { return w.hash(); }
};

/// Bijection of {0,...,n-1}.
class Permutation {
public:
    Permutation() = default;
    /// Throws InvalidArgument if `images` is not a bijection of {0,...,size-1}.
    explicit Permutation(std::vector<int> images);
    static Permutation identity(int n);

    int size() const noexcept { return static_cast<int>(images_.size()); }
    int operator()(int element) const { return images_[static_cast<std::size_t>(element)]; }
    const std::vector<int>& images() const noexcept { return images_; }

    Permutation inverse() const;
    /// (outer ∘ inner)(x) = outer(inner(x)).
    friend Permutation compose(const Permutation& outer, const Permutation& inner);

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> images_;
};

/// Calls fn(permutation) for all n! permutations of {0,...,n-1} in lexicographic order.
template <class Fn>
void for_each_permutation(int n, Fn&& fn);

/// The index space of T_m: every (relation, tuple over [m]) whose tuple uses
/// exactly m distinct elements, ordered by relation then lexicographically.
class CellCatalog {
public:
    struct Entry {
        std::size_t relation;
        Tuple tuple;
    };

    CellCatalog(const Signature& signature, int m);

    int level() const noexcept { return m_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Position of (relation, tuple) in the catalog, or size() if absent.
    std::size_t find(std::size_t relation, std::span<const int> tuple) const;
    std::size_t find(std::size_t relation, const Tuple& tuple) const { return find(relation, as_span(tuple)); }

private:
    int m_;
    std::vector<Entry> entries_;
};

/// A value of T_m: the arity-m data of an m-world, as one bit per catalog entry.
class ArityCell {
public:
    ArityCell() = default;
    ArityCell(SignaturePtr signature, int m);
    ArityCell(SignaturePtr signature, int m, BitVector bits);

    int level() const noexcept { return m_; }
    const Signature& signature() const noexcept { return *signature_; }
    const SignaturePtr& signature_ptr() const noexcept { return signature_; }
    const BitVector& bits() const noexcept { return bits_; }
    CellCatalog catalog() const { return CellCatalog(*signature_, m_); }

    bool holds(std::size_t relation, std::span<const int> tuple) const;
    void set(std::size_t relation, std::span<const int> tuple, bool value = true);

    friend bool operator==(const ArityCell& a, const ArityCell& b) {
        return a.m_ == b.m_ && a.bits_ == b.bits_ && *a.signature_ == *b.signature_;
    }
    friend std::strong_ordering operator<=>(const ArityCell& a, const ArityCell& b) {
        if (a.m_ != b.m_) return a.m_ <=> b.m_;
        return a.bits_ <=> b.bits_;
    }

private:
    SignaturePtr signature_;
    int m_ = 0;
    BitVector bits_;
};

// ---------------------------------------------------------------------------

template <class Fn>
void for_each_permutation(int n, Fn&& fn) {
    std::vector<int> images(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) images[static_cast<std::size_t>(i)] = i;
    do {
        fn(Permutation(images));
    } while (std::next_permutation(images.begin(), images.end()));
}

}  // namespace worldlet
