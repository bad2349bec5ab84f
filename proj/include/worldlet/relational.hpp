#pragma once

#include "worldlet/world.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace worldlet {

/// Which worlds count as possible.
///
/// Undirected: every binary relation is symmetric and irreflexive; an
/// undirected edge i-j stands for the pair i->j, j->i. Unary relations are
/// and relations of arity >= 3 are unconstrained.
enum class Convention { Directed, Undirected };

std::string to_string(Convention convention);
Convention parse_convention(std::string_view text);

/// Caps that turn runaway enumerations into ResourceLimit errors.
struct Budget {
    std::uint64_t max_worlds = std::uint64_t{1} << 22;
    std::uint64_t max_permutations = 362880;  // 9!
    unsigned threads = 1;
};

/// ω↓I: the sub-world induced by the sorted element set I, relabeled to [|I|]
/// preserving the order of I.
World induce_subset(const World& world, std::span<const int> subset);

/// ω↓i: the sub-world induced by distinct elements i, relabeled i_h -> h.
World induce_tuple(const World& world, std::span<const int> tuple);

/// One factor D_m(ω↓i) of the arity-m data, for a sorted index tuple i of length m.
struct CellAssignment {
    Tuple index;
    ArityCell cell;

    friend bool operator==(const CellAssignment&, const CellAssignment&) = default;
};

/// All factors for m = 1..arity(S), in order of m then lexicographic index.
std::vector<CellAssignment> decompose(const World& world);

/// Inverse of decompose. Requires exactly one cell per sorted index tuple and level.
World recompose(SignaturePtr signature, int n, std::span<const CellAssignment> cells);

/// The 2^|catalog| values of T_m in increasing bit order (first catalog entry
/// is the least significant bit).
std::vector<ArityCell> enumerate_cells(SignaturePtr signature, int m);

/// πω: tuple t holds in πω iff π^{-1}(t) holds in ω.
World apply_permutation(const World& world, const Permutation& permutation);

/// π_i: h -> rank of π(i_h) within the sorted image set {π(i_1),...,π(i_m)}.
/// `sorted_index` must be strictly increasing.
Permutation induced_permutation(const Permutation& permutation, std::span<const int> sorted_index);

/// πt: relabels the nodes of a cell, same rule as apply_permutation.
ArityCell permute_cell(const ArityCell& cell, const Permutation& permutation);

/// Rank permutation of a tuple of distinct elements: maps the position of
/// each element in the sorted order to its position in the tuple.
Permutation rank_permutation(std::span<const int> tuple);

/// Stable textual id of a labeled world: "<n>:<adjacency bits in hex>".
std::string world_label(const World& world);

/// Isomorphism class identifier: the minimal world of the orbit plus orbit size.
struct IsoClassId {
    World canonical;
    std::uint64_t class_size = 0;

    /// Stable textual id "<n>:<hex adjacency bits>".
    std::string label() const;

    friend bool operator==(const IsoClassId& a, const IsoClassId& b) {
        return a.class_size == b.class_size && a.canonical == b.canonical;
    }
};

/// Exhaustive minimization over all n! relabelings. Throws ResourceLimit when
/// n! exceeds the permutation budget.
IsoClassId canonical_form(const World& world, const Budget& budget = {});

/// Every distinct world isomorphic to `world`, sorted.
std::vector<World> isomorphism_class(const World& world, const Budget& budget = {});

bool satisfies_convention(const World& world, Convention convention);

/// The possible worlds Ω^(n) under a convention, indexed by a dense integer code.
///
/// Each code bit ("free bit") controls a set of adjacency bits: one tuple in
/// the directed case, the pair (i,j),(j,i) for undirected binary relations.
/// Free bits are ordered so that code order agrees with world order. Codes
/// give random access, so index ranges split the enumeration.
class WorldSpace {
public:
    WorldSpace(SignaturePtr signature, int n, Convention convention);

    const SignaturePtr& signature() const noexcept { return signature_; }
    int domain_size() const noexcept { return n_; }
    Convention convention() const noexcept { return convention_; }
    std::size_t free_bit_count() const noexcept { return free_bits_.size(); }
    std::size_t world_bit_count() const noexcept { return world_bits_; }

    /// 2^free_bit_count(); throws ResourceLimit above the budget.
    std::uint64_t checked_count(const Budget& budget) const;

    World world(std::uint64_t code) const;
    /// Code of a world satisfying the convention; throws InvalidArgument otherwise.
    std::uint64_t code(const World& world) const;

    /// Free bits in code order, each as the adjacency bits it sets.
    const std::vector<std::vector<std::size_t>>& free_bits() const noexcept { return free_bits_; }
    /// Free bit owning an adjacency bit, or -1 for bits fixed to zero.
    int owner(std::size_t world_bit) const { return owner_[world_bit]; }

private:
    SignaturePtr signature_;
    int n_;
    Convention convention_;
    std::size_t world_bits_ = 0;
    std::vector<std::vector<std::size_t>> free_bits_;
    std::vector<int> owner_;
};

/// All n-worlds under a convention, in code order.
std::vector<World> enumerate_worlds(SignaturePtr signature, int n, Convention convention, const Budget& budget = {});

/// Relabelings of a WorldSpace acting directly on codes (free bits <= 64).
class CodePermuter {
public:
    CodePermuter(const WorldSpace& space, const Budget& budget);

    std::size_t permutation_count() const noexcept { return perm_count_; }
    std::uint64_t apply(std::size_t permutation, std::uint64_t code) const;
    /// Minimal code of the orbit and the orbit size.
    std::pair<std::uint64_t, std::uint64_t> canonical(std::uint64_t code) const;

private:
    std::size_t bits_;
    std::size_t perm_count_ = 0;
    std::vector<std::uint8_t> maps_;
};

struct IsoClass {
    IsoClassId id;
    std::uint64_t code = 0;
};

/// One entry per isomorphism class of a WorldSpace, ordered by canonical code.
/// Uses orbit marking, so the cost is (#classes x n!) rather than (#worlds x n!).
std::vector<IsoClass> enumerate_iso_classes(const WorldSpace& space, const Budget& budget = {});

}  // namespace worldlet
