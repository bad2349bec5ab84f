#pragma once

#include "worldlet/rational.hpp"
#include "worldlet/relational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace worldlet {

/// Exact probability assignment over Ω^(k). Stored sparsely; absent worlds have probability 0.
class WorldletDistribution {
public:
    using Entries = std::map<World, Rational>;

    WorldletDistribution() = default;

    /// Throws InvalidArgument unless every world has size k over `signature`,
    /// every probability is >= 0, and the probabilities sum to exactly 1.
    /// Zero entries are dropped.
    static WorldletDistribution create(SignaturePtr signature, int k, Convention convention, Entries entries);
    static WorldletDistribution point_mass(const World& world, Convention convention = Convention::Directed);

    const SignaturePtr& signature_ptr() const noexcept { return signature_; }
    const Signature& signature() const noexcept { return *signature_; }
    int size() const noexcept { return k_; }
    Convention convention() const noexcept { return convention_; }
    const Entries& entries() const noexcept { return entries_; }
    Rational prob(const World& world) const;

    friend bool operator==(const WorldletDistribution& a, const WorldletDistribution& b) {
        return a.k_ == b.k_ && a.convention_ == b.convention_ && a.entries_ == b.entries_ &&
               *a.signature_ == *b.signature_;
    }

private:
    SignaturePtr signature_;
    int k_ = 0;
    Convention convention_ = Convention::Directed;
    Entries entries_;
};

enum class Sampling { Ordered, Unordered };

/// P^(k)(·|ω) or P̂^(k)(·|ω) together with the size of the world it came from.
struct FrequencyVector {
    WorldletDistribution distribution;
    int source_size = 0;
    Sampling sampling = Sampling::Ordered;
};

/// Number of k-subsets of a world inducing each k-world (relabeled in increasing order).
///
/// Works on raw adjacency codes, so k-worlds must fit in 64 adjacency bits.
class SubsetCensus {
public:
    /// Throws InvalidArgument if k is not in [1, n], ResourceLimit if k-worlds need more than 64 bits.
    SubsetCensus(SignaturePtr signature, int n, int k);

    int domain_size() const noexcept { return n_; }
    int worldlet_size() const noexcept { return k_; }
    std::uint64_t subset_count() const noexcept { return subsets_; }

    /// Adjacency code of world↓subset for a sorted subset of size k.
    std::uint64_t code(const World& world, const int* subset) const;
    World worldlet(std::uint64_t code) const;

    /// (code, count) pairs sorted by code; counts sum to C(n,k).
    std::vector<std::pair<std::uint64_t, std::uint64_t>> count(const World& world, unsigned threads = 1) const;

private:
    SignaturePtr signature_;
    int n_, k_;
    std::uint64_t subsets_ = 0;
    std::size_t worldlet_bits_ = 0;
    // Per worldlet bit: relation offset in the n-world and tuple over [k].
    std::vector<std::size_t> offsets_;
    std::vector<Tuple> tuples_;
};

/// C(n,k) as an exact 64-bit value; throws ResourceLimit on overflow.
std::uint64_t binomial(int n, int k);

/// P^(k)(ω′|ω) = #{i ∈ [n]^k distinct : ω↓i = ω′} / (n!/(n−k)!).
FrequencyVector frequency_ordered(const World& world, int k, Convention convention = Convention::Directed,
                                  unsigned threads = 1);
/// P̂^(k)(ω′|ω) = #{k-subsets inducing ω′ in increasing order} / C(n,k).
FrequencyVector frequency_unordered(const World& world, int k, Convention convention = Convention::Directed,
                                    unsigned threads = 1);

/// Spreads each iso class's total mass uniformly over the class.
/// Applied to P̂^(k)(·|ω) this yields P^(k)(·|ω).
WorldletDistribution iso_average(const WorldletDistribution& distribution, const Budget& budget = {});
FrequencyVector iso_average(const FrequencyVector& frequencies, const Budget& budget = {});

/// (P^(k) ∘ Q^(n))(ω′) = Σ_ω Q(ω) P^(k)(ω′|ω).
WorldletDistribution fenstad(const WorldletDistribution& q, int k, unsigned threads = 1);

/// Q↓[m](ω′) = Σ_{ω : ω↓[m] = ω′} Q(ω).
WorldletDistribution marginalize(const WorldletDistribution& q, int m);

struct ExchangeabilityResult {
    bool exchangeable = true;
    /// Isomorphic worlds with different probabilities.
    std::optional<std::pair<World, World>> witness;
};

ExchangeabilityResult is_exchangeable(const WorldletDistribution& q, const Budget& budget = {});

/// Worlds with positive probability that violate `convention`.
std::vector<World> convention_violations(const WorldletDistribution& q, Convention convention);

}  // namespace worldlet
