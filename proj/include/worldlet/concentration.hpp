#pragma once

#include "worldlet/ahk.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace worldlet {

struct BoundSpec {
    int n = 0;
    int k = 0;
    Rational t;

    /// Throws InvalidArgument unless 1 <= k <= n and 0 < t <= 1.
    void validate() const;
};

/// exp(-2 floor(n/k) t²).
double tail_bound(const BoundSpec& spec);

struct UnionBound {
    double tail = 0;
    /// 2 |Ω^(k)| tail; may exceed 1.
    double bound = 0;
    std::uint64_t worldlets = 0;
    /// Least n with 2 |Ω^(k)| exp(-2 floor(n/k) t²) < 1.
    std::uint64_t threshold_n = 0;
    bool conclusive() const noexcept { return bound < 1; }
};

UnionBound union_bound(const BoundSpec& spec, std::uint64_t worldlets);

/// |Ω^(k)| under a convention; throws ResourceLimit above 2^63.
std::uint64_t worldlet_count(SignaturePtr signature, int k, Convention convention);

/// max over ω′ of |P^(k)(ω′|world) − target(ω′)|, or with `iso_norm` the same over
/// iso-class totals.
Rational realizer_deviation(const World& world, const WorldletDistribution& target, bool iso_norm = false,
                            const Budget& budget = {});

struct DeviationOptions {
    Rational t = ratio(1, 10);
    /// Compared against the model's k-marginal. When absent the marginal is
    /// estimated from `target_samples` worlds of size k and iso-averaged.
    std::optional<WorldletDistribution> target;
    std::size_t target_samples = 100000;
    Convention convention = Convention::Directed;
    double confidence = 0.99;
    unsigned threads = 1;
};

struct DeviationReport {
    int k = 0, n = 0;
    Rational t;
    WorldletDistribution target;
    bool target_estimated = false;
    /// One exact max-norm deviation per sampled world, in sample order.
    std::vector<Rational> deviations;
    std::size_t exceedances = 0;
    UnionBound bound;
    /// P(X >= exceedances) for X ~ Binomial(samples, bound); 1 when the bound is vacuous.
    double p_value = 1;
    bool passed = true;

    double exceedance_fraction() const;
    double mean_deviation() const;
    Rational max_deviation() const;
};

/// Samples worlds of size n from an AHK⁻ model and measures how far the
/// unordered worldlet frequencies, iso-averaged, fall from the target.
/// Throws InvalidArgument for models with a global latent.
DeviationReport empirical_deviation(const AhkModel& model, int k, int n, std::size_t samples, std::uint64_t seed,
                                    const DeviationOptions& options = {});

enum class SearchMode { Exhaustive, Local };

std::string to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view text);

struct RealizerOptions {
    SearchMode mode = SearchMode::Exhaustive;
    Budget budget;
    std::size_t restarts = 32;
    std::uint64_t seed = 0;
    bool iso_norm = false;
};

struct RealizerResult {
    World world;
    /// Filled when n! fits the permutation budget.
    std::optional<IsoClassId> id;
    Rational max_deviation;
    SearchMode method = SearchMode::Exhaustive;
    /// Worlds (exhaustive: iso classes) whose deviation was evaluated.
    std::size_t evaluated = 0;
};

/// Exhaustive: the iso class of Ω^(n) with the least deviation (ties go to
/// the smaller canonical code). Local: steepest descent over single free-bit
/// flips from random starts; a heuristic with no optimality guarantee.
/// Exhaustive mode throws ResourceLimit when Ω^(n) exceeds the budget.
RealizerResult search_realizer(const WorldletDistribution& target, int n, const RealizerOptions& options = {});

}  // namespace worldlet
