#pragma once

#include "worldlet/ahk.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace worldlet {

/// Any random world generator keyed by (n, seed). Sample j of a Monte Carlo
/// run uses derive_seed(run seed, j).
using WorldSampler = std::function<World(int n, std::uint64_t seed)>;

WorldSampler sampler_of(const AhkModel& model);

struct MonteCarloOptions {
    unsigned threads = 1;
    double alpha = 1e-3;
};

/// Empirical distribution of sampled worlds restricted to [k].
struct MarginalEstimate {
    int k = 0;
    std::size_t samples = 0;
    std::map<World, std::size_t> counts;

    double prob(const World& world) const;
    /// sqrt(p̂(1-p̂)/N).
    double standard_error(const World& world) const;
};

/// Samples worlds of size n (default k) and keeps their restriction to [k].
MarginalEstimate estimate_marginal(const WorldSampler& sampler, int k, std::size_t samples, std::uint64_t seed,
                                   const MonteCarloOptions& options = {}, int n = 0);

struct EntryDeviation {
    World world;
    double expected = 0, observed = 0, sigma = 0, z = 0;
};

struct ExactComparison {
    std::vector<EntryDeviation> entries;
    double max_abs_z = 0;
    double threshold = 3;
    bool passed = true;
};

/// Per-entry z-scores against exact probabilities, σ = sqrt(p(1-p)/N) from the
/// exact p. With Bonferroni the 3σ two-sided level is split across entries.
ExactComparison compare_to_exact(const MarginalEstimate& estimate, const WorldletDistribution& exact,
                                 double sigmas = 3, bool bonferroni = false);

struct ChiSquareResult {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
    bool passed = true;
};

struct ProjectivityReport {
    /// Two-sample homogeneity of (f↓[n])↓[m] against f↓[m].
    ChiSquareResult homogeneity;
    std::size_t coupling_seeds = 0;
    std::size_t coupling_failures = 0;
    bool passed() const noexcept { return homogeneity.passed && coupling_failures == 0; }
};

ProjectivityReport projectivity_test(const WorldSampler& sampler, int m, int n, std::size_t samples, std::uint64_t seed,
                                     std::size_t coupling_seeds = 1000, const MonteCarloOptions& options = {});

struct ExchangeabilityTestReport {
    /// Homogeneity of counts within each observed iso class.
    ChiSquareResult homogeneity;
    std::size_t classes = 0;
    bool passed() const noexcept { return homogeneity.passed; }
};

ExchangeabilityTestReport exchangeability_test(const WorldSampler& sampler, int k, std::size_t samples,
                                               std::uint64_t seed, const MonteCarloOptions& options = {});

struct ModularityBoundReport {
    World world;
    double p = 0, q = 0;
    double se_p = 0, se_q = 0;
    /// sqrt(se_q² + 4p²se_p²).
    double sigma = 0;
    /// p is within 3 standard errors of 0.
    bool inconclusive = false;
    bool passed = false;
};

/// Estimates p = f↓[n](w) and q = f↓[n+1](O) from worlds of size n+1; passes
/// when q >= p² - 3σ.
ModularityBoundReport modularity_bound_test(const WorldSampler& sampler, const World& world, std::size_t samples,
                                            std::uint64_t seed, const MonteCarloOptions& options = {});

struct DegreeProbe {
    double u = 0;
    double target = 0;  // F^{-1}(u)
    double mean = 0;
    double standard_error = 0;
    std::size_t samples = 0;
    bool passed = false;
};

struct DegreeReport {
    std::vector<DegreeProbe> probes;
    bool passed() const;
};

/// Conditions on U_1 ∈ [u-ε, u+ε] and averages node 1's out-degree divided by n-1.
/// `samples` accepted draws per grid value. Requires a degree_model f^2.
DegreeReport degree_model_test(const AhkModel& model, const std::vector<double>& grid, int n, std::size_t samples,
                               std::uint64_t seed, double epsilon = 0.01, const MonteCarloOptions& options = {});

// --- adversarial fixtures -------------------------------------------------------

/// f^2 that always returns 1→2; not equivariant.
CellFunction broken_forward_function();
/// Node 1 is joined to every other node; other pairs follow undirected ER(1/2).
WorldSampler labeled_hub_sampler();
/// Draws fresh latents for every domain size, breaking the seed coupling.
WorldSampler resampling_sampler(const AhkModel& model);

}  // namespace worldlet
