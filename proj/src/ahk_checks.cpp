#include "worldlet/ahk_checks.hpp"

#include "parallel.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <set>

namespace worldlet {

WorldSampler sampler_of(const AhkModel& model) {
    return [model](int n, std::uint64_t seed) { return model.sample(n, seed); };
}

namespace {

std::vector<int> iota(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

// Runs fn(sample index, tally) over [0, samples) and merges the per-worker tallies.
template <class Fn>
std::map<World, std::size_t> tally(std::size_t samples, unsigned threads, Fn&& fn) {
    const unsigned workers = detail::effective_threads(threads, samples);
    std::vector<std::map<World, std::size_t>> partial(workers);
    detail::parallel_for(samples, workers, [&](std::size_t j, unsigned w) { fn(j, partial[w]); });
    std::map<World, std::size_t> out;
    for (auto& p : partial) {
        for (auto& [world, c] : p) out[world] += c;
    }
    return out;
}

ChiSquareResult chi_square(double statistic, double dof, double alpha) {
    ChiSquareResult r;
    r.statistic = statistic;
    r.dof = dof;
    if (dof > 0) r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
    r.passed = r.p_value >= alpha;
    return r;
}

}  // namespace

double MarginalEstimate::prob(const World& world) const {
    auto it = counts.find(world);
    return it == counts.end() || samples == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

double MarginalEstimate::standard_error(const World& world) const {
    const double p = prob(world);
    return samples == 0 ? 0.0 : std::sqrt(p * (1 - p) / static_cast<double>(samples));
}

MarginalEstimate estimate_marginal(const WorldSampler& sampler, int k, std::size_t samples, std::uint64_t seed,
                                   const MonteCarloOptions& options, int n) {
    if (samples == 0) throw InvalidArgument("need at least one sample");
    if (n == 0) n = k;
    if (k < 1 || n < k) throw InvalidArgument("marginal size must be in [1, n]");
    const auto prefix = iota(k);
    MarginalEstimate est;
    est.k = k;
    est.samples = samples;
    est.counts = tally(samples, options.threads, [&](std::size_t j, auto& t) {
        World w = sampler(n, derive_seed(seed, j));
        ++t[n == k ? std::move(w) : induce_subset(w, prefix)];
    });
    return est;
}

ExactComparison compare_to_exact(const MarginalEstimate& estimate, const WorldletDistribution& exact, double sigmas,
                                 bool bonferroni) {
    std::set<World> worlds;
    for (const auto& [w, c] : estimate.counts) worlds.insert(w);
    for (const auto& [w, p] : exact.entries()) worlds.insert(w);

    ExactComparison out;
    out.threshold = sigmas;
    if (bonferroni && worlds.size() > 1) {
        boost::math::normal z;
        const double tail = boost::math::cdf(boost::math::complement(z, sigmas)) / static_cast<double>(worlds.size());
        out.threshold = boost::math::quantile(boost::math::complement(z, tail));
    }
    const double n = static_cast<double>(estimate.samples);
    for (const auto& w : worlds) {
        EntryDeviation e;
        e.world = w;
        e.expected = exact.prob(w).get_d();
        e.observed = estimate.prob(w);
        e.sigma = std::sqrt(e.expected * (1 - e.expected) / n);
        const double diff = e.observed - e.expected;
        e.z = e.sigma > 0 ? diff / e.sigma : (diff == 0 ? 0.0 : INFINITY);
        out.max_abs_z = std::max(out.max_abs_z, std::abs(e.z));
        out.entries.push_back(std::move(e));
    }
    out.passed = out.max_abs_z <= out.threshold;
    return out;
}

ProjectivityReport projectivity_test(const WorldSampler& sampler, int m, int n, std::size_t samples, std::uint64_t seed,
                                     std::size_t coupling_seeds, const MonteCarloOptions& options) {
    if (m >= n) throw InvalidArgument("projectivity test needs m < n");
    ProjectivityReport report;
    const auto big = estimate_marginal(sampler, m, samples, derive_seed(seed, 1), options, n);
    const auto small = estimate_marginal(sampler, m, samples, derive_seed(seed, 2), options, m);

    std::set<World> worlds;
    for (const auto& [w, c] : big.counts) worlds.insert(w);
    for (const auto& [w, c] : small.counts) worlds.insert(w);
    const double n1 = static_cast<double>(big.samples), n2 = static_cast<double>(small.samples);
    const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
    double stat = 0;
    for (const auto& w : worlds) {
        auto count = [&](const MarginalEstimate& e) {
            auto it = e.counts.find(w);
            return it == e.counts.end() ? 0.0 : static_cast<double>(it->second);
        };
        const double a = count(big), b = count(small);
        stat += (k1 * a - k2 * b) * (k1 * a - k2 * b) / (a + b);
    }
    report.homogeneity = chi_square(stat, static_cast<double>(worlds.size()) - 1, options.alpha);

    const auto prefix = iota(m);
    const std::uint64_t coupling_seed = derive_seed(seed, 3);
    std::vector<std::size_t> failures(detail::effective_threads(options.threads, coupling_seeds));
    detail::parallel_for(coupling_seeds, static_cast<unsigned>(failures.size()), [&](std::size_t j, unsigned w) {
        const std::uint64_t s = derive_seed(coupling_seed, j);
        if (!(induce_subset(sampler(n, s), prefix) == sampler(m, s))) ++failures[w];
    });
    report.coupling_seeds = coupling_seeds;
    for (auto f : failures) report.coupling_failures += f;
    return report;
}

ExchangeabilityTestReport exchangeability_test(const WorldSampler& sampler, int k, std::size_t samples, std::uint64_t seed,
                                               const MonteCarloOptions& options) {
    const auto est = estimate_marginal(sampler, k, samples, seed, options);
    std::set<World> done;
    double stat = 0, dof = 0;
    ExchangeabilityTestReport report;
    for (const auto& [w, c] : est.counts) {
        if (done.count(w)) continue;
        const auto members = isomorphism_class(w);
        double total = 0;
        for (const auto& m : members) {
            auto it = est.counts.find(m);
            total += it == est.counts.end() ? 0.0 : static_cast<double>(it->second);
            done.insert(m);
        }
        const double expected = total / static_cast<double>(members.size());
        for (const auto& m : members) {
            auto it = est.counts.find(m);
            const double obs = it == est.counts.end() ? 0.0 : static_cast<double>(it->second);
            stat += (obs - expected) * (obs - expected) / expected;
        }
        dof += static_cast<double>(members.size()) - 1;
        ++report.classes;
    }
    report.homogeneity = chi_square(stat, dof, options.alpha);
    return report;
}

ModularityBoundReport modularity_bound_test(const WorldSampler& sampler, const World& world, std::size_t samples,
                                            std::uint64_t seed, const MonteCarloOptions& options) {
    if (samples == 0) throw InvalidArgument("need at least one sample");
    const int n = world.size();
    const auto prefix = iota(n);
    auto swapped = iota(n);
    swapped.back() = n;

    const unsigned workers = detail::effective_threads(options.threads, samples);
    std::vector<std::size_t> hits_p(workers), hits_q(workers);
    detail::parallel_for(samples, workers, [&](std::size_t j, unsigned w) {
        const World big = sampler(n + 1, derive_seed(seed, j));
        if (!(induce_subset(big, prefix) == world)) return;
        ++hits_p[w];
        if (induce_tuple(big, swapped) == world) ++hits_q[w];
    });
    std::size_t cp = 0, cq = 0;
    for (unsigned w = 0; w < workers; ++w) {
        cp += hits_p[w];
        cq += hits_q[w];
    }
    ModularityBoundReport r;
    r.world = world;
    const double N = static_cast<double>(samples);
    r.p = static_cast<double>(cp) / N;
    r.q = static_cast<double>(cq) / N;
    r.se_p = std::sqrt(r.p * (1 - r.p) / N);
    r.se_q = std::sqrt(r.q * (1 - r.q) / N);
    r.sigma = std::sqrt(r.se_q * r.se_q + 4 * r.p * r.p * r.se_p * r.se_p);
    r.inconclusive = r.p <= 3 * r.se_p;
    r.passed = !r.inconclusive && r.q >= r.p * r.p - 3 * r.sigma;
    return r;
}

bool DegreeReport::passed() const {
    for (const auto& p : probes) {
        if (!p.passed) return false;
    }
    return !probes.empty();
}

DegreeReport degree_model_test(const AhkModel& model, const std::vector<double>& grid, int n, std::size_t samples,
                               std::uint64_t seed, double epsilon, const MonteCarloOptions& options) {
    if (n < 2) throw InvalidArgument("degree test needs n >= 2");
    if (samples == 0) throw InvalidArgument("need at least one sample");
    if (model.signature()->arity() < 2) throw InvalidArgument("degree test needs a binary relation");
    const auto* deg = std::get_if<DegreeModelFn>(&model.function(2).spec());
    if (!deg) throw InvalidArgument("degree test needs a degree_model level-2 function");
    const std::size_t relation = deg->relation;

    DegreeReport report;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double u = grid[g];
        if (u - epsilon < 0 || u + epsilon > 1) throw InvalidArgument("conditioning window leaves [0,1]");
        // Seeds whose U_1 falls in the window; cheap to find since U_1 is one block.
        const std::uint64_t base = derive_seed(seed, g);
        std::vector<std::uint64_t> accepted;
        accepted.reserve(samples);
        const int first[1] = {0};
        for (std::uint64_t j = 0; accepted.size() < samples; ++j) {
            const std::uint64_t s = derive_seed(base, j);
            if (std::abs(LatentField(s).uniform(first) - u) <= epsilon) accepted.push_back(s);
        }
        std::vector<double> degree(samples);
        detail::parallel_for(samples, detail::effective_threads(options.threads, samples), [&](std::size_t i, unsigned) {
            const LatentField field(accepted[i]);
            const int fwd[2] = {0, 1};
            int out = 0;
            for (int j = 1; j < n; ++j) {
                const int index[2] = {0, j};
                if (model.cell(field, index).holds(relation, fwd)) ++out;
            }
            degree[i] = static_cast<double>(out) / (n - 1);
        });
        double mean = 0;
        for (double d : degree) mean += d;
        mean /= static_cast<double>(samples);
        double var = 0;
        for (double d : degree) var += (d - mean) * (d - mean);
        var /= static_cast<double>(samples > 1 ? samples - 1 : 1);

        DegreeProbe probe;
        probe.u = u;
        probe.target = deg->inverse(u);
        probe.mean = mean;
        probe.standard_error = std::sqrt(var / static_cast<double>(samples));
        probe.samples = samples;
        probe.passed = std::abs(mean - probe.target) <= 3 * probe.standard_error;
        report.probes.push_back(probe);
    }
    return report;
}

// --- adversarial fixtures -----------------------------------------------------------

CellFunction broken_forward_function() {
    auto sig = graph_signature();
    ArityCell forward(sig, 2);
    const int fwd[2] = {0, 1};
    forward.set(0, fwd);
    return CellFunction(sig, 2, ConstantFn{forward});
}

WorldSampler labeled_hub_sampler() {
    return [](int n, std::uint64_t seed) {
        const LatentField field(seed);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int index[2] = {i, j};
                if (i == 0 || field.uniform(index) < 0.5) edges.emplace_back(i, j);
            }
        }
        World w(graph_signature(), n);
        for (auto [i, j] : edges) {
            const int a[2] = {i, j}, b[2] = {j, i};
            w.set(0, a);
            w.set(0, b);
        }
        return w;
    };
}

WorldSampler resampling_sampler(const AhkModel& model) {
    return [model](int n, std::uint64_t seed) { return model.sample(n, derive_seed(seed, static_cast<std::uint64_t>(n))); };
}

}  // namespace worldlet
