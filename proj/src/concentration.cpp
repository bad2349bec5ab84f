#include "worldlet/concentration.hpp"

#include "worldlet/ahk_checks.hpp"
#include "worldlet/errors.hpp"
#include "worldlet/latent.hpp"

#include "parallel.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace worldlet {

void BoundSpec::validate() const {
    if (k < 1 || k > n) throw InvalidArgument("bound needs 1 <= k <= n");
    if (t <= 0 || t > 1) throw InvalidArgument("tolerance t must be in (0, 1]");
}

double tail_bound(const BoundSpec& spec) {
    spec.validate();
    const double t = to_double(spec.t);
    return std::exp(-2.0 * static_cast<double>(spec.n / spec.k) * t * t);
}

UnionBound union_bound(const BoundSpec& spec, std::uint64_t worldlets) {
    if (worldlets == 0) throw InvalidArgument("worldlet count must be positive");
    UnionBound out;
    out.worldlets = worldlets;
    out.tail = tail_bound(spec);
    out.bound = 2.0 * static_cast<double>(worldlets) * out.tail;

    // Least m = floor(n/k) with 2W exp(-2 m t²) < 1, i.e. m > ln(2W) / (2t²).
    const long double t = to_double(spec.t);
    const long double log2w = std::log(2.0L * static_cast<long double>(worldlets));
    auto ok = [&](std::uint64_t m) { return log2w - 2.0L * static_cast<long double>(m) * t * t < 0; };
    auto m = static_cast<std::uint64_t>(std::floor(log2w / (2.0L * t * t))) + 1;
    while (m > 1 && ok(m - 1)) --m;
    while (!ok(m)) ++m;
    out.threshold_n = m * static_cast<std::uint64_t>(spec.k);
    return out;
}

std::uint64_t worldlet_count(SignaturePtr signature, int k, Convention convention) {
    WorldSpace space(std::move(signature), k, convention);
    if (space.free_bit_count() > 63) {
        throw ResourceLimit("worldlet count exceeds 2^63", space.free_bit_count(), 63);
    }
    return std::uint64_t{1} << space.free_bit_count();
}

namespace {

// Max-norm and squared-sum deviation; the second breaks max-norm plateaus in local search.
struct Objective {
    Rational max;
    Rational squares;

    friend bool operator<(const Objective& a, const Objective& b) {
        if (a.max != b.max) return a.max < b.max;
        return a.squares < b.squares;
    }
};

Objective deviation_of(const WorldletDistribution& p, const WorldletDistribution& target, bool iso_norm,
                       const Budget& budget) {
    Objective out;
    auto add = [&](const Rational& a, const Rational& b) {
        Rational d = a - b;
        Rational ad = abs(d);
        if (ad > out.max) out.max = ad;
        out.squares += d * d;
    };
    if (!iso_norm) {
        auto pi = p.entries().begin(), pe = p.entries().end();
        auto ti = target.entries().begin(), te = target.entries().end();
        const Rational zero = 0;
        while (pi != pe || ti != te) {
            if (ti == te || (pi != pe && pi->first < ti->first)) {
                add(pi->second, zero);
                ++pi;
            } else if (pi == pe || ti->first < pi->first) {
                add(zero, ti->second);
                ++ti;
            } else {
                add(pi->second, ti->second);
                ++pi;
                ++ti;
            }
        }
        return out;
    }
    std::map<World, std::pair<Rational, Rational>> classes;
    for (const auto& [w, v] : p.entries()) classes[canonical_form(w, budget).canonical].first += v;
    for (const auto& [w, v] : target.entries()) classes[canonical_form(w, budget).canonical].second += v;
    for (const auto& [c, pq] : classes) add(pq.first, pq.second);
    return out;
}

Objective world_objective(const World& world, const WorldletDistribution& target, bool iso_norm, const Budget& budget) {
    auto p = frequency_ordered(world, target.size(), target.convention()).distribution;
    return deviation_of(p, target, iso_norm, budget);
}

void check_target(const WorldletDistribution& target, int n) {
    if (target.entries().empty()) throw InvalidArgument("target distribution is empty");
    if (target.size() > n) {
        throw InvalidArgument("worldlet size " + std::to_string(target.size()) + " exceeds domain size " +
                              std::to_string(n));
    }
}

std::optional<IsoClassId> try_canonical(const World& world, const Budget& budget) {
    try {
        return canonical_form(world, budget);
    } catch (const ResourceLimit&) {
        return std::nullopt;
    }
}

}  // namespace

Rational realizer_deviation(const World& world, const WorldletDistribution& target, bool iso_norm,
                            const Budget& budget) {
    check_target(target, world.size());
    return world_objective(world, target, iso_norm, budget).max;
}

double DeviationReport::exceedance_fraction() const {
    return deviations.empty() ? 0.0 : static_cast<double>(exceedances) / static_cast<double>(deviations.size());
}

double DeviationReport::mean_deviation() const {
    if (deviations.empty()) return 0;
    Rational sum = 0;
    for (const auto& d : deviations) sum += d;
    return to_double(sum) / static_cast<double>(deviations.size());
}

Rational DeviationReport::max_deviation() const {
    Rational best = 0;
    for (const auto& d : deviations) best = std::max(best, d);
    return best;
}

DeviationReport empirical_deviation(const AhkModel& model, int k, int n, std::size_t samples, std::uint64_t seed,
                                    const DeviationOptions& options) {
    if (model.has_global_latent()) {
        throw InvalidArgument("empirical deviation needs an AHK⁻ model; this model reads the global latent U_∅");
    }
    if (samples == 0) throw InvalidArgument("samples must be positive");
    BoundSpec spec{n, k, options.t};
    spec.validate();

    DeviationReport report;
    report.k = k;
    report.n = n;
    report.t = options.t;
    const Convention convention = options.target ? options.target->convention() : options.convention;
    Budget budget;
    budget.threads = options.threads;

    if (options.target) {
        if (options.target->size() != k) throw InvalidArgument("target must be a distribution over k-worlds");
        auto ex = is_exchangeable(*options.target, budget);
        if (!ex.exchangeable) throw InvalidArgument("target must be exchangeable");
        report.target = *options.target;
    } else {
        MonteCarloOptions mc;
        mc.threads = options.threads;
        auto est = estimate_marginal(sampler_of(model), k, options.target_samples, derive_seed(seed, ~std::uint64_t{0}), mc);
        WorldletDistribution::Entries entries;
        for (const auto& [w, c] : est.counts) {
            Rational p(static_cast<unsigned long>(c), static_cast<unsigned long>(est.samples));
            p.canonicalize();
            entries.emplace(w, p);
        }
        report.target = iso_average(WorldletDistribution::create(model.signature(), k, convention, std::move(entries)), budget);
        report.target_estimated = true;
    }

    report.deviations.resize(samples);
    detail::parallel_for(samples, options.threads, [&](std::size_t j, unsigned) {
        const World w = model.sample(n, derive_seed(seed, j));
        auto unordered = frequency_unordered(w, k, convention).distribution;
        report.deviations[j] = deviation_of(iso_average(unordered), report.target, false, {}).max;
    });
    for (const auto& d : report.deviations) report.exceedances += d > options.t;

    report.bound = union_bound(spec, worldlet_count(model.signature(), k, convention));
    if (report.bound.bound < 1 && report.exceedances > 0) {
        boost::math::binomial_distribution<double> binom(static_cast<double>(samples), report.bound.bound);
        report.p_value = boost::math::cdf(boost::math::complement(binom, static_cast<double>(report.exceedances - 1)));
    }
    report.passed = report.p_value > 1 - options.confidence;
    return report;
}

std::string to_string(SearchMode mode) { return mode == SearchMode::Exhaustive ? "exhaustive" : "local"; }

SearchMode parse_search_mode(std::string_view text) {
    if (text == "exhaustive") return SearchMode::Exhaustive;
    if (text == "local") return SearchMode::Local;
    throw InvalidArgument("unknown search mode '" + std::string(text) + "'; expected exhaustive or local");
}

RealizerResult search_realizer(const WorldletDistribution& target, int n, const RealizerOptions& options) {
    check_target(target, n);
    const Budget& budget = options.budget;
    WorldSpace space(target.signature_ptr(), n, target.convention());
    RealizerResult result;
    result.method = options.mode;

    if (options.mode == SearchMode::Exhaustive) {
        std::vector<IsoClass> classes;
        try {
            classes = enumerate_iso_classes(space, budget);
        } catch (const ResourceLimit& e) {
            throw ResourceLimit("exhaustive realizer search over n=" + std::to_string(n) + " (try local mode)",
                                e.requested(), e.budget());
        }
        std::vector<Objective> scores(classes.size());
        detail::parallel_for(classes.size(), budget.threads, [&](std::size_t i, unsigned) {
            scores[i] = world_objective(classes[i].id.canonical, target, options.iso_norm, budget);
        });
        std::size_t best = 0;
        for (std::size_t i = 1; i < classes.size(); ++i) {
            if (scores[i].max < scores[best].max) best = i;
        }
        result.world = classes[best].id.canonical;
        result.id = classes[best].id;
        result.max_deviation = scores[best].max;
        result.evaluated = classes.size();
        return result;
    }

    if (options.restarts == 0) throw InvalidArgument("local search needs at least one restart");
    const auto& free_bits = space.free_bits();
    struct Run {
        World world;
        Objective score;
        std::size_t evaluated = 0;
    };
    std::vector<Run> runs(options.restarts);
    detail::parallel_for(options.restarts, budget.threads, [&](std::size_t r, unsigned) {
        PhiloxEngine rng(options.seed, r);
        BitVector bits(space.world_bit_count());
        for (const auto& group : free_bits) {
            if (rng() >> 63) {
                for (auto b : group) bits.set(b);
            }
        }
        Run run{World(target.signature_ptr(), n, bits), {}, 1};
        run.score = world_objective(run.world, target, options.iso_norm, budget);
        while (true) {
            std::optional<std::pair<Objective, std::size_t>> step;
            for (std::size_t f = 0; f < free_bits.size(); ++f) {
                BitVector next = run.world.bits();
                for (auto b : free_bits[f]) next.flip(b);
                auto score = world_objective(World(target.signature_ptr(), n, std::move(next)), target,
                                             options.iso_norm, budget);
                ++run.evaluated;
                if (score < run.score && (!step || score < step->first)) step.emplace(std::move(score), f);
            }
            if (!step) break;
            BitVector next = run.world.bits();
            for (auto b : free_bits[step->second]) next.flip(b);
            run.world = World(target.signature_ptr(), n, std::move(next));
            run.score = std::move(step->first);
        }
        runs[r] = std::move(run);
    });
    std::size_t best = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        result.evaluated += runs[r].evaluated;
        if (runs[r].score.max < runs[best].score.max) best = r;
    }
    result.id = try_canonical(runs[best].world, budget);
    result.world = result.id ? result.id->canonical : runs[best].world;
    result.max_deviation = runs[best].score.max;
    return result;
}

}  // namespace worldlet
