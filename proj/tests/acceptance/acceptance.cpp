// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the failing set equals --expect-fail exactly, so a
// known-red criterion stays visible without hiding regressions elsewhere.

#include "worldlet/ahk.hpp"
#include "worldlet/ahk_checks.hpp"
#include "worldlet/concentration.hpp"
#include "worldlet/extendability.hpp"
#include "worldlet/graphs.hpp"
#include "worldlet/relational.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace worldlet;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

unsigned g_threads = 0;

unsigned threads() { return g_threads ? g_threads : std::max(1u, std::thread::hardware_concurrency()); }

MonteCarloOptions mc() {
    MonteCarloOptions o;
    o.threads = threads();
    return o;
}

std::string q(const Rational& r) { return format_rational(r); }

int edge_count(const World& w) { return static_cast<int>(w.tuples(0).size()); }

WorldletDistribution make(SignaturePtr sig, int k, Convention c, std::map<World, Rational> entries) {
    return WorldletDistribution::create(std::move(sig), k, c, std::move(entries));
}

// ---------------------------------------------------------------------------

Outcome table1() {
    const std::vector<std::vector<Rational>> expected = {
        {1, 0, 0, 0}, {0, 0, 0, 1}, {0, ratio(1, 3), 0, 0}, {ratio(1, 4), 0, ratio(1, 4), 0}};
    const auto rows = table_rows();
    if (rows.size() != 4) return {false, "row count " + std::to_string(rows.size())};
    auto worlds = enumerate_worlds(graph_signature(), 3, Convention::Undirected);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto d = table_row(rows[r]);
        if (table_row_values(rows[r]) != expected[r]) return {false, table_row_name(rows[r]) + " values differ"};
        for (const auto& w : worlds) {
            if (d.prob(w) != expected[r][edge_count(w) / 2]) return {false, table_row_name(rows[r]) + " per-world mismatch"};
        }
    }
    return {true, "4 rows exact"};
}

Outcome example1() {
    for (int n = 3; n <= 10; ++n) {
        const auto f = frequency_ordered(star_graph(n), 2).distribution;
        const auto fwd = directed_graph(2, {{0, 1}}), bwd = directed_graph(2, {{1, 0}});
        if (f.entries().size() != 3 || f.prob(empty_graph(2)) != 1 - ratio(2, n) || f.prob(fwd) != ratio(1, n) ||
            f.prob(bwd) != ratio(1, n)) {
            return {false, "n=" + std::to_string(n)};
        }
    }
    return {true, "(1-2/n, 1/n, 1/n) for n=3..10"};
}

Outcome plus_extendability() {
    const auto plus = table_row(TableRow::Plus);
    ExtendabilityOptions opt;
    opt.budget.threads = threads();
    const auto c4 = check_extendable(plus, 4, opt);
    const auto matching = undirected_graph(4, {{0, 1}, {2, 3}});
    const bool weight_ok = c4.weights.size() == 1 && c4.weights[0].second == 1 &&
                           c4.weights[0].first.canonical == canonical_form(matching).canonical;
    if (!c4.feasible || !c4.verified || !weight_ok) return {false, "n=4 certificate"};
    std::ostringstream s;
    s << "n=4 feasible (weight 1 on 2K2)";
    for (int n : {5, 6}) {
        const auto c = check_extendable(plus, n, opt);
        if (c.feasible || !c.verified) return {false, "n=" + std::to_string(n) + " not a verified separation"};
        s << ", n=" << n << " separated (" << q(c.target_value) << " > " << q(c.threshold) << ")";
    }
    return {true, s.str()};
}

Outcome nesting() {
    auto sig = graph_signature();
    const auto conv = Convention::Undirected;
    std::map<int, PolytopeInstance> poly;
    Budget budget;
    budget.threads = threads();
    for (int n : {4, 5, 6}) poly[n] = build_polytope(sig, 3, n, conv, budget);

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> weight(0, 6);
    const auto six = enumerate_worlds(sig, 6, conv, budget);
    std::uniform_int_distribution<std::size_t> pick(0, six.size() - 1);
    int feasible[7] = {};
    for (int trial = 0; trial < 50; ++trial) {
        WorldletDistribution target;
        if (trial % 2 == 0) {
            // Sparse random weights per edge-count class (multiplicities 1, 3, 3, 1),
            // so targets often sit on faces of the simplex.
            std::vector<Rational> a(4);
            Rational total = 0;
            const int mult[4] = {1, 3, 3, 1};
            for (int e = 0; e < 4; ++e) {
                a[e] = rng() % 2 ? weight(rng) : 0;
                total += a[e] * mult[e];
            }
            if (total == 0) {
                a[0] = 1;
                total = 1;
            }
            for (auto& v : a) v /= total;
            target = by_edge_count(3, a);
        } else {
            // Mixture of frequency vectors of random 6-worlds: inside Δ(3,6).
            std::map<World, Rational> acc;
            const int parts = 1 + trial % 3;
            for (int p = 0; p < parts; ++p) {
                const auto f = frequency_ordered(six[pick(rng)], 3, conv);
                for (const auto& [w, pr] : f.distribution.entries()) {
                    acc[w] += pr / parts;
                }
            }
            target = make(sig, 3, conv, std::move(acc));
        }
        bool f[7] = {};
        for (int n : {4, 5, 6}) f[n] = check_membership(poly[n], target).feasible;
        if ((f[6] && !f[5]) || (f[5] && !f[4])) return {false, "trial " + std::to_string(trial) + " not monotone"};
        for (int n : {4, 5, 6}) feasible[n] += f[n];
    }
    return {true, "50 targets monotone; feasible at n=4/5/6: " + std::to_string(feasible[4]) + "/" +
                      std::to_string(feasible[5]) + "/" + std::to_string(feasible[6])};
}

Outcome modularity() {
    const auto plus = modularity_check(table_row(TableRow::Plus));
    bool single_edge = false;
    for (const auto& e : plus.entries) {
        if (e.violation && e.world.size() == 2 && edge_count(e.world) == 2) single_edge = true;
    }
    if (!single_edge) return {false, "'+' single-edge violation missing"};
    for (auto row : {TableRow::Empty, TableRow::Complete, TableRow::Bipart}) {
        if (modularity_check(table_row(row)).violations() != 0) return {false, table_row_name(row) + " has violations"};
    }
    return {true, "'+' " + std::to_string(plus.violations()) + " violation(s); others none"};
}

std::vector<std::pair<std::string, AhkModel>> builtin_models() {
    return {{"erdos_renyi", erdos_renyi_model(ratio(1, 3))},
            {"bipartite", bipartite_model()},
            {"block_model", block_model({ratio(1, 3), ratio(2, 3)},
                                        {{ratio(9, 10), ratio(1, 10), ratio(1, 2)},
                                         {ratio(1, 10), ratio(4, 5), 0},
                                         {ratio(1, 2), 0, ratio(1, 5)}})},
            {"degree_model", degree_model({{0, 0}, {1, 1}})},
            {"constant_empty", constant_empty_model()},
            {"empty_complete_mixture", empty_complete_mixture_model()}};
}

Outcome projectivity() {
    std::atomic<std::size_t> failures{0};
    std::size_t checks = 0;
    for (const auto& [name, model] : builtin_models()) {
        std::vector<std::thread> pool;
        const unsigned t = threads();
        for (unsigned w = 0; w < t; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t s = w; s < 1000; s += t) {
                    const World big = model.sample(6, s);
                    for (int m : {2, 3}) {
                        std::vector<int> prefix(m);
                        for (int i = 0; i < m; ++i) prefix[i] = i;
                        if (!(induce_subset(big, prefix) == model.sample(m, s))) ++failures;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        checks += 2000;
    }
    return {failures == 0, std::to_string(checks) + " coupled restrictions, " + std::to_string(failures.load()) + " failures"};
}

Outcome marginals() {
    auto sig = graph_signature();
    const auto er_exact = make(sig, 2, Convention::Directed,
                               {{empty_graph(2), ratio(1, 2)},
                                {directed_graph(2, {{0, 1}}), ratio(1, 4)},
                                {directed_graph(2, {{1, 0}}), ratio(1, 4)}});
    const auto er = compare_to_exact(estimate_marginal(sampler_of(erdos_renyi_model()), 2, 100000, 71, mc()), er_exact);
    const auto bip = compare_to_exact(estimate_marginal(sampler_of(bipartite_model()), 3, 100000, 72, mc()),
                                      table_row(TableRow::Bipart));
    std::ostringstream s;
    s.precision(3);
    s << "ER k=2 max|z|=" << er.max_abs_z << ", bipartite k=3 max|z|=" << bip.max_abs_z;
    return {er.passed && bip.passed, s.str()};
}

Outcome modularity_bound() {
    struct Case {
        const char* model;
        WorldSampler sampler;
        World world;
    };
    const auto er = sampler_of(erdos_renyi_model());
    const auto bp = sampler_of(bipartite_model());
    const std::vector<Case> cases = {{"ER", er, empty_graph(2)},
                                     {"ER", er, directed_graph(2, {{0, 1}})},
                                     {"ER", er, directed_graph(2, {{1, 0}})},
                                     {"bipartite", bp, empty_graph(2)},
                                     {"bipartite", bp, undirected_graph(2, {{0, 1}})}};
    std::ostringstream s;
    s.precision(3);
    bool ok = true;
    std::uint64_t seed = 80;
    for (const auto& c : cases) {
        const auto r = modularity_bound_test(c.sampler, c.world, 100000, seed++, mc());
        ok = ok && r.passed;
        s << c.model << "/" << edge_count(c.world) << ": q=" << r.q << " p²=" << r.p * r.p << (r.passed ? "" : " FAIL")
          << "; ";
    }
    return {ok, s.str()};
}

Outcome equivariance() {
    std::size_t functions = 0;
    for (const auto& [name, model] : builtin_models()) {
        for (int m = 1; m <= model.signature()->arity(); ++m) {
            const auto r = check_equivariance(model.function(m), 10000, 90 + m);
            if (r.failures) return {false, name + " level " + std::to_string(m) + " failed"};
            ++functions;
        }
    }
    const auto broken = check_equivariance(broken_forward_function(), 100, 99);
    if (!broken.failures) return {false, "broken fixture passed"};
    return {true, std::to_string(functions) + " builtin functions pass; broken fixture fails"};
}

Outcome eq7() {
    auto sig = graph_signature();
    const auto worlds = enumerate_worlds(sig, 4, Convention::Directed);
    std::atomic<std::size_t> bad{0};
    std::vector<std::thread> pool;
    const unsigned t = threads();
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < worlds.size(); i += t) {
                for (int k : {2, 3}) {
                    if (!(iso_average(frequency_unordered(worlds[i], k).distribution) ==
                          frequency_ordered(worlds[i], k).distribution)) {
                        ++bad;
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    return {bad == 0 && worlds.size() == 65536,
            std::to_string(worlds.size()) + " worlds, k=2,3, " + std::to_string(bad.load()) + " mismatches"};
}

Outcome concentration() {
    auto sig = graph_signature();
    DeviationOptions opt;
    opt.target = make(sig, 2, Convention::Directed,
                      {{empty_graph(2), ratio(1, 2)},
                       {directed_graph(2, {{0, 1}}), ratio(1, 4)},
                       {directed_graph(2, {{1, 0}}), ratio(1, 4)}});
    opt.threads = threads();
    const auto r = empirical_deviation(erdos_renyi_model(), 2, 30, 10000, 110, opt);
    const double allowed = 2.0 * 16 * std::exp(-2.0 * 15 * 0.01);
    std::ostringstream s;
    s.precision(4);
    s << "exceedance " << r.exceedance_fraction() << " <= " << allowed << ", p=" << r.p_value
      << (r.bound.conclusive() ? "" : " (bound vacuous)");
    return {r.exceedance_fraction() <= allowed && r.passed, s.str()};
}

Outcome realizer_ladder() {
    const auto bip = table_row(TableRow::Bipart);
    RealizerOptions opt;
    opt.budget.threads = threads();
    std::vector<Rational> ladder;
    std::ostringstream s;
    for (int n = 4; n <= 7; ++n) {
        ladder.push_back(search_realizer(bip, n, opt).max_deviation);
        s << "n=" << n << ":" << q(ladder.back()) << " ";
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ladder.size(); ++i) monotone = monotone && ladder[i] <= ladder[i - 1];
    const Rational k33 = realizer_deviation(complete_bipartite(3, 3), bip);
    s << "K33=" << q(k33);
    if (!monotone) s << " (not nonincreasing)";
    return {monotone && k33 == ratio(3, 20), s.str()};
}

Outcome degree() {
    std::vector<double> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
    const auto r = degree_model_test(degree_model({{0, 0}, {1, 1}}), grid, 40, 100000, 130, 0.01, mc());
    double worst = 0;
    for (const auto& p : r.probes) worst = std::max(worst, std::abs(p.mean - p.target) / p.standard_error);
    std::ostringstream s;
    s.precision(3);
    s << "9 grid points, max |z|=" << worst;
    return {r.passed(), s.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::set<int> expect_fail, only;
    app.add_option("--threads", g_threads, "Worker threads (0 = all)");
    app.add_option("--expect-fail", expect_fail, "Criteria known to fail");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "table1-reproduction", 1, table1},
        {2, "example1-star-frequencies", 1, example1},
        {3, "plus-extendability", 30, plus_extendability},
        {4, "nesting-monotone", 300, nesting},
        {5, "modularity-violations", 1, modularity},
        {6, "ahk-seed-projectivity", 30, projectivity},
        {7, "ahk-marginals", 120, marginals},
        {8, "modularity-bound", 300, modularity_bound},
        {9, "equivariance", 60, equivariance},
        {10, "iso-average-identity", 120, eq7},
        {11, "concentration", 120, concentration},
        {12, "bipart-realizer-ladder", 300, realizer_ladder},
        {13, "degree-model", 120, degree},
    };

    std::set<int> failed;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.passed = false;
            o.detail += " [over time limit " + std::to_string(static_cast<int>(c.limit_seconds)) + "s]";
        }
        if (!o.passed) failed.insert(c.id);
        std::printf("%s %2d %-28s %8.2fs  %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::set<int> expected;
    for (int id : expect_fail) {
        if (only.empty() || only.count(id)) expected.insert(id);
    }
    std::printf("%zu failed%s\n", failed.size(), failed == expected ? " (as expected)" : "");
    return failed == expected ? 0 : 1;
}
