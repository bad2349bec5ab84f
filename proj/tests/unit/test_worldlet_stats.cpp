#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "worldlet/errors.hpp"
#include "worldlet/graphs.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <random>
#include <set>

using namespace worldlet;

namespace {

// Brute force over all ordered k-tuples of distinct elements.
WorldletDistribution::Entries ordered_oracle(const World& w, int k) {
    std::map<World, long> counts;
    long total = 0;
    std::vector<int> t(static_cast<std::size_t>(k));
    std::function<void(int)> rec = [&](int pos) {
        if (pos == k) {
            ++counts[induce_tuple(w, t)];
            ++total;
            return;
        }
        for (int x = 0; x < w.size(); ++x) {
            if (std::find(t.begin(), t.begin() + pos, x) != t.begin() + pos) continue;
            t[static_cast<std::size_t>(pos)] = x;
            rec(pos + 1);
        }
    };
    rec(0);
    WorldletDistribution::Entries out;
    for (auto& [x, c] : counts) out.emplace(x, ratio(c, total));
    return out;
}

WorldletDistribution::Entries unordered_oracle(const World& w, int k) {
    std::map<World, long> counts;
    long total = 0;
    std::vector<int> s;
    std::function<void(int)> rec = [&](int next) {
        if (static_cast<int>(s.size()) == k) {
            ++counts[induce_subset(w, s)];
            ++total;
            return;
        }
        for (int x = next; x < w.size(); ++x) {
            s.push_back(x);
            rec(x + 1);
            s.pop_back();
        }
    };
    rec(0);
    WorldletDistribution::Entries out;
    for (auto& [x, c] : counts) out.emplace(x, ratio(c, total));
    return out;
}

World random_graph(int n, std::mt19937_64& rng) {
    World w(graph_signature(), n);
    BitVector bits(w.layout().bit_count());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (rng() & 1u) bits.set(i);
    return World(graph_signature(), n, bits);
}

WorldletDistribution random_distribution(int n, int support, std::mt19937_64& rng) {
    WorldletDistribution::Entries e;
    std::vector<long> weights;
    long total = 0;
    for (int i = 0; i < support; ++i) {
        long wgt = 1 + static_cast<long>(rng() % 9);
        e[random_graph(n, rng)] += wgt;
        total += wgt;
    }
    for (auto& [w, p] : e) p /= total;
    return WorldletDistribution::create(graph_signature(), n, Convention::Directed, std::move(e));
}

const int e12[2] = {0, 1};

World arrow(int from, int to) { return directed_graph(2, {{from, to}}); }

}  // namespace

TEST_CASE("distribution validation") {
    WorldletDistribution::Entries e;
    e.emplace(empty_graph(2), ratio(1, 2));
    CHECK_THROWS_AS(WorldletDistribution::create(graph_signature(), 2, Convention::Directed, e), InvalidArgument);
    e.emplace(arrow(0, 1), ratio(1, 2));
    CHECK_NOTHROW(WorldletDistribution::create(graph_signature(), 2, Convention::Directed, e));
    e[empty_graph(2)] = ratio(3, 2);
    e[arrow(0, 1)] = ratio(-1, 2);
    CHECK_THROWS_AS(WorldletDistribution::create(graph_signature(), 2, Convention::Directed, e), InvalidArgument);
    WorldletDistribution::Entries wrong;
    wrong.emplace(empty_graph(3), Rational(1));
    CHECK_THROWS_AS(WorldletDistribution::create(graph_signature(), 2, Convention::Directed, wrong), InvalidArgument);
}

TEST_CASE("star worldlet frequencies") {
    for (int n = 3; n <= 10; ++n) {
        auto f = frequency_ordered(star_graph(n), 2).distribution;
        CHECK(f.prob(empty_graph(2)) == 1 - ratio(2, n));
        CHECK(f.prob(arrow(0, 1)) == ratio(1, n));
        CHECK(f.prob(arrow(1, 0)) == ratio(1, n));
        CHECK(f.entries().size() == 3u);
    }
}

TEST_CASE("ordered and unordered frequencies match brute force") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 6);
        int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        World w = random_graph(n, rng);
        REQUIRE(frequency_ordered(w, k).distribution.entries() == ordered_oracle(w, k));
        REQUIRE(frequency_unordered(w, k).distribution.entries() == unordered_oracle(w, k));
    }
    auto mixed = Signature::create({{"c", 1}, {"e", 2}, {"t", 3}});
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + static_cast<int>(rng() % 3);
        World w(mixed, n);
        BitVector bits(w.layout().bit_count());
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (rng() % 4 == 0) bits.set(i);
        w = World(mixed, n, bits);
        REQUIRE(frequency_ordered(w, 3).distribution.entries() == ordered_oracle(w, 3));
        REQUIRE(frequency_unordered(w, 2).distribution.entries() == unordered_oracle(w, 2));
    }
}

TEST_CASE("frequency denominators") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + static_cast<int>(rng() % 5);
        World w = random_graph(n, rng);
        auto ordered = frequency_ordered(w, 3).distribution;
        for (const auto& [x, p] : ordered.entries()) {
            mpz_class rem = mpz_class(n * (n - 1) * (n - 2)) % p.get_den();
            REQUIRE(rem == 0);
        }
        auto unordered = frequency_unordered(w, 3).distribution;
        for (const auto& [x, p] : unordered.entries()) {
            mpz_class rem = mpz_class(static_cast<long>(binomial(n, 3))) % p.get_den();
            REQUIRE(rem == 0);
        }
    }
}

TEST_CASE("threads do not change results") {
    std::mt19937_64 rng(8);
    World w = random_graph(12, rng);
    CHECK(frequency_ordered(w, 3, Convention::Directed, 4).distribution == frequency_ordered(w, 3).distribution);
    CHECK(frequency_unordered(w, 4, Convention::Directed, 3).distribution == frequency_unordered(w, 4).distribution);
}

TEST_CASE("k = n gives the uniform distribution on the iso class") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3);
        World w = random_graph(n, rng);
        auto cls = isomorphism_class(w);
        auto f = frequency_ordered(w, n).distribution;
        REQUIRE(f.entries().size() == cls.size());
        for (const auto& x : cls) REQUIRE(f.prob(x) == ratio(1, static_cast<long>(cls.size())));
    }
}

TEST_CASE("two disjoint edges give the plus row") {
    World w = undirected_graph(4, {{0, 1}, {2, 3}});
    CHECK(frequency_ordered(w, 3, Convention::Undirected).distribution == table_row(TableRow::Plus));
}

TEST_CASE("chain unordered frequencies") {
    for (int n = 3; n <= 8; ++n) {
        auto f = frequency_unordered(chain_graph(n), 2).distribution;
        Rational c(static_cast<long>(binomial(n, 2)));
        CHECK(f.prob(arrow(0, 1)) == (n - 1) / c);
        CHECK(f.prob(arrow(1, 0)) == 0);
        auto avg = iso_average(f);
        CHECK(avg.prob(arrow(0, 1)) == (n - 1) / (2 * c));
        CHECK(avg.prob(arrow(1, 0)) == (n - 1) / (2 * c));
        CHECK(avg == frequency_ordered(chain_graph(n), 2).distribution);
    }
    auto k = frequency_unordered(complete_graph(6), 3).distribution;
    CHECK(k == WorldletDistribution::point_mass(complete_graph(3)));
}

TEST_CASE("iso averaging of unordered samples gives ordered samples") {
    for (int n = 2; n <= 3; ++n) {
        for (const auto& w : enumerate_worlds(graph_signature(), n, Convention::Directed)) {
            for (int k = 1; k <= n; ++k) {
                REQUIRE(iso_average(frequency_unordered(w, k)).distribution == frequency_ordered(w, k).distribution);
            }
        }
    }
    auto worlds = enumerate_worlds(graph_signature(), 4, Convention::Directed);
    for (std::size_t i = 0; i < worlds.size(); i += 101) {
        for (int k = 2; k <= 3; ++k) {
            REQUIRE(iso_average(frequency_unordered(worlds[i], k)).distribution ==
                    frequency_ordered(worlds[i], k).distribution);
        }
    }
    // An exchangeable unordered sample is already the ordered one.
    auto e = frequency_unordered(complete_graph(5), 3);
    CHECK(iso_average(e.distribution) == e.distribution);
}

TEST_CASE("frequencies depend only on the iso class") {
    auto worlds = enumerate_worlds(graph_signature(), 4, Convention::Directed);
    std::mt19937_64 rng(12);
    for (std::size_t i = 0; i < worlds.size(); i += 257) {
        auto base = frequency_ordered(worlds[i], 3).distribution;
        for_each_permutation(4, [&](const Permutation& p) {
            REQUIRE(frequency_ordered(apply_permutation(worlds[i], p), 3).distribution == base);
        });
        REQUIRE(is_exchangeable(base).exchangeable);
    }
}

TEST_CASE("fenstad sampling") {
    World w = undirected_graph(5, {{0, 1}, {1, 2}, {3, 4}});
    CHECK(fenstad(WorldletDistribution::point_mass(w), 3) == frequency_ordered(w, 3).distribution);

    WorldletDistribution::Entries e;
    auto cls = isomorphism_class(undirected_graph(4, {{0, 1}, {2, 3}}));
    for (const auto& x : cls) e.emplace(x, ratio(1, static_cast<long>(cls.size())));
    auto q = WorldletDistribution::create(graph_signature(), 4, Convention::Undirected, e);
    CHECK(fenstad(q, 3) == table_row(TableRow::Plus));

    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        auto q5 = random_distribution(5, 1 + static_cast<int>(rng() % 3), rng);
        REQUIRE(fenstad(fenstad(q5, 4), 3) == fenstad(q5, 3));
        REQUIRE(is_exchangeable(fenstad(q5, 3)).exchangeable);
    }
    CHECK_THROWS_AS(fenstad(q, 5), InvalidArgument);
}

TEST_CASE("marginalize") {
    CHECK(marginalize(WorldletDistribution::point_mass(empty_graph(5)), 3) ==
          WorldletDistribution::point_mass(empty_graph(3)));
    CHECK_THROWS_AS(marginalize(table_row(TableRow::Plus), 4), InvalidArgument);

    auto plus2 = marginalize(table_row(TableRow::Plus), 2);
    CHECK(plus2.prob(empty_graph(2)) == ratio(2, 3));
    CHECK(plus2.prob(complete_graph(2)) == ratio(1, 3));

    // For exchangeable Q, marginals and Fenstad sampling agree.
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3);
        auto q = iso_average(random_distribution(n, 3, rng));
        REQUIRE(is_exchangeable(q).exchangeable);
        for (int m = 1; m <= n; ++m) REQUIRE(marginalize(q, m) == fenstad(q, m));
    }
}

TEST_CASE("exchangeability") {
    for (auto row : table_rows()) CHECK(is_exchangeable(table_row(row)).exchangeable);
    auto r = is_exchangeable(WorldletDistribution::point_mass(arrow(0, 1)));
    CHECK(!r.exchangeable);
    REQUIRE(r.witness);
    CHECK(r.witness->first == arrow(0, 1));
    CHECK(r.witness->second == arrow(1, 0));
    CHECK(is_exchangeable(frequency_ordered(star_graph(6), 3).distribution).exchangeable);
}

TEST_CASE("undirected convention validator") {
    CHECK(convention_violations(table_row(TableRow::Plus), Convention::Undirected).empty());
    auto bad = convention_violations(WorldletDistribution::point_mass(arrow(0, 1)), Convention::Undirected);
    REQUIRE(bad.size() == 1u);
    CHECK(bad[0].holds(0, e12));
}
