#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "worldlet/errors.hpp"
#include "worldlet/extendability.hpp"
#include "worldlet/graphs.hpp"

#include <array>
#include <optional>
#include <random>
#include <set>

using namespace worldlet;

namespace {

constexpr auto U = Convention::Undirected;

using Point = std::array<Rational, 3>;

// Total mass on worlds with 1, 2, 3 edges; determines an exchangeable
// undirected 3-world distribution.
Point project(const WorldletDistribution& d) {
    Point p{0, 0, 0};
    for (const auto& [w, v] : d.entries()) {
        const std::size_t e = w.tuple_count() / 2;
        if (e > 0) p[e - 1] += v;
    }
    return p;
}

// Solves [v_i; 1] λ = [q; 1] for four points; nullopt when singular.
std::optional<std::array<Rational, 4>> barycentric(const std::array<Point, 4>& v, const Point& q) {
    std::array<std::array<Rational, 5>, 4> m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) m[r][c] = r < 3 ? v[c][r] : Rational(1);
        m[r][4] = r < 3 ? q[r] : Rational(1);
    }
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r) {
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return std::nullopt;
        std::swap(m[c], m[piv]);
        for (int r = 0; r < 4; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (int k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
        }
    }
    std::array<Rational, 4> lambda;
    for (int r = 0; r < 4; ++r) lambda[r] = m[r][4] / m[r][r];
    return lambda;
}

// Point-in-hull by checking every full-dimensional simplex of the vertex set.
bool hull_contains(const std::vector<Point>& points, const Point& q, bool& full_dimensional) {
    const std::size_t n = points.size();
    full_dimensional = false;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    auto l = barycentric({points[a], points[b], points[c], points[d]}, q);
                    if (!l) continue;
                    full_dimensional = true;
                    if ((*l)[0] >= 0 && (*l)[1] >= 0 && (*l)[2] >= 0 && (*l)[3] >= 0) return true;
                }
    return false;
}

WorldletDistribution plus() { return table_row(TableRow::Plus); }

WorldletDistribution delta_empty3() { return WorldletDistribution::point_mass(empty_graph(3), U); }

}  // namespace

TEST_CASE("build_polytope column counts") {
    auto sig = graph_signature();
    CHECK(build_polytope(sig, 3, 3, U).columns.size() == 4);
    CHECK(build_polytope(sig, 3, 4, U).columns.size() == 11);
    CHECK(build_polytope(sig, 3, 5, U).columns.size() == 34);
    CHECK(build_polytope(sig, 2, 3, Convention::Directed).columns.size() == 104);
    CHECK_THROWS_AS(build_polytope(sig, 4, 3, U), InvalidArgument);
}

TEST_CASE("columns sum to one and k = n gives uniform class distributions") {
    auto poly = build_polytope(graph_signature(), 3, 3, U);
    for (const auto& col : poly.columns) {
        auto members = isomorphism_class(col.id.canonical);
        REQUIRE(col.frequencies.entries().size() == members.size());
        CHECK(members.size() == col.id.class_size);
        for (const auto& w : members) CHECK(col.frequencies.prob(w) == ratio(1, static_cast<long>(members.size())));
    }
    Budget threaded;
    threaded.threads = 4;
    auto again = build_polytope(graph_signature(), 3, 5, U, threaded);
    auto serial = build_polytope(graph_signature(), 3, 5, U);
    REQUIRE(again.columns.size() == serial.columns.size());
    for (std::size_t i = 0; i < again.columns.size(); ++i) {
        CHECK(again.columns[i].id == serial.columns[i].id);
        CHECK(again.columns[i].frequencies == serial.columns[i].frequencies);
    }
}

TEST_CASE("plus is 4-extendable through two disjoint edges") {
    auto cert = check_extendable(plus(), 4);
    REQUIRE(cert.feasible);
    CHECK(cert.verified);
    REQUIRE(cert.weights.size() == 1);
    CHECK(cert.weights[0].first == canonical_form(undirected_graph(4, {{0, 1}, {2, 3}})));
    CHECK(cert.weights[0].second == 1);
}

TEST_CASE("plus is not 5- or 6-extendable") {
    for (int n : {5, 6}) {
        auto poly = build_polytope(graph_signature(), 3, n, U);
        auto cert = check_membership(poly, plus());
        REQUIRE_FALSE(cert.feasible);
        CHECK(cert.verified);
        CHECK(cert.target_value > cert.threshold);
        for (const auto& col : poly.columns) {
            Rational v = 0;
            for (const auto& [w, c] : cert.functional) v += c * col.frequencies.prob(w);
            CHECK(v <= cert.threshold);
        }
        CHECK(verify_certificate(poly, plus(), cert));
    }
}

TEST_CASE("tampered certificates fail verification") {
    auto poly = build_polytope(graph_signature(), 3, 4, U);
    auto cert = check_membership(poly, plus());
    REQUIRE(cert.feasible);
    cert.weights[0].second = ratio(1, 2);
    CHECK_FALSE(verify_certificate(poly, plus(), cert));

    auto poly5 = build_polytope(graph_signature(), 3, 5, U);
    auto sep = check_membership(poly5, plus());
    REQUIRE_FALSE(sep.feasible);
    sep.functional.clear();
    CHECK_FALSE(verify_certificate(poly5, plus(), sep));
}

TEST_CASE("point masses on empty and complete graphs extend") {
    for (int n = 3; n <= 6; ++n) {
        auto e = check_extendable(delta_empty3(), n);
        REQUIRE(e.feasible);
        REQUIRE(e.weights.size() == 1);
        CHECK(e.weights[0].first.canonical == empty_graph(n));
        auto k = check_extendable(table_row(TableRow::Complete), n);
        REQUIRE(k.feasible);
        CHECK(k.weights[0].first.canonical == complete_graph(n));
    }
}

TEST_CASE("nesting over the example corpus") {
    std::vector<WorldletDistribution> corpus;
    for (auto row : table_rows()) corpus.push_back(table_row(row));
    corpus.push_back(empty_complete_mixture(3));
    corpus.push_back(by_edge_count(3, {ratio(1, 8), ratio(1, 8), ratio(1, 8), ratio(1, 8)}));
    corpus.push_back(by_edge_count(3, {0, ratio(1, 6), ratio(1, 6), 0}));
    for (const auto& q : corpus) {
        std::vector<bool> feasible;
        for (int n = 3; n <= 6; ++n) feasible.push_back(check_extendable(q, n).feasible);
        for (std::size_t i = 0; i + 1 < feasible.size(); ++i) {
            if (feasible[i + 1]) CHECK(feasible[i]);
        }
    }
}

TEST_CASE("LP membership agrees with a brute-force hull test") {
    std::mt19937_64 rng(5);
    for (int n = 3; n <= 5; ++n) {
        auto poly = build_polytope(graph_signature(), 3, n, U);
        std::set<Point> distinct;
        for (const auto& col : poly.columns) distinct.insert(project(col.frequencies));
        std::vector<Point> points(distinct.begin(), distinct.end());

        std::vector<WorldletDistribution> targets;
        for (auto row : table_rows()) targets.push_back(table_row(row));
        for (int t = 0; t < 8; ++t) {
            std::vector<Rational> w(4);
            long total = 0;
            std::vector<long> raw(4);
            for (auto& r : raw) {
                r = static_cast<long>(rng() % 5);
                total += r;
            }
            if (total == 0) raw[0] = total = 1;
            const long sizes[] = {1, 3, 3, 1};
            for (int e = 0; e < 4; ++e) w[e] = ratio(raw[e], total * sizes[e]);
            targets.push_back(by_edge_count(3, w));
        }
        for (const auto& q : targets) {
            bool full = false;
            const bool inside = hull_contains(points, project(q), full);
            if (n == 3) {
                // Four affinely independent vertices: the tetrahedron itself.
                CHECK(full);
            }
            if (!full) continue;
            CHECK(check_membership(poly, q).feasible == inside);
        }
    }
}

TEST_CASE("non-exchangeable targets are rejected with a witness") {
    auto w = undirected_graph(3, {{0, 1}});
    auto q = WorldletDistribution::point_mass(w, U);
    try {
        check_extendable(q, 4);
        FAIL("expected NotExchangeable");
    } catch (const NotExchangeable& e) {
        CHECK(canonical_form(e.first()).canonical == canonical_form(e.second()).canonical);
        CHECK(q.prob(e.first()) != q.prob(e.second()));
    }
    ExtendabilityOptions opts;
    opts.iso_average_first = true;
    auto cert = check_extendable(q, 4, opts);
    CHECK(cert.feasible);
}

TEST_CASE("check_extendable argument errors") {
    CHECK_THROWS_AS(check_extendable(plus(), 2), InvalidArgument);
    auto loop = directed_graph(3, {{0, 0}});
    CHECK_THROWS_AS(check_extendable(WorldletDistribution::point_mass(loop, U), 4), InvalidArgument);
}

TEST_CASE("modularity flags plus and only plus") {
    auto report = modularity_check(plus());
    REQUIRE(report.violations() == 1);
    for (const auto& e : report.entries) {
        if (!e.violation) continue;
        CHECK(e.n == 2);
        CHECK(e.world == undirected_graph(2, {{0, 1}}));
        CHECK(e.p == ratio(1, 3));
        CHECK(e.q == 0);
    }
    // Empty 2-world: p = 2/3, and O holds only the one-edge world {2,3}.
    bool seen = false;
    for (const auto& e : report.entries) {
        if (e.n == 2 && e.world == empty_graph(2)) {
            seen = true;
            CHECK(e.p == ratio(2, 3));
            CHECK(e.q == ratio(1, 3));
            CHECK(e.below_bound);
        }
    }
    CHECK(seen);

    for (auto row : {TableRow::Empty, TableRow::Complete, TableRow::Bipart}) {
        auto r = modularity_check(table_row(row));
        CHECK(r.violations() == 0);
    }
    auto bip = modularity_check(table_row(TableRow::Bipart));
    for (const auto& e : bip.entries) CHECK(e.q == e.p * e.p);
}

TEST_CASE("modularity violations imply non-extendability in the corpus") {
    std::vector<WorldletDistribution> corpus;
    for (auto row : table_rows()) corpus.push_back(table_row(row));
    corpus.push_back(empty_complete_mixture(3));
    for (const auto& q : corpus) {
        if (modularity_check(q).violations() == 0) continue;
        bool some_infeasible = false;
        for (int n = 3; n <= 6 && !some_infeasible; ++n) some_infeasible = !check_extendable(q, n).feasible;
        CHECK(some_infeasible);
    }
}

TEST_CASE("scatter axes") {
    CHECK(ScatterAxis::parse("edges:2").spec() == "edges:2");
    CHECK_THROWS_AS(ScatterAxis::parse("edges:x"), InvalidArgument);
    CHECK_THROWS_AS(ScatterAxis::parse("bogus"), InvalidArgument);

    auto empty = ScatterAxis::parse("empty"), one = ScatterAxis::parse("single_edge"), two = ScatterAxis::parse("two_edge");
    auto e3 = delta_empty3();
    CHECK(empty.value(e3) == 1);
    CHECK(one.value(e3) == 0);
    CHECK(one.value(plus()) == 1);
    CHECK(two.value(plus()) == 0);

    auto label = canonical_form(undirected_graph(3, {{0, 1}, {1, 2}})).label();
    auto cls = ScatterAxis::parse("class:" + label);
    CHECK(cls.value(table_row(TableRow::Bipart)) == ratio(3, 4));
}

TEST_CASE("scatter data at n = 3 has one point per class") {
    auto poly = build_polytope(graph_signature(), 3, 3, U);
    auto [x, y] = ScatterAxis::default_axes();
    auto data = scatter_data(poly, x, y);
    REQUIRE(data.rows.size() == 4);
    std::set<std::pair<Rational, Rational>> points;
    for (const auto& r : data.rows) points.emplace(r.x, r.y);
    CHECK(points.size() == 4);
    CHECK(data.worldlets.size() == 8);

    // Two coordinate masses cannot separate all four classes.
    auto coords = scatter_data(poly, ScatterAxis::parse("single_edge"), ScatterAxis::parse("two_edge"));
    std::set<std::pair<Rational, Rational>> flat;
    for (const auto& r : coords.rows) flat.emplace(r.x, r.y);
    CHECK(flat.size() == 3);
}

TEST_CASE("default projection") {
    auto [x, y] = ScatterAxis::default_axes();
    CHECK(x.value(delta_empty3()) == 1);
    CHECK(y.value(delta_empty3()) == 0);
    CHECK(y.value(table_row(TableRow::Complete)) == 1);
    CHECK(y.value(plus()) == ratio(1, 3));
    CHECK(y.value(table_row(TableRow::Bipart)) == ratio(1, 2));
}
