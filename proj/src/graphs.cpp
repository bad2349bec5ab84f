#include "worldlet/graphs.hpp"

#include "worldlet/errors.hpp"

namespace worldlet {

World directed_graph(int n, const std::vector<Edge>& edges) {
    World w(graph_signature(), n);
    for (auto [a, b] : edges) {
        const int t[2] = {a, b};
        w.set(0, t);
    }
    return w;
}

World undirected_graph(int n, const std::vector<Edge>& edges) {
    std::vector<Edge> both;
    for (auto [a, b] : edges) {
        if (a == b) throw InvalidArgument("undirected graphs have no self-loops");
        both.push_back({a, b});
        both.push_back({b, a});
    }
    return directed_graph(n, both);
}

World empty_graph(int n) { return World(graph_signature(), n); }

World complete_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    return undirected_graph(n, edges);
}

World star_graph(int n) {
    std::vector<Edge> edges;
    for (int l = 1; l < n; ++l) edges.push_back({0, l});
    return directed_graph(n, edges);
}

World chain_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return directed_graph(n, edges);
}

World complete_bipartite(int a, int b) {
    std::vector<Edge> edges;
    for (int i = 0; i < a; ++i)
        for (int j = a; j < a + b; ++j) edges.push_back({i, j});
    return undirected_graph(a + b, edges);
}

World balanced_bipartite(int n) { return complete_bipartite(n / 2, n - n / 2); }

std::vector<TableRow> table_rows() { return {TableRow::Empty, TableRow::Complete, TableRow::Plus, TableRow::Bipart}; }

std::string table_row_name(TableRow row) {
    switch (row) {
        case TableRow::Empty: return "E3";
        case TableRow::Complete: return "K3";
        case TableRow::Plus: return "+";
        case TableRow::Bipart: return "bipart";
    }
    return "";
}

std::vector<Rational> table_row_values(TableRow row) {
    switch (row) {
        case TableRow::Empty: return {1, 0, 0, 0};
        case TableRow::Complete: return {0, 0, 0, 1};
        case TableRow::Plus: return {0, ratio(1, 3), 0, 0};
        case TableRow::Bipart: return {ratio(1, 4), 0, ratio(1, 4), 0};
    }
    return {};
}

WorldletDistribution by_edge_count(int k, const std::vector<Rational>& per_world) {
    WorldletDistribution::Entries entries;
    for (auto& w : enumerate_worlds(graph_signature(), k, Convention::Undirected)) {
        std::size_t edges = w.tuple_count() / 2;
        if (edges >= per_world.size()) throw InvalidArgument("missing probability for a world with " + std::to_string(edges) + " edges");
        if (per_world[edges] != 0) entries.emplace(std::move(w), per_world[edges]);
    }
    return WorldletDistribution::create(graph_signature(), k, Convention::Undirected, std::move(entries));
}

WorldletDistribution table_row(TableRow row) { return by_edge_count(3, table_row_values(row)); }

WorldletDistribution empty_complete_mixture(int k) {
    WorldletDistribution::Entries entries;
    entries.emplace(empty_graph(k), ratio(1, 2));
    entries.emplace(complete_graph(k), ratio(1, 2));
    return WorldletDistribution::create(graph_signature(), k, Convention::Undirected, std::move(entries));
}

}  // namespace worldlet
