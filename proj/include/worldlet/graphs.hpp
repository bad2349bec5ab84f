#pragma once

#include "worldlet/worldlet_stats.hpp"

#include <string>
#include <utility>
#include <vector>

namespace worldlet {

using Edge = std::pair<int, int>;

/// Worlds over the graph signature {e/2}. Nodes are 0-based.
World directed_graph(int n, const std::vector<Edge>& edges);
/// Each edge is stored in both directions.
World undirected_graph(int n, const std::vector<Edge>& edges);

World empty_graph(int n);
World complete_graph(int n);
/// Edges 0 -> l for l = 1..n-1.
World star_graph(int n);
/// Edges i -> i+1.
World chain_graph(int n);
/// Undirected K_{a,b} with parts [0,a) and [a,a+b).
World complete_bipartite(int a, int b);
/// K_{⌊n/2⌋,n-⌊n/2⌋}.
World balanced_bipartite(int n);

/// The example distributions on undirected 3-worlds. The numbers are
/// per-world probabilities for worlds with 0, 1, 2, 3 edges.
enum class TableRow { Empty, Complete, Plus, Bipart };

std::vector<TableRow> table_rows();
std::string table_row_name(TableRow row);
/// Per-world probabilities for worlds with 0..3 edges.
std::vector<Rational> table_row_values(TableRow row);
WorldletDistribution table_row(TableRow row);

/// Undirected k-worlds whose per-world probability depends only on the edge count.
WorldletDistribution by_edge_count(int k, const std::vector<Rational>& per_world);

/// 1/2 δ_{E_k} + 1/2 δ_{K_k}.
WorldletDistribution empty_complete_mixture(int k);

}  // namespace worldlet
