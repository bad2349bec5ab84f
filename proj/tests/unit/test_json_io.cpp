#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "worldlet/errors.hpp"
#include "worldlet/graphs.hpp"
#include "worldlet/json_io.hpp"

using namespace worldlet;

namespace {

SignaturePtr mixed_signature() {
    return Signature::create({{"black", 1}, {"e", 2}, {"t", 3}});
}

}  // namespace

TEST_CASE("worlds use 1-based sorted tuples") {
    World w = directed_graph(3, {{1, 0}, {0, 1}, {2, 2}});
    auto j = world_to_json(w);
    CHECK(j.dump() == R"({"n":3,"relations":{"e":[[1,2],[2,1],[3,3]]}})");
    CHECK(world_from_json(j) == w);
    CHECK(world_from_json(parse_json(R"({"n":3,"relations":{"e":[[2,1],[1,2],[3,3],[1,2]]}})")) == w);
    CHECK(world_from_json(parse_json(R"({"n":2})")) == empty_graph(2));

    CHECK_THROWS_AS(world_from_json(parse_json(R"({"n":3,"relations":{"e":[[1,4]]}})")), ParseError);
    CHECK_THROWS_AS(world_from_json(parse_json(R"({"n":3,"relations":{"f":[[1,2]]}})")), ParseError);
    CHECK_THROWS_AS(world_from_json(parse_json(R"({"n":3,"relations":{"e":[[1,2,3]]}})")), ParseError);
    CHECK_THROWS_AS(world_from_json(parse_json(R"({"relations":{}})")), ParseError);
    CHECK_THROWS_AS(parse_json("{\"n\":"), ParseError);
}

TEST_CASE("worlds over a richer signature") {
    auto sig = mixed_signature();
    auto j = parse_json(R"({"signature":{"relations":[{"name":"black","arity":1},{"name":"e","arity":2},{"name":"t","arity":3}]},
                           "n":3,"relations":{"black":[[2]],"e":[[1,3]],"t":[[3,1,2]]}})");
    World w = world_from_json(j);
    CHECK(w.signature() == *sig);
    const int b[1] = {1}, e[2] = {0, 2}, t[3] = {2, 0, 1};
    CHECK(w.holds(0, b));
    CHECK(w.holds(1, e));
    CHECK(w.holds(2, t));
    CHECK(w.tuple_count() == 3);
    CHECK(world_from_json(world_to_json(w), sig) == w);
    CHECK(signature_from_json(signature_to_json(*sig))->relations() == sig->relations());
    CHECK_THROWS_AS(signature_from_json(parse_json(R"({"relations":[{"name":"e"}]})")), ParseError);
    CHECK_THROWS_AS(signature_from_json(parse_json(R"({"relations":[]})")), InvalidArgument);
}

TEST_CASE("cells") {
    auto g = graph_signature();
    for (const auto& c : enumerate_cells(g, 2)) CHECK(cell_from_json(cell_to_json(c), g, 2) == c);
    for (const auto& c : enumerate_cells(g, 1)) CHECK(cell_from_json(cell_to_json(c), g, 1) == c);
    CHECK(cell_to_json(enumerate_cells(g, 2)[1]) == "->");
    CHECK(cell_to_json(enumerate_cells(g, 2)[2]) == "<-");
    CHECK(cell_to_json(enumerate_cells(g, 2)[3]) == "<->");
    CHECK_THROWS_AS(cell_from_json("sideways", g, 2), ParseError);

    auto sig = mixed_signature();
    const auto cells = enumerate_cells(sig, 3);
    CHECK(cells.size() == 64);
    for (const auto& c : cells) CHECK(cell_from_json(cell_to_json(c), sig, 3) == c);
    // Level-3 cells only carry tuples using all three elements.
    CHECK_THROWS_AS(cell_from_json(parse_json(R"({"relations":{"t":[[1,1,2]]}})"), sig, 3), ParseError);
    CHECK_THROWS_AS(cell_from_json("none", sig, 2), ParseError);
}

TEST_CASE("distributions round-trip unchanged") {
    for (auto row : table_rows()) {
        auto d = table_row(row);
        auto text = distribution_to_json(d).dump();
        auto back = distribution_from_json(parse_json(text));
        CHECK(back == d);
        CHECK(distribution_to_json(back).dump() == text);
    }
    auto bip = distribution_to_json(table_row(TableRow::Bipart));
    CHECK(bip["convention"] == "undirected");
    CHECK(bip["entries"][0]["prob"] == "1/4");

    auto bad = parse_json(R"({"signature":{"relations":[{"name":"e","arity":2}]},"k":2,
                              "entries":[{"world":{"n":2},"prob":"1/2"}]})");
    CHECK_THROWS_AS(distribution_from_json(bad), InvalidArgument);
    auto wrong_size = parse_json(R"({"signature":{"relations":[{"name":"e","arity":2}]},"k":2,
                                     "entries":[{"world":{"n":3},"prob":"1"}]})");
    CHECK_THROWS_AS(distribution_from_json(wrong_size), ParseError);
    auto floats = parse_json(R"({"signature":{"relations":[{"name":"e","arity":2}]},"k":2,
                                 "entries":[{"world":{"n":2},"prob":0.5}]})");
    CHECK_THROWS_AS(distribution_from_json(floats), ParseError);
    auto decimal = parse_json(R"({"signature":{"relations":[{"name":"e","arity":2}]},"k":1,
                                  "entries":[{"world":{"n":1},"prob":"1.0"}]})");
    CHECK(distribution_from_json(decimal).prob(empty_graph(1)) == 1);
}

TEST_CASE("models round-trip") {
    std::vector<AhkModel> models{erdos_renyi_model(ratio(1, 3)), bipartite_model(), constant_empty_model(),
                                 degree_model({{0, 0}, {ratio(1, 2), ratio(1, 4)}, {1, 1}}), empty_complete_mixture_model()};
    for (const auto& m : models) {
        auto j = model_to_json(m);
        auto back = model_from_json(j);
        CHECK(model_to_json(back) == j);
        CHECK(back.has_global_latent() == m.has_global_latent());
        for (std::uint64_t s = 0; s < 10; ++s) CHECK(back.sample(6, s) == m.sample(6, s));
    }
}

TEST_CASE("rule-table models from the documented format") {
    auto j = parse_json(R"({"signature":{"relations":[{"name":"e","arity":2}]},"global_latent":false,
        "functions":{"1":{"builtin":"constant","cell":"none"},
                     "2":{"rules":[{"if":[["u1","<","u2"],["u12","<","1/2"]],"then":"->"},
                                   {"if":[["u2","<","u1"],["u12","<","1/2"]],"then":"<-"},
                                   {"else":"none"}]}}})");
    auto m = model_from_json(j);
    auto er = erdos_renyi_model();
    for (std::uint64_t s = 0; s < 30; ++s) CHECK(m.sample(7, s) == er.sample(7, s));
    CHECK(model_to_json(model_from_json(model_to_json(m))) == model_to_json(m));

    auto broken = parse_json(R"({"global_latent":false,"functions":{"2":{"rules":[{"if":[["u1","<","u2"]],"then":"->"},{"else":"none"}]}}})");
    CHECK_THROWS_AS(model_from_json(broken), NotEquivariant);
    auto reads_u0 = parse_json(R"({"global_latent":false,"functions":{"2":{"rules":[{"if":[["u0","<","1/2"]],"then":"<->"},{"else":"none"}]}}})");
    CHECK_THROWS_AS(model_from_json(reads_u0), InvalidArgument);
    reads_u0["global_latent"] = true;
    CHECK(model_from_json(reads_u0).has_global_latent());
    CHECK_THROWS_AS(model_from_json(parse_json(R"({"functions":{"3":{"builtin":"constant"}}})")), ParseError);
    CHECK_THROWS_AS(model_from_json(parse_json(R"({"functions":{"2":{"rules":[{"if":[["u3","<","u1"]],"then":"->"},{"else":"none"}]}}})")),
                    ParseError);
    CHECK_THROWS_AS(model_from_json(parse_json(R"({"functions":{"2":{"builtin":"teleport"}}})")), ParseError);
}

TEST_CASE("builtin model shorthand") {
    auto er = model_from_json(parse_json(R"({"builtin":"erdos_renyi","p":"1/3"})"));
    CHECK(model_to_json(er) == model_to_json(erdos_renyi_model(ratio(1, 3))));
    auto deg = model_from_json(parse_json(R"({"builtin":"degree_model","law":["1/2","0","1/2"]})"));
    CHECK(deg.function(2).kind() == "degree_model");
    auto blk = model_from_json(parse_json(R"({"builtin":"block_model","boundaries":["1/2"],"probabilities":[["0","1"],["1","0"]]})"));
    CHECK(model_to_json(blk) == model_to_json(bipartite_model()));
    CHECK(model_from_json(parse_json(R"({"builtin":"empty_complete_mixture"})")).has_global_latent());
    CHECK(model_from_json(parse_json(R"({"builtin":"bipartite","global_latent":true})")).has_global_latent());
    CHECK_THROWS_AS(model_from_json(parse_json(R"({"builtin":"empty_complete_mixture","global_latent":false})")),
                    InvalidArgument);
    CHECK_THROWS_AS(model_from_json(parse_json(R"({"builtin":"nope"})")), ParseError);
}
