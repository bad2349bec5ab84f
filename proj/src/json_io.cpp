#include "worldlet/json_io.hpp"

#include "worldlet/errors.hpp"

#include <algorithm>
#include <set>

namespace worldlet {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& member(const Json& object, const char* key, const std::string& where) {
    if (!object.is_object()) fail(where + " must be a JSON object");
    auto it = object.find(key);
    if (it == object.end()) fail(where + " is missing \"" + key + "\"");
    return *it;
}

int int_from_json(const Json& value, const std::string& what) {
    if (!value.is_number_integer()) fail(what + " must be an integer");
    const auto v = value.get<long long>();
    if (v < 0 || v > 1000000) fail(what + " out of range");
    return static_cast<int>(v);
}

std::string string_from_json(const Json& value, const std::string& what) {
    if (!value.is_string()) fail(what + " must be a string");
    return value.get<std::string>();
}

// Tuples as 1-based arrays, validated against `n` and `arity`.
Tuple tuple_from_json(const Json& value, int n, int arity, const std::string& what) {
    if (!value.is_array() || static_cast<int>(value.size()) != arity) {
        fail(what + " tuples must be arrays of length " + std::to_string(arity));
    }
    Tuple t;
    for (const auto& x : value) {
        const int e = int_from_json(x, what + " element");
        if (e < 1 || e > n) fail(what + " element " + std::to_string(e) + " outside 1.." + std::to_string(n));
        t.push_back(e - 1);
    }
    return t;
}

Json tuple_to_json(const Tuple& t) {
    Json out = Json::array();
    for (int e : t) out.push_back(e + 1);
    return out;
}

// {"e":[[1,2],...],...} over a domain of size n; unknown relation names are errors.
template <class SetFn>
void relations_from_json(const Json& value, const Signature& signature, int n, const std::string& what, SetFn&& set) {
    if (!value.is_object()) fail(what + " relations must be an object");
    for (const auto& [name, tuples] : value.items()) {
        auto r = signature.find(name);
        if (!r) fail(what + " mentions unknown relation '" + name + "'");
        if (!tuples.is_array()) fail(what + " relation '" + name + "' must be a list of tuples");
        for (const auto& t : tuples) set(*r, tuple_from_json(t, n, signature.relation(*r).arity, what));
    }
}

bool single_binary(const Signature& s) { return s.relation_count() == 1 && s.relation(0).arity == 2; }

std::optional<std::size_t> relation_from_json(const Json& fn, const Signature& signature) {
    auto it = fn.find("relation");
    if (it == fn.end()) return std::nullopt;
    const auto name = string_from_json(*it, "relation");
    auto r = signature.find(name);
    if (!r) fail("unknown relation '" + name + "'");
    return r;
}

std::vector<Rational> rationals_from_json(const Json& value, const std::string& what) {
    if (!value.is_array()) fail(what + " must be an array");
    std::vector<Rational> out;
    for (const auto& v : value) out.push_back(rational_from_json(v));
    return out;
}

Json rationals_to_json(const std::vector<Rational>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(rational_to_json(v));
    return out;
}

std::vector<std::pair<Rational, Rational>> points_from_json(const Json& value) {
    if (!value.is_array()) fail("cdf must be an array of [x, F(x)] pairs");
    std::vector<std::pair<Rational, Rational>> out;
    for (const auto& p : value) {
        if (!p.is_array() || p.size() != 2) fail("cdf points must be [x, F(x)] pairs");
        out.emplace_back(rational_from_json(p[0]), rational_from_json(p[1]));
    }
    return out;
}

std::vector<std::vector<Rational>> matrix_from_json(const Json& value) {
    if (!value.is_array()) fail("probabilities must be a matrix");
    std::vector<std::vector<Rational>> out;
    for (const auto& row : value) out.push_back(rationals_from_json(row, "probability row"));
    return out;
}

const char* op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Less: return "<";
        case CompareOp::LessEqual: return "<=";
        case CompareOp::Greater: return ">";
        case CompareOp::GreaterEqual: return ">=";
    }
    return "<";
}

CompareOp op_from_text(const std::string& text) {
    if (text == "<") return CompareOp::Less;
    if (text == "<=") return CompareOp::LessEqual;
    if (text == ">") return CompareOp::Greater;
    if (text == ">=") return CompareOp::GreaterEqual;
    fail("unknown comparison '" + text + "'");
}

std::variant<std::size_t, Rational> operand_from_json(const Json& value, int level) {
    if (value.is_string()) {
        const auto text = value.get<std::string>();
        if (!text.empty() && text[0] == 'u') {
            auto pos = latent_component_position(level, text);
            if (!pos) fail("no latent component '" + text + "' at level " + std::to_string(level));
            return *pos;
        }
    }
    return rational_from_json(value);
}

Json operand_to_json(const std::variant<std::size_t, Rational>& operand, int level) {
    if (const auto* pos = std::get_if<std::size_t>(&operand)) {
        return latent_component_name(latent_subsets(level)[*pos]);
    }
    return rational_to_json(std::get<Rational>(operand));
}

RuleTableFn rules_from_json(const Json& value, const SignaturePtr& signature, int level) {
    if (!value.is_array()) fail("rules must be an array");
    RuleTableFn table;
    for (const auto& rule : value) {
        if (!rule.is_object()) fail("each rule must be an object");
        if (rule.contains("else")) {
            table.rules.push_back({{}, cell_from_json(rule["else"], signature, level)});
            continue;
        }
        Rule r{{}, cell_from_json(member(rule, "then", "rule"), signature, level)};
        const auto& guard = member(rule, "if", "rule");
        if (!guard.is_array()) fail("rule guard must be an array of comparisons");
        for (const auto& c : guard) {
            if (!c.is_array() || c.size() != 3) fail("comparisons must be [lhs, op, rhs]");
            r.guard.push_back({operand_from_json(c[0], level), operand_from_json(c[2], level),
                               op_from_text(string_from_json(c[1], "comparison operator"))});
        }
        table.rules.push_back(std::move(r));
    }
    return table;
}

AhkModel builtin_model(const Json& value, const AhkModel::Options& options) {
    const auto name = string_from_json(value["builtin"], "builtin");
    AhkModel model = [&] {
        if (name == "erdos_renyi") return erdos_renyi_model(value.contains("p") ? rational_from_json(value["p"]) : ratio(1, 2));
        if (name == "bipartite") return bipartite_model();
        if (name == "block_model") {
            return block_model(rationals_from_json(member(value, "boundaries", "block_model"), "boundaries"),
                               matrix_from_json(member(value, "probabilities", "block_model")));
        }
        if (name == "degree_model") {
            if (value.contains("law")) return degree_model(degree_cdf(rationals_from_json(value["law"], "law")));
            return degree_model(points_from_json(member(value, "cdf", "degree_model")));
        }
        if (name == "constant_empty") return constant_empty_model();
        if (name == "empty_complete_mixture") return empty_complete_mixture_model();
        fail("unknown builtin model '" + name + "'");
    }();
    if (value.contains("global_latent")) {
        if (!value["global_latent"].is_boolean()) fail("global_latent must be true or false");
        return AhkModel::create(model.signature(), value["global_latent"].get<bool>(), model.functions(), options);
    }
    return model;
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
}

Json rational_to_json(const Rational& value) { return format_rational(value); }

Rational rational_from_json(const Json& value) {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
    fail("expected an exact rational such as \"1/3\", got " + value.dump());
}

Json signature_to_json(const Signature& signature) {
    Json rels = Json::array();
    for (const auto& r : signature.relations()) rels.push_back({{"name", r.name}, {"arity", r.arity}});
    return {{"relations", rels}};
}

SignaturePtr signature_from_json(const Json& value) {
    const auto& rels = member(value, "relations", "signature");
    if (!rels.is_array()) fail("signature relations must be an array");
    std::vector<Relation> out;
    for (const auto& r : rels) {
        out.push_back({string_from_json(member(r, "name", "relation"), "relation name"),
                       int_from_json(member(r, "arity", "relation"), "arity")});
    }
    return Signature::create(std::move(out));
}

Json world_to_json(const World& world) {
    Json rels = Json::object();
    for (std::size_t r = 0; r < world.signature().relation_count(); ++r) {
        Json list = Json::array();
        for (const auto& t : world.tuples(r)) list.push_back(tuple_to_json(t));
        rels[world.signature().relation(r).name] = std::move(list);
    }
    return {{"n", world.size()}, {"relations", std::move(rels)}};
}

World world_from_json(const Json& value, const SignaturePtr& fallback) {
    SignaturePtr signature = fallback;
    if (value.is_object() && value.contains("signature")) signature = signature_from_json(value["signature"]);
    const int n = int_from_json(member(value, "n", "world"), "world size n");
    World w(signature, n);
    if (value.contains("relations")) {
        relations_from_json(value["relations"], *signature, n, "world",
                            [&](std::size_t r, const Tuple& t) { w.set(r, t); });
    }
    return w;
}

Json cell_to_json(const ArityCell& cell) {
    const auto& sig = cell.signature();
    const CellCatalog catalog = cell.catalog();
    if (single_binary(sig) && cell.level() == 2) {
        const int f[2] = {0, 1}, b[2] = {1, 0};
        const bool fw = cell.holds(0, f), bw = cell.holds(0, b);
        return fw && bw ? "<->" : fw ? "->" : bw ? "<-" : "none";
    }
    if (single_binary(sig) && cell.level() == 1) {
        const int l[2] = {0, 0};
        return cell.holds(0, l) ? "loop" : "none";
    }
    Json rels = Json::object();
    for (std::size_t r = 0; r < sig.relation_count(); ++r) rels[sig.relation(r).name] = Json::array();
    for (const auto& e : catalog.entries()) {
        if (cell.holds(e.relation, as_span(e.tuple))) rels[sig.relation(e.relation).name].push_back(tuple_to_json(e.tuple));
    }
    return {{"relations", std::move(rels)}};
}

ArityCell cell_from_json(const Json& value, const SignaturePtr& signature, int m) {
    ArityCell cell(signature, m);
    if (value.is_string()) {
        const auto text = value.get<std::string>();
        if (!single_binary(*signature)) fail("cell shorthand '" + text + "' needs a single binary relation");
        const int f[2] = {0, 1}, b[2] = {1, 0}, l[2] = {0, 0};
        if (text == "none") return cell;
        if (m == 2 && (text == "->" || text == "<->")) cell.set(0, f);
        if (m == 2 && (text == "<-" || text == "<->")) cell.set(0, b);
        if (m == 1 && text == "loop") cell.set(0, l);
        if (cell.bits().none()) fail("unknown level-" + std::to_string(m) + " cell '" + text + "'");
        return cell;
    }
    const CellCatalog catalog(*signature, m);
    relations_from_json(member(value, "relations", "cell"), *signature, m, "cell", [&](std::size_t r, const Tuple& t) {
        if (catalog.find(r, t) == catalog.size()) fail("cell tuple does not use all " + std::to_string(m) + " elements");
        cell.set(r, as_span(t));
    });
    return cell;
}

Json distribution_to_json(const WorldletDistribution& distribution) {
    Json entries = Json::array();
    for (const auto& [w, p] : distribution.entries()) {
        entries.push_back({{"world", world_to_json(w)}, {"prob", rational_to_json(p)}});
    }
    return {{"signature", signature_to_json(distribution.signature())},
            {"k", distribution.size()},
            {"convention", to_string(distribution.convention())},
            {"entries", std::move(entries)}};
}

WorldletDistribution distribution_from_json(const Json& value) {
    const auto signature = signature_from_json(member(value, "signature", "distribution"));
    const int k = int_from_json(member(value, "k", "distribution"), "k");
    Convention convention = Convention::Directed;
    if (value.contains("convention")) {
        try {
            convention = parse_convention(string_from_json(value["convention"], "convention"));
        } catch (const InvalidArgument& e) {
            fail(e.what());
        }
    }
    const auto& list = member(value, "entries", "distribution");
    if (!list.is_array()) fail("distribution entries must be an array");
    WorldletDistribution::Entries entries;
    for (const auto& e : list) {
        World w = world_from_json(member(e, "world", "entry"), signature);
        if (w.size() != k) fail("entry world has size " + std::to_string(w.size()) + ", expected " + std::to_string(k));
        Rational p = rational_from_json(member(e, "prob", "entry"));
        if (!entries.emplace(std::move(w), std::move(p)).second) fail("duplicate world in distribution entries");
    }
    return WorldletDistribution::create(signature, k, convention, std::move(entries));
}

Json function_to_json(const CellFunction& function) {
    const auto& sig = *function.signature();
    const int level = function.level();
    return std::visit(
        [&](const auto& spec) -> Json {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ConstantFn>) {
                return {{"builtin", "constant"}, {"cell", cell_to_json(spec.cell)}};
            } else if constexpr (std::is_same_v<T, ErdosRenyiFn>) {
                return {{"builtin", "erdos_renyi"}, {"p", rational_to_json(spec.p)}, {"relation", sig.relation(spec.relation).name}};
            } else if constexpr (std::is_same_v<T, BlockModelFn>) {
                Json probs = Json::array();
                for (const auto& row : spec.probabilities) probs.push_back(rationals_to_json(row));
                return {{"builtin", "block_model"},
                        {"boundaries", rationals_to_json(spec.boundaries)},
                        {"probabilities", std::move(probs)},
                        {"relation", sig.relation(spec.relation).name}};
            } else if constexpr (std::is_same_v<T, DegreeModelFn>) {
                Json pts = Json::array();
                for (const auto& [x, y] : spec.cdf) pts.push_back({rational_to_json(x), rational_to_json(y)});
                return {{"builtin", "degree_model"}, {"cdf", std::move(pts)}, {"relation", sig.relation(spec.relation).name}};
            } else {
                Json rules = Json::array();
                for (const auto& rule : spec.rules) {
                    if (rule.guard.empty()) {
                        rules.push_back({{"else", cell_to_json(rule.output)}});
                        continue;
                    }
                    Json guard = Json::array();
                    for (const auto& c : rule.guard) {
                        guard.push_back({operand_to_json(c.lhs, level), op_text(c.op), operand_to_json(c.rhs, level)});
                    }
                    rules.push_back({{"if", std::move(guard)}, {"then", cell_to_json(rule.output)}});
                }
                return {{"rules", std::move(rules)}};
            }
        },
        function.spec());
}

CellFunction function_from_json(const Json& value, const SignaturePtr& signature, int level) {
    if (!value.is_object()) fail("function spec must be an object");
    if (value.contains("rules")) return CellFunction(signature, level, rules_from_json(value["rules"], signature, level));
    const auto name = string_from_json(member(value, "builtin", "function spec"), "builtin");
    const auto rel = relation_from_json(value, *signature);
    auto binary = [&] { return rel ? *rel : binary_relation(*signature); };
    if (name == "constant") {
        return CellFunction(signature, level,
                            ConstantFn{value.contains("cell") ? cell_from_json(value["cell"], signature, level) : ArityCell(signature, level)});
    }
    if (name == "erdos_renyi") {
        return CellFunction(signature, level,
                            ErdosRenyiFn{value.contains("p") ? rational_from_json(value["p"]) : ratio(1, 2), binary()});
    }
    if (name == "block_model") {
        return CellFunction(signature, level,
                            BlockModelFn{rationals_from_json(member(value, "boundaries", "block_model"), "boundaries"),
                                         matrix_from_json(member(value, "probabilities", "block_model")), binary()});
    }
    if (name == "bipartite") {
        return CellFunction(signature, level, BlockModelFn{{ratio(1, 2)}, {{0, 1}, {1, 0}}, binary()});
    }
    if (name == "degree_model") {
        auto cdf = value.contains("law") ? degree_cdf(rationals_from_json(value["law"], "law"))
                                         : points_from_json(member(value, "cdf", "degree_model"));
        return CellFunction(signature, level, DegreeModelFn{std::move(cdf), binary()});
    }
    fail("unknown builtin function '" + name + "'");
}

Json model_to_json(const AhkModel& model) {
    Json functions = Json::object();
    for (const auto& f : model.functions()) functions[std::to_string(f.level())] = function_to_json(f);
    return {{"signature", signature_to_json(*model.signature())},
            {"global_latent", model.has_global_latent()},
            {"functions", std::move(functions)}};
}

AhkModel model_from_json(const Json& value, const AhkModel::Options& options) {
    if (!value.is_object()) fail("model spec must be a JSON object");
    if (value.contains("builtin")) return builtin_model(value, options);
    const auto signature = value.contains("signature") ? signature_from_json(value["signature"]) : graph_signature();
    bool global = true;
    if (value.contains("global_latent")) {
        if (!value["global_latent"].is_boolean()) fail("global_latent must be true or false");
        global = value["global_latent"].get<bool>();
    }
    const auto& fns = member(value, "functions", "model");
    if (!fns.is_object()) fail("model functions must be an object keyed by level");
    std::vector<CellFunction> functions;
    std::set<int> seen;
    for (const auto& [key, spec] : fns.items()) {
        int level = 0;
        try {
            std::size_t used = 0;
            level = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            fail("function level '" + key + "' is not an integer");
        }
        if (level < 1 || level > signature->arity()) {
            fail("function level " + key + " outside 1.." + std::to_string(signature->arity()));
        }
        if (!seen.insert(level).second) fail("duplicate function level " + key);
        functions.push_back(function_from_json(spec, signature, level));
    }
    return AhkModel::create(signature, global, std::move(functions), options);
}

}  // namespace worldlet
