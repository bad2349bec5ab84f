#pragma once

#include "worldlet/ahk.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <json.hpp>

#include <string_view>

namespace worldlet {

/// Object keys keep insertion order so serialized output is stable.
using Json = nlohmann::ordered_json;

/// Throws ParseError on malformed text.
Json parse_json(std::string_view text);

/// "p/q" string; parses "p/q", decimal strings and JSON integers.
Json rational_to_json(const Rational& value);
Rational rational_from_json(const Json& value);

/// {"relations":[{"name":"e","arity":2}]}
Json signature_to_json(const Signature& signature);
SignaturePtr signature_from_json(const Json& value);

/// {"n":3,"relations":{"e":[[1,2],[2,1]]}} with 1-based, sorted tuples. A
/// "signature" member, when present, overrides `fallback`.
Json world_to_json(const World& world);
World world_from_json(const Json& value, const SignaturePtr& fallback = graph_signature());

/// Cells of a single binary relation use "none", "->", "<-", "<->" at level 2
/// and "none", "loop" at level 1. Otherwise {"relations":{...}} with tuples over 1..m.
Json cell_to_json(const ArityCell& cell);
ArityCell cell_from_json(const Json& value, const SignaturePtr& signature, int m);

/// {"signature":…, "k":3, "convention":"undirected", "entries":[{"world":…, "prob":"1/3"}]}
Json distribution_to_json(const WorldletDistribution& distribution);
WorldletDistribution distribution_from_json(const Json& value);

/// {"signature":…, "global_latent":false, "functions":{"1":{…}, "2":{…}}}. Also
/// accepts {"builtin":"<model>", params…} for the built-in models; the
/// signature then defaults to the graph signature.
Json function_to_json(const CellFunction& function);
CellFunction function_from_json(const Json& value, const SignaturePtr& signature, int level);
Json model_to_json(const AhkModel& model);
AhkModel model_from_json(const Json& value, const AhkModel::Options& options = {});

}  // namespace worldlet
