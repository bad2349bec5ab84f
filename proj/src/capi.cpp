#include "worldlet/worldlet.h"

#include "worldlet/ahk_checks.hpp"
#include "worldlet/concentration.hpp"
#include "worldlet/errors.hpp"
#include "worldlet/extendability.hpp"
#include "worldlet/graphs.hpp"
#include "worldlet/json_io.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

using namespace worldlet;

struct wl_context {
    Budget budget;
    std::string error;
    std::string error_json;
};

struct wl_signature {
    SignaturePtr signature;
};

struct wl_world {
    World world;
};

struct wl_distribution {
    WorldletDistribution distribution;
};

struct wl_model {
    AhkModel model;
};

namespace {

constexpr const char* kVersion = "0.1.0";

char* copy_string(const std::string& text) {
    auto* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, text.data(), text.size() + 1);
    return out;
}

wl_status fail(wl_context* ctx, wl_status status, const std::string& message, Json details = nullptr) {
    if (!ctx) return status;
    ctx->error = message;
    Json body = {{"status", wl_status_name(status)}, {"code", static_cast<int>(status)}, {"message", message}};
    if (!details.is_null()) body["details"] = std::move(details);
    ctx->error_json = Json{{"error", std::move(body)}}.dump();
    return status;
}

// Runs fn, mapping exceptions onto status codes and the context's error slot.
template <class Fn>
wl_status guarded(wl_context* ctx, Fn&& fn) {
    if (!ctx) return WL_ERR_DOMAIN;
    ctx->error.clear();
    ctx->error_json.clear();
    try {
        fn();
        return WL_OK;
    } catch (const ParseError& e) {
        return fail(ctx, WL_ERR_PARSE, e.what());
    } catch (const ResourceLimit& e) {
        return fail(ctx, WL_ERR_RESOURCE, e.what(), {{"requested", e.requested()}, {"budget", e.budget()}});
    } catch (const NotExchangeable& e) {
        return fail(ctx, WL_ERR_DOMAIN, e.what(), {{"witness", {world_to_json(e.first()), world_to_json(e.second())}}});
    } catch (const NotEquivariant& e) {
        const auto& f = e.failure();
        return fail(ctx, WL_ERR_DOMAIN, e.what(),
                    {{"level", e.level()},
                     {"latent", f.latent},
                     {"permuted_output", cell_to_json(f.permuted_output)},
                     {"expected_output", cell_to_json(f.expected_output)}});
    } catch (const InvalidArgument& e) {
        return fail(ctx, WL_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ctx, WL_ERR_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return fail(ctx, WL_ERR_INTERNAL, e.what());
    }
}

template <class T>
void require(const T* p, const char* what) {
    if (!p) throw InvalidArgument(std::string(what) + " must not be NULL");
}

Convention convention_of(wl_convention c) {
    if (c == WL_DIRECTED) return Convention::Directed;
    if (c == WL_UNDIRECTED) return Convention::Undirected;
    throw InvalidArgument("unknown convention code " + std::to_string(static_cast<int>(c)));
}

SignaturePtr signature_or_graph(const wl_signature* s) { return s ? s->signature : graph_signature(); }

void emit(char** out, const std::string& text) {
    require(out, "output pointer");
    *out = copy_string(text);
}

Rational rational_arg(const char* text, const char* what) {
    require(text, what);
    return parse_rational(text);
}

Json iso_class_json(const IsoClassId& id) {
    return {{"id", id.label()}, {"class_size", id.class_size}, {"world", world_to_json(id.canonical)}};
}

Json chi_square_json(const ChiSquareResult& r) {
    return {{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}, {"passed", r.passed}};
}

Json certificate_json(const MembershipCertificate& c, const WorldletDistribution& q, int n) {
    Json out = {{"k", q.size()}, {"n", n}, {"feasible", c.feasible}, {"verified", c.verified}, {"pivots", c.pivots}};
    if (c.feasible) {
        Json weights = Json::array();
        for (const auto& [id, w] : c.weights) {
            Json entry = iso_class_json(id);
            entry["weight"] = rational_to_json(w);
            weights.push_back(std::move(entry));
        }
        out["weights"] = std::move(weights);
    } else {
        Json functional = Json::array();
        for (const auto& [w, v] : c.functional) {
            functional.push_back({{"world", world_to_json(w)}, {"coefficient", rational_to_json(v)}});
        }
        out["functional"] = std::move(functional);
        out["target_value"] = rational_to_json(c.target_value);
        out["threshold"] = rational_to_json(c.threshold);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

extern "C" {

const char* wl_version(void) { return kVersion; }

const char* wl_status_name(wl_status status) {
    switch (status) {
        case WL_OK: return "ok";
        case WL_ERR_DOMAIN: return "domain";
        case WL_ERR_RESOURCE: return "resource";
        case WL_ERR_PARSE: return "parse";
        case WL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

wl_context* wl_context_new(void) { return new (std::nothrow) wl_context(); }
void wl_context_free(wl_context* ctx) { delete ctx; }

void wl_context_set_threads(wl_context* ctx, unsigned threads) {
    if (ctx) ctx->budget.threads = threads;
}

void wl_context_set_budget(wl_context* ctx, uint64_t max_worlds, uint64_t max_permutations) {
    if (!ctx) return;
    ctx->budget.max_worlds = max_worlds;
    ctx->budget.max_permutations = max_permutations;
}

const char* wl_last_error(const wl_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }
const char* wl_last_error_json(const wl_context* ctx) { return ctx ? ctx->error_json.c_str() : ""; }
void wl_string_free(char* text) { std::free(text); }

// --- objects -------------------------------------------------------------------

wl_status wl_signature_parse(wl_context* ctx, const char* json, wl_signature** out) {
    return guarded(ctx, [&] {
        require(out, "output pointer");
        auto sig = json ? signature_from_json(parse_json(json)) : graph_signature();
        *out = new wl_signature{std::move(sig)};
    });
}

wl_status wl_signature_to_json(wl_context* ctx, const wl_signature* signature, char** out) {
    return guarded(ctx, [&] { emit(out, signature_to_json(*signature_or_graph(signature)).dump()); });
}

void wl_signature_free(wl_signature* signature) { delete signature; }

wl_status wl_world_parse(wl_context* ctx, const char* json, const wl_signature* fallback, wl_world** out) {
    return guarded(ctx, [&] {
        require(json, "json");
        require(out, "output pointer");
        *out = new wl_world{world_from_json(parse_json(json), signature_or_graph(fallback))};
    });
}

wl_status wl_world_to_json(wl_context* ctx, const wl_world* world, char** out) {
    return guarded(ctx, [&] {
        require(world, "world");
        emit(out, world_to_json(world->world).dump());
    });
}

int wl_world_size(const wl_world* world) { return world ? world->world.size() : -1; }
void wl_world_free(wl_world* world) { delete world; }

wl_status wl_distribution_parse(wl_context* ctx, const char* json, wl_distribution** out) {
    return guarded(ctx, [&] {
        require(json, "json");
        require(out, "output pointer");
        *out = new wl_distribution{distribution_from_json(parse_json(json))};
    });
}

wl_status wl_distribution_to_json(wl_context* ctx, const wl_distribution* dist, char** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        emit(out, distribution_to_json(dist->distribution).dump());
    });
}

wl_status wl_distribution_with_convention(wl_context* ctx, const wl_distribution* dist, wl_convention convention,
                                          wl_distribution** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        require(out, "output pointer");
        const auto& d = dist->distribution;
        const auto c = convention_of(convention);
        auto bad = convention_violations(d, c);
        if (!bad.empty()) {
            throw InvalidArgument("distribution puts mass on a world violating the " + to_string(c) + " convention");
        }
        *out = new wl_distribution{WorldletDistribution::create(d.signature_ptr(), d.size(), c, d.entries())};
    });
}

int wl_distribution_size(const wl_distribution* dist) { return dist ? dist->distribution.size() : -1; }
void wl_distribution_free(wl_distribution* dist) { delete dist; }

wl_status wl_distribution_builtin(wl_context* ctx, const char* name, wl_distribution** out) {
    return guarded(ctx, [&] {
        require(name, "name");
        require(out, "output pointer");
        const std::string n = name;
        if (n == "mixture") {
            *out = new wl_distribution{empty_complete_mixture(3)};
            return;
        }
        const std::pair<const char*, TableRow> aliases[] = {{"empty", TableRow::Empty}, {"complete", TableRow::Complete},
                                                            {"plus", TableRow::Plus}, {"bipart", TableRow::Bipart}};
        for (const auto& [alias, row] : aliases) {
            if (n == alias || n == table_row_name(row)) {
                *out = new wl_distribution{table_row(row)};
                return;
            }
        }
        throw InvalidArgument("unknown distribution '" + n + "'; expected empty, complete, plus, bipart or mixture");
    });
}

wl_status wl_model_parse(wl_context* ctx, const char* json, wl_model** out) {
    return guarded(ctx, [&] {
        require(json, "json");
        require(out, "output pointer");
        *out = new wl_model{model_from_json(parse_json(json))};
    });
}

wl_status wl_model_to_json(wl_context* ctx, const wl_model* model, char** out) {
    return guarded(ctx, [&] {
        require(model, "model");
        emit(out, model_to_json(model->model).dump());
    });
}

int wl_model_has_global_latent(const wl_model* model) { return model && model->model.has_global_latent() ? 1 : 0; }
void wl_model_free(wl_model* model) { delete model; }

// --- relational core and statistics ---------------------------------------------

wl_status wl_enumerate_worlds(wl_context* ctx, const wl_signature* signature, int n, wl_convention convention,
                              int iso_classes, char** out) {
    return guarded(ctx, [&] {
        const auto sig = signature_or_graph(signature);
        if (n < 1) throw InvalidArgument("n must be positive");
        Json list = Json::array();
        if (iso_classes) {
            for (const auto& c : enumerate_iso_classes(WorldSpace(sig, n, convention_of(convention)), ctx->budget)) {
                list.push_back(iso_class_json(c.id));
            }
        } else {
            for (const auto& w : enumerate_worlds(sig, n, convention_of(convention), ctx->budget)) {
                list.push_back(world_to_json(w));
            }
        }
        emit(out, list.dump());
    });
}

wl_status wl_enumerate_cells(wl_context* ctx, const wl_signature* signature, int m, char** out) {
    return guarded(ctx, [&] {
        if (m < 1) throw InvalidArgument("m must be positive");
        Json list = Json::array();
        std::size_t code = 0;
        for (const auto& c : enumerate_cells(signature_or_graph(signature), m)) {
            list.push_back({{"code", code++}, {"cell", cell_to_json(c)}});
        }
        emit(out, list.dump());
    });
}

wl_status wl_frequency(wl_context* ctx, const wl_world* world, int k, wl_convention convention, int unordered,
                       wl_distribution** out) {
    return guarded(ctx, [&] {
        require(world, "world");
        require(out, "output pointer");
        const auto c = convention_of(convention);
        auto f = unordered ? frequency_unordered(world->world, k, c, ctx->budget.threads)
                           : frequency_ordered(world->world, k, c, ctx->budget.threads);
        *out = new wl_distribution{std::move(f.distribution)};
    });
}

wl_status wl_fenstad(wl_context* ctx, const wl_distribution* dist, int k, wl_distribution** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        require(out, "output pointer");
        *out = new wl_distribution{fenstad(dist->distribution, k, ctx->budget.threads)};
    });
}

wl_status wl_marginalize(wl_context* ctx, const wl_distribution* dist, int m, wl_distribution** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        require(out, "output pointer");
        *out = new wl_distribution{marginalize(dist->distribution, m)};
    });
}

wl_status wl_iso_average(wl_context* ctx, const wl_distribution* dist, wl_distribution** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        require(out, "output pointer");
        *out = new wl_distribution{iso_average(dist->distribution, ctx->budget)};
    });
}

wl_status wl_check_exchangeable(wl_context* ctx, const wl_distribution* dist, char** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        auto r = is_exchangeable(dist->distribution, ctx->budget);
        Json witness = nullptr;
        if (r.witness) witness = Json::array({world_to_json(r.witness->first), world_to_json(r.witness->second)});
        emit(out, Json{{"exchangeable", r.exchangeable}, {"witness", std::move(witness)}}.dump());
    });
}

// --- extendability -------------------------------------------------------------

wl_status wl_check_extendable(wl_context* ctx, const wl_distribution* dist, int n, int iso_average_first, char** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        ExtendabilityOptions options;
        options.iso_average_first = iso_average_first != 0;
        options.budget = ctx->budget;
        auto cert = check_extendable(dist->distribution, n, options);
        emit(out, certificate_json(cert, dist->distribution, n).dump());
    });
}

wl_status wl_check_modularity(wl_context* ctx, const wl_distribution* dist, char** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        auto report = modularity_check(dist->distribution, ctx->budget);
        Json entries = Json::array();
        for (const auto& e : report.entries) {
            entries.push_back({{"n", e.n},
                               {"world", world_to_json(e.world)},
                               {"p", rational_to_json(e.p)},
                               {"q", rational_to_json(e.q)},
                               {"p_squared", rational_to_json(Rational(e.p * e.p))},
                               {"violation", e.violation},
                               {"below_bound", e.below_bound}});
        }
        emit(out, Json{{"violations", report.violations()},
                       {"below_bound", report.below_bound()},
                       {"entries", std::move(entries)}}
                      .dump());
    });
}

wl_status wl_scatter_csv(wl_context* ctx, const wl_signature* signature, int k, int n, wl_convention convention,
                         const char* x_axis, const char* y_axis, char** out) {
    return guarded(ctx, [&] {
        auto axes = ScatterAxis::default_axes();
        if (x_axis) axes.first = ScatterAxis::parse(x_axis);
        if (y_axis) axes.second = ScatterAxis::parse(y_axis);
        auto poly = build_polytope(signature_or_graph(signature), k, n, convention_of(convention), ctx->budget);
        auto data = scatter_data(poly, axes.first, axes.second, ctx->budget);
        std::string csv = "class_id,multiplicity,x,y\n";
        for (const auto& row : data.rows) {
            csv += row.id.label() + "," + std::to_string(row.id.class_size) + "," + format_rational(row.x) + "," +
                   format_rational(row.y) + "\n";
        }
        emit(out, csv);
    });
}

// --- AHK ------------------------------------------------------------------------

wl_status wl_ahk_sample(wl_context* ctx, const wl_model* model, int n, uint64_t seed, wl_world** out) {
    return guarded(ctx, [&] {
        require(model, "model");
        require(out, "output pointer");
        if (n < 1) throw InvalidArgument("n must be positive");
        *out = new wl_world{model->model.sample(n, seed)};
    });
}

wl_status wl_ahk_verify(wl_context* ctx, const wl_model* model, const char* checks, uint64_t samples, uint64_t seed,
                        char** out) {
    return guarded(ctx, [&] {
        require(model, "model");
        if (samples == 0) throw InvalidArgument("samples must be positive");
        const auto& m = model->model;
        const bool has_binary = m.signature()->arity() >= 2;
        const bool is_degree = has_binary && m.function(2).kind() == "degree_model";
        std::vector<std::string> wanted;
        if (checks) {
            wanted = split_list(checks);
        } else {
            wanted = {"equivariance", "projectivity", "exchangeability"};
            if (has_binary) wanted.push_back("modularity");
            if (is_degree) wanted.push_back("degree");
        }
        MonteCarloOptions mc;
        mc.threads = ctx->budget.threads;
        const auto sampler = sampler_of(m);
        const std::size_t n = static_cast<std::size_t>(samples);

        Json report = Json::object();
        bool all = true;
        for (std::size_t c = 0; c < wanted.size(); ++c) {
            const auto& name = wanted[c];
            const std::uint64_t s = derive_seed(seed, c);
            Json r;
            bool passed = true;
            if (name == "equivariance") {
                Json levels = Json::array();
                for (const auto& f : m.functions()) {
                    auto e = check_equivariance(f, n, derive_seed(s, static_cast<std::uint64_t>(f.level())));
                    Json entry = {{"level", f.level()}, {"kind", f.kind()}, {"trials", e.trials},
                                  {"permutations", e.permutations}, {"failures", e.failures}, {"passed", e.passed()}};
                    if (e.first_failure) entry["first_failure_latent"] = e.first_failure->latent;
                    passed = passed && e.passed();
                    levels.push_back(std::move(entry));
                }
                r = {{"levels", std::move(levels)}};
            } else if (name == "projectivity") {
                auto p = projectivity_test(sampler, 2, 5, n, s, 1000, mc);
                passed = p.passed();
                r = {{"m", 2}, {"n", 5}, {"homogeneity", chi_square_json(p.homogeneity)},
                     {"coupling_seeds", p.coupling_seeds}, {"coupling_failures", p.coupling_failures}};
            } else if (name == "exchangeability") {
                auto e = exchangeability_test(sampler, 3, n, s, mc);
                passed = e.passed();
                r = {{"k", 3}, {"classes", e.classes}, {"homogeneity", chi_square_json(e.homogeneity)}};
            } else if (name == "modularity") {
                if (!has_binary) throw InvalidArgument("modularity check needs a relation of arity >= 2");
                auto marginal = estimate_marginal(sampler, 2, n, derive_seed(s, 0), mc);
                Json worlds = Json::array();
                std::uint64_t j = 1;
                for (const auto& [w, count] : marginal.counts) {
                    auto b = modularity_bound_test(sampler, w, n, derive_seed(s, j++), mc);
                    passed = passed && (b.passed || b.inconclusive);
                    worlds.push_back({{"world", world_to_json(w)}, {"p", b.p}, {"q", b.q}, {"se_p", b.se_p},
                                      {"se_q", b.se_q}, {"sigma", b.sigma}, {"inconclusive", b.inconclusive},
                                      {"passed", b.passed}});
                }
                r = {{"worlds", std::move(worlds)}};
            } else if (name == "degree") {
                if (!is_degree) throw InvalidArgument("degree check needs a degree_model f^2");
                std::vector<double> grid;
                for (int g = 1; g <= 9; ++g) grid.push_back(g / 10.0);
                auto d = degree_model_test(m, grid, 40, n, s, 0.01, mc);
                Json probes = Json::array();
                for (const auto& p : d.probes) {
                    probes.push_back({{"u", p.u}, {"target", p.target}, {"mean", p.mean},
                                      {"standard_error", p.standard_error}, {"samples", p.samples}, {"passed", p.passed}});
                }
                passed = d.passed();
                r = {{"n", 40}, {"probes", std::move(probes)}};
            } else {
                throw InvalidArgument("unknown check '" + name +
                                      "'; expected equivariance, projectivity, exchangeability, modularity or degree");
            }
            r["passed"] = passed;
            all = all && passed;
            report[name] = std::move(r);
        }
        emit(out, Json{{"samples", samples}, {"seed", seed}, {"passed", all}, {"checks", std::move(report)}}.dump());
    });
}

// --- concentration ----------------------------------------------------------------

wl_status wl_worldlet_count(wl_context* ctx, const wl_signature* signature, int k, wl_convention convention,
                            uint64_t* out) {
    return guarded(ctx, [&] {
        require(out, "output pointer");
        *out = worldlet_count(signature_or_graph(signature), k, convention_of(convention));
    });
}

wl_status wl_bound(wl_context* ctx, int n, int k, const char* t, uint64_t worldlets, char** out) {
    return guarded(ctx, [&] {
        BoundSpec spec{n, k, rational_arg(t, "t")};
        auto u = union_bound(spec, worldlets);
        emit(out, Json{{"n", n},
                       {"k", k},
                       {"t", rational_to_json(spec.t)},
                       {"worldlets", u.worldlets},
                       {"tail_bound", u.tail},
                       {"union_bound", u.bound},
                       {"conclusive", u.conclusive()},
                       {"threshold_n", u.threshold_n}}
                      .dump());
    });
}

wl_status wl_deviation(wl_context* ctx, const wl_model* model, int k, int n, uint64_t samples, const char* t,
                       uint64_t seed, const wl_distribution* target, char** out) {
    return guarded(ctx, [&] {
        require(model, "model");
        DeviationOptions options;
        options.t = rational_arg(t, "t");
        options.threads = ctx->budget.threads;
        if (target) options.target = target->distribution;
        auto r = empirical_deviation(model->model, k, n, static_cast<std::size_t>(samples), seed, options);
        auto sorted = r.deviations;
        std::sort(sorted.begin(), sorted.end());
        emit(out, Json{{"k", k},
                       {"n", n},
                       {"t", rational_to_json(r.t)},
                       {"samples", samples},
                       {"seed", seed},
                       {"target", distribution_to_json(r.target)},
                       {"target_estimated", r.target_estimated},
                       {"mean_deviation", r.mean_deviation()},
                       {"median_deviation", rational_to_json(sorted[sorted.size() / 2])},
                       {"max_deviation", rational_to_json(r.max_deviation())},
                       {"exceedances", r.exceedances},
                       {"exceedance_fraction", r.exceedance_fraction()},
                       {"union_bound", r.bound.bound},
                       {"bound_conclusive", r.bound.conclusive()},
                       {"p_value", r.p_value},
                       {"passed", r.passed}}
                      .dump());
    });
}

wl_status wl_search_realizer(wl_context* ctx, const wl_distribution* dist, int n, const char* mode, uint64_t restarts,
                             uint64_t seed, char** out) {
    return guarded(ctx, [&] {
        require(dist, "distribution");
        RealizerOptions options;
        options.mode = mode ? parse_search_mode(mode) : SearchMode::Exhaustive;
        options.budget = ctx->budget;
        if (restarts) options.restarts = static_cast<std::size_t>(restarts);
        options.seed = seed;
        auto r = search_realizer(dist->distribution, n, options);
        Json result = {{"n", n},
                       {"k", dist->distribution.size()},
                       {"mode", to_string(r.method)},
                       {"max_deviation", rational_to_json(r.max_deviation)},
                       {"world", world_to_json(r.world)},
                       {"evaluated", r.evaluated}};
        if (r.id) {
            result["class_id"] = r.id->label();
            result["class_size"] = r.id->class_size;
        }
        emit(out, result.dump());
    });
}

}  // extern "C"
