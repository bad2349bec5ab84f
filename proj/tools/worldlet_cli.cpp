// Command-line front end. Talks to the library only through worldlet.h.

#include "worldlet/worldlet.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kDomain = 1, kResource = 2, kIo = 3 };

// Carries an exit code and a JSON error body up to main.
struct Failure {
    int code;
    std::string body;
    std::string message;
};

Failure io_failure(const std::string& message) {
    Json body = {{"error", {{"status", "io"}, {"code", 3}, {"message", message}}}};
    return {kIo, body.dump(), message};
}

struct Settings {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::uint64_t budget_worlds = std::uint64_t{1} << 22;
    std::uint64_t budget_perms = 362880;
    std::string out;
    std::string timestamp;
    bool no_manifest = false;
};

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Session {
public:
    Session(const Settings& settings, std::string command, std::vector<std::string> argv)
        : settings_(settings), command_(std::move(command)), argv_(std::move(argv)), ctx_(wl_context_new()) {
        if (!ctx_) throw Failure{kResource, "", "cannot allocate context"};
        wl_context_set_threads(ctx_.get(), settings.threads);
        wl_context_set_budget(ctx_.get(), settings.budget_worlds, settings.budget_perms);
    }

    wl_context* ctx() { return ctx_.get(); }

    // Throws Failure when a library call did not succeed.
    void check(wl_status status) {
        if (status == WL_OK) return;
        const int code = status == WL_ERR_RESOURCE ? kResource : status == WL_ERR_PARSE ? kIo : kDomain;
        throw Failure{code, wl_last_error_json(ctx_.get()), wl_last_error(ctx_.get())};
    }

    std::string read_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_failure("cannot read " + path);
        std::ostringstream text;
        text << in.rdbuf();
        inputs_.push_back({{"path", path}, {"fnv1a64", hex(fnv1a(text.str()))}});
        return text.str();
    }

    // Writes to `path`, or stdout when empty; records file outputs for the manifest.
    void write_output(const std::string& text, const std::string& path) {
        if (path.empty()) {
            std::cout << text;
            std::cout.flush();
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << text)) throw io_failure("cannot write " + path);
        outputs_.push_back({{"path", path}, {"fnv1a64", hex(fnv1a(text))}});
    }

    void emit(const std::string& text) { write_output(text, settings_.out); }

    // Sidecar manifest next to the first file output, or inside `dir`.
    void finish(const std::string& dir = "") {
        if (settings_.no_manifest || (outputs_.empty() && dir.empty())) return;
        Json manifest = {{"command", command_},
                         {"arguments", argv_},
                         {"seed", settings_.seed},
                         {"threads", settings_.threads},
                         {"budget_worlds", settings_.budget_worlds},
                         {"budget_perms", settings_.budget_perms},
                         {"versions", {{"worldlet", wl_version()}}},
                         {"inputs", inputs_},
                         {"outputs", outputs_},
                         {"timestamp", settings_.timestamp.empty() ? utc_now() : settings_.timestamp}};
        const std::string path =
            dir.empty() ? outputs_.front()["path"].get<std::string>() + ".manifest.json" : (fs::path(dir) / "manifest.json").string();
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << manifest.dump(2) << '\n')) throw io_failure("cannot write " + path);
    }

private:
    struct ContextFree {
        void operator()(wl_context* c) const { wl_context_free(c); }
    };

    const Settings& settings_;
    std::string command_;
    std::vector<std::string> argv_;
    std::unique_ptr<wl_context, ContextFree> ctx_;
    Json inputs_ = Json::array();
    Json outputs_ = Json::array();
};

// Owning wrappers for library handles and strings.
template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    Handle& operator=(Handle&& o) noexcept {
        std::swap(p, o.p);
        return *this;
    }
    ~Handle() {
        if (p) Free(p);
    }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Signature = Handle<wl_signature, wl_signature_free>;
using World = Handle<wl_world, wl_world_free>;
using Dist = Handle<wl_distribution, wl_distribution_free>;
using Model = Handle<wl_model, wl_model_free>;

struct Text {
    char* p = nullptr;
    Text() = default;
    Text(const Text&) = delete;
    Text& operator=(const Text&) = delete;
    ~Text() { wl_string_free(p); }
    char** out() { return &p; }
    std::string str() const { return p ? p : ""; }
    Json json() const { return Json::parse(str()); }
};

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }
std::string pretty(const Text& t) { return pretty(t.json()); }

wl_convention convention(const std::string& name) { return name == "undirected" ? WL_UNDIRECTED : WL_DIRECTED; }

Signature load_signature(Session& s, const std::string& path) {
    Signature sig;
    if (path.empty()) {
        s.check(wl_signature_parse(s.ctx(), nullptr, sig.out()));
    } else {
        s.check(wl_signature_parse(s.ctx(), s.read_input(path).c_str(), sig.out()));
    }
    return sig;
}

Dist load_dist(Session& s, const std::string& path) {
    Dist d;
    s.check(wl_distribution_parse(s.ctx(), s.read_input(path).c_str(), d.out()));
    return d;
}

Model load_model(Session& s, const std::string& path) {
    Model m;
    s.check(wl_model_parse(s.ctx(), s.read_input(path).c_str(), m.out()));
    return m;
}

std::string dist_text(Session& s, const Dist& d) {
    Text t;
    s.check(wl_distribution_to_json(s.ctx(), d.get(), t.out()));
    return pretty(t);
}

Json dist_json(Session& s, wl_distribution* d) {
    Text t;
    s.check(wl_distribution_to_json(s.ctx(), d, t.out()));
    return t.json();
}

Json call_json(Session& s, wl_status status, const Text& t) {
    s.check(status);
    return t.json();
}

// Rows of the undirected 3-world example table with their classification.
Json table1(Session& s) {
    Json rows = Json::array();
    for (const char* name : {"empty", "complete", "plus", "bipart"}) {
        Dist d;
        s.check(wl_distribution_builtin(s.ctx(), name, d.out()));
        Json row = {{"name", name}, {"distribution", dist_json(s, d.get())}};

        // Per-world probability by edge count (0..3 edges; classes of size 1, 3, 3, 1).
        Json per_world = Json::array({"0/1", "0/1", "0/1", "0/1"});
        for (const auto& e : row["distribution"]["entries"]) {
            per_world[e["world"]["relations"]["e"].size() / 2] = e["prob"];
        }
        row["per_world_by_edges"] = per_world;

        Text ex;
        row["exchangeable"] = call_json(s, wl_check_exchangeable(s.ctx(), d.get(), ex.out()), ex)["exchangeable"];
        Json ext = Json::object();
        for (int n = 4; n <= 6; ++n) {
            Text c;
            auto cert = call_json(s, wl_check_extendable(s.ctx(), d.get(), n, 0, c.out()), c);
            ext[std::to_string(n)] = {{"feasible", cert["feasible"]}, {"verified", cert["verified"]}};
        }
        row["extendable"] = ext;
        Text mod;
        auto m = call_json(s, wl_check_modularity(s.ctx(), d.get(), mod.out()), mod);
        row["modularity"] = {{"violations", m["violations"]}, {"below_bound", m["below_bound"]}};
        Json ladder = Json::object();
        for (int n = 3; n <= 7; ++n) {
            Text r;
            auto res = call_json(s, wl_search_realizer(s.ctx(), d.get(), n, "exhaustive", 0, 0, r.out()), r);
            ladder[std::to_string(n)] = res["max_deviation"];
        }
        row["realizer_deviation"] = ladder;
        rows.push_back(std::move(row));
    }
    return {{"rows", rows}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worldlet frequencies, extendability and AHK models"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(wl_version()));
    Settings settings;
    app.add_option("--seed", settings.seed, "Seed for all randomness")->envname("WORLDLET_SEED");
    app.add_option("--threads", settings.threads, "Worker threads (0 = all)")->envname("WORLDLET_THREADS");
    app.add_option("--budget-worlds", settings.budget_worlds, "Max worlds to enumerate")->envname("WORLDLET_BUDGET_WORLDS");
    app.add_option("--budget-perms", settings.budget_perms, "Max permutations per canonical form")
        ->envname("WORLDLET_BUDGET_PERMS");
    app.add_option("--out", settings.out, "Output file (default stdout)")->envname("WORLDLET_OUT");
    app.add_option("--timestamp", settings.timestamp, "Manifest timestamp (default now, UTC)")->envname("WORLDLET_TIMESTAMP");
    app.add_flag("--no-manifest", settings.no_manifest, "Skip the sidecar manifest");

    std::string signature_path, conv, world_path, dist_path, model_path, target_path, axes, checks, mode = "exhaustive";
    std::string out_dir = ".", t = "1/10";
    int n = 0, k = 0, m = 0;
    std::uint64_t count = 1, samples = 10000, worldlets = 0, restarts = 32;
    bool iso = false, unordered = false, iso_average = false;

    auto add_conv = [&](CLI::App* c, const std::string& def) {
        c->add_option("--convention", conv, "directed or undirected (default " + def + ")")
            ->check(CLI::IsMember({"directed", "undirected"}));
    };

    auto* enum_worlds = app.add_subcommand("enum-worlds", "List Ω^(n) or its isomorphism classes");
    enum_worlds->add_option("--n", n)->required();
    enum_worlds->add_option("--signature", signature_path, "Signature JSON (default: one binary relation e)");
    enum_worlds->add_flag("--iso-classes", iso);
    add_conv(enum_worlds, "directed");

    auto* cells = app.add_subcommand("cells", "List T_m, the arity-m cell values");
    cells->add_option("--m", m)->required();
    cells->add_option("--signature", signature_path);

    auto* freq = app.add_subcommand("freq", "Worldlet frequencies P^(k)(·|ω)");
    freq->add_option("--world", world_path)->required();
    freq->add_option("--k", k)->required();
    freq->add_option("--signature", signature_path);
    freq->add_flag("--unordered", unordered, "Unordered sampling P̂^(k)");
    add_conv(freq, "directed");

    auto* fen = app.add_subcommand("fenstad", "Fenstad sampling P^(k) ∘ Q^(n)");
    fen->add_option("--dist", dist_path)->required();
    fen->add_option("--k", k)->required();

    auto* marg = app.add_subcommand("marginalize", "Marginal Q↓[m]");
    marg->add_option("--dist", dist_path)->required();
    marg->add_option("--m", m)->required();

    auto* exch = app.add_subcommand("check-exchangeable", "Exchangeability with a witness pair");
    exch->add_option("--dist", dist_path)->required();

    auto* ext = app.add_subcommand("check-extendable", "Membership in Δ^(k)_n with a certificate");
    ext->add_option("--dist", dist_path)->required();
    ext->add_option("--n", n)->required();
    ext->add_option("--convention", conv)->check(CLI::IsMember({"directed", "undirected"}));
    ext->add_flag("--iso-average", iso_average, "Iso-average a non-exchangeable target first");

    auto* mod = app.add_subcommand("check-modularity", "Zero-probability overlaps in the marginals");
    mod->add_option("--dist", dist_path)->required();

    auto* scatter = app.add_subcommand("scatter", "Projected frequency vectors of Ω^(n) classes (CSV)");
    scatter->add_option("--k", k)->default_val(3);
    scatter->add_option("--n", n)->required();
    scatter->add_option("--axes", axes, "x,y axis names (default empty,edge_density)");
    scatter->add_option("--signature", signature_path);
    add_conv(scatter, "undirected");

    auto* sample = app.add_subcommand("ahk-sample", "Sample worlds as JSON lines (sample i uses seed+i)");
    sample->add_option("--model", model_path)->required();
    sample->add_option("--n", n)->required();
    sample->add_option("--count", count)->default_val(1);

    auto* verify = app.add_subcommand("ahk-verify", "Statistical checks of an AHK model");
    verify->add_option("--model", model_path)->required();
    verify->add_option("--checks", checks, "Comma-separated checks (default: all that apply)");
    verify->add_option("--samples", samples)->default_val(10000);

    auto* bound = app.add_subcommand("bound", "Hoeffding tail and union bound");
    bound->add_option("--n", n)->required();
    bound->add_option("--k", k)->required();
    bound->add_option("--t", t)->default_val("1/10");
    bound->add_option("--worldlets", worldlets, "|Ω^(k)| (default: graph signature under --convention)");
    add_conv(bound, "undirected");

    auto* dev = app.add_subcommand("deviation", "Empirical worldlet deviations of an AHK⁻ model");
    dev->add_option("--model", model_path)->required();
    dev->add_option("--k", k)->required();
    dev->add_option("--n", n)->required();
    dev->add_option("--samples", samples)->default_val(10000);
    dev->add_option("--t", t)->default_val("1/10");
    dev->add_option("--target", target_path, "Exact target distribution (default: estimated)");

    auto* search = app.add_subcommand("search-realizer", "Single world closest to a distribution");
    search->add_option("--dist", dist_path)->required();
    search->add_option("--n", n)->required();
    search->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "local"}))->default_val("exhaustive");
    search->add_option("--restarts", restarts)->default_val(32);

    app.add_subcommand("table1", "The four example distributions with their classification");

    auto* fig2 = app.add_subcommand("figure2", "Δ^(3)_n scatter CSVs for n = 3..6 and '+' membership");
    fig2->add_option("--out-dir", out_dir)->default_val(".");
    fig2->add_option("--axes", axes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kIo;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (conv.empty()) conv = command == "scatter" || command == "bound" ? "undirected" : "directed";
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        Session s(settings, command, args);
        auto x_axis = [&]() -> std::optional<std::string> {
            if (axes.empty()) return std::nullopt;
            return axes.substr(0, axes.find(','));
        };
        auto y_axis = [&]() -> std::optional<std::string> {
            auto comma = axes.find(',');
            if (axes.empty() || comma == std::string::npos) return std::nullopt;
            return axes.substr(comma + 1);
        };
        if (!axes.empty() && axes.find(',') == std::string::npos) {
            throw Failure{kDomain, Json{{"error", {{"status", "domain"}, {"code", 1}, {"message", "--axes needs x,y"}}}}.dump(),
                          "--axes needs x,y"};
        }

        if (command == "enum-worlds") {
            auto sig = load_signature(s, signature_path);
            Text out;
            s.check(wl_enumerate_worlds(s.ctx(), sig.get(), n, convention(conv), iso, out.out()));
            s.emit(pretty(out));
        } else if (command == "cells") {
            auto sig = load_signature(s, signature_path);
            Text out;
            s.check(wl_enumerate_cells(s.ctx(), sig.get(), m, out.out()));
            s.emit(pretty(out));
        } else if (command == "freq") {
            auto sig = load_signature(s, signature_path);
            World w;
            s.check(wl_world_parse(s.ctx(), s.read_input(world_path).c_str(), sig.get(), w.out()));
            Dist d;
            s.check(wl_frequency(s.ctx(), w.get(), k, convention(conv), unordered, d.out()));
            s.emit(dist_text(s, d));
        } else if (command == "fenstad" || command == "marginalize") {
            auto q = load_dist(s, dist_path);
            Dist d;
            s.check(command == "fenstad" ? wl_fenstad(s.ctx(), q.get(), k, d.out()) : wl_marginalize(s.ctx(), q.get(), m, d.out()));
            s.emit(dist_text(s, d));
        } else if (command == "check-exchangeable") {
            auto q = load_dist(s, dist_path);
            Text out;
            s.check(wl_check_exchangeable(s.ctx(), q.get(), out.out()));
            s.emit(pretty(out));
        } else if (command == "check-extendable") {
            auto q = load_dist(s, dist_path);
            if (ext->count("--convention")) {
                Dist converted;
                s.check(wl_distribution_with_convention(s.ctx(), q.get(), convention(conv), converted.out()));
                q = std::move(converted);
            }
            Text out;
            s.check(wl_check_extendable(s.ctx(), q.get(), n, iso_average, out.out()));
            s.emit(pretty(out));
        } else if (command == "check-modularity") {
            auto q = load_dist(s, dist_path);
            Text out;
            s.check(wl_check_modularity(s.ctx(), q.get(), out.out()));
            s.emit(pretty(out));
        } else if (command == "scatter") {
            auto sig = load_signature(s, signature_path);
            auto x = x_axis(), y = y_axis();
            Text out;
            s.check(wl_scatter_csv(s.ctx(), sig.get(), k, n, convention(conv), x ? x->c_str() : nullptr,
                                   y ? y->c_str() : nullptr, out.out()));
            s.emit(out.str());
        } else if (command == "ahk-sample") {
            auto model = load_model(s, model_path);
            std::string lines;
            for (std::uint64_t i = 0; i < count; ++i) {
                World w;
                s.check(wl_ahk_sample(s.ctx(), model.get(), n, settings.seed + i, w.out()));
                Text t;
                s.check(wl_world_to_json(s.ctx(), w.get(), t.out()));
                lines += t.str() + "\n";
            }
            s.emit(lines);
        } else if (command == "ahk-verify") {
            auto model = load_model(s, model_path);
            Text out;
            s.check(wl_ahk_verify(s.ctx(), model.get(), checks.empty() ? nullptr : checks.c_str(), samples, settings.seed,
                                  out.out()));
            s.emit(pretty(out));
        } else if (command == "bound") {
            if (!bound->count("--worldlets")) s.check(wl_worldlet_count(s.ctx(), nullptr, k, convention(conv), &worldlets));
            Text out;
            s.check(wl_bound(s.ctx(), n, k, t.c_str(), worldlets, out.out()));
            s.emit(pretty(out));
        } else if (command == "deviation") {
            auto model = load_model(s, model_path);
            Dist target;
            if (!target_path.empty()) target = load_dist(s, target_path);
            Text out;
            s.check(wl_deviation(s.ctx(), model.get(), k, n, samples, t.c_str(), settings.seed, target.get(), out.out()));
            s.emit(pretty(out));
        } else if (command == "search-realizer") {
            auto q = load_dist(s, dist_path);
            Text out;
            s.check(wl_search_realizer(s.ctx(), q.get(), n, mode.c_str(), restarts, settings.seed, out.out()));
            s.emit(pretty(out));
        } else if (command == "table1") {
            s.emit(pretty(table1(s)));
        } else if (command == "figure2") {
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (ec) throw io_failure("cannot create " + out_dir + ": " + ec.message());
            auto x = x_axis(), y = y_axis();
            Dist plus;
            s.check(wl_distribution_builtin(s.ctx(), "plus", plus.out()));
            Json summary = {{"csv", Json::array()}, {"plus_membership", Json::object()}};
            for (int size = 3; size <= 6; ++size) {
                Text csv;
                s.check(wl_scatter_csv(s.ctx(), nullptr, 3, size, WL_UNDIRECTED, x ? x->c_str() : nullptr,
                                       y ? y->c_str() : nullptr, csv.out()));
                const auto path = (fs::path(out_dir) / ("figure2_n" + std::to_string(size) + ".csv")).string();
                s.write_output(csv.str(), path);
                summary["csv"].push_back(path);
                if (size >= 3) {
                    Text c;
                    auto cert = call_json(s, wl_check_extendable(s.ctx(), plus.get(), size, 0, c.out()), c);
                    summary["plus_membership"][std::to_string(size)] = {{"feasible", cert["feasible"]},
                                                                       {"verified", cert["verified"]}};
                }
            }
            s.emit(pretty(summary));
            s.finish(out_dir);
            return kOk;
        }
        s.finish();
        return kOk;
    } catch (const Failure& f) {
        if (!f.body.empty()) std::cout << f.body << "\n";
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
}
