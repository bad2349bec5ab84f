#include "worldlet/extendability.hpp"

#include "parallel.hpp"
#include "worldlet/simplex.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace worldlet {

NotExchangeable::NotExchangeable(World a, World b)
    : InvalidArgument("distribution is not exchangeable: " + world_label(a) + " and " + world_label(b) +
                      " are isomorphic but have different probabilities"),
      a_(std::move(a)), b_(std::move(b)) {}

PolytopeInstance build_polytope(SignaturePtr signature, int k, int n, Convention convention, const Budget& budget) {
    if (k < 1 || k > n) {
        throw InvalidArgument("worldlet size " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    WorldSpace space(signature, n, convention);
    auto classes = enumerate_iso_classes(space, budget);

    PolytopeInstance out;
    out.signature = signature;
    out.k = k;
    out.n = n;
    out.convention = convention;
    out.columns.resize(classes.size());
    const unsigned workers = detail::effective_threads(budget.threads, classes.size());
    detail::parallel_for(classes.size(), workers, [&](std::size_t i, unsigned) {
        out.columns[i].id = classes[i].id;
        out.columns[i].frequencies = frequency_ordered(classes[i].id.canonical, k, convention).distribution;
    });
    return out;
}

namespace {

// Worldlets appearing in any column or in the target, sorted.
std::vector<World> row_worlds(const PolytopeInstance& polytope, const WorldletDistribution& target) {
    std::set<World> rows;
    for (const auto& col : polytope.columns) {
        for (const auto& [w, p] : col.frequencies.entries()) rows.insert(w);
    }
    for (const auto& [w, p] : target.entries()) rows.insert(w);
    return {rows.begin(), rows.end()};
}

void check_target(const PolytopeInstance& polytope, const WorldletDistribution& target) {
    if (target.size() != polytope.k) throw InvalidArgument("target size does not match the polytope");
    if (!(target.signature() == *polytope.signature)) throw InvalidArgument("target signature does not match the polytope");
}

}  // namespace

MembershipCertificate check_membership(const PolytopeInstance& polytope, const WorldletDistribution& target) {
    check_target(polytope, target);
    const auto worlds = row_worlds(polytope, target);
    const std::size_t cols = polytope.columns.size();

    // Rows: one per worldlet, then Σλ = 1.
    std::vector<std::vector<Rational>> a(worlds.size() + 1, std::vector<Rational>(cols));
    std::vector<Rational> b(worlds.size() + 1);
    for (std::size_t r = 0; r < worlds.size(); ++r) {
        for (std::size_t j = 0; j < cols; ++j) a[r][j] = polytope.columns[j].frequencies.prob(worlds[r]);
        b[r] = target.prob(worlds[r]);
    }
    for (std::size_t j = 0; j < cols; ++j) a.back()[j] = 1;
    b.back() = 1;

    auto lp = solve_feasibility(a, b);
    MembershipCertificate cert;
    cert.feasible = lp.feasible;
    cert.pivots = lp.pivots;
    if (lp.feasible) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (lp.x[j] != 0) cert.weights.emplace_back(polytope.columns[j].id, lp.x[j]);
        }
    } else {
        // yᵀA <= 0 and yᵀb > 0 give ⟨c,column⟩ <= -y_sum < ⟨c,target⟩ for c = y restricted to worldlets.
        for (std::size_t r = 0; r < worlds.size(); ++r) {
            if (lp.farkas[r] != 0) cert.functional.emplace(worlds[r], lp.farkas[r]);
        }
    }
    cert.verified = verify_certificate(polytope, target, cert);
    if (cert.verified && !cert.feasible) {
        // Fill target_value/threshold for reporting.
        Rational best;
        bool first = true;
        for (const auto& col : polytope.columns) {
            Rational v = 0;
            for (const auto& [w, c] : cert.functional) v += c * col.frequencies.prob(w);
            if (first || v > best) best = v;
            first = false;
        }
        Rational t = 0;
        for (const auto& [w, c] : cert.functional) t += c * target.prob(w);
        cert.target_value = t;
        cert.threshold = best;
    }
    if (!cert.verified) throw Error("membership certificate failed exact verification");
    return cert;
}

bool verify_certificate(const PolytopeInstance& polytope, const WorldletDistribution& target,
                        const MembershipCertificate& certificate) {
    if (certificate.feasible) {
        std::map<World, Rational> mix;
        Rational total = 0;
        for (const auto& [id, weight] : certificate.weights) {
            if (weight < 0) return false;
            auto it = std::find_if(polytope.columns.begin(), polytope.columns.end(),
                                   [&](const PolytopeColumn& c) { return c.id == id; });
            if (it == polytope.columns.end()) return false;
            total += weight;
            for (const auto& [w, p] : it->frequencies.entries()) mix[w] += weight * p;
        }
        if (total != 1) return false;
        std::erase_if(mix, [](const auto& e) { return e.second == 0; });
        return mix == target.entries();
    }
    Rational t = 0;
    for (const auto& [w, c] : certificate.functional) t += c * target.prob(w);
    for (const auto& col : polytope.columns) {
        Rational v = 0;
        for (const auto& [w, c] : certificate.functional) v += c * col.frequencies.prob(w);
        if (!(v < t)) return false;
    }
    return true;
}

MembershipCertificate check_extendable(const WorldletDistribution& q, int n, const ExtendabilityOptions& options) {
    if (n < q.size()) {
        throw InvalidArgument("extension size " + std::to_string(n) + " is smaller than worldlet size " +
                              std::to_string(q.size()));
    }
    if (auto bad = convention_violations(q, q.convention()); !bad.empty()) {
        throw InvalidArgument("distribution puts mass on " + world_label(bad.front()) + ", which violates the " +
                              to_string(q.convention()) + " convention");
    }
    WorldletDistribution target = q;
    auto ex = is_exchangeable(q, options.budget);
    if (!ex.exchangeable) {
        if (!options.iso_average_first) throw NotExchangeable(ex.witness->first, ex.witness->second);
        target = iso_average(q, options.budget);
    }
    auto polytope = build_polytope(q.signature_ptr(), q.size(), n, q.convention(), options.budget);
    return check_membership(polytope, target);
}

// --- modularity --------------------------------------------------------------

std::size_t ModularityReport::violations() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.violation; }));
}

std::size_t ModularityReport::below_bound() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.below_bound; }));
}

ModularityReport modularity_check(const WorldletDistribution& q, const Budget& budget) {
    const int m = q.size();
    if (m < 2) throw InvalidArgument("modularity check needs worlds of size >= 2");
    auto ex = is_exchangeable(q, budget);
    if (!ex.exchangeable) throw NotExchangeable(ex.witness->first, ex.witness->second);

    ModularityReport report;
    for (int n = 1; n < m; ++n) {
        auto small = marginalize(q, n);
        auto big = marginalize(q, n + 1);
        std::vector<int> prefix(static_cast<std::size_t>(n)), swapped(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i + 1 < n; ++i) swapped[static_cast<std::size_t>(i)] = i;
        swapped.back() = n;

        std::map<World, Rational> overlap;
        for (const auto& [w, p] : big.entries()) {
            World a = induce_subset(w, prefix);
            if (a == induce_tuple(w, swapped)) overlap[a] += p;
        }
        for (const auto& [w, p] : small.entries()) {
            ModularityEntry e;
            e.n = n;
            e.world = w;
            e.p = p;
            auto it = overlap.find(w);
            e.q = it == overlap.end() ? Rational(0) : it->second;
            e.violation = e.q == 0;
            e.below_bound = e.q < p * p;
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

// --- scatter -------------------------------------------------------------------

namespace {

std::size_t edge_count(const World& world, Convention convention) {
    std::size_t edges = 0;
    for (std::size_t r = 0; r < world.signature().relation_count(); ++r) {
        if (world.signature().relation(r).arity != 2) continue;
        const std::size_t t = world.tuples(r).size();
        edges += convention == Convention::Undirected ? t / 2 : t;
    }
    return edges;
}

}  // namespace

ScatterAxis ScatterAxis::parse(const std::string& spec) {
    ScatterAxis axis;
    axis.spec_ = spec;
    static const std::pair<const char*, int> named[] = {{"empty", 0}, {"single_edge", 1}, {"two_edge", 2}, {"triangle", 3}};
    for (const auto& [name, edges] : named) {
        if (spec == name) {
            axis.edges_ = edges;
            return axis;
        }
    }
    if (spec == "edge_density") {
        axis.density_ = true;
        return axis;
    }
    if (spec.starts_with("edges:")) {
        const char* first = spec.data() + 6;
        const char* last = spec.data() + spec.size();
        int v = -1;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || v < 0 || first == last) throw InvalidArgument("bad axis '" + spec + "'");
        axis.edges_ = v;
        return axis;
    }
    if (spec.starts_with("class:") && spec.size() > 6) {
        axis.class_label_ = spec.substr(6);
        return axis;
    }
    throw InvalidArgument("unknown axis '" + spec + "'");
}

std::pair<ScatterAxis, ScatterAxis> ScatterAxis::default_axes() { return {parse("empty"), parse("edge_density")}; }

Rational ScatterAxis::value(const WorldletDistribution& frequencies, const Budget& budget) const {
    Rational v = 0;
    if (density_) {
        const long k = frequencies.size();
        long binary = 0;
        for (const auto& rel : frequencies.signature().relations()) binary += rel.arity == 2;
        if (k < 2 || binary == 0) return v;
        for (const auto& [w, p] : frequencies.entries()) {
            long present = 0;
            for (std::size_t r = 0; r < w.signature().relation_count(); ++r) {
                if (w.signature().relation(r).arity != 2) continue;
                for (const auto& t : w.tuples(r)) present += t[0] != t[1];
            }
            v += p * ratio(present, k * (k - 1) * binary);
        }
        return v;
    }
    for (const auto& [w, p] : frequencies.entries()) {
        const bool hit = edges_ >= 0 ? edge_count(w, frequencies.convention()) == static_cast<std::size_t>(edges_)
                                     : canonical_form(w, budget).label() == class_label_;
        if (hit) v += p;
    }
    return v;
}

ScatterData scatter_data(const PolytopeInstance& polytope, const ScatterAxis& x, const ScatterAxis& y,
                         const Budget& budget) {
    ScatterData out;
    out.x_axis = x.spec();
    out.y_axis = y.spec();
    std::set<World> worlds;
    for (const auto& col : polytope.columns) {
        for (const auto& [w, p] : col.frequencies.entries()) worlds.insert(w);
        out.rows.push_back({col.id, x.value(col.frequencies, budget), y.value(col.frequencies, budget), col.frequencies});
    }
    out.worldlets.assign(worlds.begin(), worlds.end());
    return out;
}

}  // namespace worldlet
