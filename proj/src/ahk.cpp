#include "worldlet/ahk.hpp"

#include "combinations.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace worldlet {

// --- latent vectors ------------------------------------------------------------

namespace {

constexpr int kMaxLevel = 8;

struct LevelLayout {
    std::vector<std::uint32_t> subsets;
    std::vector<std::size_t> position;  // by mask
};

const LevelLayout& layout(int m) {
    if (m < 0 || m > kMaxLevel) throw InvalidArgument("latent level " + std::to_string(m) + " is not supported");
    static std::once_flag once;
    static std::vector<LevelLayout> layouts;
    std::call_once(once, [] {
        layouts.resize(kMaxLevel + 1);
        for (int level = 0; level <= kMaxLevel; ++level) {
            auto& l = layouts[static_cast<std::size_t>(level)];
            const std::uint32_t count = 1u << level;
            for (std::uint32_t mask = 0; mask < count; ++mask) l.subsets.push_back(mask);
            // By size, then lexicographically by members.
            std::stable_sort(l.subsets.begin(), l.subsets.end(), [](std::uint32_t a, std::uint32_t b) {
                const int pa = std::popcount(a), pb = std::popcount(b);
                if (pa != pb) return pa < pb;
                for (std::uint32_t x = a, y = b; x && y; x &= x - 1, y &= y - 1) {
                    const int ea = std::countr_zero(x), eb = std::countr_zero(y);
                    if (ea != eb) return ea < eb;
                }
                return false;
            });
            l.position.resize(count);
            for (std::size_t p = 0; p < l.subsets.size(); ++p) l.position[l.subsets[p]] = p;
        }
    });
    return layouts[static_cast<std::size_t>(m)];
}

int level_of(std::size_t latent_size) {
    const int m = std::countr_zero(latent_size);
    if (latent_size == 0 || (std::size_t{1} << m) != latent_size) throw InvalidArgument("latent vector length must be a power of two");
    return m;
}

}  // namespace

const std::vector<std::uint32_t>& latent_subsets(int m) { return layout(m).subsets; }

std::string latent_component_name(std::uint32_t mask) {
    if (mask == 0) return "u0";
    std::string out = "u";
    for (std::uint32_t x = mask; x; x &= x - 1) out += std::to_string(std::countr_zero(x) + 1);
    return out;
}

std::optional<std::size_t> latent_component_position(int m, const std::string& name) {
    const auto& l = layout(m);
    for (std::size_t p = 0; p < l.subsets.size(); ++p) {
        if (latent_component_name(l.subsets[p]) == name) return p;
    }
    return std::nullopt;
}

std::vector<double> permute_latent(std::span<const double> u, const Permutation& permutation) {
    const int m = level_of(u.size());
    if (permutation.size() != m) throw InvalidArgument("permutation size does not match latent level");
    const auto& l = layout(m);
    std::vector<double> out(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) {
        std::uint32_t image = 0;
        for (std::uint32_t x = l.subsets[p]; x; x &= x - 1) image |= 1u << permutation(std::countr_zero(x));
        out[l.position[image]] = u[p];
    }
    return out;
}

// --- cell functions ----------------------------------------------------------------

std::size_t binary_relation(const Signature& signature, const std::string& name) {
    if (!name.empty()) {
        auto r = signature.find(name);
        if (!r || signature.relation(*r).arity != 2) throw InvalidArgument("'" + name + "' is not a binary relation");
        return *r;
    }
    std::optional<std::size_t> found;
    for (std::size_t r = 0; r < signature.relation_count(); ++r) {
        if (signature.relation(r).arity != 2) continue;
        if (found) throw InvalidArgument("signature has several binary relations; name one");
        found = r;
    }
    if (!found) throw InvalidArgument("signature has no binary relation");
    return *found;
}

namespace {

double piecewise(const std::vector<std::pair<double, double>>& pts, double x) {
    // Last breakpoint at or left of x; a repeated x therefore takes its upper value.
    auto it = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const auto& p) { return v < p.first; });
    if (it == pts.begin()) return pts.front().second;
    auto left = std::prev(it);
    if (it == pts.end()) return left->second;
    const double w = (x - left->first) / (it->first - left->first);
    return left->second + w * (it->second - left->second);
}

std::vector<std::pair<double, double>> to_doubles(const std::vector<std::pair<Rational, Rational>>& pts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& [x, y] : pts) out.emplace_back(x.get_d(), y.get_d());
    return out;
}

bool compare(double a, CompareOp op, double b) {
    switch (op) {
        case CompareOp::Less: return a < b;
        case CompareOp::LessEqual: return a <= b;
        case CompareOp::Greater: return a > b;
        case CompareOp::GreaterEqual: return a >= b;
    }
    return false;
}

ArityCell pair_cell(const SignaturePtr& sig, std::size_t relation, bool forward, bool backward) {
    ArityCell c(sig, 2);
    const int fwd[2] = {0, 1}, bwd[2] = {1, 0};
    if (forward) c.set(relation, fwd);
    if (backward) c.set(relation, bwd);
    return c;
}

}  // namespace

double DegreeModelFn::F(double x) const { return piecewise(to_doubles(cdf), x); }

double DegreeModelFn::inverse(double u) const {
    const auto pts = to_doubles(cdf);
    if (pts.front().second >= u) return pts.front().first;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto [x0, y0] = pts[i];
        const auto [x1, y1] = pts[i + 1];
        if (y1 < u) continue;
        if (x1 == x0) return x0;
        return x0 + (u - y0) / (y1 - y0) * (x1 - x0);
    }
    return pts.back().first;
}

CellFunction::CellFunction(SignaturePtr signature, int level, FunctionSpec spec)
    : signature_(std::move(signature)), level_(level), spec_(std::move(spec)) {
    if (!signature_) throw InvalidArgument("cell function needs a signature");
    if (level < 1 || level > signature_->arity()) {
        throw InvalidArgument("function level " + std::to_string(level) + " outside 1.." + std::to_string(signature_->arity()));
    }
    layout(level);
    empty_ = ArityCell(signature_, level);
    auto check_cell = [&](const ArityCell& c) {
        if (c.level() != level || !(c.signature() == *signature_)) throw InvalidArgument("output cell does not belong to T_" + std::to_string(level));
    };
    auto need_pair = [&](std::size_t relation, const char* what) {
        if (level != 2) throw InvalidArgument(std::string(what) + " is a level-2 function");
        if (relation >= signature_->relation_count() || signature_->relation(relation).arity != 2) {
            throw InvalidArgument(std::string(what) + " needs a binary relation");
        }
        for (int c = 0; c < 4; ++c) pair_cells_[static_cast<std::size_t>(c)] = pair_cell(signature_, relation, c & 1, c & 2);
    };
    std::visit(
        [&](auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ConstantFn>) {
                check_cell(f.cell);
            } else if constexpr (std::is_same_v<T, ErdosRenyiFn>) {
                need_pair(f.relation, "erdos_renyi");
                if (f.p < 0 || f.p > 1) throw InvalidArgument("erdos_renyi p must lie in [0,1]");
                p_ = f.p.get_d();
            } else if constexpr (std::is_same_v<T, BlockModelFn>) {
                need_pair(f.relation, "block_model");
                const std::size_t blocks = f.boundaries.size() + 1;
                for (std::size_t i = 0; i < f.boundaries.size(); ++i) {
                    if (f.boundaries[i] <= 0 || f.boundaries[i] >= 1 || (i > 0 && f.boundaries[i] <= f.boundaries[i - 1])) {
                        throw InvalidArgument("block boundaries must increase strictly inside (0,1)");
                    }
                }
                if (f.probabilities.size() != blocks) throw InvalidArgument("block probability matrix has the wrong size");
                for (std::size_t i = 0; i < blocks; ++i) {
                    if (f.probabilities[i].size() != blocks) throw InvalidArgument("block probability matrix has the wrong size");
                    for (std::size_t j = 0; j < blocks; ++j) {
                        const Rational& p = f.probabilities[i][j];
                        if (p < 0 || p > 1) throw InvalidArgument("block probabilities must lie in [0,1]");
                        if (j < i && p != f.probabilities[j][i]) throw InvalidArgument("block probability matrix must be symmetric");
                    }
                }
                for (const auto& b : f.boundaries) boundaries_.push_back(b.get_d());
                for (const auto& row : f.probabilities) {
                    probabilities_.emplace_back();
                    for (const auto& p : row) probabilities_.back().push_back(p.get_d());
                }
            } else if constexpr (std::is_same_v<T, DegreeModelFn>) {
                need_pair(f.relation, "degree_model");
                const auto& c = f.cdf;
                if (c.size() < 2 || c.front().first != 0 || c.back().first != 1 || c.back().second != 1) {
                    throw InvalidArgument("degree cdf must run from x = 0 to x = 1 and end at 1");
                }
                for (std::size_t i = 0; i < c.size(); ++i) {
                    if (c[i].second < 0 || c[i].second > 1) throw InvalidArgument("degree cdf values must lie in [0,1]");
                    if (i > 0 && (c[i].first < c[i - 1].first || c[i].second < c[i - 1].second)) {
                        throw InvalidArgument("degree cdf must be nondecreasing");
                    }
                }
                cdf_ = to_doubles(c);
            } else {
                if (f.rules.empty() || !f.rules.back().guard.empty()) {
                    throw InvalidArgument("rule table must end with an unconditional rule");
                }
                const std::size_t width = std::size_t{1} << level;
                for (const auto& rule : f.rules) {
                    check_cell(rule.output);
                    guards_.emplace_back();
                    for (const auto& cmp : rule.guard) {
                        for (const auto* side : {&cmp.lhs, &cmp.rhs}) {
                            if (std::holds_alternative<std::size_t>(*side) && std::get<std::size_t>(*side) >= width) {
                                throw InvalidArgument("rule guard refers to a latent component beyond level " + std::to_string(level));
                            }
                        }
                        CompiledComparison cc;
                        cc.op = cmp.op;
                        if (std::holds_alternative<std::size_t>(cmp.lhs)) cc.lhs = static_cast<int>(std::get<std::size_t>(cmp.lhs));
                        else cc.lhs_value = std::get<Rational>(cmp.lhs).get_d();
                        if (std::holds_alternative<std::size_t>(cmp.rhs)) cc.rhs = static_cast<int>(std::get<std::size_t>(cmp.rhs));
                        else cc.rhs_value = std::get<Rational>(cmp.rhs).get_d();
                        guards_.back().push_back(cc);
                    }
                }
            }
        },
        spec_);
}

std::string CellFunction::kind() const {
    static const char* names[] = {"constant", "erdos_renyi", "block_model", "degree_model", "rules"};
    return names[spec_.index()];
}

bool CellFunction::reads_global() const {
    if (const auto* t = std::get_if<RuleTableFn>(&spec_)) {
        for (const auto& rule : t->rules) {
            for (const auto& cmp : rule.guard) {
                for (const auto* side : {&cmp.lhs, &cmp.rhs}) {
                    if (std::holds_alternative<std::size_t>(*side) && std::get<std::size_t>(*side) == 0) return true;
                }
            }
        }
    }
    return false;
}

ArityCell CellFunction::evaluate(std::span<const double> u) const {
    if (u.size() != (std::size_t{1} << level_)) throw InvalidArgument("latent vector has the wrong length");
    auto pair = [&](bool forward, bool backward) -> const ArityCell& {
        return pair_cells_[static_cast<std::size_t>(forward) | (static_cast<std::size_t>(backward) << 1)];
    };
    switch (spec_.index()) {
        case 0: return std::get<ConstantFn>(spec_).cell;
        case 1: {
            const bool on = u[3] < p_;
            return pair(on && u[1] < u[2], on && u[2] < u[1]);
        }
        case 2: {
            auto block = [&](double x) {
                return static_cast<std::size_t>(std::upper_bound(boundaries_.begin(), boundaries_.end(), x) - boundaries_.begin());
            };
            const bool on = u[3] < probabilities_[block(u[1])][block(u[2])];
            return pair(on, on);
        }
        case 3: {
            const double threshold = piecewise(cdf_, u[3]);
            return pair(u[1] >= threshold, u[2] >= threshold);
        }
        default: {
            const auto& rules = std::get<RuleTableFn>(spec_).rules;
            for (std::size_t r = 0; r < rules.size(); ++r) {
                bool fire = true;
                for (const auto& c : guards_[r]) {
                    const double a = c.lhs >= 0 ? u[static_cast<std::size_t>(c.lhs)] : c.lhs_value;
                    const double b = c.rhs >= 0 ? u[static_cast<std::size_t>(c.rhs)] : c.rhs_value;
                    if (!compare(a, c.op, b)) {
                        fire = false;
                        break;
                    }
                }
                if (fire) return rules[r].output;
            }
            return empty_;
        }
    }
}

// --- equivariance -------------------------------------------------------------------

EquivarianceReport check_equivariance(const CellFunction& f, std::size_t trials, std::uint64_t seed) {
    const int m = f.level();
    const std::size_t width = std::size_t{1} << m;
    std::vector<Permutation> perms;
    for_each_permutation(m, [&](const Permutation& p) { perms.push_back(p); });

    EquivarianceReport report;
    report.permutations = perms.size();
    auto probe = [&](const std::vector<double>& u) {
        const ArityCell fu = f.evaluate(u);
        for (const auto& pi : perms) {
            const ArityCell lhs = f.evaluate(permute_latent(u, pi));
            const ArityCell rhs = permute_cell(fu, pi);
            if (lhs == rhs) continue;
            ++report.failures;
            if (!report.first_failure) report.first_failure = EquivarianceFailure{u, pi, lhs, rhs};
        }
    };

    PhiloxEngine rng(seed);
    std::vector<double> u(width);
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& x : u) x = rng.uniform();
        probe(u);
        ++report.trials;
    }
    if (std::holds_alternative<RuleTableFn>(f.spec()) && m <= 3) {
        // Every relative order of the components, away from rational guard constants.
        std::vector<int> rank(width);
        for (std::size_t i = 0; i < width; ++i) rank[i] = static_cast<int>(i);
        const double jitter = 1e-9 * std::sqrt(2.0);
        do {
            for (std::size_t i = 0; i < width; ++i) u[i] = (rank[i] + 1.0) / static_cast<double>(width + 1) + jitter;
            probe(u);
            ++report.trials;
        } while (std::next_permutation(rank.begin(), rank.end()));
    }
    return report;
}

NotEquivariant::NotEquivariant(int level, EquivarianceFailure failure)
    : InvalidArgument("f^" + std::to_string(level) + " is not permutation equivariant"),
      level_(level), failure_(std::move(failure)) {}

// --- models ----------------------------------------------------------------------------

AhkModel AhkModel::create(SignaturePtr signature, bool global_latent, std::vector<CellFunction> functions) {
    return create(std::move(signature), global_latent, std::move(functions), Options{});
}

AhkModel AhkModel::create(SignaturePtr signature, bool global_latent, std::vector<CellFunction> functions,
                          const Options& options) {
    if (!signature) throw InvalidArgument("model needs a signature");
    const int arity = signature->arity();
    std::vector<std::optional<CellFunction>> slots(static_cast<std::size_t>(arity));
    for (auto& f : functions) {
        if (!(*f.signature() == *signature)) throw InvalidArgument("function signature differs from the model signature");
        auto& slot = slots[static_cast<std::size_t>(f.level() - 1)];
        if (slot) throw InvalidArgument("two functions for level " + std::to_string(f.level()));
        slot = std::move(f);
    }
    AhkModel model;
    model.signature_ = signature;
    model.global_ = global_latent;
    for (int m = 1; m <= arity; ++m) {
        auto& slot = slots[static_cast<std::size_t>(m - 1)];
        if (!slot) slot = CellFunction(signature, m, ConstantFn{ArityCell(signature, m)});
        if (!global_latent && slot->reads_global()) {
            throw InvalidArgument("f^" + std::to_string(m) + " reads u0 but the model has no global latent");
        }
        if (options.validate) {
            auto report = check_equivariance(*slot, options.validation_trials, derive_seed(options.validation_seed, static_cast<std::uint64_t>(m)));
            if (!report.passed()) throw NotEquivariant(m, *report.first_failure);
        }
        model.functions_.push_back(std::move(*slot));
    }
    return model;
}

std::vector<double> AhkModel::latent_vector(const LatentField& field, std::span<const int> index) const {
    const int m = static_cast<int>(index.size());
    const auto& subsets = latent_subsets(m);
    std::vector<double> u(subsets.size());
    Tuple members;
    for (std::size_t p = 0; p < subsets.size(); ++p) {
        if (subsets[p] == 0) {
            u[p] = global_ ? field.uniform({}) : anchor_.value_or(0.5);
            continue;
        }
        members.clear();
        for (std::uint32_t x = subsets[p]; x; x &= x - 1) members.push_back(index[static_cast<std::size_t>(std::countr_zero(x))]);
        u[p] = field.uniform(as_span(members));
    }
    return u;
}

ArityCell AhkModel::cell(const LatentField& field, std::span<const int> index) const {
    return function(static_cast<int>(index.size())).evaluate(latent_vector(field, index));
}

World AhkModel::sample(int n, std::uint64_t seed) const {
    if (n < 1) throw InvalidArgument("domain size must be positive");
    const LatentField field(seed);
    World world(signature_, n);
    const int arity = std::min(signature_->arity(), n);
    Tuple mapped;
    for (int m = 1; m <= arity; ++m) {
        const CellCatalog catalog(*signature_, m);
        detail::for_each_combination(n, m, [&](const Tuple& index) {
            const ArityCell c = cell(field, as_span(index));
            c.bits().for_each_set([&](std::size_t j) {
                const auto& e = catalog.entries()[j];
                mapped = e.tuple;
                for (auto& x : mapped) x = index[static_cast<std::size_t>(x)];
                world.set(e.relation, mapped);
            });
        });
    }
    return world;
}

World sample_world(const AhkModel& model, int n, std::uint64_t seed) { return model.sample(n, seed); }

UsesGlobalLatent::UsesGlobalLatent(int level, std::vector<double> a, std::vector<double> b)
    : InvalidArgument("f^" + std::to_string(level) + " depends on the global latent u0"),
      level_(level), a_(std::move(a)), b_(std::move(b)) {}

AhkModel strip_global_latent(const AhkModel& model, std::size_t trials, std::uint64_t seed) {
    AhkModel out = model;
    if (!model.global_) return out;
    PhiloxEngine rng(seed);
    for (const auto& f : model.functions_) {
        std::vector<double> u(std::size_t{1} << f.level());
        for (std::size_t t = 0; t < trials; ++t) {
            for (auto& x : u) x = rng.uniform();
            const ArityCell base = f.evaluate(u);
            for (int alt = 0; alt < 4; ++alt) {
                std::vector<double> v = u;
                v[0] = rng.uniform();
                if (!(f.evaluate(v) == base)) throw UsesGlobalLatent(f.level(), u, v);
            }
        }
    }
    out.global_ = false;
    out.anchor_ = 0.5;
    return out;
}

// --- built-in models -------------------------------------------------------------

namespace {

AhkModel graph_model(FunctionSpec level2, bool global = false) {
    auto sig = graph_signature();
    std::vector<CellFunction> fs;
    fs.emplace_back(sig, 1, ConstantFn{ArityCell(sig, 1)});
    fs.emplace_back(sig, 2, std::move(level2));
    return AhkModel::create(sig, global, std::move(fs));
}

}  // namespace

AhkModel erdos_renyi_model(const Rational& p) { return graph_model(ErdosRenyiFn{p, 0}); }

AhkModel bipartite_model() { return block_model({ratio(1, 2)}, {{0, 1}, {1, 0}}); }

AhkModel block_model(std::vector<Rational> boundaries, std::vector<std::vector<Rational>> probabilities) {
    return graph_model(BlockModelFn{std::move(boundaries), std::move(probabilities), 0});
}

AhkModel degree_model(std::vector<std::pair<Rational, Rational>> cdf) { return graph_model(DegreeModelFn{std::move(cdf), 0}); }

AhkModel constant_empty_model() { return graph_model(ConstantFn{ArityCell(graph_signature(), 2)}); }

AhkModel empty_complete_mixture_model() {
    auto sig = graph_signature();
    ArityCell both(sig, 2);
    const int fwd[2] = {0, 1}, bwd[2] = {1, 0};
    both.set(0, fwd);
    both.set(0, bwd);
    RuleTableFn table;
    table.rules.push_back({{Comparison{std::size_t{0}, ratio(1, 2), CompareOp::Less}}, both});
    table.rules.push_back({{}, ArityCell(sig, 2)});
    return graph_model(std::move(table), true);
}

std::vector<std::pair<Rational, Rational>> degree_cdf(const std::vector<Rational>& law) {
    if (law.size() < 2) throw InvalidArgument("degree law needs at least two degree values");
    Rational total = 0;
    for (const auto& p : law) {
        if (p < 0) throw InvalidArgument("negative degree probability");
        total += p;
    }
    if (total != 1) throw InvalidArgument("degree law does not sum to 1");
    const long top = static_cast<long>(law.size()) - 1;
    std::vector<std::pair<Rational, Rational>> pts{{0, 0}};
    Rational cum = 0;
    for (long d = 0; d <= top; ++d) {
        if (law[static_cast<std::size_t>(d)] == 0) continue;
        const Rational x = ratio(d, top);
        pts.emplace_back(x, cum);
        cum += law[static_cast<std::size_t>(d)];
        pts.emplace_back(x, cum);
    }
    if (pts.back().first != 1) pts.emplace_back(1, 1);
    return pts;
}

}  // namespace worldlet
