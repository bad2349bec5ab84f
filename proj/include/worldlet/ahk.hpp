#pragma once

#include "worldlet/errors.hpp"
#include "worldlet/latent.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace worldlet {

// --- latent vectors ------------------------------------------------------------

/// Component order of 𝐔_𝐢 for |𝐢| = m: subsets of [m] by size, then
/// lexicographically (∅, {1}, ..., {m}, {1,2}, ...). Subsets are bit masks.
const std::vector<std::uint32_t>& latent_subsets(int m);
/// "u0" for ∅, otherwise the 1-based members concatenated ("u1", "u12").
std::string latent_component_name(std::uint32_t mask);
/// Position of a named component for level m, or nullopt.
std::optional<std::size_t> latent_component_position(int m, const std::string& name);

/// πu: the component of subset s moves to subset π(s).
std::vector<double> permute_latent(std::span<const double> u, const Permutation& permutation);

// --- cell functions --------------------------------------------------------------

struct ConstantFn {
    ArityCell cell;
};

/// i→j if x_i < x_j and x_ij < p; i←j if x_j < x_i and x_ij < p; no edge otherwise.
struct ErdosRenyiFn {
    Rational p;
    std::size_t relation = 0;
};

/// Block of i = number of boundaries <= U_i. Undirected edge iff U_ij < P[b_i][b_j].
struct BlockModelFn {
    std::vector<Rational> boundaries;
    std::vector<std::vector<Rational>> probabilities;
    std::size_t relation = 0;
};

/// Piecewise-linear cdf F through `points` (x nondecreasing from 0 to 1, y
/// nondecreasing to 1; a repeated x is a jump). i has an out-edge to j iff U_i >= F(U_ij).
struct DegreeModelFn {
    std::vector<std::pair<Rational, Rational>> cdf;
    std::size_t relation = 0;

    double F(double x) const;
    /// inf{δ : F(δ) >= u}.
    double inverse(double u) const;
};

enum class CompareOp { Less, LessEqual, Greater, GreaterEqual };

struct Comparison {
    /// Latent position or rational constant.
    std::variant<std::size_t, Rational> lhs, rhs;
    CompareOp op = CompareOp::Less;
};

struct Rule {
    /// Empty guard always fires.
    std::vector<Comparison> guard;
    ArityCell output;
};

struct RuleTableFn {
    std::vector<Rule> rules;
};

using FunctionSpec = std::variant<ConstantFn, ErdosRenyiFn, BlockModelFn, DegreeModelFn, RuleTableFn>;

/// f^m: latent vectors of length 2^m (in latent_subsets(m) order) to T_m.
class CellFunction {
public:
    /// Validates parameters against the signature; throws InvalidArgument.
    CellFunction(SignaturePtr signature, int level, FunctionSpec spec);

    int level() const noexcept { return level_; }
    const SignaturePtr& signature() const noexcept { return signature_; }
    const FunctionSpec& spec() const noexcept { return spec_; }
    /// "constant", "erdos_renyi", "block_model", "degree_model" or "rules".
    std::string kind() const;
    /// Whether a rule table mentions u0; builtins never read it.
    bool reads_global() const;

    ArityCell evaluate(std::span<const double> latent) const;

private:
    SignaturePtr signature_;
    int level_;
    FunctionSpec spec_;
    // Double-precision copies of the parameters for the sampling hot path.
    struct CompiledComparison {
        int lhs = -1, rhs = -1;  // latent positions, -1 for a constant
        double lhs_value = 0, rhs_value = 0;
        CompareOp op = CompareOp::Less;
    };
    ArityCell empty_;
    std::array<ArityCell, 4> pair_cells_;  // by (i→j) | (j→i) << 1
    double p_ = 0;
    std::vector<double> boundaries_;
    std::vector<std::vector<double>> probabilities_;
    std::vector<std::pair<double, double>> cdf_;
    std::vector<std::vector<CompiledComparison>> guards_;
};

/// The only binary relation, or the one named; throws when ambiguous or missing.
std::size_t binary_relation(const Signature& signature, const std::string& name = "");

// --- equivariance ----------------------------------------------------------------

struct EquivarianceFailure {
    std::vector<double> latent;
    Permutation permutation;
    ArityCell permuted_output;   // f(πu)
    ArityCell expected_output;   // πf(u)
};

struct EquivarianceReport {
    std::size_t trials = 0;
    std::size_t permutations = 0;
    std::size_t failures = 0;
    std::optional<EquivarianceFailure> first_failure;
    bool passed() const noexcept { return failures == 0; }
};

/// Monte Carlo over u, exhaustive over π. Rule tables are additionally probed
/// at every ordering of the components (levels <= 3).
EquivarianceReport check_equivariance(const CellFunction& f, std::size_t trials, std::uint64_t seed);

class NotEquivariant : public InvalidArgument {
public:
    NotEquivariant(int level, EquivarianceFailure failure);
    int level() const noexcept { return level_; }
    const EquivarianceFailure& failure() const noexcept { return failure_; }

private:
    int level_;
    EquivarianceFailure failure_;
};

// --- models ----------------------------------------------------------------------

class AhkModel {
public:
    struct Options {
        std::size_t validation_trials = 256;
        std::uint64_t validation_seed = 0x5EED;
        /// Skip equivariance validation (adversarial fixtures only).
        bool validate = true;
    };

    /// One function per level 1..arity(S); missing levels default to the empty
    /// cell. Throws NotEquivariant, or InvalidArgument when an AHK⁻ model reads u0.
    static AhkModel create(SignaturePtr signature, bool global_latent, std::vector<CellFunction> functions);
    static AhkModel create(SignaturePtr signature, bool global_latent, std::vector<CellFunction> functions,
                           const Options& options);

    const SignaturePtr& signature() const noexcept { return signature_; }
    bool has_global_latent() const noexcept { return global_; }
    /// Value substituted for u0 in an AHK⁻ model obtained by stripping.
    std::optional<double> anchor() const noexcept { return anchor_; }
    const CellFunction& function(int level) const { return functions_.at(static_cast<std::size_t>(level - 1)); }
    const std::vector<CellFunction>& functions() const noexcept { return functions_; }

    std::vector<double> latent_vector(const LatentField& field, std::span<const int> sorted_index) const;
    /// D_𝐢 = f^m(𝐔_𝐢).
    ArityCell cell(const LatentField& field, std::span<const int> sorted_index) const;

    World sample(int n, std::uint64_t seed) const;

    friend AhkModel strip_global_latent(const AhkModel&, std::size_t, std::uint64_t);

private:
    SignaturePtr signature_;
    bool global_ = true;
    std::optional<double> anchor_;
    std::vector<CellFunction> functions_;
};

World sample_world(const AhkModel& model, int n, std::uint64_t seed);

class UsesGlobalLatent : public InvalidArgument {
public:
    UsesGlobalLatent(int level, std::vector<double> a, std::vector<double> b);
    int level() const noexcept { return level_; }
    /// Latent vectors differing only in u0 with different outputs.
    const std::vector<double>& first() const noexcept { return a_; }
    const std::vector<double>& second() const noexcept { return b_; }

private:
    int level_;
    std::vector<double> a_, b_;
};

/// AHK⁻ model f̃^m(x_1,...) = f^m(x*, x_1,...), x* = 1/2. Throws UsesGlobalLatent
/// when some f^m changes with u0 on the sampled latent vectors.
AhkModel strip_global_latent(const AhkModel& model, std::size_t trials = 2000, std::uint64_t seed = 1);

// --- built-in models --------------------------------------------------------------

/// Graph-signature models. f^1 is the constant no-loop cell throughout. All
/// built-ins except the mixture are AHK⁻ (no U_∅).
AhkModel erdos_renyi_model(const Rational& p = ratio(1, 2));
/// U_i < 1/2 and U_j > 1/2 (or the reverse) gives i↔j.
AhkModel bipartite_model();
AhkModel block_model(std::vector<Rational> boundaries, std::vector<std::vector<Rational>> probabilities);
AhkModel degree_model(std::vector<std::pair<Rational, Rational>> cdf);
AhkModel constant_empty_model();
/// U_∅ < 1/2 gives K_n, otherwise E_n: the mixture 1/2 δ_E + 1/2 δ_K.
AhkModel empty_complete_mixture_model();

/// cdf of the normalized out-degree d/(n*-1) for a law f(0..n*-1).
std::vector<std::pair<Rational, Rational>> degree_cdf(const std::vector<Rational>& law);

}  // namespace worldlet
