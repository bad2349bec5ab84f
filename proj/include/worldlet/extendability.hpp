#pragma once

#include "worldlet/errors.hpp"
#include "worldlet/worldlet_stats.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace worldlet {

/// A target that must be exchangeable was not; carries the offending pair.
class NotExchangeable : public InvalidArgument {
public:
    NotExchangeable(World a, World b);
    const World& first() const noexcept { return a_; }
    const World& second() const noexcept { return b_; }

private:
    World a_, b_;
};

/// One vertex candidate of Δ^(k)_n: the worldlet frequencies of an iso class of Ω^(n).
struct PolytopeColumn {
    IsoClassId id;
    WorldletDistribution frequencies;
};

/// The point set whose convex hull is Δ^(k)_n, one column per iso class.
struct PolytopeInstance {
    SignaturePtr signature;
    int k = 0;
    int n = 0;
    Convention convention = Convention::Directed;
    std::vector<PolytopeColumn> columns;
};

PolytopeInstance build_polytope(SignaturePtr signature, int k, int n, Convention convention, const Budget& budget = {});

struct MembershipCertificate {
    bool feasible = false;
    /// Feasible: mixture weights over iso classes (positive entries only), summing to 1.
    std::vector<std::pair<IsoClassId, Rational>> weights;
    /// Infeasible: coefficients c over worldlets with ⟨c,target⟩ > max over columns ⟨c,column⟩.
    std::map<World, Rational> functional;
    Rational target_value;
    Rational threshold;
    /// Re-substitution (feasible) or separation (infeasible) checked exactly.
    bool verified = false;
    std::size_t pivots = 0;
};

/// Exact LP decision of target ∈ conv(columns). Does not check exchangeability.
MembershipCertificate check_membership(const PolytopeInstance& polytope, const WorldletDistribution& target);

struct ExtendabilityOptions {
    /// Replace a non-exchangeable target by its iso average instead of rejecting it.
    bool iso_average_first = false;
    Budget budget;
};

/// Decides Q^(k) ∈ Δ^(k)_n. Throws NotExchangeable for non-exchangeable input
/// (unless iso averaging is requested) and InvalidArgument for k > n.
MembershipCertificate check_extendable(const WorldletDistribution& q, int n, const ExtendabilityOptions& options = {});

/// Re-verifies a certificate against a polytope and target.
bool verify_certificate(const PolytopeInstance& polytope, const WorldletDistribution& target,
                        const MembershipCertificate& certificate);

/// One (n, ω) pair of the modularity check on a distribution's own marginals.
struct ModularityEntry {
    int n = 0;
    World world;
    /// Q↓[n](ω).
    Rational p;
    /// Q↓[n+1](O), O = {ω′ : ω′↓[n] = ω′↓(1,...,n−1,n+1) = ω}.
    Rational q;
    /// q = 0 although p > 0: Q has no AHK representation.
    bool violation = false;
    /// q < p²: also impossible for an AHK model.
    bool below_bound = false;
};

struct ModularityReport {
    std::vector<ModularityEntry> entries;
    std::size_t violations() const;
    std::size_t below_bound() const;
};

/// Requires an exchangeable Q over Ω^(m), m >= 2.
ModularityReport modularity_check(const WorldletDistribution& q, const Budget& budget = {});

/// A coordinate of the two-dimensional projection of worldlet frequency vectors.
///
/// Accepted names: "empty", "single_edge", "two_edge", "triangle" (worlds with
/// 0..3 edges), "edges:<j>", "class:<label>" for the iso class with that label,
/// and "edge_density" (expected fraction of off-diagonal binary tuples present).
/// Edges count binary tuples, with an undirected pair counted once.
class ScatterAxis {
public:
    static ScatterAxis parse(const std::string& spec);
    /// ("empty", "edge_density"): separates every class at k = n = 3.
    static std::pair<ScatterAxis, ScatterAxis> default_axes();
    const std::string& spec() const noexcept { return spec_; }
    Rational value(const WorldletDistribution& frequencies, const Budget& budget = {}) const;

private:
    std::string spec_;
    int edges_ = -1;
    bool density_ = false;
    std::string class_label_;
};

struct ScatterRow {
    IsoClassId id;
    Rational x, y;
    WorldletDistribution frequencies;
};

struct ScatterData {
    std::string x_axis, y_axis;
    /// Column order for the full frequency vectors.
    std::vector<World> worldlets;
    std::vector<ScatterRow> rows;
};

ScatterData scatter_data(const PolytopeInstance& polytope, const ScatterAxis& x, const ScatterAxis& y,
                         const Budget& budget = {});

}  // namespace worldlet
