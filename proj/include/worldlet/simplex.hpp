#pragma once

#include "worldlet/rational.hpp"

#include <vector>

namespace worldlet {

/// Outcome of deciding {x >= 0 : A x = b}.
struct FeasibilityResult {
    bool feasible = false;
    /// A solution when feasible (one entry per column).
    std::vector<Rational> x;
    /// When infeasible: y with yᵀA <= 0 componentwise and yᵀb > 0 (one entry per row).
    std::vector<Rational> farkas;
    std::size_t pivots = 0;
};

/// Exact phase-one simplex with Bland's rule. `rows` is A in row-major form.
FeasibilityResult solve_feasibility(const std::vector<std::vector<Rational>>& rows, const std::vector<Rational>& rhs);

}  // namespace worldlet
