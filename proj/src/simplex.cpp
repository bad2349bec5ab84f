#include "worldlet/simplex.hpp"

#include "worldlet/errors.hpp"

namespace worldlet {

FeasibilityResult solve_feasibility(const std::vector<std::vector<Rational>>& rows, const std::vector<Rational>& rhs) {
    const std::size_t m = rows.size();
    if (rhs.size() != m) throw InvalidArgument("right-hand side length does not match row count");
    const std::size_t n = m == 0 ? 0 : rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != n) throw InvalidArgument("constraint rows have different lengths");
    }

    // Tableau [A | I | b] with rows flipped so that b >= 0; artificials start basic.
    const std::size_t width = n + m;
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(width + 1));
    std::vector<int> sign(m, 1);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        sign[i] = rhs[i] < 0 ? -1 : 1;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign[i] < 0 ? Rational(-rows[i][j]) : rows[i][j];
        t[i][n + i] = 1;
        t[i][width] = sign[i] < 0 ? Rational(-rhs[i]) : rhs[i];
        basis[i] = n + i;
    }
    // Reduced costs for minimizing the sum of artificials; obj[width] is -(objective).
    std::vector<Rational> obj(width + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) obj[j] -= t[i][j];
        obj[width] -= t[i][width];
    }

    FeasibilityResult result;
    while (true) {
        std::size_t enter = width;
        for (std::size_t j = 0; j < width; ++j) {
            if (sgn(obj[j]) < 0) {
                enter = j;
                break;
            }
        }
        if (enter == width) break;

        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (sgn(t[i][enter]) <= 0) continue;
            Rational ratio = t[i][width] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        // Phase one is bounded below by zero, so some row always qualifies.
        if (leave == m) throw Error("simplex: unbounded phase-one problem");

        const Rational pivot = t[leave][enter];
        for (auto& v : t[leave]) {
            if (sgn(v) != 0) v /= pivot;
        }
        auto eliminate = [&](std::vector<Rational>& row) {
            if (sgn(row[enter]) == 0) return;
            const Rational factor = row[enter];
            for (std::size_t j = 0; j <= width; ++j) {
                if (sgn(t[leave][j]) != 0) row[j] -= factor * t[leave][j];
            }
        };
        for (std::size_t i = 0; i < m; ++i) {
            if (i != leave) eliminate(t[i]);
        }
        eliminate(obj);
        basis[leave] = enter;
        ++result.pivots;
    }

    result.feasible = sgn(obj[width]) == 0;
    if (result.feasible) {
        result.x.assign(n, Rational(0));
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) result.x[basis[i]] = t[i][width];
        }
    } else {
        // Dual values: reduced cost of artificial i is 1 - y_i.
        result.farkas.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            Rational y = 1 - obj[n + i];
            result.farkas[i] = sign[i] < 0 ? Rational(-y) : y;
        }
    }
    return result;
}

}  // namespace worldlet
