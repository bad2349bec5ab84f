#pragma once

#include "worldlet/world.hpp"

namespace worldlet::detail {

/// Calls fn(index) for every sorted m-subset of {0,...,n-1} in lexicographic order.
template <class Fn>
void for_each_combination(int n, int m, Fn&& fn) {
    if (m > n || m < 0) return;
    Tuple idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(static_cast<const Tuple&>(idx));
        int i = m - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace worldlet::detail
