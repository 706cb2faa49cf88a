#pragma once

#include "ensreg/matrix.hpp"

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

namespace ensreg {

/// Indices of the k rows of `points` closest to `query` in Euclidean
/// distance, nearest first. Equal distances resolve to the lower row index.
inline std::vector<std::size_t> nearest_rows(const Matrix& points, std::span<const double> query, std::size_t k)
{
    k = std::min(k, points.rows());
    std::vector<std::pair<double, std::size_t>> dist(points.rows());
    for (std::size_t r = 0; r < points.rows(); ++r) {
        const auto p = points.row(r);
        double d2 = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double d = p[j] - query[j];
            d2 += d * d;
        }
        dist[r] = {d2, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = dist[i].second;
    return out;
}

} // namespace ensreg
