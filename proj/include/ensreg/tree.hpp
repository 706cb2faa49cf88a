#pragma once

#include "ensreg/matrix.hpp"
#include "ensreg/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ensreg {

struct TreeParams {
    std::size_t max_depth = 0; ///< 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0; ///< candidates per split; 0 = all columns
};

/// CART regression tree split on variance reduction. Equal-gain candidates
/// resolve to the lowest feature index, then the lowest threshold.
class DecisionTree {
public:
    /// Grows a tree on the given rows of (x, y). Rows may repeat (bootstrap).
    static DecisionTree fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                            const TreeParams& params, Rng& rng);

    double predict(std::span<const double> row) const;

    std::size_t depth() const noexcept { return depth_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::vector<double> leaf_values() const;

private:
    struct Node {
        std::int32_t feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    struct Builder;

    std::vector<Node> nodes_;
    std::size_t depth_ = 0;
};

} // namespace ensreg
