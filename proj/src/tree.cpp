#include "ensreg/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ensreg {

struct DecisionTree::Builder {
    const Matrix& x;
    std::span<const double> y;
    const TreeParams& params;
    Rng& rng;
    DecisionTree& tree;
    std::vector<std::pair<double, double>> scratch; // (feature value, target)

    struct Split {
        std::int32_t feature = -1;
        double threshold = 0.0;
        double score = -std::numeric_limits<double>::infinity();
    };

    std::vector<std::size_t> candidate_features()
    {
        const std::size_t m = x.cols();
        std::vector<std::size_t> features(m);
        std::iota(features.begin(), features.end(), std::size_t{0});
        const std::size_t want = params.max_features == 0 ? m : std::min(params.max_features, m);
        if (want < m) {
            for (std::size_t i = 0; i < want; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.below(m - i));
                std::swap(features[i], features[j]);
            }
            features.resize(want);
            std::sort(features.begin(), features.end());
        }
        return features;
    }

    Split best_split(std::span<const std::size_t> rows)
    {
        Split best;
        const double n = static_cast<double>(rows.size());
        for (std::size_t f : candidate_features()) {
            scratch.clear();
            double total = 0.0;
            for (std::size_t r : rows) {
                scratch.emplace_back(x(r, f), y[r]);
                total += y[r];
            }
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                left_sum += scratch[i].second;
                if (!(scratch[i].first < scratch[i + 1].first))
                    continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                const double right_sum = total - left_sum;
                // Maximizing this is equivalent to minimizing child SSE.
                const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
                if (score > best.score) {
                    double threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
                    if (!(threshold < scratch[i + 1].first))
                        threshold = scratch[i].first;
                    best = {static_cast<std::int32_t>(f), threshold, score};
                }
            }
        }
        return best;
    }

    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth)
    {
        const auto id = static_cast<std::int32_t>(tree.nodes_.size());
        tree.nodes_.emplace_back();
        tree.depth_ = std::max(tree.depth_, depth);

        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r : rows) {
            sum += y[r];
            lo = std::min(lo, y[r]);
            hi = std::max(hi, y[r]);
        }
        // Mean of reaching targets, clamped so rounding can't leave [lo, hi].
        tree.nodes_[id].value = std::clamp(sum / static_cast<double>(rows.size()), lo, hi);

        const bool depth_exhausted = params.max_depth != 0 && depth >= params.max_depth;
        if (rows.size() < std::max<std::size_t>(params.min_samples_split, 2) || depth_exhausted || lo == hi)
            return id;

        const Split split = best_split(rows);
        if (split.feature < 0)
            return id;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const auto l = grow(left, depth + 1);
        const auto r = grow(right, depth + 1);
        auto& node = tree.nodes_[id];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }
};

DecisionTree DecisionTree::fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                               const TreeParams& params, Rng& rng)
{
    DecisionTree tree;
    if (rows.empty())
        return tree;
    Builder builder{x, y, params, rng, tree, {}};
    std::vector<std::size_t> all(rows.begin(), rows.end());
    builder.grow(all, 0);
    return tree;
}

double DecisionTree::predict(std::span<const double> row) const
{
    std::int32_t i = 0;
    while (nodes_[i].feature >= 0)
        i = row[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left
                                                                                    : nodes_[i].right;
    return nodes_[i].value;
}

std::vector<double> DecisionTree::leaf_values() const
{
    std::vector<double> out;
    for (const auto& node : nodes_)
        if (node.feature < 0)
            out.push_back(node.value);
    return out;
}

} // namespace ensreg
