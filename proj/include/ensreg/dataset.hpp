#pragma once

#include "ensreg/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ensreg {

/// Feature matrix plus target vector. Immutable once constructed; the
/// constructor enforces shape and finiteness.
class Dataset {
public:
    Dataset(Matrix features, std::vector<double> targets, std::vector<std::string> feature_names,
            std::string target_name);

    /// Names default to x0..x{m-1} and y.
    Dataset(Matrix features, std::vector<double> targets);

    std::size_t n() const noexcept { return targets_.size(); }
    std::size_t m() const noexcept { return features_.cols(); }

    const Matrix& features() const noexcept { return features_; }
    const std::vector<double>& targets() const noexcept { return targets_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::string& target_name() const noexcept { return target_name_; }

    Dataset subset(std::span<const std::size_t> rows) const;

    bool operator==(const Dataset&) const = default;

private:
    void validate() const;

    Matrix features_;
    std::vector<double> targets_;
    std::vector<std::string> feature_names_;
    std::string target_name_;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::uint64_t seed;
    double test_fraction;
};

/// Per-column z-scoring with population standard deviation. Zero-variance
/// columns keep std_dev = 1 so they map to all zeros.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> std_devs;

    std::size_t dimension() const noexcept { return means.size(); }
    void apply_row(std::span<const double> in, std::span<double> out) const;
    Matrix apply(const Matrix& x) const;

    bool operator==(const Standardizer&) const = default;
};

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column);

/// Writes features then the target as the last column, 17 significant digits.
void write_csv(const Dataset& d, const std::filesystem::path& path);

SplitPair train_test_split(const Dataset& d, double test_fraction, std::uint64_t seed);

/// Row partition used by train_test_split; first = train rows, second = test rows.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double test_fraction, std::uint64_t seed);

Standardizer standardize_fit(const Matrix& x);
Standardizer standardize_fit(const Dataset& d);
Dataset standardize_apply(const Standardizer& s, const Dataset& d);

/// Synthetic generators: "linear", "friedman1", "piecewise".
Dataset synth_generate(const std::string& kind, std::size_t n, std::size_t m, double noise,
                       std::uint64_t seed);

/// Ground truth of the "linear" generator: weight j is 1 + 0.5 j, intercept 2.
struct LinearTruth {
    std::vector<double> weights;
    double intercept;
};
LinearTruth synth_linear_truth(std::size_t m);

/// Closed-form target bounds for "piecewise" (noise is uniform in [-noise, noise]).
std::pair<double, double> synth_piecewise_range(std::size_t m, double noise);

} // namespace ensreg
