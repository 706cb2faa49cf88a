#pragma once

#include "ensreg/dataset.hpp"
#include "ensreg/matrix.hpp"
#include "ensreg/tree.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ensreg {

enum class LearnerKind { LR, KNN, SGD, RF };

std::string_view to_string(LearnerKind kind) noexcept;
LearnerKind learner_kind_from_string(std::string_view name);

/// Base learner configuration. Hyperparameters left out take their defaults:
///
///   LR   fallback=1 (ridge on rank deficiency; 0 raises SingularSystem)
///   KNN  k=5
///   SGD  learning_rate=1e-3, power_t=0.25, epochs=1000, alpha=1e-4
///   RF   n_trees=100, max_depth=0 (unlimited), min_samples_split=2,
///        max_features=0 (all columns)
struct LearnerSpec {
    LearnerKind kind = LearnerKind::LR;
    std::map<std::string, double> hyperparameters;
    std::uint64_t seed = 0;

    double get(const std::string& key, double fallback) const;

    bool operator==(const LearnerSpec&) const = default;
};

/// Throws InvalidHyperparameter for unknown keys or out-of-range values.
void validate(const LearnerSpec& spec);

/// LR, KNN, SGD, RF with default hyperparameters.
std::vector<LearnerSpec> default_pool(std::uint64_t seed = 0);

struct LinearModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
};

struct KnnModel {
    Matrix points; ///< standardized training features
    std::vector<double> targets;
    std::size_t k = 5;
};

struct ForestModel {
    std::vector<DecisionTree> trees;

    std::vector<double> tree_predictions(std::span<const double> row) const;
};

/// A fitted base learner. Immutable; predict is reentrant.
class TrainedLearner {
public:
    using State = std::variant<LinearModel, KnnModel, ForestModel>;

    TrainedLearner(LearnerSpec spec, std::size_t dimension, State state,
                   std::optional<Standardizer> training_standardizer = std::nullopt);

    const LearnerSpec& spec() const noexcept { return spec_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const State& state() const noexcept { return state_; }
    const std::optional<Standardizer>& training_standardizer() const noexcept { return scaling_; }

    double predict_row(std::span<const double> row) const;
    std::vector<double> predict(const Matrix& x) const;

private:
    LearnerSpec spec_;
    std::size_t dimension_;
    State state_;
    std::optional<Standardizer> scaling_;
};

TrainedLearner fit(const LearnerSpec& spec, const Dataset& train);

inline std::vector<double> predict(const TrainedLearner& model, const Matrix& x) { return model.predict(x); }

} // namespace ensreg
