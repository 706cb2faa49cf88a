#pragma once

#include "ensreg/dataset.hpp"
#include "ensreg/learners.hpp"
#include "ensreg/weighting.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace ensreg {

enum class Strategy { Uniform, Rrmse, Bem, Gem, Dwr, Bagging };

std::string_view to_string(Strategy s) noexcept;

/// Which predictions feed the RRMSE, GEM and DWR error estimates.
///   Train:   members fitted on the full training set, scored on it.
///   Holdout: members refitted on an inner split of the training set, scored
///            on the held-out remainder. The returned pool is always fitted
///            on the full training set.
enum class WeightSource { Train, Holdout };

std::string_view to_string(WeightSource s) noexcept;
WeightSource weight_source_from_string(std::string_view name);

/// Pruning stage between pool generation and integration. Empty = keep all.
using PruneStage = std::function<std::vector<LearnerSpec>(const std::vector<LearnerSpec>&)>;

/// Maps (n, bag seed) to the row indices of one bag.
using Resampler = std::function<std::vector<std::size_t>(std::size_t n, std::uint64_t seed)>;

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed);

struct EnsembleConfig {
    WeightSource weight_source = WeightSource::Holdout;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0; ///< drives the holdout split
    std::size_t k_nn = 10;
    std::size_t threads = 0; ///< pool training workers; 0 = hardware concurrency
    PruneStage prune;
};

struct Bag {
    TrainedLearner learner;
    std::uint64_t seed;
};

/// A fitted ensemble. Only the fields the strategy needs are populated:
/// voting strategies carry static weights, DWR a neighbor store, bagging
/// its bags instead of a pool.
class EnsembleModel {
public:
    Strategy strategy() const noexcept { return strategy_; }
    const std::vector<TrainedLearner>& pool() const noexcept { return pool_; }
    const std::optional<WeightVector>& static_weights() const noexcept { return weights_; }
    const std::optional<ErrorProfile>& error_profile() const noexcept { return errors_; }
    const std::optional<NeighborStore>& neighbor_store() const noexcept { return store_; }
    const std::vector<Bag>& bags() const noexcept { return bags_; }
    std::size_t k_nn() const noexcept { return k_nn_; }

    std::size_t member_count() const noexcept { return strategy_ == Strategy::Bagging ? bags_.size() : pool_.size(); }

    /// member_predictions(x)[i][row]
    MemberPredictions member_predictions(const Matrix& x) const;

    /// Per-row DWR weights for the given raw-feature rows.
    std::vector<WeightVector> dwr_query_weights(const Matrix& x) const;

    std::vector<double> predict(const Matrix& x) const;

private:
    friend EnsembleModel fit_voting(const std::vector<LearnerSpec>&, const Dataset&, Strategy,
                                    const EnsembleConfig&);
    friend EnsembleModel fit_bagging(const std::vector<LearnerSpec>&, const Dataset&, std::size_t,
                                     std::uint64_t, const EnsembleConfig&, const Resampler&);
    friend EnsembleModel fit_dwr(const std::vector<LearnerSpec>&, const Dataset&, std::size_t,
                                 const EnsembleConfig&);

    Strategy strategy_ = Strategy::Uniform;
    std::size_t dimension_ = 0;
    std::vector<TrainedLearner> pool_;
    std::optional<WeightVector> weights_;
    std::optional<ErrorProfile> errors_;
    std::optional<NeighborStore> store_;
    std::optional<Standardizer> store_scaling_;
    std::size_t k_nn_ = 0;
    std::vector<Bag> bags_;
};

/// Fits every member on all of `train`, then derives static weights:
/// uniform/bem -> 1/k, rrmse -> inverse Algorithm-1 RRMSE, gem -> misfit
/// covariance.
EnsembleModel fit_voting(const std::vector<LearnerSpec>& specs, const Dataset& train, Strategy strategy,
                         const EnsembleConfig& config = {});

std::vector<double> predict_voting(const EnsembleModel& model, const Matrix& x);

/// n_bags_per_spec rounds, one bag per spec per round; bag seeds derive from
/// `seed`. Prediction is the unweighted mean over all members.
EnsembleModel fit_bagging(const std::vector<LearnerSpec>& specs, const Dataset& train, std::size_t n_bags_per_spec,
                          std::uint64_t seed, const EnsembleConfig& config = {},
                          const Resampler& resample = bootstrap_rows);

std::vector<double> predict_bagging(const EnsembleModel& model, const Matrix& x);

EnsembleModel fit_dwr(const std::vector<LearnerSpec>& specs, const Dataset& train, std::size_t k_nn,
                      const EnsembleConfig& config = {});

std::vector<double> predict_dwr(const EnsembleModel& model, const Matrix& x);

} // namespace ensreg
