#include "ensreg/ensemble.hpp"
#include "ensreg/error.hpp"
#include "ensreg/parallel.hpp"
#include "ensreg/rng.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace ensreg {

namespace {

std::vector<LearnerSpec> generate_pool(const std::vector<LearnerSpec>& specs, const EnsembleConfig& config)
{
    auto pool = config.prune ? config.prune(specs) : specs;
    if (pool.empty())
        throw Error(ErrorCode::EmptyPool, "ensemble needs at least one learner spec");
    for (const auto& spec : pool)
        validate(spec);
    return pool;
}

std::vector<TrainedLearner> fit_all(const std::vector<LearnerSpec>& specs, const Dataset& train,
                                    std::size_t threads)
{
    std::vector<std::optional<TrainedLearner>> slots(specs.size());
    parallel_for(specs.size(), threads, [&](std::size_t i) { slots[i].emplace(fit(specs[i], train)); });
    std::vector<TrainedLearner> out;
    out.reserve(slots.size());
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

MemberPredictions predict_all(const std::vector<TrainedLearner>& pool, const Matrix& x)
{
    MemberPredictions out;
    out.reserve(pool.size());
    for (const auto& member : pool)
        out.push_back(member.predict(x));
    return out;
}

// Targets and member predictions the error-based strategies are scored on.
struct Evaluation {
    std::vector<double> targets;
    MemberPredictions predictions;
    Matrix features;
};

Evaluation evaluation_set(const std::vector<LearnerSpec>& specs, const Dataset& train,
                          const std::vector<TrainedLearner>& full_pool, const EnsembleConfig& config)
{
    if (config.weight_source == WeightSource::Train)
        return {train.targets(), predict_all(full_pool, train.features()), train.features()};

    const auto split = train_test_split(train, config.holdout_fraction, config.seed);
    const auto inner_pool = fit_all(specs, split.train, config.threads);
    return {split.test.targets(), predict_all(inner_pool, split.test.features()), split.test.features()};
}

void check_dimension(std::size_t expected, const Matrix& x)
{
    if (x.cols() != expected)
        throw Error(ErrorCode::DimensionMismatch, "ensemble expects " + std::to_string(expected) +
                                                      " features, got " + std::to_string(x.cols()));
}

} // namespace

std::string_view to_string(Strategy s) noexcept
{
    switch (s) {
    case Strategy::Uniform: return "uniform";
    case Strategy::Rrmse: return "rrmse";
    case Strategy::Bem: return "bem";
    case Strategy::Gem: return "gem";
    case Strategy::Dwr: return "dwr";
    case Strategy::Bagging: return "bagging";
    }
    return "?";
}

std::string_view to_string(WeightSource s) noexcept { return s == WeightSource::Train ? "train" : "holdout"; }

WeightSource weight_source_from_string(std::string_view name)
{
    if (name == "train")
        return WeightSource::Train;
    if (name == "holdout")
        return WeightSource::Holdout;
    throw Error(ErrorCode::ConfigError, "weight_source must be 'train' or 'holdout', got '" + std::string(name) + "'");
}

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows)
        r = static_cast<std::size_t>(rng.below(n));
    return rows;
}

MemberPredictions EnsembleModel::member_predictions(const Matrix& x) const
{
    check_dimension(dimension_, x);
    if (strategy_ != Strategy::Bagging)
        return predict_all(pool_, x);
    MemberPredictions out;
    out.reserve(bags_.size());
    for (const auto& bag : bags_)
        out.push_back(bag.learner.predict(x));
    return out;
}

std::vector<WeightVector> EnsembleModel::dwr_query_weights(const Matrix& x) const
{
    if (strategy_ != Strategy::Dwr)
        throw Error(ErrorCode::InvalidArgument, "per-query weights exist only for DWR ensembles");
    check_dimension(dimension_, x);
    std::vector<WeightVector> out;
    out.reserve(x.rows());
    std::vector<double> z(dimension_);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        store_scaling_->apply_row(x.row(r), z);
        out.push_back(dwr_weights(z, *store_, k_nn_));
    }
    return out;
}

std::vector<double> EnsembleModel::predict(const Matrix& x) const
{
    switch (strategy_) {
    case Strategy::Uniform:
    case Strategy::Rrmse:
    case Strategy::Gem: return combine(*weights_, member_predictions(x));
    case Strategy::Bem: return bem_combine(member_predictions(x));
    case Strategy::Bagging: return bem_combine(member_predictions(x));
    case Strategy::Dwr: {
        const auto preds = member_predictions(x);
        const auto weights = dwr_query_weights(x);
        std::vector<double> out(x.rows(), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t i = 0; i < preds.size(); ++i)
                out[r] += weights[r][i] * preds[i][r];
        return out;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unhandled strategy");
}

EnsembleModel fit_voting(const std::vector<LearnerSpec>& specs, const Dataset& train, Strategy strategy,
                         const EnsembleConfig& config)
{
    if (strategy == Strategy::Dwr || strategy == Strategy::Bagging)
        throw Error(ErrorCode::InvalidArgument, "fit_voting takes uniform, rrmse, bem or gem");
    const auto pool_specs = generate_pool(specs, config);

    EnsembleModel model;
    model.strategy_ = strategy;
    model.dimension_ = train.m();
    model.pool_ = fit_all(pool_specs, train, config.threads);

    switch (strategy) {
    case Strategy::Uniform:
    case Strategy::Bem: model.weights_ = uniform_weights(model.pool_.size()); break;
    case Strategy::Rrmse: {
        const auto eval = evaluation_set(pool_specs, train, model.pool_, config);
        model.errors_ = rrmse_error_profile(eval.targets, eval.predictions);
        model.weights_ = rrmse_weights(*model.errors_);
        break;
    }
    case Strategy::Gem: {
        const auto eval = evaluation_set(pool_specs, train, model.pool_, config);
        model.weights_ = gem_weights(MisfitMatrix::from_predictions(eval.targets, eval.predictions));
        break;
    }
    default: break;
    }
    return model;
}

std::vector<double> predict_voting(const EnsembleModel& model, const Matrix& x)
{
    if (!model.static_weights())
        throw Error(ErrorCode::InvalidArgument, "predict_voting needs a static-weight ensemble");
    return model.predict(x);
}

EnsembleModel fit_bagging(const std::vector<LearnerSpec>& specs, const Dataset& train, std::size_t n_bags_per_spec,
                          std::uint64_t seed, const EnsembleConfig& config, const Resampler& resample)
{
    if (n_bags_per_spec == 0)
        throw Error(ErrorCode::InvalidArgument, "n_bags_per_spec must be >= 1");
    const auto pool_specs = generate_pool(specs, config);
    const std::size_t total = pool_specs.size() * n_bags_per_spec;

    std::vector<std::optional<Bag>> slots(total);
    parallel_for(total, config.threads, [&](std::size_t i) {
        const auto& spec = pool_specs[i % pool_specs.size()];
        const std::uint64_t bag_seed = mix_seed(seed, i);
        const auto rows = resample(train.n(), bag_seed);
        slots[i].emplace(Bag{fit(spec, train.subset(rows)), bag_seed});
    });

    EnsembleModel model;
    model.strategy_ = Strategy::Bagging;
    model.dimension_ = train.m();
    model.bags_.reserve(total);
    for (auto& s : slots)
        model.bags_.push_back(std::move(*s));
    return model;
}

std::vector<double> predict_bagging(const EnsembleModel& model, const Matrix& x)
{
    if (model.strategy() != Strategy::Bagging)
        throw Error(ErrorCode::InvalidArgument, "predict_bagging needs a bagging ensemble");
    return model.predict(x);
}

EnsembleModel fit_dwr(const std::vector<LearnerSpec>& specs, const Dataset& train, std::size_t k_nn,
                      const EnsembleConfig& config)
{
    if (k_nn == 0)
        throw Error(ErrorCode::InvalidArgument, "k_nn must be >= 1");
    const auto pool_specs = generate_pool(specs, config);

    EnsembleModel model;
    model.strategy_ = Strategy::Dwr;
    model.dimension_ = train.m();
    model.k_nn_ = k_nn;
    model.pool_ = fit_all(pool_specs, train, config.threads);
    model.store_scaling_ = standardize_fit(train);

    const auto eval = evaluation_set(pool_specs, train, model.pool_, config);
    NeighborStore store{model.store_scaling_->apply(eval.features), {}};
    store.abs_errors.reserve(eval.predictions.size());
    for (const auto& p : eval.predictions) {
        std::vector<double> err(p.size());
        for (std::size_t r = 0; r < p.size(); ++r)
            err[r] = std::abs(eval.targets[r] - p[r]);
        store.abs_errors.push_back(std::move(err));
    }
    model.store_ = std::move(store);
    return model;
}

std::vector<double> predict_dwr(const EnsembleModel& model, const Matrix& x)
{
    if (model.strategy() != Strategy::Dwr)
        throw Error(ErrorCode::InvalidArgument, "predict_dwr needs a DWR ensemble");
    return model.predict(x);
}

} // namespace ensreg
