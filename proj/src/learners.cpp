#include "ensreg/learners.hpp"
#include "ensreg/error.hpp"
#include "ensreg/linalg.hpp"
#include "ensreg/neighbors.hpp"
#include "ensreg/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace ensreg {

namespace {

const std::set<std::string>& allowed_keys(LearnerKind kind)
{
    static const std::set<std::string> lr{"fallback"};
    static const std::set<std::string> knn{"k"};
    static const std::set<std::string> sgd{"learning_rate", "power_t", "epochs", "alpha"};
    static const std::set<std::string> rf{"n_trees", "max_depth", "min_samples_split", "max_features"};
    switch (kind) {
    case LearnerKind::LR: return lr;
    case LearnerKind::KNN: return knn;
    case LearnerKind::SGD: return sgd;
    case LearnerKind::RF: return rf;
    }
    return lr;
}

std::size_t as_count(const LearnerSpec& spec, const std::string& key, double fallback, double min_value)
{
    const double v = spec.get(key, fallback);
    if (!std::isfinite(v) || v != std::floor(v) || v < min_value)
        throw Error(ErrorCode::InvalidHyperparameter,
                    std::string(to_string(spec.kind)) + " " + key + " must be an integer >= " +
                        std::to_string(static_cast<long long>(min_value)));
    return static_cast<std::size_t>(v);
}

double as_positive(const LearnerSpec& spec, const std::string& key, double fallback, bool allow_zero)
{
    const double v = spec.get(key, fallback);
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0))
        throw Error(ErrorCode::InvalidHyperparameter, std::string(to_string(spec.kind)) + " " + key +
                                                          " out of range");
    return v;
}

double mean_of(std::span<const double> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

LinearModel fit_ols(const LearnerSpec& spec, const Dataset& train)
{
    const bool fallback = as_count(spec, "fallback", 1, 0) != 0;
    const std::size_t n = train.n();
    const std::size_t m = train.m();
    const Matrix& x = train.features();

    // Center so the intercept drops out of the solve and is not penalized by
    // the ridge fallback.
    std::vector<double> x_mean(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < m; ++j)
            x_mean[j] += x(r, j);
    for (auto& v : x_mean)
        v /= static_cast<double>(n);
    const double y_mean = mean_of(train.targets());

    Matrix xc(n, m);
    std::vector<double> yc(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j)
            xc(r, j) = x(r, j) - x_mean[j];
        yc[r] = train.targets()[r] - y_mean;
    }

    auto w = linalg::least_squares_qr(xc, yc);
    if (!w) {
        if (!fallback)
            throw Error(ErrorCode::SingularSystem, "LR design matrix is rank deficient");
        Matrix gram(m, m);
        std::vector<double> rhs(m, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t i = 0; i < m; ++i) {
                rhs[i] += xc(r, i) * yc[r];
                for (std::size_t j = 0; j < m; ++j)
                    gram(i, j) += xc(r, i) * xc(r, j);
            }
        double trace = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            trace += gram(i, i);
        const double lambda = 1e-8 * std::max(trace / static_cast<double>(m), 1e-300);
        for (std::size_t i = 0; i < m; ++i)
            gram(i, i) += lambda;
        w = linalg::cholesky_solve(gram, rhs);
        if (!w)
            throw Error(ErrorCode::SingularSystem, "LR ridge fallback failed");
    }

    LinearModel model{*w, y_mean};
    for (std::size_t j = 0; j < m; ++j)
        model.intercept -= model.coefficients[j] * x_mean[j];
    return model;
}

KnnModel fit_knn(const LearnerSpec& spec, const Dataset& train, const Standardizer& scaling)
{
    const std::size_t k = as_count(spec, "k", 5, 1);
    if (k > train.n())
        throw Error(ErrorCode::InvalidHyperparameter,
                    "KNN k=" + std::to_string(k) + " exceeds training rows " + std::to_string(train.n()));
    return KnnModel{scaling.apply(train.features()), train.targets(), k};
}

// Plain per-sample SGD on squared loss with L2 penalty and inverse-scaling
// step size eta0 / t^power_t, run on standardized features and targets.
// Coefficients are mapped back to raw units afterwards.
LinearModel fit_sgd(const LearnerSpec& spec, const Dataset& train, const Standardizer& scaling)
{
    const double eta0 = as_positive(spec, "learning_rate", 1e-3, false);
    const double power_t = as_positive(spec, "power_t", 0.25, true);
    const std::size_t epochs = as_count(spec, "epochs", 1000, 1);
    const double alpha = as_positive(spec, "alpha", 1e-4, true);

    const std::size_t n = train.n();
    const std::size_t m = train.m();
    const Matrix z = scaling.apply(train.features());

    const double y_mean = mean_of(train.targets());
    double y_scale = 0.0;
    for (double v : train.targets())
        y_scale += (v - y_mean) * (v - y_mean);
    y_scale = std::sqrt(y_scale / static_cast<double>(n));
    if (!(y_scale > 0.0))
        y_scale = 1.0;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = (train.targets()[i] - y_mean) / y_scale;

    std::vector<double> w(m, 0.0);
    double b = 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    double step = 1.0;

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const auto row = z.row(i);
            double pred = b;
            for (std::size_t j = 0; j < m; ++j)
                pred += w[j] * row[j];
            const double err = pred - t[i];
            const double eta = eta0 / std::pow(step, power_t);
            for (std::size_t j = 0; j < m; ++j)
                w[j] -= eta * (err * row[j] + alpha * w[j]);
            b -= eta * err;
            step += 1.0;
        }
    }
    for (double v : w)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidHyperparameter, "SGD diverged; lower learning_rate");

    LinearModel model{std::vector<double>(m), y_mean + y_scale * b};
    for (std::size_t j = 0; j < m; ++j) {
        model.coefficients[j] = y_scale * w[j] / scaling.std_devs[j];
        model.intercept -= model.coefficients[j] * scaling.means[j];
    }
    return model;
}

ForestModel fit_forest(const LearnerSpec& spec, const Dataset& train)
{
    const std::size_t n_trees = as_count(spec, "n_trees", 100, 1);
    TreeParams params;
    params.max_depth = as_count(spec, "max_depth", 0, 0);
    params.min_samples_split = as_count(spec, "min_samples_split", 2, 2);
    params.max_features = as_count(spec, "max_features", 0, 0);

    const std::size_t n = train.n();
    ForestModel forest;
    forest.trees.reserve(n_trees);
    std::vector<std::size_t> sample(n);
    for (std::size_t t = 0; t < n_trees; ++t) {
        Rng rng(mix_seed(spec.seed, t));
        for (auto& r : sample)
            r = static_cast<std::size_t>(rng.below(n));
        forest.trees.push_back(DecisionTree::fit(train.features(), train.targets(), sample, params, rng));
    }
    return forest;
}

double predict_linear(const LinearModel& model, std::span<const double> row)
{
    double s = model.intercept;
    for (std::size_t j = 0; j < row.size(); ++j)
        s += model.coefficients[j] * row[j];
    return s;
}

} // namespace

std::string_view to_string(LearnerKind kind) noexcept
{
    switch (kind) {
    case LearnerKind::LR: return "LR";
    case LearnerKind::KNN: return "KNN";
    case LearnerKind::SGD: return "SGD";
    case LearnerKind::RF: return "RF";
    }
    return "?";
}

LearnerKind learner_kind_from_string(std::string_view name)
{
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (auto kind : {LearnerKind::LR, LearnerKind::KNN, LearnerKind::SGD, LearnerKind::RF})
        if (to_string(kind) == upper)
            return kind;
    throw Error(ErrorCode::UnknownKind, "unknown learner kind '" + std::string(name) + "'");
}

double LearnerSpec::get(const std::string& key, double fallback) const
{
    const auto it = hyperparameters.find(key);
    return it == hyperparameters.end() ? fallback : it->second;
}

void validate(const LearnerSpec& spec)
{
    const auto& keys = allowed_keys(spec.kind);
    for (const auto& [key, value] : spec.hyperparameters)
        if (!keys.contains(key))
            throw Error(ErrorCode::InvalidHyperparameter,
                        "'" + key + "' is not a " + std::string(to_string(spec.kind)) + " hyperparameter");
    switch (spec.kind) {
    case LearnerKind::LR: as_count(spec, "fallback", 1, 0); break;
    case LearnerKind::KNN: as_count(spec, "k", 5, 1); break;
    case LearnerKind::SGD:
        as_positive(spec, "learning_rate", 1e-3, false);
        as_positive(spec, "power_t", 0.25, true);
        as_count(spec, "epochs", 1000, 1);
        as_positive(spec, "alpha", 1e-4, true);
        break;
    case LearnerKind::RF:
        as_count(spec, "n_trees", 100, 1);
        as_count(spec, "max_depth", 0, 0);
        as_count(spec, "min_samples_split", 2, 2);
        as_count(spec, "max_features", 0, 0);
        break;
    }
}

std::vector<LearnerSpec> default_pool(std::uint64_t seed)
{
    return {
        LearnerSpec{LearnerKind::LR, {}, seed},
        LearnerSpec{LearnerKind::KNN, {}, seed},
        LearnerSpec{LearnerKind::SGD, {}, seed},
        LearnerSpec{LearnerKind::RF, {}, seed},
    };
}

std::vector<double> ForestModel::tree_predictions(std::span<const double> row) const
{
    std::vector<double> out;
    out.reserve(trees.size());
    for (const auto& tree : trees)
        out.push_back(tree.predict(row));
    return out;
}

TrainedLearner::TrainedLearner(LearnerSpec spec, std::size_t dimension, State state,
                               std::optional<Standardizer> training_standardizer)
    : spec_(std::move(spec)), dimension_(dimension), state_(std::move(state)),
      scaling_(std::move(training_standardizer))
{
}

double TrainedLearner::predict_row(std::span<const double> row) const
{
    if (row.size() != dimension_)
        throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(dimension_) +
                                                      " features, got " + std::to_string(row.size()));
    if (const auto* lin = std::get_if<LinearModel>(&state_))
        return predict_linear(*lin, row);

    if (const auto* knn = std::get_if<KnnModel>(&state_)) {
        std::vector<double> z(dimension_);
        scaling_->apply_row(row, z);
        double s = 0.0;
        for (std::size_t r : nearest_rows(knn->points, z, knn->k))
            s += knn->targets[r];
        return s / static_cast<double>(knn->k);
    }

    const auto& forest = std::get<ForestModel>(state_);
    double s = 0.0;
    for (const auto& tree : forest.trees)
        s += tree.predict(row);
    return s / static_cast<double>(forest.trees.size());
}

std::vector<double> TrainedLearner::predict(const Matrix& x) const
{
    if (x.cols() != dimension_)
        throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(dimension_) +
                                                      " features, got " + std::to_string(x.cols()));
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r)
        out[r] = predict_row(x.row(r));
    return out;
}

TrainedLearner fit(const LearnerSpec& spec, const Dataset& train)
{
    validate(spec);
    switch (spec.kind) {
    case LearnerKind::LR: return TrainedLearner(spec, train.m(), fit_ols(spec, train));
    case LearnerKind::KNN: {
        auto scaling = standardize_fit(train);
        auto model = fit_knn(spec, train, scaling);
        return TrainedLearner(spec, train.m(), std::move(model), std::move(scaling));
    }
    case LearnerKind::SGD: {
        auto scaling = standardize_fit(train);
        auto model = fit_sgd(spec, train, scaling);
        return TrainedLearner(spec, train.m(), std::move(model), std::move(scaling));
    }
    case LearnerKind::RF: return TrainedLearner(spec, train.m(), fit_forest(spec, train));
    }
    throw Error(ErrorCode::UnknownKind, "unhandled learner kind");
}

} // namespace ensreg
