#include "ensreg/weighting.hpp"
#include "ensreg/error.hpp"
#include "ensreg/linalg.hpp"
#include "ensreg/metrics.hpp"
#include "ensreg/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace ensreg {

namespace {

void check_predictions(const MemberPredictions& predictions, std::size_t n)
{
    if (predictions.empty())
        throw Error(ErrorCode::EmptyPool, "no member predictions");
    for (const auto& p : predictions)
        if (p.size() != n)
            throw Error(ErrorCode::LengthMismatch, "member prediction length " + std::to_string(p.size()) +
                                                       " != " + std::to_string(n));
}

} // namespace

MisfitMatrix MisfitMatrix::from_predictions(std::span<const double> targets, const MemberPredictions& predictions)
{
    check_predictions(predictions, targets.size());
    if (targets.empty())
        throw Error(ErrorCode::EmptyInput, "misfit matrix needs at least one sample");
    const std::size_t k = predictions.size();
    const std::size_t n = targets.size();

    MisfitMatrix out{Matrix(k, k)};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                s += (targets[r] - predictions[i][r]) * (targets[r] - predictions[j][r]);
            out.c(i, j) = out.c(j, i) = s / static_cast<double>(n);
        }
    return out;
}

ErrorProfile rrmse_error_profile(std::span<const double> targets, const MemberPredictions& predictions)
{
    check_predictions(predictions, targets.size());
    ErrorProfile profile;
    profile.constant = zero_division_constant(targets);
    profile.errors.reserve(predictions.size());
    for (const auto& p : predictions)
        profile.errors.push_back(rrmse_alg1(targets, p, profile.constant));
    return profile;
}

WeightVector inverse_error_weights(std::span<const double> errors)
{
    if (errors.empty())
        throw Error(ErrorCode::EmptyPool, "cannot weight an empty pool");
    WeightVector w;
    w.weights.resize(errors.size());
    double total = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (std::isnan(errors[i]) || errors[i] < 0.0)
            throw Error(ErrorCode::InvalidArgument, "member error must be >= 0, got " + std::to_string(errors[i]));
        w.weights[i] = 1.0 / std::max(errors[i], kErrorFloor);
        total += w.weights[i];
    }
    for (auto& v : w.weights)
        v /= total;
    return w;
}

WeightVector rrmse_weights(const ErrorProfile& errors) { return inverse_error_weights(errors.errors); }

WeightVector uniform_weights(std::size_t k)
{
    if (k == 0)
        throw Error(ErrorCode::EmptyPool, "cannot weight an empty pool");
    return WeightVector{std::vector<double>(k, 1.0 / static_cast<double>(k)), false};
}

std::vector<double> bem_combine(const MemberPredictions& predictions)
{
    if (predictions.empty())
        throw Error(ErrorCode::EmptyPool, "no member predictions");
    const std::size_t n = predictions.front().size();
    check_predictions(predictions, n);
    const auto k = static_cast<double>(predictions.size());
    std::vector<double> out(n, 0.0);
    for (const auto& p : predictions)
        for (std::size_t r = 0; r < n; ++r)
            out[r] += p[r];
    for (auto& v : out)
        v /= k;
    return out;
}

WeightVector gem_weights(const MisfitMatrix& misfit)
{
    const Matrix& c = misfit.c;
    const std::size_t k = c.rows();
    if (k == 0)
        throw Error(ErrorCode::EmptyPool, "empty misfit matrix");
    if (c.cols() != k)
        throw Error(ErrorCode::DimensionMismatch, "misfit matrix must be square");

    double scale = 0.0;
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        trace += c(i, i);
        for (std::size_t j = 0; j < k; ++j)
            scale = std::max(scale, std::abs(c(i, j)));
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (std::abs(c(i, j) - c(j, i)) > 1e-12 * std::max(scale, 1.0))
                throw Error(ErrorCode::InvalidArgument, "misfit matrix is not symmetric");

    const std::vector<double> ones(k, 1.0);
    constexpr double kMinRcond = 1e-12;

    auto attempt = [&](double lambda) -> std::optional<WeightVector> {
        Matrix a = c;
        for (std::size_t i = 0; i < k; ++i)
            a(i, i) += lambda;
        const auto row_sums = linalg::cholesky_solve(a, ones, kMinRcond);
        if (!row_sums)
            return std::nullopt;
        double total = 0.0;
        for (double v : *row_sums)
            total += v;
        if (!std::isfinite(total) || total == 0.0)
            return std::nullopt;
        WeightVector w{*row_sums, true};
        for (auto& v : w.weights)
            v /= total;
        return w;
    };

    if (auto w = attempt(0.0))
        return *w;
    const double base = trace / static_cast<double>(k);
    if (base > 0.0 && std::isfinite(base)) {
        for (double factor = 1e-8; factor <= 1e-2 * (1.0 + 1e-9); factor *= 10.0)
            if (auto w = attempt(factor * base))
                return *w;
    }
    throw Error(ErrorCode::SingularMisfitMatrix, "misfit matrix could not be stabilized");
}

WeightVector dwr_weights(std::span<const double> query, const NeighborStore& store, std::size_t k_nn)
{
    const std::size_t rows = store.points.rows();
    if (rows == 0 || store.abs_errors.empty())
        throw Error(ErrorCode::EmptyStore, "DWR neighbor store is empty");
    if (query.size() != store.points.cols())
        throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                                      " features, store has " +
                                                      std::to_string(store.points.cols()));
    if (k_nn == 0)
        throw Error(ErrorCode::InvalidArgument, "k_nn must be >= 1");

    const auto neighbors = nearest_rows(store.points, query, k_nn);
    std::vector<double> local(store.abs_errors.size(), 0.0);
    for (std::size_t i = 0; i < local.size(); ++i) {
        for (std::size_t r : neighbors)
            local[i] += store.abs_errors[i][r];
        local[i] /= static_cast<double>(neighbors.size());
    }
    return inverse_error_weights(local);
}

std::vector<double> combine(const WeightVector& weights, const MemberPredictions& predictions)
{
    if (predictions.empty())
        throw Error(ErrorCode::EmptyPool, "no member predictions");
    if (weights.size() != predictions.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(weights.size()) + " weights for " +
                                                   std::to_string(predictions.size()) + " members");
    const std::size_t n = predictions.front().size();
    check_predictions(predictions, n);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i)
        for (std::size_t r = 0; r < n; ++r)
            out[r] += weights[i] * predictions[i][r];
    return out;
}

} // namespace ensreg
