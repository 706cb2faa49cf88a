#pragma once

#include <cstddef>
#include <span>

namespace ensreg {

/// Test-set summary of one prediction vector.
struct MetricReport {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;

    bool operator==(const MetricReport&) const = default;
};

// f holds actual values, f_hat predictions. All sums run over [0, n).

double mae(std::span<const double> f, std::span<const double> f_hat);
double mse(std::span<const double> f, std::span<const double> f_hat);
double rmse(std::span<const double> f, std::span<const double> f_hat);

/// Throws ConstantTarget when f has zero variance.
double r2(std::span<const double> f, std::span<const double> f_hat);

/// Relative RMSE with the aggregate denominator sum(f_hat^2):
/// sqrt(mean((f - f_hat)^2) / sum(f_hat^2)).
double rrmse_eq8(std::span<const double> f, std::span<const double> f_hat);

/// Mean absolute deviation of y about its mean; keeps the per-sample
/// denominators of rrmse_alg1 away from zero.
double zero_division_constant(std::span<const double> y);

/// sqrt(mean(((y_i - y_pred_i) / (y_i + constant))^2)). This is the error
/// that drives RRMSE voting weights. Throws ZeroDenominator naming the
/// first index where y_i + constant == 0.
double rrmse_alg1(std::span<const double> y, std::span<const double> y_pred, double constant);

MetricReport evaluate(std::span<const double> f, std::span<const double> f_hat);

} // namespace ensreg
