#include "ensreg/metrics.hpp"
#include "ensreg/error.hpp"

#include <cmath>
#include <string>

namespace ensreg {

namespace {

void check_pair(std::span<const double> f, std::span<const double> f_hat, std::size_t min_len = 1)
{
    if (f.size() != f_hat.size())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(f.size()) + " actual vs " + std::to_string(f_hat.size()) + " predicted");
    if (f.size() < min_len)
        throw Error(ErrorCode::EmptyInput, "need at least " + std::to_string(min_len) + " values");
}

double sum_squared_error(std::span<const double> f, std::span<const double> f_hat)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - f_hat[i];
        s += d * d;
    }
    return s;
}

double mean(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double mae(std::span<const double> f, std::span<const double> f_hat)
{
    check_pair(f, f_hat);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::abs(f[i] - f_hat[i]);
    return s / static_cast<double>(f.size());
}

double mse(std::span<const double> f, std::span<const double> f_hat)
{
    check_pair(f, f_hat);
    return sum_squared_error(f, f_hat) / static_cast<double>(f.size());
}

double rmse(std::span<const double> f, std::span<const double> f_hat) { return std::sqrt(mse(f, f_hat)); }

double r2(std::span<const double> f, std::span<const double> f_hat)
{
    check_pair(f, f_hat, 2);
    const double f_bar = mean(f);
    double total = 0.0;
    for (double v : f)
        total += (v - f_bar) * (v - f_bar);
    if (!(total > 0.0))
        throw Error(ErrorCode::ConstantTarget, "R2 undefined for a constant target");
    return 1.0 - sum_squared_error(f, f_hat) / total;
}

double rrmse_eq8(std::span<const double> f, std::span<const double> f_hat)
{
    check_pair(f, f_hat);
    double denom = 0.0;
    for (double v : f_hat)
        denom += v * v;
    if (!(denom > 0.0))
        throw Error(ErrorCode::ZeroDenominator, "sum of squared predictions is zero");
    return std::sqrt(sum_squared_error(f, f_hat) / static_cast<double>(f.size()) / denom);
}

double zero_division_constant(std::span<const double> y)
{
    if (y.empty())
        throw Error(ErrorCode::EmptyInput, "zero-division constant of an empty vector");
    const double avg = mean(y);
    double s = 0.0;
    for (double v : y)
        s += std::abs(v - avg);
    return s / static_cast<double>(y.size());
}

double rrmse_alg1(std::span<const double> y, std::span<const double> y_pred, double constant)
{
    check_pair(y, y_pred);
    double result = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double denominator = y[i] + constant;
        if (denominator == 0.0)
            throw Error(ErrorCode::ZeroDenominator, "y[" + std::to_string(i) + "] + constant == 0");
        const double r = (y[i] - y_pred[i]) / denominator;
        result += r * r;
    }
    return std::sqrt(result / static_cast<double>(y.size()));
}

MetricReport evaluate(std::span<const double> f, std::span<const double> f_hat)
{
    MetricReport report;
    report.mae = mae(f, f_hat);
    report.mse = mse(f, f_hat);
    report.rmse = std::sqrt(report.mse);
    report.r2 = r2(f, f_hat);
    report.n = f.size();
    return report;
}

} // namespace ensreg
