#include "helpers.hpp"

#include "ensreg/metrics.hpp"

#include <cmath>

using namespace ensreg;
using testing::error_code_of;

namespace oracle {

// Straight loops in long double, written from the textbook definitions.
long double mean_abs(const std::vector<double>& f, const std::vector<double>& g)
{
    long double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::fabs(static_cast<long double>(f[i]) - g[i]);
    return s / f.size();
}

long double mean_sq(const std::vector<double>& f, const std::vector<double>& g)
{
    long double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const long double d = static_cast<long double>(f[i]) - g[i];
        s += d * d;
    }
    return s / f.size();
}

long double r_squared(const std::vector<double>& f, const std::vector<double>& g)
{
    long double mean = 0;
    for (double v : f)
        mean += v;
    mean /= f.size();
    long double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        ss_tot += (f[i] - mean) * (f[i] - mean);
        ss_res += (static_cast<long double>(f[i]) - g[i]) * (static_cast<long double>(f[i]) - g[i]);
    }
    return 1 - ss_res / ss_tot;
}

long double rrmse8(const std::vector<double>& f, const std::vector<double>& g)
{
    long double num = 0, den = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += (static_cast<long double>(f[i]) - g[i]) * (static_cast<long double>(f[i]) - g[i]);
        den += static_cast<long double>(g[i]) * g[i];
    }
    return std::sqrt(num / f.size() / den);
}

long double mad_constant(const std::vector<double>& y)
{
    long double mean = 0;
    for (double v : y)
        mean += v;
    mean /= y.size();
    long double s = 0;
    for (double v : y)
        s += std::fabs(v - mean);
    return s / y.size();
}

long double rrmse_alg(const std::vector<double>& y, const std::vector<double>& p, double c)
{
    long double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double q = (static_cast<long double>(y[i]) - p[i]) / (static_cast<long double>(y[i]) + c);
        s += q * q;
    }
    return std::sqrt(s / y.size());
}

} // namespace oracle

using V = std::vector<double>;

namespace {

bool close(double a, long double b, double tol = 1e-12)
{
    return std::fabs(static_cast<long double>(a) - b) <= tol * std::max<long double>(1, std::fabs(b));
}

} // namespace

TEST_CASE("metric hand values")
{
    const std::vector<double> f{1, 2, 3};
    const std::vector<double> g{2, 2, 5};
    // errors -1, 0, -2
    CHECK(mae(f, g) == doctest::Approx(1.0));
    CHECK(mse(f, g) == doctest::Approx(5.0 / 3.0));
    CHECK(rmse(V{1.0, 3.0}, V{2.0, 1.0}) == doctest::Approx(std::sqrt(2.5)));

    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{2, 1, 4, 3};
    CHECK(mae(a, b) == 1.0);
    CHECK(mse(a, b) == 1.0);
    // ss_res 4, ss_tot 5
    CHECK(r2(a, b) == doctest::Approx(0.2));
    CHECK(r2(a, a) == 1.0);

    CHECK(rrmse_eq8(V{2.0}, V{1.0}) == 1.0);
    CHECK(zero_division_constant(V{1.0, 2.0, 3.0}) == 2.0 / 3.0);
    CHECK(zero_division_constant(V{0.0, 4.0}) == 2.0);
    CHECK(rrmse_alg1(V{2.0}, V{1.0}, 0.0) == 0.5);
    // ((1-2)/2)^2 = 0.25, ((3-2)/4)^2 = 0.0625, mean 0.15625
    CHECK(rrmse_alg1(V{1.0, 3.0}, V{2.0, 2.0}, 1.0) == doctest::Approx(std::sqrt(0.15625)).epsilon(1e-15));
}

TEST_CASE("metric errors")
{
    const std::vector<double> e;
    CHECK(error_code_of([&] { mae(e, e); }) == ErrorCode::EmptyInput);
    CHECK(error_code_of([] { mse(V{1.0}, V{1.0, 2.0}); }) == ErrorCode::LengthMismatch);
    CHECK(error_code_of([] { r2(V{2.0, 2.0}, V{1.0, 3.0}); }) == ErrorCode::ConstantTarget);
    CHECK(error_code_of([] { rrmse_eq8(V{1.0, 2.0}, V{0.0, 0.0}); }) == ErrorCode::ZeroDenominator);
    CHECK(error_code_of([&] { zero_division_constant(e); }) == ErrorCode::EmptyInput);
    CHECK(error_code_of([] { rrmse_alg1(V{-1.0, 2.0}, V{0.0, 2.0}, 1.0); }) == ErrorCode::ZeroDenominator);
}

TEST_CASE("metrics match the brute-force oracle on random vectors")
{
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(1000);
        const auto f = testing::random_vector(rng, n, 1.0, 50.0);
        const auto g = testing::random_vector(rng, n, 1.0, 50.0);
        CHECK(close(mae(f, g), oracle::mean_abs(f, g)));
        CHECK(close(mse(f, g), oracle::mean_sq(f, g)));
        CHECK(close(rmse(f, g), std::sqrt(oracle::mean_sq(f, g))));
        CHECK(close(rrmse_eq8(f, g), oracle::rrmse8(f, g)));
        const double c = zero_division_constant(f);
        CHECK(close(c, oracle::mad_constant(f)));
        CHECK(close(rrmse_alg1(f, g, c), oracle::rrmse_alg(f, g, c)));
        if (n >= 2)
            CHECK(close(r2(f, g), oracle::r_squared(f, g)));
        const auto report = evaluate(f, g);
        CHECK(report.n == n);
        CHECK(report.mae == mae(f, g));
    }
}

TEST_CASE("metric properties")
{
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(200);
        const auto f = testing::random_vector(rng, n);
        const auto g = testing::random_vector(rng, n);
        CHECK(mae(f, f) == 0.0);
        CHECK(rmse(f, g) * rmse(f, g) == doctest::Approx(mse(f, g)).epsilon(1e-12));
        CHECK(mae(f, g) <= rmse(f, g) + 1e-12);
        CHECK(mae(f, g) == mae(g, f));
        CHECK(r2(f, g) <= 1.0);
    }
}
