#include "ensreg/stats.hpp"
#include "ensreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ensreg {

namespace {

// Values oriented so that smaller is better.
std::vector<std::vector<double>> oriented(const ResultMatrix& r)
{
    auto v = r.values;
    if (!r.lower_is_better)
        for (auto& row : v)
            for (auto& x : row)
                x = -x;
    return v;
}

void require_omnibus_shape(const ResultMatrix& r)
{
    r.validate();
    if (r.n_methods() < 2 || r.n_datasets() < 2)
        throw Error(ErrorCode::InvalidArgument, "aligned-rank tests need at least 2 methods and 2 datasets");
    const double first = r.values[0][0];
    bool all_equal = true;
    for (const auto& row : r.values)
        for (double x : row)
            all_equal = all_equal && x == first;
    if (all_equal)
        throw Error(ErrorCode::DegenerateMatrix, "every value in the result matrix is identical");
}

// Joint ranks of the dataset-centered values, laid out like the input.
std::vector<std::vector<double>> aligned_ranks(const ResultMatrix& r)
{
    const auto v = oriented(r);
    const std::size_t n = v.size();
    const std::size_t k = r.n_methods();
    std::vector<double> flat;
    flat.reserve(n * k);
    for (const auto& row : v) {
        const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(k);
        for (double x : row)
            flat.push_back(x - mean);
    }
    const auto ranks = average_ranks(flat);
    std::vector<std::vector<double>> out(n, std::vector<double>(k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out[i][j] = ranks[i * k + j];
    return out;
}

double gamma_p_series(double a, double x)
{
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

std::size_t ResultMatrix::method_index(std::string_view name) const
{
    for (std::size_t j = 0; j < method_names.size(); ++j)
        if (method_names[j] == name)
            return j;
    throw Error(ErrorCode::UnknownMethod, "method '" + std::string(name) + "' not in result matrix");
}

void ResultMatrix::validate() const
{
    if (!dataset_names.empty() && dataset_names.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "dataset name count does not match row count");
    for (const auto& row : values) {
        if (row.size() != method_names.size())
            throw Error(ErrorCode::InvalidArgument, "row length does not match method count");
        for (double x : row)
            if (!std::isfinite(x))
                throw Error(ErrorCode::InvalidArgument, "result matrix holds a non-finite value");
    }
}

std::vector<double> average_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        // Positions i..j (0-based) share the mean of ranks i+1..j+1.
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

RankMatrix rank_rows(const ResultMatrix& r)
{
    r.validate();
    const auto v = oriented(r);
    RankMatrix out;
    out.average_ranks.assign(r.n_methods(), 0.0);
    for (const auto& row : v) {
        out.ranks.push_back(average_ranks(row));
        for (std::size_t j = 0; j < row.size(); ++j)
            out.average_ranks[j] += out.ranks.back()[j];
    }
    if (!v.empty())
        for (auto& a : out.average_ranks)
            a /= static_cast<double>(v.size());
    return out;
}

WinLoseTie win_lose_tie(const ResultMatrix& r, std::string_view a, std::string_view b)
{
    const std::size_t ia = r.method_index(a);
    const std::size_t ib = r.method_index(b);
    const auto v = oriented(r);
    WinLoseTie out;
    for (const auto& row : v) {
        if (row[ia] < row[ib])
            ++out.wins;
        else if (row[ia] > row[ib])
            ++out.losses;
        else
            ++out.ties;
    }
    return out;
}

OmnibusResult friedman_aligned(const ResultMatrix& r)
{
    require_omnibus_shape(r);
    const auto ranks = aligned_ranks(r);
    const auto n = static_cast<double>(r.n_datasets());
    const auto k = static_cast<double>(r.n_methods());
    const double kn = k * n;

    double col_sq = 0.0;
    for (std::size_t j = 0; j < r.n_methods(); ++j) {
        double total = 0.0;
        for (const auto& row : ranks)
            total += row[j];
        col_sq += total * total;
    }
    double row_sq = 0.0;
    for (const auto& row : ranks) {
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        row_sq += total * total;
    }

    const double numerator = (k - 1.0) * (col_sq - (k * n * n / 4.0) * (kn + 1.0) * (kn + 1.0));
    const double denominator = kn * (kn + 1.0) * (2.0 * kn + 1.0) / 6.0 - row_sq / k;
    if (!(denominator > 0.0))
        throw Error(ErrorCode::DegenerateMatrix, "aligned-rank variance is zero");

    OmnibusResult out;
    // Nonnegative in exact arithmetic; rounding can push a zero below it.
    out.statistic = std::max(0.0, numerator / denominator);
    out.p_value = chi_squared_sf(out.statistic, k - 1.0);
    return out;
}

std::vector<std::vector<double>> posthoc_pairwise(const ResultMatrix& r)
{
    require_omnibus_shape(r);
    const auto ranks = aligned_ranks(r);
    const std::size_t k = r.n_methods();
    const auto n = static_cast<double>(r.n_datasets());
    const auto kd = static_cast<double>(k);

    std::vector<double> mean_rank(k, 0.0);
    for (const auto& row : ranks)
        for (std::size_t j = 0; j < k; ++j)
            mean_rank[j] += row[j] / n;

    const double se = std::sqrt(kd * (kd * n + 1.0) / 6.0);
    std::vector<std::vector<double>> p(k, std::vector<double>(k, 1.0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const double z = std::abs(mean_rank[a] - mean_rank[b]) / se;
            p[a][b] = p[b][a] = std::min(1.0, 2.0 * normal_sf(z));
        }
    return p;
}

SignificanceReport significance(const ResultMatrix& r)
{
    const auto omnibus = friedman_aligned(r);
    SignificanceReport out;
    out.method_names = r.method_names;
    out.statistic = omnibus.statistic;
    out.p_value = omnibus.p_value;
    out.pairwise_p = posthoc_pairwise(r);
    const std::size_t k = r.n_methods();
    out.win_lose_tie.assign(k, std::vector<WinLoseTie>(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            out.win_lose_tie[a][b] = win_lose_tie(r, r.method_names[a], r.method_names[b]);
    return out;
}

std::string significance_stars(double p)
{
    if (p < 0.01)
        return "***";
    if (p < 0.05)
        return "**";
    if (p < 0.10)
        return "*";
    return "";
}

double regularized_gamma_q(double a, double x)
{
    if (!(a > 0.0) || std::isnan(x))
        throw Error(ErrorCode::InvalidArgument, "regularized_gamma_q needs a > 0");
    if (x <= 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
    return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_squared_sf(double x, double dof) { return regularized_gamma_q(0.5 * dof, 0.5 * x); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace ensreg
