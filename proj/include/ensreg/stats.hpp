#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ensreg {

/// One metric over datasets (rows) x methods (columns).
struct ResultMatrix {
    std::vector<std::vector<double>> values;
    std::vector<std::string> dataset_names;
    std::vector<std::string> method_names;
    bool lower_is_better = true;

    std::size_t n_datasets() const noexcept { return values.size(); }
    std::size_t n_methods() const noexcept { return method_names.size(); }
    std::size_t method_index(std::string_view name) const;

    /// Throws InvalidArgument on ragged rows, name count mismatch or
    /// non-finite values.
    void validate() const;

    bool operator==(const ResultMatrix&) const = default;
};

struct RankMatrix {
    std::vector<std::vector<double>> ranks; ///< 1 = best, ties averaged
    std::vector<double> average_ranks;      ///< per method, over datasets

    bool operator==(const RankMatrix&) const = default;
};

struct WinLoseTie {
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t ties = 0;

    bool operator==(const WinLoseTie&) const = default;
};

struct OmnibusResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Omnibus and pairwise aligned-rank results plus win/lose/tie counts.
/// win_lose_tie[a][b] counts method a against method b.
struct SignificanceReport {
    std::vector<std::string> method_names;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::vector<double>> pairwise_p;
    std::vector<std::vector<WinLoseTie>> win_lose_tie;

    bool operator==(const SignificanceReport&) const = default;
};

/// Ascending ranks of `values` (1 = smallest), ties get the mean of the
/// positions they cover.
std::vector<double> average_ranks(std::span<const double> values);

RankMatrix rank_rows(const ResultMatrix& r);

WinLoseTie win_lose_tie(const ResultMatrix& r, std::string_view a, std::string_view b);

/// Aligned-rank Friedman test: each value minus its dataset mean, all k*n
/// aligned values ranked jointly, then
///
///   T = (k-1) [sum_j Rj^2 - (k n^2 / 4)(kn+1)^2]
///       / ([kn(kn+1)(2kn+1)/6] - (1/k) sum_i Ri^2)
///
/// with Rj the method rank totals and Ri the dataset rank totals; p from the
/// chi-squared survival function with k-1 degrees of freedom.
OmnibusResult friedman_aligned(const ResultMatrix& r);

/// Unadjusted two-sided pairwise comparisons on mean aligned ranks:
/// z = (Rbar_a - Rbar_b) / sqrt(k(kn+1)/6). Returns a symmetric matrix of
/// p-values with ones on the diagonal.
std::vector<std::vector<double>> posthoc_pairwise(const ResultMatrix& r);

SignificanceReport significance(const ResultMatrix& r);

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.10, else "".
std::string significance_stars(double p);

// Distribution tails.
double regularized_gamma_q(double a, double x);
double chi_squared_sf(double x, double dof);
double normal_sf(double z);

} // namespace ensreg
