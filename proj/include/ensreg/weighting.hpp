#pragma once

#include "ensreg/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ensreg {

/// Errors below this are raised to it before inversion, so a perfect member
/// gets a weight near 1 rather than a division by zero.
inline constexpr double kErrorFloor = 1e-12;

/// One coefficient per pool member, summing to 1. Only GEM produces signed
/// entries, flagged by may_be_negative.
struct WeightVector {
    std::vector<double> weights;
    bool may_be_negative = false;

    std::size_t size() const noexcept { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }

    bool operator==(const WeightVector&) const = default;
};

/// Per-member RRMSE plus the zero-division constant it was computed with.
struct ErrorProfile {
    std::vector<double> errors;
    double constant = 0.0;

    bool operator==(const ErrorProfile&) const = default;
};

/// C_ij = mean over samples of m_i * m_j with m_i = target - prediction_i.
struct MisfitMatrix {
    Matrix c;

    static MisfitMatrix from_predictions(std::span<const double> targets,
                                         const std::vector<std::vector<double>>& predictions);
};

/// Member predictions are stored member-major: predictions[i][row].
using MemberPredictions = std::vector<std::vector<double>>;

/// Phases 1 and 2 of RRMSE voting: the zero-division constant from the
/// evaluation targets, then rrmse_alg1 for every member.
ErrorProfile rrmse_error_profile(std::span<const double> targets, const MemberPredictions& predictions);

/// w_i = (1 / e_i) / sum_j (1 / e_j) after clamping each e_i to kErrorFloor.
WeightVector inverse_error_weights(std::span<const double> errors);

WeightVector rrmse_weights(const ErrorProfile& errors);
WeightVector uniform_weights(std::size_t k);

/// f - mean_i(m_i), which is the plain average of the member predictions.
std::vector<double> bem_combine(const MemberPredictions& predictions);

/// alpha_i = sum_j Cinv_ij / sum_lj Cinv_lj. C is first tried as is; when it
/// is not numerically SPD a ridge lambda I is added, lambda starting at
/// 1e-8 tr(C)/k and growing by 10x up to 1e-2 tr(C)/k.
WeightVector gem_weights(const MisfitMatrix& misfit);

/// Points and per-member absolute errors for DWR. abs_errors[i][row].
struct NeighborStore {
    Matrix points;
    std::vector<std::vector<double>> abs_errors;
};

/// Inverse local-MAE weights over the k_nn stored rows nearest to `query`
/// (query must live in the same space as the stored points).
WeightVector dwr_weights(std::span<const double> query, const NeighborStore& store, std::size_t k_nn);

/// Row-wise sum_i w_i * predictions[i][row].
std::vector<double> combine(const WeightVector& weights, const MemberPredictions& predictions);

} // namespace ensreg
