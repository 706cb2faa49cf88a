#pragma once

#include "ensreg/matrix.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ensreg::linalg {

/// Least-squares solution of min |a x - b| by Householder QR. Returns nullopt
/// when a is numerically rank deficient (|R_jj| <= rank_tol * max |R_ii|).
std::optional<std::vector<double>> least_squares_qr(const Matrix& a, std::span<const double> b,
                                                    double rank_tol = 1e-10);

/// Solves the SPD system a x = b by Cholesky. Returns nullopt when a is not
/// positive definite or when (min L_ii / max L_ii)^2 falls below min_rcond.
std::optional<std::vector<double>> cholesky_solve(const Matrix& a, std::span<const double> b,
                                                  double min_rcond = 0.0);

} // namespace ensreg::linalg
