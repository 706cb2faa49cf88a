#include "ensreg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ensreg::linalg {

std::optional<std::vector<double>> least_squares_qr(const Matrix& a, std::span<const double> b, double rank_tol)
{
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (n < m || b.size() != n)
        return std::nullopt;

    Matrix r = a;
    std::vector<double> qtb(b.begin(), b.end());
    std::vector<double> v(n);

    for (std::size_t k = 0; k < m; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i)
            norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0)
            continue;
        const double alpha = r(k, k) > 0 ? -norm : norm;
        for (std::size_t i = k; i < n; ++i)
            v[i] = r(i, k);
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i)
            vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0)
            continue;

        for (std::size_t j = k; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i)
                dot += v[i] * r(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i)
                r(i, j) -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i)
            dot += v[i] * qtb[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < n; ++i)
            qtb[i] -= f * v[i];
    }

    double max_diag = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        max_diag = std::max(max_diag, std::abs(r(k, k)));
    for (std::size_t k = 0; k < m; ++k)
        if (!(std::abs(r(k, k)) > rank_tol * max_diag))
            return std::nullopt;

    std::vector<double> x(m);
    for (std::size_t k = m; k-- > 0;) {
        double s = qtb[k];
        for (std::size_t j = k + 1; j < m; ++j)
            s -= r(k, j) * x[j];
        x[k] = s / r(k, k);
    }
    return x;
}

std::optional<std::vector<double>> cholesky_solve(const Matrix& a, std::span<const double> b, double min_rcond)
{
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        return std::nullopt;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }

    double lo = l(0, 0), hi = l(0, 0);
    for (std::size_t j = 1; j < n; ++j) {
        lo = std::min(lo, l(j, j));
        hi = std::max(hi, l(j, j));
    }
    if ((lo / hi) * (lo / hi) < min_rcond)
        return std::nullopt;

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

} // namespace ensreg::linalg
