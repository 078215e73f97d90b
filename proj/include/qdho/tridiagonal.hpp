#pragma once

// Symmetric tridiagonal eigensolver: bisection on Sturm-sequence counts for the
// eigenvalues, inverse iteration for the vectors. Each eigenvalue is bisected to
// a few ulps of its own magnitude (down to an absolute floor eps^2 ||T||), so small
// eigenvalues of Jacobi matrices whose off-diagonal grows like q^{n/2} keep their
// leading digits.

#include "qdho/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qdho {

/// Real symmetric tridiagonal matrix: diag has length N, offdiag length N-1.
struct TridiagonalSymmetric {
    std::vector<double> diag;
    std::vector<double> offdiag;

    int size() const { return static_cast<int>(diag.size()); }
};

struct EigenDecomposition {
    std::vector<double> eigenvalues;  ///< ascending
    std::optional<std::vector<std::vector<double>>> eigenvectors;  ///< unit vectors, one per eigenvalue
};

namespace detail {

inline int sturm_count(const std::vector<double>& a, const std::vector<double>& b2, double x,
                       double pivmin) {
    int count = 0;
    double d = a[0] - x;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0) ++count;
    for (std::size_t i = 1; i < a.size(); ++i) {
        d = a[i] - x - b2[i - 1] / d;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0) ++count;
    }
    return count;
}

/// Solves (T - shift I) x = rhs in place with partial pivoting (LAPACK gttrf/gttrs layout).
inline void solve_shifted(const TridiagonalSymmetric& t, double shift, double tiny,
                          std::vector<double>& rhs) {
    const int n = t.size();
    if (n == 1) {
        double d = t.diag[0] - shift;
        if (std::abs(d) < tiny) d = tiny;
        rhs[0] /= d;
        return;
    }
    std::vector<double> dl(t.offdiag), du(t.offdiag), du2(static_cast<std::size_t>(n), 0.0);
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<bool> swapped(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) d[i] = t.diag[i] - shift;

    for (int i = 0; i < n - 1; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) < tiny) d[i] = tiny;
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if (i < n - 2) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if (std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;

    for (int i = 0; i < n - 1; ++i) {
        if (!swapped[i]) {
            rhs[i + 1] -= dl[i] * rhs[i];
        } else {
            const double temp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = temp - dl[i] * rhs[i];
        }
    }
    rhs[n - 1] /= d[n - 1];
    rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
}

inline double normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0 && std::isfinite(s))
        for (double& x : v) x /= s;
    return s;
}

}  // namespace detail

/// Eigenvalues in ascending order and, optionally, unit eigenvectors.
/// Throws ConvergenceError for non-finite input or when bisection exceeds its budget.
inline EigenDecomposition eigendecompose(const TridiagonalSymmetric& t, bool want_vectors) {
    const int n = t.size();
    if (n < 1) throw DomainError("eigendecompose requires N >= 1");
    if (static_cast<int>(t.offdiag.size()) != n - 1)
        throw DomainError("offdiag must have length N-1");

    for (double v : t.diag)
        if (!std::isfinite(v)) throw ConvergenceError("tridiagonal matrix has non-finite entries");
    for (double v : t.offdiag)
        if (!std::isfinite(v)) throw ConvergenceError("tridiagonal matrix has non-finite entries");

    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = std::abs(t.diag[i]);
        if (i > 0) row += std::abs(t.offdiag[i - 1]);
        if (i < n - 1) row += std::abs(t.offdiag[i]);
        scale = std::max(scale, row);
    }
    if (!std::isfinite(scale))
        throw ConvergenceError("tridiagonal matrix has non-finite entries");

    EigenDecomposition out;
    if (n == 1) {
        out.eigenvalues = {t.diag[0]};
        if (want_vectors) out.eigenvectors = std::vector<std::vector<double>>{{1.0}};
        return out;
    }
    if (scale == 0.0) {
        out.eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
        if (want_vectors) {
            std::vector<std::vector<double>> vecs(static_cast<std::size_t>(n),
                                                  std::vector<double>(static_cast<std::size_t>(n), 0.0));
            for (int i = 0; i < n; ++i) vecs[i][i] = 1.0;
            out.eigenvectors = std::move(vecs);
        }
        return out;
    }

    // Work on T / scale so every Gershgorin disc lies in [-1, 1].
    std::vector<double> a(static_cast<std::size_t>(n)), b2(static_cast<std::size_t>(std::max(n - 1, 0)));
    double max_b2 = 0.0;
    for (int i = 0; i < n; ++i) a[i] = t.diag[i] / scale;
    for (int i = 0; i < n - 1; ++i) {
        const double b = t.offdiag[i] / scale;
        b2[i] = b * b;
        max_b2 = std::max(max_b2, b2[i]);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, max_b2);
    const double tol = 2.0 * eps;
    const double floor = eps * eps;  // absolute resolution for eigenvalues near zero
    constexpr int kBudget = 400;

    out.eigenvalues.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double lo = -1.0 - tol, hi = 1.0 + tol;
        int iter = 0;
        while (hi - lo > std::max(floor, tol * std::max(std::abs(lo), std::abs(hi)))) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (detail::sturm_count(a, b2, mid, pivmin) <= k)
                lo = mid;
            else
                hi = mid;
            if (++iter > kBudget)
                throw ConvergenceError("bisection exceeded " + std::to_string(kBudget) +
                                       " steps for eigenvalue " + std::to_string(k));
        }
        out.eigenvalues[k] = 0.5 * (lo + hi) * scale;
    }

    if (!want_vectors) return out;

    std::vector<std::vector<double>> vecs;
    vecs.reserve(static_cast<std::size_t>(n));
    const double tiny = eps * scale;
    const double cluster = 1e-10 * scale;
    for (int k = 0; k < n; ++k) {
        std::vector<double> v(static_cast<std::size_t>(n));
        // Deterministic start with components of both signs.
        for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + 7.0 * i + 3.0 * k);
        int first_in_cluster = k;
        while (first_in_cluster > 0 &&
               out.eigenvalues[k] - out.eigenvalues[first_in_cluster - 1] < cluster)
            --first_in_cluster;
        for (int it = 0; it < 4; ++it) {
            detail::solve_shifted(t, out.eigenvalues[k], tiny, v);
            for (int c = first_in_cluster; c < k; ++c) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += vecs[c][i] * v[i];
                for (int i = 0; i < n; ++i) v[i] -= dot * vecs[c][i];
            }
            const double norm = detail::normalize(v);
            if (!(norm > 0) || !std::isfinite(norm))
                throw ConvergenceError("inverse iteration failed for eigenvalue " + std::to_string(k));
        }
        vecs.push_back(std::move(v));
    }
    out.eigenvectors = std::move(vecs);
    return out;
}

}  // namespace qdho
