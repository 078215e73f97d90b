#pragma once

// Spectra of the position and momentum Jacobi matrices and numerical evidence
// for the hypotheses of the self-adjointness argument: |x_n| unbounded, the
// series sum 1/x_n convergent with ratio q^{-1/2}, the off-diagonal sequence
// log-concave, and the deficiency-vector coefficients P_n(z) square-summable
// at non-real z. None of this computes deficiency indices; those belong to the
// infinite matrix.

#include "qdho/deformation.hpp"
#include "qdho/fock.hpp"
#include "qdho/polynomials.hpp"
#include "qdho/tridiagonal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace qdho {

/// Zero-diagonal Jacobi matrix of x: off-diagonal x_{n,alpha} = sqrt([n]_q) / m_alpha.
inline TridiagonalSymmetric position_jacobi(const DeformedFrame& frame, int n_dim) {
    detail::require_dim(n_dim);
    const QContext ctx(frame);
    TridiagonalSymmetric t;
    t.diag.assign(static_cast<std::size_t>(n_dim), 0.0);
    for (int n = 1; n < n_dim; ++n) t.offdiag.push_back(std::sqrt(q_number(n, ctx)) / frame.m_alpha);
    return t;
}

/// Conjugates a Hermitian tridiagonal momentum matrix by diag(1, i, i^2, ...), giving the
/// real symmetric form with off-diagonal x_{n,beta}. Isospectral to the input.
inline TridiagonalSymmetric momentum_phase_reduction(const TruncatedOperator& momentum) {
    const auto& m = momentum.entries();
    const int n = momentum.dim();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double tol = 1e-12 * scale;

    // phase_k = i^k; (D^+ M D)(k+1, k) = conj(i^{k+1}) M(k+1, k) i^k = -i M(k+1, k).
    TridiagonalSymmetric t;
    for (int k = 0; k < n; ++k) {
        if (std::abs(m(k, k).imag()) > tol)
            throw DomainError("momentum_phase_reduction: diagonal is not real");
        t.diag.push_back(m(k, k).real());
        for (int j = k + 2; j < n; ++j)
            if (std::abs(m(k, j)) > tol || std::abs(m(j, k)) > tol)
                throw DomainError("momentum_phase_reduction: input is not tridiagonal");
    }
    for (int k = 0; k + 1 < n; ++k) {
        const std::complex<double> lower = std::complex<double>(0.0, -1.0) * m(k + 1, k);
        const std::complex<double> upper = std::complex<double>(0.0, 1.0) * m(k, k + 1);
        if (std::abs(lower.imag()) > tol || std::abs(upper - lower) > tol)
            throw DomainError("momentum_phase_reduction: input is not of the form +-i x_n");
        t.offdiag.push_back(lower.real());
    }
    return t;
}

/// Eigenvalues (ascending) of a dense Hermitian truncated operator.
inline std::vector<double> dense_hermitian_eigenvalues(const TruncatedOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.entries(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense Hermitian eigensolver failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

struct DeficiencyReport {
    std::vector<double> partial_sums;              ///< sum_{k=1}^{n} 1/x_{k,alpha}, n = 1..N
    std::vector<double> ratio_estimates;           ///< (1/x_{n+1}) / (1/x_n), n = 1..N
    double ratio_limit_target = 0.0;               ///< q^{-1/2}
    bool log_concavity_ok = false;                 ///< x_{n+1} x_{n-1} < x_n^2 for n = 2..N
    int log_concavity_checked = 0;
    double min_log_concavity_gap = 0.0;            ///< min_n log(1 - x_{n+1} x_{n-1} / x_n^2)
    std::vector<double> deficiency_vector_norms;   ///< sum_{k=0}^{n} |P_k(z)|^2, n = 0..N-1
    double increment_pair_rate = std::numeric_limits<double>::quiet_NaN();
    std::complex<double> probe{0.0, 1.0};
};

/// log(1 - [n+1][n-1] / [n]^2) without cancellation:
/// 1 - [n+1][n-1]/[n]^2 = u (q + 1/q - 2) / (1 - u)^2 with u = q^{-n}.
inline double log_concavity_gap(int n, const QContext& ctx) {
    if (n < 2) throw DomainError("log_concavity_gap requires n >= 2");
    const double q = ctx.q();
    if (q == 1.0) return -2.0 * std::log(static_cast<double>(n));
    const double lq = std::log1p(q - 1.0);
    const double u = std::exp(-n * lq);
    return -n * lq + 2.0 * std::log(q - 1.0) - lq - 2.0 * std::log1p(-u);
}

/// Smallest n >= 1 with x_{n,alpha} > bound, or -1 if none up to max_n.
inline int first_index_exceeding(const DeformedFrame& frame, double bound, int max_n) {
    const QContext ctx(frame);
    const double log_bound = std::log(bound) + std::log(frame.m_alpha);
    for (int n = 1; n <= max_n; ++n)
        if (0.5 * log_q_number(n, ctx) > log_bound) return n;
    return -1;
}

namespace detail {

/// exp of the least-squares slope of log(values) against index.
inline double fitted_geometric_rate(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 3) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return std::exp((dn * sxy - sx * sy) / (dn * sxx - sx * sx));
}

}  // namespace detail

/// Fills every DeficiencyReport field from the first `n_terms` terms, in log domain.
inline DeficiencyReport deficiency_diagnostics(const DeformedFrame& frame, int n_terms,
                                               std::complex<double> probe = {0.0, 1.0}) {
    if (probe.imag() == 0.0) throw DomainError("deficiency probe z must have Im z != 0");
    if (n_terms < 10) throw DomainError("deficiency_diagnostics requires N_terms >= 10");
    const QContext ctx(frame);

    DeficiencyReport r;
    r.probe = probe;
    r.ratio_limit_target = std::pow(frame.q, -0.5);

    std::vector<double> log_bracket(static_cast<std::size_t>(n_terms) + 2);
    for (int n = 1; n <= n_terms + 1; ++n) log_bracket[n] = log_q_number(n, ctx);

    double sum = 0.0;
    for (int n = 1; n <= n_terms; ++n) {
        sum += frame.m_alpha * std::exp(-0.5 * log_bracket[n]);
        r.partial_sums.push_back(sum);
        r.ratio_estimates.push_back(std::exp(0.5 * (log_bracket[n] - log_bracket[n + 1])));
    }

    r.log_concavity_ok = true;
    r.min_log_concavity_gap = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= n_terms; ++n) {
        const double gap = log_concavity_gap(n, ctx);
        if (!std::isfinite(gap)) r.log_concavity_ok = false;
        r.min_log_concavity_gap = std::min(r.min_log_concavity_gap, gap);
        ++r.log_concavity_checked;
    }

    const auto p = p_sequence(n_terms - 1, probe, ctx);
    double norm = 0.0;
    std::vector<double> pair_sums;
    for (int n = 0; n < n_terms; ++n) {
        const double inc = std::norm(p[n]);
        norm += inc;
        r.deficiency_vector_norms.push_back(norm);
        if (n % 2 == 1) pair_sums.push_back(std::norm(p[n - 1]) + inc);
    }
    // Increments alternate between even and odd n, so the decay is fitted per pair,
    // over the tail half of the pairs that are still normal numbers.
    std::size_t usable = 0;
    while (usable < pair_sums.size() && pair_sums[usable] > 1e-280) ++usable;
    if (usable >= 6) {
        std::vector<double> tail(pair_sums.begin() + static_cast<std::ptrdiff_t>(usable / 2),
                                 pair_sums.begin() + static_cast<std::ptrdiff_t>(usable));
        r.increment_pair_rate = detail::fitted_geometric_rate(tail);
    }
    return r;
}

}  // namespace qdho
