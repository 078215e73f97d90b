#pragma once

// The deformed polynomial families generated by the ladder algebra:
//
//   P_n(z):        sqrt([n]) P_{n-1} + sqrt([n+1]) P_{n+1} = z P_n,    P_{-1} = 0, P_0 = 1
//   H_{n,q}(x):    2x H_n = H_{n+1} + (1 - q^n) H_{n-1}                 (q-Hermite)
//   H_{n,q}(ip):   2ip H_n = H_{n+1} - (1 - q^n) H_{n-1}                (momentum variant)
//
// All evaluation is by forward recurrence.

#include "qdho/deformation.hpp"
#include "qdho/errors.hpp"
#include "qdho/tridiagonal.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qdho {

enum class PolynomialFamily { deficiency, hermite_x, hermite_p };

inline std::string to_string(PolynomialFamily f) {
    switch (f) {
        case PolynomialFamily::deficiency: return "P";
        case PolynomialFamily::hermite_x: return "hermite-x";
        case PolynomialFamily::hermite_p: return "hermite-p";
    }
    return "P";
}

/// P_0(z) .. P_{n_max}(z). Recurrence coefficients come from log [n]_q, so the
/// sequence runs far past the point where [n]_q itself overflows.
inline std::vector<std::complex<double>> p_sequence(int n_max, std::complex<double> z,
                                                    const QContext& ctx) {
    if (n_max < 0) throw DomainError("polynomial degree must be >= 0");
    std::vector<std::complex<double>> p(static_cast<std::size_t>(n_max) + 1);
    p[0] = 1.0;
    if (n_max == 0) return p;
    p[1] = z;  // [1]_q = 1
    double log_k = 0.0;  // log [1]_q
    for (int k = 1; k < n_max; ++k) {
        const double log_k1 = log_q_number(k + 1, ctx);
        const double inv_sqrt_k1 = std::exp(-0.5 * log_k1);
        const double ratio = std::exp(0.5 * (log_k - log_k1));
        p[k + 1] = z * p[k] * inv_sqrt_k1 - ratio * p[k - 1];
        log_k = log_k1;
    }
    return p;
}

inline std::complex<double> eval_P(int n, std::complex<double> z, const QContext& ctx) {
    const auto v = p_sequence(n, z, ctx).back();
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw OverflowError("P_" + std::to_string(n) + " overflows double");
    return v;
}

namespace detail {

/// H_{k+1} = 2w H_k - sign (1 - q^k) H_{k-1}; sign = +1 for the x family, -1 for the ip family.
inline std::complex<double> hermite_recurrence(int n, std::complex<double> w, double q, double sign) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    std::complex<double> prev = 0.0, cur = 1.0;
    double qk = 1.0;
    for (int k = 0; k < n; ++k) {
        const std::complex<double> next = 2.0 * w * cur - sign * (1.0 - qk) * prev;
        prev = cur;
        cur = next;
        qk *= q;
    }
    if (!std::isfinite(cur.real()) || !std::isfinite(cur.imag()))
        throw OverflowError("H_" + std::to_string(n) + " overflows double");
    return cur;
}

inline std::vector<double> hermite_coefficients(int n, double q, double sign) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    std::vector<double> prev, cur{1.0};
    double qk = 1.0;
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= sign * (1.0 - qk) * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
        qk *= q;
    }
    return cur;
}

}  // namespace detail

/// H_{n,q}(x) for real x.
inline double eval_qhermite(int n, double x, const QContext& ctx) {
    return detail::hermite_recurrence(n, x, ctx.q(), 1.0).real();
}

/// q-Hermite recurrence at a complex argument.
inline std::complex<double> eval_qhermite(int n, std::complex<double> w, const QContext& ctx) {
    return detail::hermite_recurrence(n, w, ctx.q(), 1.0);
}

/// H_{n,q}(ip), the momentum family with the sign-flipped recurrence in the variable ip.
inline std::complex<double> eval_qhermite_momentum(int n, double p, const QContext& ctx) {
    return detail::hermite_recurrence(n, {0.0, p}, ctx.q(), -1.0);
}

/// Ascending coefficients of H_{n,q} in x. Leading coefficient is 2^n.
inline std::vector<double> qhermite_coefficients(int n, const QContext& ctx) {
    return detail::hermite_coefficients(n, ctx.q(), 1.0);
}

/// Ascending coefficients of H_{n,q}(ip) as a polynomial in the variable w = ip.
inline std::vector<double> qhermite_momentum_coefficients(int n, const QContext& ctx) {
    return detail::hermite_coefficients(n, ctx.q(), -1.0);
}

/// Ascending coefficients of P_n(z).
inline std::vector<double> p_coefficients(int n, const QContext& ctx) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    std::vector<double> prev, cur{1.0};
    for (int k = 0; k < n; ++k) {
        const double sk = std::sqrt(q_number(k, ctx));
        const double sk1 = std::sqrt(q_number(k + 1, ctx));
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i] / sk1;
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= sk * prev[i] / sk1;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// A polynomial family bound to its deformation. The frame is only needed for
/// argument scalings that involve m_alpha.
struct RecurrencePolynomial {
    PolynomialFamily family;
    QContext ctx;
    std::optional<DeformedFrame> frame;

    std::complex<double> evaluate(int n, std::complex<double> arg) const {
        switch (family) {
            case PolynomialFamily::deficiency: return eval_P(n, arg, ctx);
            case PolynomialFamily::hermite_x: return eval_qhermite(n, arg, ctx);
            case PolynomialFamily::hermite_p:
                // arg is p; the family lives in the variable ip.
                return detail::hermite_recurrence(n, std::complex<double>(0.0, 1.0) * arg, ctx.q(), -1.0);
        }
        return 0.0;
    }

    std::vector<double> coefficients(int n) const {
        switch (family) {
            case PolynomialFamily::deficiency: return p_coefficients(n, ctx);
            case PolynomialFamily::hermite_x: return qhermite_coefficients(n, ctx);
            case PolynomialFamily::hermite_p: return qhermite_momentum_coefficients(n, ctx);
        }
        return {};
    }
};

/// Both sides of (q;q)_n^{1/2} P~_n(gamma) = H_{n,q}(gamma), 2 gamma = (1-q)^{1/2} m_alpha x.
struct BridgeValues {
    std::complex<double> lhs;    ///< (q;q)_n^{1/2} times P_n at the rescaled argument
    std::complex<double> rhs;    ///< q-Hermite recurrence at gamma
    std::complex<double> gamma;
};

/// Evaluates the P-to-q-Hermite bridge by two independent recurrences. For q > 1 the
/// square roots (1 - q^k)^{1/2} are imaginary; each is the principal root.
inline BridgeValues relate_P_to_H(int n, double x, const DeformedFrame& frame) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    const QContext ctx(frame);
    const double q = frame.q;
    const std::complex<double> root = std::sqrt(std::complex<double>(1.0 - q, 0.0));
    const std::complex<double> gamma = 0.5 * root * frame.m_alpha * x;

    // P~_n(gamma) = P_{n,q}(x), the position-basis recurrence m_alpha x P_n = ..., i.e. P_n at z = m_alpha x.
    const std::complex<double> z = (q == 1.0) ? std::complex<double>(frame.m_alpha * x, 0.0)
                                              : 2.0 * gamma / root;
    std::complex<double> pochhammer_root = 1.0;
    double qk = 1.0;
    for (int k = 1; k <= n; ++k) {
        qk *= q;
        pochhammer_root *= std::sqrt(std::complex<double>(1.0 - qk, 0.0));
    }
    return {pochhammer_root * eval_P(n, z, ctx), eval_qhermite(n, gamma, ctx), gamma};
}

/// n x n Jacobi matrix with off-diagonal sqrt([1]_q), ..., sqrt([n-1]_q).
inline TridiagonalSymmetric p_jacobi_matrix(int n, const QContext& ctx) {
    TridiagonalSymmetric t;
    t.diag.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 1; k < n; ++k) t.offdiag.push_back(std::sqrt(q_number(k, ctx)));
    return t;
}

/// The n real, simple zeros of P_n, ascending, as eigenvalues of the n x n Jacobi matrix.
inline std::vector<double> zeros(int n, const QContext& ctx) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    if (n == 0) return {};
    return eigendecompose(p_jacobi_matrix(n, ctx), false).eigenvalues;
}

inline std::vector<double> zeros(int n, const DeformedFrame& frame) { return zeros(n, QContext(frame)); }

}  // namespace qdho
