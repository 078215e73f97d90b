#pragma once

// Deformation parameters of theta(x, p) = 1 + alpha x^2 + beta p^2 and the
// q-number arithmetic of its q-realization b b^+ - q b^+ b = 1.

#include "qdho/errors.hpp"
#include "qdho/precision.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qdho {

/// Parameters of the q-realization, computed in the scalar type `Real`.
template <typename Real>
struct BasicFrame {
    Real alpha;
    Real beta;
    Real q;
    Real m_alpha;
    Real m_beta;
};

using DeformedFrame = BasicFrame<double>;

/// Derives (q, m_alpha, m_beta) from (alpha, beta):
///   q = (1 + s) / (1 - s),  m_alpha = sqrt(2 alpha (1/s - 1)),  m_beta likewise,
/// with s = sqrt(alpha beta). Both parameters must be strictly positive.
template <typename Real = double>
BasicFrame<Real> derive_frame_as(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("alpha and beta must both be > 0 (got alpha=" + std::to_string(alpha) +
                          ", beta=" + std::to_string(beta) + ")");
    if (!(alpha * beta < 1.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw DomainError("alpha*beta must be < 1 for the q-realization to exist");
    const Real a(alpha);
    const Real b(beta);
    const Real s = detail::sqrt_of(Real(a * b));
    const Real one(1);
    const Real k = one / s - one;
    BasicFrame<Real> frame{a, b, (one + s) / (one - s), detail::sqrt_of(Real(2 * a * k)),
                           detail::sqrt_of(Real(2 * b * k))};
    return frame;
}

inline DeformedFrame derive_frame(double alpha, double beta) {
    return derive_frame_as<double>(alpha, beta);
}

/// The deformation parameter alone; everything in the ladder algebra depends only on it.
class QContext {
public:
    explicit QContext(double q) : q_(q) {
        if (!(q >= 1.0) || !std::isfinite(q))
            throw DomainError("q must be a finite real >= 1 (got " + std::to_string(q) + ")");
    }
    explicit QContext(const DeformedFrame& frame) : QContext(frame.q) {}

    double q() const { return q_; }
    bool undeformed() const { return q_ == 1.0; }

private:
    double q_;
};

/// [n]_q = (1 - q^n) / (1 - q), evaluated as the Horner sum 1 + q + ... + q^{n-1}
/// so that integer q stays exact and q -> 1 has no cancellation.
template <typename Real>
Real q_number_as(int n, const Real& q) {
    if (n < 0) throw DomainError("q_number requires n >= 0");
    if (q == Real(1)) return Real(n);
    Real value(0);
    for (int k = 0; k < n; ++k) value = Real(1) + q * value;
    return value;
}

inline double q_number(int n, const QContext& ctx) {
    const double v = q_number_as<double>(n, ctx.q());
    if (!std::isfinite(v)) throw OverflowError("[" + std::to_string(n) + "]_q overflows double");
    return v;
}

/// log [n]_q for n >= 1, stable for n log q far beyond the double range.
inline double log_q_number(int n, const QContext& ctx) {
    if (n < 1) throw DomainError("log_q_number requires n >= 1");
    const double q = ctx.q();
    if (q == 1.0) return std::log(static_cast<double>(n));
    const double lq = std::log1p(q - 1.0);
    const double t = n * lq;
    if (t < 30.0) return std::log(std::expm1(t)) - std::log(q - 1.0);
    return t + std::log1p(-std::exp(-t)) - std::log(q - 1.0);
}

template <typename Real>
Real q_factorial_as(int n, const Real& q) {
    if (n < 0) throw DomainError("q_factorial requires n >= 0");
    Real value(1);
    for (int k = 1; k <= n; ++k) value *= q_number_as<Real>(k, q);
    return value;
}

/// [n]_q! = [1]_q [2]_q ... [n]_q; throws OverflowError past the double range.
inline double q_factorial(int n, const QContext& ctx) {
    if (n < 0) throw DomainError("q_factorial requires n >= 0");
    double value = 1.0;
    for (int k = 1; k <= n; ++k) {
        value *= q_number(k, ctx);
        if (!std::isfinite(value))
            throw OverflowError("[" + std::to_string(n) +
                                "]_q! overflows double; use log_q_factorial");
    }
    return value;
}

inline double log_q_factorial(int n, const QContext& ctx) {
    if (n < 0) throw DomainError("log_q_factorial requires n >= 0");
    double sum = 0.0;
    for (int k = 2; k <= n; ++k) sum += log_q_number(k, ctx);
    return sum;
}

/// E_n = ([n]_q + [n+1]_q) / 2.
inline double energy_level(int n, const QContext& ctx) {
    if (n < 0) throw DomainError("energy_level requires n >= 0");
    return 0.5 * (q_number(n, ctx) + q_number(n + 1, ctx));
}

}  // namespace qdho
