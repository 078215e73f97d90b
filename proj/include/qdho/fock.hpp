#pragma once

// Truncated Fock-space matrices of the q-deformed ladder algebra
//
//   b |n> = sqrt([n]_q) |n-1>,   b^+ |n> = sqrt([n+1]_q) |n+1>,
//   x = (b + b^+) / m_alpha,     p = i (b^+ - b) / m_beta,
//
// on the first N number states with the hard cutoff b^+ |N-1> = 0. Identities
// of the infinite algebra hold exactly on "interior" indices; the last row and
// column carry the truncation distortion, and every post-condition here says
// which entries are exact.
//
// Residuals of exact identities are evaluated in ExtendedReal and rounded to
// double at the end.

#include "qdho/deformation.hpp"
#include "qdho/errors.hpp"
#include "qdho/precision.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <span>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdho {

enum class OperatorLabel { annihilator, creator, position, momentum, hamiltonian, theta, custom };

inline std::string_view to_string(OperatorLabel label) {
    switch (label) {
        case OperatorLabel::annihilator: return "annihilator";
        case OperatorLabel::creator: return "creator";
        case OperatorLabel::position: return "position";
        case OperatorLabel::momentum: return "momentum";
        case OperatorLabel::hamiltonian: return "hamiltonian";
        case OperatorLabel::theta: return "theta";
        case OperatorLabel::custom: return "custom";
    }
    return "custom";
}

/// Dense complex N x N matrix in the number basis, tagged with what it represents.
class TruncatedOperator {
public:
    TruncatedOperator(OperatorLabel label, Eigen::MatrixXcd entries)
        : label_(label), entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols())
            throw DomainError("TruncatedOperator must be square");
        if (entries_.rows() < 2) throw DomainError("Fock truncation must be N >= 2");
    }

    OperatorLabel label() const { return label_; }
    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    std::complex<double> operator()(int i, int j) const { return entries_(i, j); }

private:
    OperatorLabel label_;
    Eigen::MatrixXcd entries_;
};

/// Largest |entry| over rows and columns 0..last.
inline double interior_max_abs(const TruncatedOperator& op, int last) {
    const int n = std::min(last + 1, op.dim());
    if (n <= 0) return 0.0;
    return op.entries().topLeftCorner(n, n).cwiseAbs().maxCoeff();
}

namespace detail {

inline void require_dim(int n) {
    if (n < 2) throw DomainError("Fock truncation must be N >= 2 (got " + std::to_string(n) + ")");
}

inline void require_finite(const Eigen::MatrixXcd& m, const char* what) {
    if (!m.allFinite()) throw OverflowError(std::string(what) + " has entries beyond the double range");
}

template <typename Real>
RealMatrix<Real> lower_shift(int n_dim, const Real& q) {
    RealMatrix<Real> b = RealMatrix<Real>::Zero(n_dim, n_dim);
    Real bracket(0);
    for (int n = 1; n < n_dim; ++n) {
        bracket = Real(1) + q * bracket;  // [n]_q
        b(n - 1, n) = sqrt_of(bracket);
    }
    return b;
}

template <typename Real>
TruncatedOperator real_to_operator(OperatorLabel label, const RealMatrix<Real>& m,
                                   std::complex<double> factor = {1.0, 0.0}) {
    Eigen::MatrixXcd out = detail::to_double(m).template cast<std::complex<double>>() * factor;
    require_finite(out, std::string(to_string(label)).c_str());
    return TruncatedOperator(label, std::move(out));
}

template <typename Real>
RealMatrix<Real> matrix_power(const RealMatrix<Real>& m, int k) {
    RealMatrix<Real> out = RealMatrix<Real>::Identity(m.rows(), m.cols());
    for (int i = 0; i < k; ++i) out = (out * m).eval();
    return out;
}

}  // namespace detail

/// Annihilator B (lower shift of sqrt([n]_q)) in any scalar type.
template <typename Real>
RealMatrix<Real> ladder_matrix(int n_dim, const QContext& ctx) {
    detail::require_dim(n_dim);
    return detail::lower_shift<Real>(n_dim, Real(ctx.q()));
}

/// (B, B^+). B has only the entries (n-1, n) = sqrt([n]_q); B |0> = 0.
inline std::pair<TruncatedOperator, TruncatedOperator> build_ladder(int n_dim, const QContext& ctx) {
    const auto b = ladder_matrix<double>(n_dim, ctx);
    return {detail::real_to_operator(OperatorLabel::annihilator, b),
            detail::real_to_operator(OperatorLabel::creator, RealMatrix<double>(b.transpose()))};
}

/// Position (B + B^+) / m_alpha: real symmetric Jacobi matrix with off-diagonal sqrt([n]_q)/m_alpha.
inline TruncatedOperator build_position(const DeformedFrame& frame, int n_dim) {
    const auto b = ladder_matrix<double>(n_dim, QContext(frame));
    return detail::real_to_operator(OperatorLabel::position,
                                    RealMatrix<double>((b + b.transpose()) / frame.m_alpha));
}

/// Momentum i (B^+ - B) / m_beta: entry (n+1, n) = +i x_{n+1,beta}, (n, n+1) = -i x_{n+1,beta}.
inline TruncatedOperator build_momentum(const DeformedFrame& frame, int n_dim) {
    const auto b = ladder_matrix<double>(n_dim, QContext(frame));
    return detail::real_to_operator(OperatorLabel::momentum,
                                    RealMatrix<double>((b.transpose() - b) / frame.m_beta),
                                    {0.0, 1.0});
}

/// H = B B^+ + B^+ B. Diagonal [n]_q + [n+1]_q for n <= N-2; the last entry is [N-1]_q
/// because B^+ |N-1> = 0.
inline TruncatedOperator build_hamiltonian(const QContext& ctx, int n_dim) {
    const auto b = ladder_matrix<ExtendedReal>(n_dim, ctx);
    const RealMatrix<ExtendedReal> h = b * b.transpose() + b.transpose() * b;
    return detail::real_to_operator(OperatorLabel::hamiltonian, h);
}

/// theta = I + alpha X^2 + beta P^2 on the truncated space.
inline TruncatedOperator build_theta(const DeformedFrame& frame, int n_dim) {
    detail::require_dim(n_dim);
    const auto f = derive_frame_as<ExtendedReal>(frame.alpha, frame.beta);
    const auto b = detail::lower_shift<ExtendedReal>(n_dim, f.q);
    const RealMatrix<ExtendedReal> x = (b + b.transpose()) / f.m_alpha;
    const RealMatrix<ExtendedReal> k = (b.transpose() - b) / f.m_beta;  // P = i K
    const RealMatrix<ExtendedReal> theta =
        RealMatrix<ExtendedReal>::Identity(n_dim, n_dim) + f.alpha * x * x - f.beta * k * k;
    return detail::real_to_operator(OperatorLabel::theta, theta);
}

/// B B^+ - q B^+ B - I. Zero everywhere except (N-1, N-1) = -q [N-1]_q - 1.
inline TruncatedOperator commutator_residual(const QContext& ctx, int n_dim) {
    const auto b = ladder_matrix<ExtendedReal>(n_dim, ctx);
    const ExtendedReal q(ctx.q());
    const RealMatrix<ExtendedReal> r = b * b.transpose() - q * (b.transpose() * b) -
                                       RealMatrix<ExtendedReal>::Identity(n_dim, n_dim);
    return detail::real_to_operator(OperatorLabel::custom, r);
}

/// [X, P] - i (I + alpha X^2 + beta P^2). Vanishes on indices <= N-2; the last row and
/// column carry the cutoff.
inline TruncatedOperator theta_identity_residual(const DeformedFrame& frame, int n_dim) {
    detail::require_dim(n_dim);
    const auto f = derive_frame_as<ExtendedReal>(frame.alpha, frame.beta);
    const auto b = detail::lower_shift<ExtendedReal>(n_dim, f.q);
    const RealMatrix<ExtendedReal> x = (b + b.transpose()) / f.m_alpha;
    const RealMatrix<ExtendedReal> k = (b.transpose() - b) / f.m_beta;
    // With P = i K everything is real: [X,P] - i theta = i([X,K] - I - alpha X^2 + beta K^2).
    const RealMatrix<ExtendedReal> r = x * k - k * x -
                                       RealMatrix<ExtendedReal>::Identity(n_dim, n_dim) -
                                       f.alpha * x * x + f.beta * k * k;
    return detail::real_to_operator(OperatorLabel::custom, r, {0.0, 1.0});
}

/// Delta x Delta p - (1 + alpha (Delta x)^2 + beta (Delta p)^2) / 2 for a normalized state
/// in the truncated space. Vanishes on the vacuum and is positive on number states.
inline double uncertainty_check(std::span<const std::complex<double>> state,
                                const DeformedFrame& frame, int n_dim) {
    detail::require_dim(n_dim);
    if (static_cast<int>(state.size()) != n_dim)
        throw DomainError("state length must equal the Fock truncation N");
    const Eigen::Map<const Eigen::VectorXcd> psi(state.data(), n_dim);
    const double norm2 = psi.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw DomainError("state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");

    const auto x = build_position(frame, n_dim).entries();
    const auto p = build_momentum(frame, n_dim).entries();
    const auto variance = [&](const Eigen::MatrixXcd& op) {
        const Eigen::VectorXcd opsi = op * psi;
        const double mean = psi.dot(opsi).real();
        const double second = opsi.squaredNorm();  // <psi|op^2|psi> for Hermitian op
        return std::max(0.0, second - mean * mean);
    };
    const double vx = variance(x);
    const double vp = variance(p);
    return std::sqrt(vx) * std::sqrt(vp) - 0.5 * (1.0 + frame.alpha * vx + frame.beta * vp);
}

/// coefficient * (b^+)^dagger_power * b^plain_power.
struct NormalWord {
    int dagger_power = 0;
    int plain_power = 0;
    std::complex<double> coefficient{0.0, 0.0};
};

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

}  // namespace detail

/// Normal-ordered expansion of x^l p^r, unmerged, in (s, t) enumeration order:
///   i^r / (m_alpha^l m_beta^r) C(l,s) C(r,t) (-1)^(r-t) (b^+)^(l-s+t) b^(s+r-t).
inline std::vector<NormalWord> normal_order_expansion(int l, int r, const DeformedFrame& frame) {
    if (l < 0 || r < 0) throw DomainError("normal_order_expansion requires l, r >= 0");
    std::complex<double> prefactor{1.0, 0.0};
    for (int k = 0; k < r; ++k) prefactor *= std::complex<double>(0.0, 1.0);
    prefactor /= std::pow(frame.m_alpha, l) * std::pow(frame.m_beta, r);

    std::vector<NormalWord> words;
    words.reserve(static_cast<std::size_t>((l + 1) * (r + 1)));
    for (int s = 0; s <= l; ++s) {
        for (int t = 0; t <= r; ++t) {
            const double sign = ((r - t) % 2 == 0) ? 1.0 : -1.0;
            words.push_back({l - s + t, s + r - t,
                             prefactor * (sign * detail::binomial(l, s) * detail::binomial(r, t))});
        }
    }
    return words;
}

/// Sums coefficients of equal (dagger, plain) pairs, sorts by the pair, and drops words
/// whose terms cancel to within rounding of the summed magnitudes.
inline std::vector<NormalWord> merge_normal_words(std::vector<NormalWord> words) {
    std::sort(words.begin(), words.end(), [](const NormalWord& a, const NormalWord& b) {
        return std::pair(a.dagger_power, a.plain_power) < std::pair(b.dagger_power, b.plain_power);
    });
    std::vector<NormalWord> merged;
    std::vector<double> magnitude;
    for (const auto& w : words) {
        if (!merged.empty() && merged.back().dagger_power == w.dagger_power &&
            merged.back().plain_power == w.plain_power) {
            merged.back().coefficient += w.coefficient;
            magnitude.back() += std::abs(w.coefficient);
        } else {
            merged.push_back(w);
            magnitude.push_back(std::abs(w.coefficient));
        }
    }
    std::vector<NormalWord> kept;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < merged.size(); ++i)
        if (std::abs(merged[i].coefficient) > 4.0 * eps * magnitude[i]) kept.push_back(merged[i]);
    return kept;
}

/// Coefficient law of the normal-ordered exponential in the vacuum projector series.
enum class ProjectorCoefficients {
    q_exponential,   ///< (-1)^k q^{k(k-1)/2} / [k]_q!
    plain_factorial  ///< (-1)^k / k!, the literal e^{-b^+ b}
};

namespace detail {

template <typename Real>
RealMatrix<Real> projector_series(const QContext& ctx, int n_dim, ProjectorCoefficients law) {
    const auto b = ladder_matrix<Real>(n_dim, ctx);
    const RealMatrix<Real> bt = b.transpose();
    const Real q(ctx.q());
    RealMatrix<Real> sum = RealMatrix<Real>::Zero(n_dim, n_dim);
    RealMatrix<Real> lower = RealMatrix<Real>::Identity(n_dim, n_dim);  // B^k
    RealMatrix<Real> upper = RealMatrix<Real>::Identity(n_dim, n_dim);  // (B^+)^k
    Real coefficient(1);
    for (int k = 0; k <= n_dim; ++k) {
        if (k > 0) {
            lower = (lower * b).eval();
            upper = (bt * upper).eval();
            if (law == ProjectorCoefficients::q_exponential) {
                Real qpow(1);
                for (int i = 0; i < k - 1; ++i) qpow *= q;  // q^{k-1}
                coefficient = -coefficient * qpow / q_number_as<Real>(k, q);
            } else {
                coefficient = -coefficient / Real(k);
            }
        }
        sum += coefficient * (upper * lower);
    }
    return sum;
}

}  // namespace detail

/// sum_k c_k (B^+)^k B^k, k = 0..N. With q-exponential coefficients this equals the
/// vacuum projector |0><0|; with plain factorials it does not once q > 1.
inline TruncatedOperator vacuum_projector_series(
    const QContext& ctx, int n_dim, ProjectorCoefficients law = ProjectorCoefficients::q_exponential) {
    detail::require_dim(n_dim);
    return detail::real_to_operator(OperatorLabel::custom,
                                    detail::projector_series<ExtendedReal>(ctx, n_dim, law));
}

/// |m><n| = (B^+)^m / sqrt([m]!) * projector * B^n / sqrt([n]!). Requires m, n <= N-3.
inline TruncatedOperator ketbra(int m, int n, const QContext& ctx, int n_dim,
                                ProjectorCoefficients law = ProjectorCoefficients::q_exponential) {
    detail::require_dim(n_dim);
    if (m < 0 || n < 0 || m > n_dim - 3 || n > n_dim - 3)
        throw DomainError("ketbra requires 0 <= m, n <= N-3");
    const auto b = ladder_matrix<ExtendedReal>(n_dim, ctx);
    const ExtendedReal q(ctx.q());
    const RealMatrix<ExtendedReal> projector = detail::projector_series<ExtendedReal>(ctx, n_dim, law);
    const RealMatrix<ExtendedReal> left = detail::matrix_power<ExtendedReal>(b.transpose(), m) /
                                          detail::sqrt_of(q_factorial_as<ExtendedReal>(m, q));
    const RealMatrix<ExtendedReal> right = detail::matrix_power<ExtendedReal>(b, n) /
                                           detail::sqrt_of(q_factorial_as<ExtendedReal>(n, q));
    return detail::real_to_operator(OperatorLabel::custom, RealMatrix<ExtendedReal>(left * projector * right));
}

}  // namespace qdho
