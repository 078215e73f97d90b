#pragma once

// Finite m-grid realization of the su(2)-like structure spanned by (x, p, theta):
// theta |j,m> = m |j,m>, J+ |j,m> = C+ |j,m+alpha>, J- |j,m> = C- |j,m-alpha>,
// m = -j, -j+alpha, ..., j, with
//
//   C+ = sqrt((j-m)(j+m+alpha)),   C- = sqrt((j+m)(j-m+alpha)).
//
// The relations [theta, J+-] = +-alpha J+- hold on the grid. The claimed
// [J+, J-] = 2 alpha^{-2} theta and the geometric-mean energy formula do not
// follow from these coefficients; they are evaluated and their deviation is
// reported, never assumed.

#include "qdho/deformation.hpp"
#include "qdho/errors.hpp"
#include "qdho/fock.hpp"
#include "qdho/precision.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace qdho {

struct Su2Frame {
    double alpha = 0.0;
    double j = 0.0;
    double grid_step = 0.0;  ///< equal to alpha
    std::vector<double> m_values;
};

/// Grid m = -j + k alpha, k = 0..2j/alpha. Rejects grids that do not close on +j.
inline Su2Frame make_su2_frame(double j, double alpha) {
    if (!(j > 0.0) || !std::isfinite(j)) throw DomainError("su2: j must be > 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("su2: grid step alpha must be > 0");
    const double steps = 2.0 * j / alpha;
    const double k_max = std::round(steps);
    if (std::abs(steps - k_max) > 1e-9 * std::max(1.0, steps))
        throw DomainError("su2: 2j/alpha must be a nonnegative integer (got " + std::to_string(steps) + ")");
    if (k_max > 10000) throw DomainError("su2: grid larger than 10001 points");
    Su2Frame f{alpha, j, alpha, {}};
    for (int k = 0; k <= static_cast<int>(k_max); ++k) f.m_values.push_back(-j + k * alpha);
    f.m_values.back() = j;
    return f;
}

struct LadderCoefficients {
    double c_plus;
    double c_minus;
};

inline LadderCoefficients ladder_coefficients(double j, double m, double alpha) {
    const double tol = 1e-12 * std::max(1.0, j * j);
    if (m < -j - 1e-12 * std::max(1.0, j) || m > j + 1e-12 * std::max(1.0, j))
        throw DomainError("su2: m outside [-j, j]");
    const double plus = (j - m) * (j + m + alpha);
    const double minus = (j + m) * (j - m + alpha);
    if (plus < -tol || minus < -tol)
        throw DomainError("su2: negative radicand in ladder coefficient (m outside the band for this alpha)");
    return {std::sqrt(std::max(0.0, plus)), std::sqrt(std::max(0.0, minus))};
}

struct Su2Representation {
    Su2Frame frame;
    Eigen::MatrixXd j_plus;
    Eigen::MatrixXd j_minus;
    Eigen::MatrixXd theta;
    /// "R1" = ||[Theta,J+] - alpha J+||, "R2" = ||[Theta,J-] + alpha J-||,
    /// "R3" = ||[J+,J-] - 2 alpha^{-2} Theta|| (spectral norms).
    std::map<std::string, double> residuals;
    std::vector<double> commutator_diagonal;  ///< diag([J+, J-]); equals 2 alpha m
};

inline double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

inline Su2Representation build_representation(double j, double alpha) {
    Su2Representation rep;
    rep.frame = make_su2_frame(j, alpha);
    const auto& m = rep.frame.m_values;
    const int dim = static_cast<int>(m.size());
    rep.j_plus = Eigen::MatrixXd::Zero(dim, dim);
    rep.j_minus = Eigen::MatrixXd::Zero(dim, dim);
    rep.theta = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        rep.theta(k, k) = m[k];
        const auto c = ladder_coefficients(j, m[k], alpha);
        if (k + 1 < dim) rep.j_plus(k + 1, k) = c.c_plus;
        if (k > 0) rep.j_minus(k - 1, k) = c.c_minus;
    }
    const Eigen::MatrixXd& jp = rep.j_plus;
    const Eigen::MatrixXd& jm = rep.j_minus;
    const Eigen::MatrixXd& th = rep.theta;
    const Eigen::MatrixXd comm = jp * jm - jm * jp;
    rep.residuals["R1"] = spectral_norm(th * jp - jp * th - alpha * jp);
    rep.residuals["R2"] = spectral_norm(th * jm - jm * th + alpha * jm);
    rep.residuals["R3"] = spectral_norm(comm - (2.0 / (alpha * alpha)) * th);
    for (int k = 0; k < dim; ++k) rep.commutator_diagonal.push_back(comm(k, k));
    return rep;
}

/// Coefficients of H = [(1+alpha) x^2 + (1+beta) p^2 + 1] / 2 as (x^2, p^2, constant).
struct QuadraticForm {
    double x2;
    double p2;
    double constant;
};

inline QuadraticForm quadratic_form(double alpha, double beta) {
    return {0.5 * (1.0 + alpha), 0.5 * (1.0 + beta), 0.5};
}

/// [(1+alpha) X^2 + (1+beta) P^2 + I] / 2 for arbitrary truncated X, P and coefficients.
inline TruncatedOperator quadratic_hamiltonian(const TruncatedOperator& x, const TruncatedOperator& p,
                                               double alpha, double beta) {
    if (x.dim() != p.dim()) throw DomainError("quadratic_hamiltonian: X and P dimensions differ");
    const auto c = quadratic_form(alpha, beta);
    const Eigen::MatrixXcd h = c.x2 * (x.entries() * x.entries()) + c.p2 * (p.entries() * p.entries()) +
                               c.constant * Eigen::MatrixXcd::Identity(x.dim(), x.dim());
    return TruncatedOperator(OperatorLabel::hamiltonian, h);
}

/// The quadratic Hamiltonian on the frame's own position and momentum matrices.
inline TruncatedOperator quadratic_hamiltonian(const DeformedFrame& frame, int n_dim) {
    return quadratic_hamiltonian(build_position(frame, n_dim), build_momentum(frame, n_dim), frame.alpha,
                                 frame.beta);
}

/// Interior deviations of the quadratic Hamiltonian from a a^+ and from a^+ a,
/// a = (X + iP)/sqrt(2). Algebraically a a^+ = (X^2 + P^2 + theta)/2 equals the quadratic
/// form, while a^+ a = (X^2 + P^2 - theta)/2 differs from it by theta.
struct QuadraticHamiltonianCheck {
    double interior_vs_a_adag;
    double interior_vs_adag_a;
};

inline QuadraticHamiltonianCheck quadratic_hamiltonian_check(const DeformedFrame& frame, int n_dim) {
    detail::require_dim(n_dim);
    using R = ExtendedReal;
    const auto f = derive_frame_as<R>(frame.alpha, frame.beta);
    const auto b = detail::lower_shift<R>(n_dim, f.q);
    const RealMatrix<R> x = (b + b.transpose()) / f.m_alpha;
    const RealMatrix<R> k = (b.transpose() - b) / f.m_beta;  // P = i K
    const RealMatrix<R> id = RealMatrix<R>::Identity(n_dim, n_dim);
    // a = (X - K)/sqrt(2), a^+ = (X + K)/sqrt(2); P^2 = -K^2.
    const RealMatrix<R> h = (R(1) + f.alpha) / 2 * (x * x) - (R(1) + f.beta) / 2 * (k * k) + id / 2;
    const RealMatrix<R> a_adag = (x - k) * (x + k) / 2;
    const RealMatrix<R> adag_a = (x + k) * (x - k) / 2;
    const int last = n_dim - 3;
    const auto interior = [&](const RealMatrix<R>& d) {
        return detail::to_double(RealMatrix<R>(d.topLeftCorner(last + 1, last + 1))).cwiseAbs().maxCoeff();
    };
    return {interior(h - a_adag), interior(h - adag_a)};
}

/// Energy formula (alpha^2/2) sqrt((j+m)(j-m)(j+m+alpha)(j-m+alpha)) next to the
/// eigenvalue (alpha^2/2)(j+m)(j-m+alpha) of (alpha^2/2) J+ J- on the grid.
struct EigenvalueFormula {
    double formula;
    double representation_route;
};

inline EigenvalueFormula hamiltonian_eigenvalue_formula(double j, double m, double alpha) {
    const double radicand = (j + m) * (j - m) * (j + m + alpha) * (j - m + alpha);
    if (radicand < -1e-12 * std::max(1.0, j * j * j * j))
        throw DomainError("su2: negative radicand in the energy formula");
    const double a2 = 0.5 * alpha * alpha;
    return {a2 * std::sqrt(std::max(0.0, radicand)), a2 * (j + m) * (j - m + alpha)};
}

/// 2 alpha^2 sqrt((j+m)(j-m)(j+m+2alpha)(j-m+2alpha)).
inline double j2_eigenvalue_formula(double j, double m, double alpha) {
    const double radicand = (j + m) * (j - m) * (j + m + 2 * alpha) * (j - m + 2 * alpha);
    if (radicand < -1e-12 * std::max(1.0, j * j * j * j))
        throw DomainError("su2: negative radicand in the J^2 formula");
    return 2.0 * alpha * alpha * std::sqrt(std::max(0.0, radicand));
}

}  // namespace qdho
