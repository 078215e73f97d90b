#pragma once

// Position-space realization p = -i theta(x) d/dx at beta = 0 (theta = 1 + alpha x^2),
// the weighted inner product <f, g> = int dx / theta(x) conj(f) g, and the
// momentum-to-position kernel exp(i p / (alpha sigma(p)) arctan(x / sigma(p))),
// sigma(p) = sqrt(p^2 + 1/alpha).
//
// The mirror construction x = i theta d/dp in momentum space is the same code
// under x <-> p.

#include "qdho/errors.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qdho {

/// Uniform grid x_i = x_min + i h, i = 0..n_points-1.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;
    double h = 0.0;

    /// Upper half is measured from x_max so symmetric grids are exactly symmetric.
    double x(int i) const { return 2 * i < n_points ? x_min + i * h : x_max - (n_points - 1 - i) * h; }
};

inline Grid1D make_grid(double x_min, double x_max, int n_points) {
    if (n_points < 8) throw DomainError("grid needs at least 8 points");
    if (!(x_max > x_min)) throw DomainError("grid needs x_max > x_min");
    return {x_min, x_max, n_points, (x_max - x_min) / (n_points - 1)};
}

inline Grid1D symmetric_grid(double half_width, int n_points) { return make_grid(-half_width, half_width, n_points); }

inline std::vector<std::complex<double>> sample(const Grid1D& grid,
                                                const std::function<std::complex<double>(double)>& f) {
    std::vector<std::complex<double>> v(static_cast<std::size_t>(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i) v[i] = f(grid.x(i));
    return v;
}

/// Discretized -i theta(x) d/dx together with the weights 1/theta(x_i) of its inner product.
struct WeightedOperator {
    Grid1D grid;
    Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> op_matrix;
    std::vector<double> weight;
};

/// Central differences inside, second-order one-sided stencils at the two endpoints.
inline WeightedOperator build_momentum_xrep(const Grid1D& grid, double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("xrep: alpha must be >= 0");
    const int n = grid.n_points;
    const double inv2h = 1.0 / (2.0 * grid.h);
    using T = Eigen::Triplet<std::complex<double>>;
    std::vector<T> triplets;
    triplets.reserve(static_cast<std::size_t>(3 * n));
    WeightedOperator w{grid, {}, std::vector<double>(static_cast<std::size_t>(n))};
    const std::complex<double> minus_i{0.0, -1.0};
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double theta = 1.0 + alpha * x * x;
        w.weight[i] = 1.0 / theta;
        const std::complex<double> s = minus_i * theta * inv2h;
        if (i == 0) {
            triplets.emplace_back(i, 0, -3.0 * s);
            triplets.emplace_back(i, 1, 4.0 * s);
            triplets.emplace_back(i, 2, -1.0 * s);
        } else if (i == n - 1) {
            triplets.emplace_back(i, n - 3, 1.0 * s);
            triplets.emplace_back(i, n - 2, -4.0 * s);
            triplets.emplace_back(i, n - 1, 3.0 * s);
        } else {
            triplets.emplace_back(i, i - 1, -1.0 * s);
            triplets.emplace_back(i, i + 1, 1.0 * s);
        }
    }
    w.op_matrix.resize(n, n);
    w.op_matrix.setFromTriplets(triplets.begin(), triplets.end());
    return w;
}

inline std::vector<std::complex<double>> apply_operator(const WeightedOperator& op,
                                               std::span<const std::complex<double>> f) {
    if (static_cast<int>(f.size()) != op.grid.n_points) throw DomainError("xrep: sample length mismatch");
    const Eigen::Map<const Eigen::VectorXcd> v(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXcd out = op.op_matrix * v;
    return {out.data(), out.data() + out.size()};
}

/// sum_i tau_i w_i conj(f_i) g_i h with trapezoid end weights tau_0 = tau_{N-1} = 1/2.
inline std::complex<double> weighted_inner_product(const WeightedOperator& op,
                                                   std::span<const std::complex<double>> f,
                                                   std::span<const std::complex<double>> g) {
    const int n = op.grid.n_points;
    if (static_cast<int>(f.size()) != n || static_cast<int>(g.size()) != n)
        throw DomainError("xrep: sample length mismatch");
    std::complex<double> sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tau = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        sum += tau * op.weight[i] * std::conj(f[i]) * g[i];
    }
    return sum * op.grid.h;
}

struct HermiticityResidual {
    double residual;              ///< |<f, p g>_w - <p f, g>_w|
    std::complex<double> left;    ///< <f, p g>_w
    std::complex<double> right;   ///< <p f, g>_w
    bool boundary_warning;        ///< f or g does not decay below 1e-12 at the endpoints
};

inline HermiticityResidual weighted_hermiticity_residual(const WeightedOperator& op,
                                                         std::span<const std::complex<double>> f,
                                                         std::span<const std::complex<double>> g) {
    const auto pf = apply_operator(op, f);
    const auto pg = apply_operator(op, g);
    const auto left = weighted_inner_product(op, f, pg);
    const auto right = weighted_inner_product(op, pf, g);
    const auto tail = [](std::span<const std::complex<double>> v) {
        return std::max(std::abs(v.front()), std::abs(v.back()));
    };
    return {std::abs(left - right), left, right, std::max(tail(f), tail(g)) > 1e-12};
}

/// (p / (alpha sigma(p))) arctan(x / sigma(p)), sigma(p) = sqrt(p^2 + 1/alpha). Tends to p x as alpha -> 0.
inline double kernel_phase(double x, double p, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("kernel_phase requires alpha > 0");
    const double sigma = std::sqrt(p * p + 1.0 / alpha);
    return p / (alpha * sigma) * std::atan(x / sigma);
}

namespace detail {

inline std::vector<std::complex<double>> trapezoid_transform(
    const Grid1D& p_grid, std::span<const std::complex<double>> samples, std::span<const double> x_targets,
    const std::function<double(double, double)>& phase) {
    if (static_cast<int>(samples.size()) != p_grid.n_points) throw DomainError("xrep: sample length mismatch");
    std::vector<std::complex<double>> out;
    out.reserve(x_targets.size());
    for (double x : x_targets) {
        std::complex<double> sum = 0.0;
        for (int i = 0; i < p_grid.n_points; ++i) {
            const double tau = (i == 0 || i == p_grid.n_points - 1) ? 0.5 : 1.0;
            sum += tau * std::polar(1.0, phase(x, p_grid.x(i))) * samples[i];
        }
        out.push_back(sum * p_grid.h);
    }
    return out;
}

}  // namespace detail

/// Trapezoid quadrature of int dp exp(i kernel_phase(x, p)) Psi(p) at each target x.
inline std::vector<std::complex<double>> kernel_transform(const Grid1D& p_grid,
                                                          std::span<const std::complex<double>> samples,
                                                          double alpha, std::span<const double> x_targets) {
    if (!(alpha > 0.0)) throw DomainError("kernel_transform requires alpha > 0");
    return detail::trapezoid_transform(p_grid, samples, x_targets,
                                       [alpha](double x, double p) { return kernel_phase(x, p, alpha); });
}

/// Same quadrature with the plain kernel exp(i p x).
inline std::vector<std::complex<double>> fourier_transform_reference(const Grid1D& p_grid,
                                                                     std::span<const std::complex<double>> samples,
                                                                     std::span<const double> x_targets) {
    return detail::trapezoid_transform(p_grid, samples, x_targets, [](double x, double p) { return p * x; });
}

}  // namespace qdho
