#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>

namespace qdho {

/// Working type for residuals of exact operator identities. Entries of the
/// truncated matrices grow like q^N, so a double carries absolute errors far
/// above the tolerances those identities are checked at.
using ExtendedReal = boost::multiprecision::cpp_bin_float_50;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Real>
Real sqrt_of(const Real& v) {
    using std::sqrt;
    using boost::multiprecision::sqrt;
    return sqrt(v);
}

template <typename Real>
double to_double(const Real& v) {
    return static_cast<double>(v);
}

template <typename Real>
Eigen::MatrixXd to_double(const RealMatrix<Real>& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(i, j) = static_cast<double>(m(i, j));
    return out;
}

}  // namespace detail
}  // namespace qdho
