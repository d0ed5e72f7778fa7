#pragma once

#include <Eigen/Dense>

#include <complex>

namespace magkerr {

using Complex = std::complex<double>;

using Mat2 = Eigen::Matrix<double, 2, 2>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using CVec6 = Eigen::Matrix<Complex, 6, 1>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace magkerr
