#pragma once

#include <complex>
#include <Eigen/Dense>

namespace nbundle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

} // namespace nbundle
