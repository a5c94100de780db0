#pragma once

#include <Eigen/Dense>
#include <complex>

namespace fvpkit {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline Vector to_complex(const RealVector& v) { return v.cast<Complex>(); }

}  // namespace fvpkit
