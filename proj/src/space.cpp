#include "nbundle/space.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nbundle {

SpaceDescriptor build_space(int n_max) {
    if (n_max < 1)
        throw std::invalid_argument("build_space: n_max must be >= 1, got " +
                                    std::to_string(n_max));
    SpaceDescriptor s;
    s.n_max = n_max;
    s.dim = 2 * (n_max + 1);
    return s;
}

Operators build_operators(const SpaceDescriptor& space) {
    if (space.dim != 2 * (space.n_max + 1) || space.n_max < 1)
        throw std::invalid_argument("build_operators: invalid space descriptor");
    const int d = space.dim;
    Operators ops;
    ops.a = Mat::Zero(d, d);
    ops.sigma = Mat::Zero(d, d);
    for (int n = 0; n <= space.n_max; ++n) {
        for (int s = 0; s < 2; ++s) {
            const int col = space.index(n, s);
            if (n >= 1) ops.a(space.index(n - 1, s), col) = std::sqrt(double(n));
            if (s == 1) ops.sigma(space.index(n, 0), col) = 1.0;
        }
    }
    return ops;
}

Complex expectation(const Mat& rho, const Mat& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols() ||
        rho.rows() != rho.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (op * rho).trace();
}

void validate_density_matrix(const Mat& rho, double her_tol, double tr_tol,
                             double pos_tol) {
    const double her = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (her > her_tol)
        throw std::runtime_error("density matrix not Hermitian: max |rho-rho^+| = " +
                                 std::to_string(her));
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (tr_err > tr_tol)
        throw std::runtime_error("density matrix trace deviates from 1 by " +
                                 std::to_string(tr_err));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                          Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -pos_tol)
        throw std::runtime_error("density matrix not positive: min eigenvalue = " +
                                 std::to_string(min_ev));
}

Vec basis_state(const SpaceDescriptor& space, int n, int s) {
    if (n < 0 || n > space.n_max || s < 0 || s > 1)
        throw std::invalid_argument("basis_state: label out of range");
    Vec v = Vec::Zero(space.dim);
    v(space.index(n, s)) = 1.0;
    return v;
}

} // namespace nbundle
