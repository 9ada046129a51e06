#include "nbundle/steady.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

namespace nbundle {

Mat steady_state(const Superoperator& liou) {
    const int d = liou.dim;
    const int d2 = d * d;
    Mat sys = liou.m;
    // Trace row: diagonal entries of rho sit at vec index i*(d+1).
    sys.row(0).setZero();
    for (int i = 0; i < d; ++i) sys(0, i * (d + 1)) = 1.0;
    Vec rhs = Vec::Zero(d2);
    rhs(0) = 1.0;

    Eigen::PartialPivLU<Mat> lu(sys);
    Vec v = lu.solve(rhs);

    // A kernel of dimension > 1 leaves the trace-replaced system singular
    // and still produces a small residual for whatever mixture the solver
    // picks, so detect it through the U-diagonal of the factorization.
    const RealVec pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (pivots.minCoeff() < 1e-10 * pivots.maxCoeff()) {
        Eigen::ColPivHouseholderQR<Mat> qr(liou.m);
        qr.setThreshold(1e-9);
        const int kernel_dim = d2 - int(qr.rank());
        if (kernel_dim > 1)
            throw std::runtime_error(
                "steady_state: Liouvillian kernel has dimension " +
                std::to_string(kernel_dim) + "; steady state is not unique");
    }

    const double residual = (liou.m * v).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-10)
        throw std::runtime_error("steady_state: residual " +
                                 std::to_string(residual) + " exceeds 1e-10");

    Mat rho = unvectorize(v, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    validate_density_matrix(rho);
    return rho;
}

double photon_number(const Mat& rho, const SpaceDescriptor& space) {
    const Operators ops = build_operators(space);
    return expectation(rho, Mat(ops.a.adjoint() * ops.a)).real();
}

bool truncation_converged(const Mat& rho, const SpaceDescriptor& space) {
    const int n = space.n_max;
    const double top = rho(space.index(n, 0), space.index(n, 0)).real() +
                       rho(space.index(n, 1), space.index(n, 1)).real();
    const double n_a = photon_number(rho, space);
    return top < 1e-8 * n_a;
}

double photon_moment(const Mat& rho, const SpaceDescriptor& space, int n) {
    if (n < 1) throw std::invalid_argument("photon_moment: n must be >= 1");
    const Operators ops = build_operators(space);
    Mat an = ops.a;
    for (int k = 1; k < n; ++k) an = (ops.a * an).eval();
    return expectation(rho, Mat(an.adjoint() * an)).real();
}

double glauber_gn(const Mat& rho, const SpaceDescriptor& space, int n) {
    if (n < 2) throw std::invalid_argument("glauber_gn: n must be >= 2");
    const double n_a = photon_number(rho, space);
    if (n_a <= 0.0)
        throw std::runtime_error("glauber_gn: zero cavity population, undefined");
    return photon_moment(rho, space, n) / std::pow(n_a, n);
}

CorrelationSeries bundle_g2_tau(const Superoperator& liou, const Mat& rho_ss,
                                const SpaceDescriptor& space, int n_bundle,
                                const std::vector<double>& tau_grid,
                                double gamma_a) {
    if (n_bundle < 1)
        throw std::invalid_argument("bundle_g2_tau: N must be >= 1");
    if (tau_grid.size() < 2 || tau_grid.front() != 0.0)
        throw std::invalid_argument("bundle_g2_tau: grid must start at 0");
    const double dtau = tau_grid[1] - tau_grid[0];
    for (size_t i = 1; i < tau_grid.size(); ++i)
        if (std::abs((tau_grid[i] - tau_grid[i - 1]) - dtau) > 1e-12 * dtau)
            throw std::invalid_argument("bundle_g2_tau: grid must be uniform");

    const Operators ops = build_operators(space);
    Mat an = ops.a;
    for (int k = 1; k < n_bundle; ++k) an = (ops.a * an).eval();
    const Mat moment_op = an.adjoint() * an;

    const double m_ss = expectation(rho_ss, moment_op).real();
    if (m_ss <= 0.0)
        throw std::runtime_error("bundle_g2_tau: vanishing N-photon moment");

    // One matrix exponential per grid spacing, reused across the grid.
    // tau is in 1/gamma_a units; the Liouvillian is in g units.
    const Mat propagator = (liou.m * (dtau / gamma_a)).exp();

    // Tr(O X) = vec(O^T) . vec(X) under column stacking.
    const Vec obs = vectorize(moment_op.transpose());

    Vec v = vectorize(Mat(an * rho_ss * an.adjoint()));
    CorrelationSeries out;
    out.kind = "g2_N" + std::to_string(n_bundle);
    out.normalization = m_ss;
    out.tau_grid = tau_grid;
    out.values.reserve(tau_grid.size());
    for (size_t k = 0; k < tau_grid.size(); ++k) {
        if (k > 0) v = propagator * v;
        const double val = (obs.dot(v)).real() / (m_ss * m_ss);
        if (!std::isfinite(val))
            throw std::runtime_error("bundle_g2_tau: non-finite value");
        out.values.push_back(val < 0.0 && val > -1e-12 ? 0.0 : val);
    }
    return out;
}

std::vector<double> uniform_tau_grid(double tau_max, int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = tau_max * i / (n - 1);
    return grid;
}

SteadyResonance refine_steady_resonance(const SystemParams& p,
                                        const SpaceDescriptor& space,
                                        int n_target, double half_width) {
    const double seed = resonance_dressed(n_target, p.omega, p.delta);
    auto n_a_at = [&](double w) {
        SystemParams q = p;
        q.omega_L_detuning = w;
        return photon_number(steady_state(liouvillian(q, space)), space);
    };
    const int coarse = 60;
    double best_w = seed, best_f = -1.0;
    for (int i = 0; i <= coarse; ++i) {
        const double w = seed - half_width + 2.0 * half_width * i / coarse;
        const double f = n_a_at(w);
        if (f > best_f) { best_f = f; best_w = w; }
    }
    double lo = best_w - 2.0 * half_width / coarse;
    double hi = best_w + 2.0 * half_width / coarse;
    for (int it = 0; it < 36; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (n_a_at(m1) < n_a_at(m2)) lo = m1;
        else hi = m2;
    }
    SteadyResonance res;
    res.omega_L_detuning = 0.5 * (lo + hi);
    res.n_a = n_a_at(res.omega_L_detuning);
    return res;
}

} // namespace nbundle
