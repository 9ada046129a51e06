#include "nbundle/model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace nbundle {

void SystemParams::validate() const {
    if (gamma_a < 0.0)
        throw std::invalid_argument("SystemParams: gamma_a must be >= 0");
    if (gamma_sigma < 0.0)
        throw std::invalid_argument("SystemParams: gamma_sigma must be >= 0");
    if (omega < 0.0)
        throw std::invalid_argument("SystemParams: omega must be >= 0");
}

Vec vectorize(const Mat& rho) {
    return Eigen::Map<const Vec>(rho.data(), rho.size());
}

Mat unvectorize(const Vec& v, int dim) {
    return Eigen::Map<const Mat>(v.data(), dim, dim);
}

Mat Superoperator::apply(const Mat& rho) const {
    return unvectorize(m * vectorize(rho), dim);
}

Mat hamiltonian(const SystemParams& p, const SpaceDescriptor& space,
                double g) {
    p.validate();
    const Operators ops = build_operators(space);
    const Mat& a = ops.a;
    const Mat& s = ops.sigma;
    const double wa = -p.omega_L_detuning;            // w_a - w_L
    const double ws = -p.delta - p.omega_L_detuning;  // w_s - w_L
    Mat h = wa * (a.adjoint() * a) + ws * (s.adjoint() * s) +
            g * (a.adjoint() * s + s.adjoint() * a) + p.omega * (s + s.adjoint());
    return h;
}

namespace {

// vec(A X B) = (B^T kron A) vec(X), column stacking.
Mat dissipator(const Mat& c, double rate) {
    const int d = int(c.rows());
    const Mat id = Mat::Identity(d, d);
    const Mat cdc = c.adjoint() * c;
    Mat out = Eigen::kroneckerProduct(c.conjugate(), c);
    out -= 0.5 * Eigen::kroneckerProduct(id, cdc);
    out -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id);
    return rate * out;
}

} // namespace

Superoperator liouvillian(const SystemParams& p, const SpaceDescriptor& space,
                          double g) {
    const Mat h = hamiltonian(p, space, g);
    const int d = space.dim;
    const Mat id = Mat::Identity(d, d);
    const Operators ops = build_operators(space);

    Superoperator sop;
    sop.dim = d;
    sop.m = -I * (Eigen::kroneckerProduct(id, h) -
                  Eigen::kroneckerProduct(h.transpose(), id));
    if (p.gamma_a > 0.0) sop.m += dissipator(ops.a, p.gamma_a);
    if (p.gamma_sigma > 0.0) sop.m += dissipator(ops.sigma, p.gamma_sigma);
    return sop;
}

double resonance_ladder(int n_target, double delta, double g) {
    if (n_target < 1)
        throw std::invalid_argument("resonance_ladder: N must be >= 1");
    const double np1 = double(n_target + 1);
    return (std::sqrt(4.0 * np1 * g * g + delta * delta) - delta) / (2.0 * np1);
}

double resonance_dressed(int n_target, double omega, double delta) {
    if (n_target < 1)
        throw std::invalid_argument("resonance_dressed: N must be >= 1");
    if (n_target == 1) {
        if (delta == 0.0)
            throw std::invalid_argument(
                "resonance_dressed: N = 1 requires delta != 0 (dispersive limit)");
        return -(2.0 * omega * omega + 0.5 * delta * delta) / delta;
    }
    const double n2m1 = double(n_target) * double(n_target) - 1.0;
    const double n2 = double(n_target) * double(n_target);
    return (std::sqrt(4.0 * n2m1 * omega * omega + n2 * delta * delta) + delta) /
           n2m1;
}

PopulationSeries evolve_closed(const Vec& psi0, const Mat& h,
                               const std::vector<double>& t_grid) {
    const double nrm = psi0.norm();
    if (std::abs(nrm - 1.0) > 1e-9)
        throw std::invalid_argument("evolve_closed: psi0 not normalized");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("evolve_closed: t_grid must ascend");

    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Mat& v = es.eigenvectors();
    const RealVec& ev = es.eigenvalues();
    const Vec coeff = v.adjoint() * psi0;

    const int d = int(h.rows());
    PopulationSeries out;
    out.times = t_grid;
    out.populations.resize(Eigen::Index(t_grid.size()), d);
    for (size_t k = 0; k < t_grid.size(); ++k) {
        Vec phase(d);
        for (int j = 0; j < d; ++j)
            phase(j) = std::exp(-I * ev(j) * t_grid[k]) * coeff(j);
        Vec psi = v * phase;
        const double n2 = psi.squaredNorm();
        if (std::abs(n2 - 1.0) > 1e-9)
            throw std::runtime_error("evolve_closed: norm drift exceeded 1e-9");
        out.populations.row(Eigen::Index(k)) = psi.cwiseAbs2().transpose();
    }
    return out;
}

namespace {

// sum_k |<0g|k><k|Ne>| for H(omega_L); ~1 when the pair hybridizes fully.
double hybridization_metric(const SystemParams& p, const SpaceDescriptor& space,
                            int n_target, double omega_l) {
    SystemParams q = p;
    q.omega_L_detuning = omega_l;
    Eigen::SelfAdjointEigenSolver<Mat> es(hamiltonian(q, space));
    const Mat& v = es.eigenvectors();
    const int i0 = space.index(0, 0);
    const int iN = space.index(n_target, 1);
    double acc = 0.0;
    for (int k = 0; k < space.dim; ++k)
        acc += std::abs(v(i0, k)) * std::abs(v(iN, k));
    return acc;
}

} // namespace

ClosedResonance refine_closed_resonance(const SystemParams& p,
                                        const SpaceDescriptor& space,
                                        int n_target, double half_width) {
    if (n_target < 1 || n_target > space.n_max)
        throw std::invalid_argument("refine_closed_resonance: N out of range");
    const double seed = resonance_ladder(n_target, p.delta);

    // Coarse bracketing: the anticrossing is narrow, so locate the best
    // grid cell first, then ternary-search inside it.
    const int coarse = 400;
    double best_w = seed, best_f = -1.0;
    for (int i = 0; i <= coarse; ++i) {
        const double w = seed - half_width + 2.0 * half_width * i / coarse;
        const double f = hybridization_metric(p, space, n_target, w);
        if (f > best_f) { best_f = f; best_w = w; }
    }
    double lo = best_w - 2.0 * half_width / coarse;
    double hi = best_w + 2.0 * half_width / coarse;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (hybridization_metric(p, space, n_target, m1) <
            hybridization_metric(p, space, n_target, m2))
            lo = m1;
        else
            hi = m2;
    }

    ClosedResonance res;
    res.omega_L_detuning = 0.5 * (lo + hi);
    res.hybridization =
        hybridization_metric(p, space, n_target, res.omega_L_detuning);

    SystemParams q = p;
    q.omega_L_detuning = res.omega_L_detuning;
    Eigen::SelfAdjointEigenSolver<Mat> es(hamiltonian(q, space));
    const Mat& v = es.eigenvectors();
    const int i0 = space.index(0, 0);
    const int iN = space.index(n_target, 1);
    // The two hybridized eigenstates carry the largest |<0g|k><k|Ne>|.
    int k1 = -1, k2 = -1;
    double f1 = -1.0, f2 = -1.0;
    for (int k = 0; k < space.dim; ++k) {
        const double f = std::abs(v(i0, k)) * std::abs(v(iN, k));
        if (f > f1) { f2 = f1; k2 = k1; f1 = f; k1 = k; }
        else if (f > f2) { f2 = f; k2 = k; }
    }
    res.rabi_splitting = std::abs(es.eigenvalues()(k1) - es.eigenvalues()(k2));
    return res;
}

} // namespace nbundle
