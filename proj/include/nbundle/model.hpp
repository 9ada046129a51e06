#pragma once

#include <vector>

#include "nbundle/space.hpp"

namespace nbundle {

/// Model rates and frequencies, all in units of the coupling g (g = 1
/// internally; conversion to physical units happens only at the CLI).
/// delta = omega_a - omega_sigma, omega_L_detuning = omega_L - omega_a.
struct SystemParams {
    double gamma_a = 0.1;         ///< cavity decay rate
    double gamma_sigma = 0.01;    ///< emitter decay rate
    double delta = -60.0;         ///< cavity-emitter detuning
    double omega = 0.0;           ///< drive amplitude
    double omega_L_detuning = 0.0;///< laser detuning from the cavity

    void validate() const;
};

/// Liouvillian as a dense matrix acting on column-stacked density
/// matrices: vec(rho)[i + j*dim] = rho(i, j).
struct Superoperator {
    int dim = 0;    ///< Hilbert-space dimension; matrix is dim^2 x dim^2
    Mat m;

    Mat apply(const Mat& rho) const;
};

/// Column-stacking helpers.
Vec vectorize(const Mat& rho);
Mat unvectorize(const Vec& v, int dim);

/// Rotating-frame Hamiltonian at the laser frequency,
///   H = (w_a-w_L) a^+a + (w_s-w_L) s^+s + g(a^+s + s^+a) + Omega(s + s^+).
/// g = 1 is the unit of frequency; the override exists for decoupled
/// limiting cases in tests.
Mat hamiltonian(const SystemParams& p, const SpaceDescriptor& space,
                double g = 1.0);

/// L[rho] = -i[H,rho] + gamma_a D[a]rho + gamma_sigma D[sigma]rho with
/// D[c]rho = c rho c^+ - {c^+c, rho}/2.
Superoperator liouvillian(const SystemParams& p, const SpaceDescriptor& space,
                          double g = 1.0);

/// Laser detuning w_L - w_a targeting the (N+1)th rung of the undriven
/// ladder: (sqrt(4(N+1)g^2 + delta^2) - delta) / (2(N+1)). Throws for N < 1.
double resonance_ladder(int n_target, double delta, double g = 1.0);

/// Dressed-atom N-photon resonance: for N >= 2,
/// (sqrt(4(N^2-1) Omega^2 + N^2 delta^2) + delta) / (N^2-1); for N = 1 the
/// dispersive-regime limit -(2 Omega^2 + delta^2/2)/delta (delta != 0).
double resonance_dressed(int n_target, double omega, double delta);

/// Closed-system evolution of |psi0> under time-independent H via exact
/// eigendecomposition. Returns per-basis-state populations, one row per
/// time; norm conservation is checked to 1e-9.
struct PopulationSeries {
    std::vector<double> times;
    Eigen::MatrixXd populations;  ///< times.size() x dim
};

PopulationSeries evolve_closed(const Vec& psi0, const Mat& h,
                               const std::vector<double>& t_grid);

/// The exact location and strength of the multiphoton anticrossing
/// between |0g> and |N e> at finite drive. Eq.-style formulas locate the
/// resonance only to O(Omega^2, g^2/delta); the anticrossing itself is
/// parametrically narrower, so driving experiments need the refined value.
struct ClosedResonance {
    double omega_L_detuning = 0.0;///< refined laser detuning
    double rabi_splitting = 0.0;  ///< gap of the hybridized pair = effective Rabi rate
    double hybridization = 0.0;   ///< sum_k |<0g|k><k|Ne>|, ~1 on resonance
};

/// Ternary-search refinement of the |0g> <-> |N e> anticrossing, seeded
/// by resonance_ladder(N). half_width bounds the search around the seed.
ClosedResonance refine_closed_resonance(const SystemParams& p,
                                        const SpaceDescriptor& space,
                                        int n_target, double half_width = 0.2);

} // namespace nbundle
