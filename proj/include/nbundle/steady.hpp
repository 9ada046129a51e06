#pragma once

#include <string>
#include <vector>

#include "nbundle/model.hpp"

namespace nbundle {

/// Two-time correlation values on a delay grid, with the steady-state
/// normalization used. Delays are in units of 1/gamma_a. Click-based
/// estimates also carry the raw Poisson expectation per bin (counts =
/// value * expectation), so model-based error tests stay well defined
/// at zero observed counts.
struct CorrelationSeries {
    std::vector<double> tau_grid;
    std::vector<double> values;
    std::vector<double> std_errors;           ///< empty for regression curves
    std::vector<double> poisson_expectations; ///< empty for regression curves
    std::string kind;
    double normalization = 0.0;
};

/// Unique steady state of a trace-annihilating Liouvillian, solved by
/// replacing one row of the vectorized system with the trace constraint.
/// Residual ||L rho_ss||_inf <= 1e-10 is enforced; a kernel of dimension
/// > 1 is reported as non-uniqueness (std::runtime_error).
Mat steady_state(const Superoperator& liou);

/// Tr(a^+ a rho).
double photon_number(const Mat& rho, const SpaceDescriptor& space);

/// Population of the top Fock level; the truncation is considered
/// converged when this is < 1e-8 * n_a.
bool truncation_converged(const Mat& rho, const SpaceDescriptor& space);

/// Zero-delay Glauber correlation <a^+n a^n> / <a^+a>^n. Throws when the
/// cavity population vanishes (undefined).
double glauber_gn(const Mat& rho, const SpaceDescriptor& space, int n);

/// <a^+N a^N> moment.
double photon_moment(const Mat& rho, const SpaceDescriptor& space, int n);

/// Bundle correlation g2_N(tau) by the quantum regression theorem:
/// propagate a^N rho_ss a^+N under exp(L tau) and evaluate <a^+N a^N>,
/// normalized by the steady-state moment squared. tau_grid is in units
/// of 1/gamma_a and must be uniform and ascending from 0.
CorrelationSeries bundle_g2_tau(const Superoperator& liou, const Mat& rho_ss,
                                const SpaceDescriptor& space, int n_bundle,
                                const std::vector<double>& tau_grid,
                                double gamma_a);

/// Uniform grid [0, tau_max] with n points (tau in 1/gamma_a units).
std::vector<double> uniform_tau_grid(double tau_max, int n = 400);

/// Dissipative N-photon resonance refinement: maximizes steady-state n_a
/// over omega_L around the resonance_dressed(N, Omega) seed. At small
/// gamma_a the true resonance is narrower than the seed formula's
/// accuracy, so sweeps that follow C_N need this.
struct SteadyResonance {
    double omega_L_detuning = 0.0;
    double n_a = 0.0;
};

SteadyResonance refine_steady_resonance(const SystemParams& p,
                                        const SpaceDescriptor& space,
                                        int n_target, double half_width = 0.3);

} // namespace nbundle
