#pragma once

#include "nbundle/types.hpp"

namespace nbundle {

/// Truncated Hilbert space of one cavity mode (Fock levels 0..n_max)
/// coupled to a two-level emitter. Basis ordering is photon-major,
/// emitter-minor: index = 2*n + s with s = 0 (ground) or 1 (excited),
/// so photon blocks are contiguous.
struct SpaceDescriptor {
    int n_max = 0;
    int dim = 0;

    int index(int n, int s) const { return 2 * n + s; }
    int photon_of(int idx) const { return idx / 2; }
    int emitter_of(int idx) const { return idx % 2; }
};

/// Builds the space descriptor. Throws std::invalid_argument for n_max < 1.
SpaceDescriptor build_space(int n_max);

/// Annihilation operators on the joint space: `a` acts on the photon
/// factor (<n-1|a|n> = sqrt(n)), `sigma` lowers the emitter (<g|s|e> = 1);
/// each is identity on the other factor. Adjoints via .adjoint().
struct Operators {
    Mat a;
    Mat sigma;
};

Operators build_operators(const SpaceDescriptor& space);

/// Tr(O rho). Throws on dimension mismatch.
Complex expectation(const Mat& rho, const Mat& op);

/// Validates the density-matrix invariants: hermiticity (max |rho-rho^+|
/// <= her_tol), unit trace (|Tr rho - 1| <= tr_tol) and numerical
/// positivity (min eigenvalue >= -pos_tol). Throws std::runtime_error
/// with a diagnostic if any fails.
void validate_density_matrix(const Mat& rho, double her_tol = 1e-10,
                             double tr_tol = 1e-10, double pos_tol = 1e-8);

/// |n, s> basis vector.
Vec basis_state(const SpaceDescriptor& space, int n, int s);

} // namespace nbundle
