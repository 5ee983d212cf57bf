// slh_algebra.hpp — the composition calculus on system parameters: the
// concatenation and series products, the QSDE state-space matrices, and the
// annihilation-operator (passive) machinery.

#pragma once

#include <utility>

#include "qnetsyn/core_types.hpp"

namespace qnetsyn {

// G1 ⊞ G2: parameters collected side by side. S, K, R become block diagonal
// (g1's blocks first), ports concatenate in order, n_dof and m add. Colliding
// labels from g2 are renamed deterministically (label~2, label~3, …).
SystemParams concat(const SystemParams& g1, const SystemParams& g2);

// G2 ◁ G1: output fields of g1 feed the inputs of g2. The operands are
// independent systems; the result lives on the concatenated x with g1's
// oscillator block first:
//   S = S2·S1,   K = [S2·K1 | K2],
//   R = diag(R1, R2) + fold of Im{L2† S2 L1}.
// Requires g1.m == g2.m (DimensionError otherwise).
SystemParams series(const SystemParams& g2, const SystemParams& g1);

// Adds the quadratic form xᵀQx (operator imaginary part already taken) into
// the symmetric Hamiltonian matrix: R + 2·sym(Im{Q}). Constant offsets from
// the commutation relations are dropped throughout the library.
RMat fold_hamiltonian_term(const RMat& r, const CMat& q);

// Eq-(1) system matrices: A = 2Θ(R + Im{K†K}), B = 2iΘ[−K†S, KᵀS^#],
// C = K, D = S. A's imaginary residual is discarded.
QsdeMatrices qsde_matrices(const SystemParams& g);

// Σ: the n×2n map with [a; a^#] = [Σ; Σ^#] x, row j = [1/2, i/2] on the
// columns of oscillator j.
CMat annihilation_map(int n_dof);

// Annihilation-operator form of a system: H = ½a†R̃a + const and L = K̃a
// when the residual vanishes. The residual is the largest deviation of
// (R, K) from exact passive structure (reconstruction mismatch and the
// structural criteria R_jj = λI₂, rotation-form R_jk, K_j = [γ, iγ]).
struct PassiveForm {
    CMat R_tilde;       // n × n Hermitian
    CMat K_tilde;       // m × n
    double residual = 0.0;
};

PassiveForm to_passive_form(const SystemParams& g);

bool is_passive(const SystemParams& g, double tol = kDefaultTol);

// Rebuilds (R, K) from the annihilation-operator data:
// R = Re{Σ†R̃Σ}, K = K̃Σ. Inverse of to_passive_form for passive systems.
std::pair<RMat, CMat> passive_to_xbasis(const CMat& r_tilde, const CMat& k_tilde);

} // namespace qnetsyn
