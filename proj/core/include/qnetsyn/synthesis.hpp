// synthesis.hpp — constructive realization of a target system as a network of
// one-degree-of-freedom oscillators interconnected purely by fields: the
// direct-coupling solver, the field-mediated synthesis recipe, its passive
// specialization, and the older cascade + direct-Hamiltonian decomposition.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnetsyn/core_types.hpp"
#include "qnetsyn/model_matrix.hpp"

namespace qnetsyn {

// Which side of an oscillator pair carries the free coupling K = [κ, iκ].
enum class CouplingParam {
    ForwardK1,  // K_jk = [κ, iκ], K_kj solved (j < k)
    ForwardK2,  // K_kj = [κ, iκ], K_jk solved
};

// Scattering phases and coupling gain for one unordered oscillator pair
// {j, k}, j < k. Valid when θ_jk + θ_kj ≠ 0 (mod 2π) and κ ≠ 0.
struct CouplingChoice {
    double theta_jk = 0.0;
    double theta_kj = 1.5707963267948966;  // π/2
    double kappa = 1.0;
    CouplingParam param = CouplingParam::ForwardK1;

    Complex s_jk() const;  // e^{iθ_jk}
    Complex s_kj() const;  // e^{iθ_kj}
};

using PairKey = std::pair<int, int>;  // 1-based oscillator indices, j < k
using ChoiceMap = std::map<PairKey, CouplingChoice>;

// Δ = 2(S21 − S12*)/|1 − S12·S21|², the kernel of the coupling solve.
// Throws DegenerateScattering when S12·S21 is too close to 1.
Complex coupling_delta(Complex s12, Complex s21);

// Solves the pair-coupling equation: returns (K1, K2) with
//   R − Im{ S12/(1−S12·S21) K1†K2 + S21/(1−S12·S21) K1ᵀK2^# } = 0
// for real 2×2 R and unit-modulus S12, S21 with S12·S21 ≠ 1. Under ForwardK1
// K1 = [κ, iκ] and K2 = 2i[1 0][−K1†Δ*, K1ᵀΔ]⁻¹R with
// Δ = 2(S21 − S12*)/|1 − S12·S21|²; ForwardK2 mirrors the roles.
// Throws DegenerateScattering when |1 − S12·S21| < 1e-12.
std::pair<CMat, CMat> direct_coupling_solve(const RMat& R, Complex s12, Complex s21,
                                            double kappa, CouplingParam param);

// One oscillator of a synthesized network: its 2×2 Hamiltonian matrix and the
// ordered coupling blocks (S_jk, K_jk) over k = 1..n, with S_jj = I_m and
// K_jj the target's own coupling block.
struct OscillatorBlock {
    int index = 0;  // 1-based
    RMat R;         // 2 × 2 symmetric

    struct Coupling {
        CMat S;  // c × c scattering block (c = 1 for k ≠ index, c = m for k = index)
        CMat K;  // c × 2 coupling to this oscillator's (q, p)
    };
    std::vector<Coupling> couplings;
};

// A realizable network: n oscillator parameter blocks, the bidirectional
// interaction edges (s_jk, r_kj), and the cascade chain (s_kk, r_(k+1)(k+1)).
// target_hash is the SHA-256 of the canonical JSON of the target system.
struct SynthesisNetlist {
    int n_dof = 0;
    int m = 0;
    bool passive = false;
    std::string target_hash;
    std::vector<OscillatorBlock> oscillators;
    std::vector<Edge> interaction_edges;
    std::vector<Edge> cascade_edges;
};

// Output/input port labels of the oscillator blocks ("s12", "r21", ...;
// an underscore separates indices of 10 or more).
std::string out_port_label(int j, int k);
std::string in_port_label(int j, int k);

// Realizes a target (I_m, Kx, ½xᵀRx). Unspecified pairs take the default
// choice θ_jk = 0, θ_kj = π/2, κ = 1, ForwardK1. Requires target.S = I_m;
// propagates DegenerateScattering naming the offending pair.
SynthesisNetlist synthesize(const SystemParams& target, const ChoiceMap& choices = {});

// General scattering: (S, Kx, ½xᵀRx) = (I, Kx, ½xᵀRx) ◁ (S, 0, 0). Returns
// the static stage and the netlist realizing the S = I part.
std::pair<SystemParams, SynthesisNetlist>
synthesize_with_scattering(const SystemParams& target, const ChoiceMap& choices = {});

// Reduced model after eliminating the interaction edges of a netlist,
// computed from the closed-form network-construction formula:
//   S_red = diag(S_11,…,S_nn),  L_red = (L_11ᵀ,…,L_nnᵀ)ᵀ,
//   H_red = Σ H_k + ΣΣ Im{[L_jk† L_kj†] [[I, −S_jk],[−S_kj, I]]⁻¹ [L_jk; L_kj]}.
SystemParams construct_h_red(const SynthesisNetlist& netlist);

// Cascade + direct-interaction decomposition: one-DOF oscillators
// G_k = (I, K_k x_k, ½x_kᵀR_kk x_k) plus bilinear terms
// Hᵈ_{jk} = x_kᵀ(R_jkᵀ − Im{K_k†K_j})x_j for j < k.
struct CascadeDecomposition {
    std::vector<SystemParams> oscillators;
    std::map<PairKey, RMat> hd_terms;
};

CascadeDecomposition cascade_direct_decompose(const SystemParams& target);

// Recombines a decomposition: the cascade G_n ◁ … ◁ G_1 concatenated with the
// field-free system carrying Hᵈ over the same modes. Equals the decomposed
// target exactly.
SystemParams recompose_cascade(const CascadeDecomposition& decomposition);

// As synthesize, for passive targets: additionally checks every produced
// block against the structural passivity criteria and tags the netlist.
// Throws NotPassive when the target fails is_passive; PassivityBroken if a
// block fails the scan (cannot happen for valid input).
SynthesisNetlist synthesize_passive(const SystemParams& target, const ChoiceMap& choices = {},
                                    double tol = kDefaultTol);

// Structural passivity scan of one netlist block: R_j of the form λI₂ and
// every coupling row pair of the form [γ, iγ]. Returns the worst deviation.
double oscillator_passivity_residual(const OscillatorBlock& block);

// Topology view: oscillator nodes, bidirectional interaction channels, the
// cascade chain, and dangling external ports.
std::string netlist_to_dot(const SynthesisNetlist& netlist);

} // namespace qnetsyn
