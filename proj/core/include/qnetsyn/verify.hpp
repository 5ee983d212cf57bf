// verify.hpp — independent verification of synthesized netlists. The
// round-trip check rebuilds the network from netlist data alone and reduces
// it with the model-matrix calculus; it never consults the synthesis
// algorithms.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qnetsyn/core_types.hpp"
#include "qnetsyn/synthesis.hpp"

namespace qnetsyn {

struct VerificationReport {
    std::string target_hash;
    double max_residual_S = 0.0;
    double max_residual_K = 0.0;
    double max_residual_R = 0.0;
    double max_residual_ABCD = 0.0;
    // worst pairwise disagreement between elimination orders (also folded
    // into the residuals above via the comparisons against the target)
    double max_order_disagreement = 0.0;
    int elimination_orders_tested = 0;
    bool passed = false;
    double tolerance = kDefaultTol;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
};

// G_j = ⊞_k G_jk assembled from the stored blocks of oscillator j: scattering
// diag(S_j1,…,S_jn), stacked couplings on a single mode, ports s_jk / r_jk.
SystemParams netlist_oscillator(const SynthesisNetlist& netlist, int j);

// ⊞_j G_j, the concatenated network before any edge is eliminated.
SystemParams netlist_concatenation(const SynthesisNetlist& netlist);

// Re-derives the realized system from the netlist by eliminating the
// interaction edges simultaneously and sequentially in `orders` seeded random
// permutations, then the cascade edges, and compares every result against the
// target (parameters and QSDE matrices). Throws HashMismatch when the netlist
// was not produced for this target.
VerificationReport roundtrip(const SystemParams& target, const SynthesisNetlist& netlist,
                             int orders = 10, std::uint64_t seed = 0,
                             double tol = kDefaultTol);

// Elementwise residuals between two systems of equal (n, m): parameters and
// QSDE matrices. R is compared after symmetrization on both sides.
struct EquivalenceReport {
    double residual_S = 0.0;
    double residual_K = 0.0;
    double residual_R = 0.0;
    double residual_A = 0.0;
    double residual_B = 0.0;
    double residual_C = 0.0;
    double residual_D = 0.0;

    double max_residual() const;
};

EquivalenceReport equivalence(const SystemParams& g1, const SystemParams& g2);

} // namespace qnetsyn
