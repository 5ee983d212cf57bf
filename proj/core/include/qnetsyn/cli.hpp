// cli.hpp — command dispatch behind the qnetsyn executable. The parsed
// configuration lives here so runs are scriptable and testable without a
// process boundary.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qnetsyn/model_matrix.hpp"
#include "qnetsyn/synthesis.hpp"

namespace qnetsyn {

enum class Command {
    Synthesize,
    Verify,
    Reduce,
    PassiveCheck,
    Decompose,
    Qsde,
};

// One --theta/--kappa override: value for the ordered pair (j, k).
struct PairOverride {
    int j = 0;
    int k = 0;
    double value = 0.0;
};

struct RunConfig {
    Command command = Command::Synthesize;
    std::string input_path;
    std::string output_path;  // empty: write documents to stdout
    std::string dot_path;     // empty: no DOT export
    double tolerance = kDefaultTol;
    std::uint64_t seed = 0;
    int orders = 10;
    std::vector<PairOverride> thetas;  // θ_jk per ordered pair
    std::vector<PairOverride> kappas;  // κ per unordered pair
    CouplingParam param = CouplingParam::ForwardK1;
    std::vector<Edge> edges;              // reduce: edges to eliminate
    bool sequential_reduce = false;       // reduce: one at a time instead of simultaneous
};

// Exit status: 0 all checks passed, 1 verification failure, 2 schema error,
// 3 degenerate scattering / singular connection.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Builds the choice map for a target with n oscillators from the overrides.
// Validates eagerly (kappa ≠ 0, θ_jk + θ_kj ≠ 0 mod 2π).
ChoiceMap choices_from_overrides(int n_dof, const std::vector<PairOverride>& thetas,
                                 const std::vector<PairOverride>& kappas, CouplingParam param);

} // namespace qnetsyn
