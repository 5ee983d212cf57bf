#include "qnetsyn/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "qnetsyn/errors.hpp"
#include "qnetsyn/json_io.hpp"
#include "qnetsyn/model_matrix.hpp"
#include "qnetsyn/slh_algebra.hpp"

namespace qnetsyn {

SystemParams netlist_oscillator(const SynthesisNetlist& netlist, int j) {
    if (j < 1 || j > netlist.n_dof) {
        throw DimensionError("netlist_oscillator: index out of range");
    }
    const OscillatorBlock& block = netlist.oscillators[j - 1];

    int fields = 0;
    for (const auto& part : block.couplings) {
        fields += static_cast<int>(part.K.rows());
    }

    CMat s = CMat::Zero(fields, fields);
    CMat k = CMat::Zero(fields, 2);
    std::vector<Port> outs;
    std::vector<Port> ins;
    int off = 0;
    for (int idx = 1; idx <= netlist.n_dof; ++idx) {
        const auto& part = block.couplings[idx - 1];
        const int c = static_cast<int>(part.K.rows());
        if (c == 0) {
            continue;
        }
        s.block(off, off, c, c) = part.S;
        k.middleRows(off, c) = part.K;
        outs.push_back({out_port_label(j, idx), c});
        ins.push_back({in_port_label(j, idx), c});
        off += c;
    }
    return SystemParams::make(std::move(s), std::move(k), block.R, std::move(outs), std::move(ins));
}

SystemParams netlist_concatenation(const SynthesisNetlist& netlist) {
    if (netlist.oscillators.empty()) {
        throw DimensionError("netlist_concatenation: empty netlist");
    }
    SystemParams acc = netlist_oscillator(netlist, 1);
    for (int j = 2; j <= netlist.n_dof; ++j) {
        acc = concat(acc, netlist_oscillator(netlist, j));
    }
    return acc;
}

namespace {

ModelMatrix tagged_network_model(const SynthesisNetlist& netlist) {
    ModelMatrix model = build_model(netlist_oscillator(netlist, 1), "G1");
    for (int j = 2; j <= netlist.n_dof; ++j) {
        model = concat_models(model, build_model(netlist_oscillator(netlist, j),
                                                 "G" + std::to_string(j)));
    }
    return model;
}

double param_distance(const SystemParams& a, const SystemParams& b) {
    double worst = max_abs(CMat(a.S - b.S));
    worst = std::max(worst, max_abs(CMat(a.K - b.K)));
    worst = std::max(worst, max_abs(RMat(sym(a.R) - sym(b.R))));
    return worst;
}

} // namespace

VerificationReport roundtrip(const SystemParams& target, const SynthesisNetlist& netlist,
                             int orders, std::uint64_t seed, double tol) {
    if (netlist.target_hash != system_digest(target)) {
        throw HashMismatch("netlist was produced for a different target (digest " +
                           netlist.target_hash + ")");
    }

    VerificationReport report;
    report.target_hash = netlist.target_hash;
    report.tolerance = tol;
    report.seed = seed;

    const ModelMatrix model = tagged_network_model(netlist);

    std::vector<SystemParams> nets;

    // simultaneous path: all interaction edges at once, then the cascade chain
    {
        const auto adjacency = AdjacencyMatrix::from_edges(model, netlist.interaction_edges);
        ModelMatrix red = eliminate_simultaneous(model, adjacency);
        red = eliminate_edges(red, netlist.cascade_edges);
        nets.push_back(red.params);
    }

    // sequential paths: seeded random permutations of the interaction edges
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < orders; ++trial) {
        std::vector<Edge> order = netlist.interaction_edges;
        std::shuffle(order.begin(), order.end(), rng);
        ModelMatrix red = eliminate_edges(model, order);
        red = eliminate_edges(red, netlist.cascade_edges);
        nets.push_back(red.params);
    }
    report.elimination_orders_tested = static_cast<int>(nets.size());

    for (std::size_t a = 0; a < nets.size(); ++a) {
        for (std::size_t b = a + 1; b < nets.size(); ++b) {
            report.max_order_disagreement =
                std::max(report.max_order_disagreement, param_distance(nets[a], nets[b]));
        }
    }

    for (const auto& net : nets) {
        const EquivalenceReport eq = equivalence(net, target);
        report.max_residual_S = std::max(report.max_residual_S, eq.residual_S);
        report.max_residual_K = std::max(report.max_residual_K, eq.residual_K);
        report.max_residual_R = std::max(report.max_residual_R, eq.residual_R);
        const double abcd = std::max({eq.residual_A, eq.residual_B, eq.residual_C, eq.residual_D});
        report.max_residual_ABCD = std::max(report.max_residual_ABCD, abcd);
    }

    report.passed = report.max_residual_S <= tol && report.max_residual_K <= tol &&
                    report.max_residual_R <= tol && report.max_residual_ABCD <= tol &&
                    report.max_order_disagreement <= tol;

    std::ostringstream note;
    note << "orders tested: " << report.elimination_orders_tested
         << " (1 simultaneous + " << orders << " sequential, seed " << seed << ")";
    report.notes.push_back(note.str());
    return report;
}

double EquivalenceReport::max_residual() const {
    return std::max({residual_S, residual_K, residual_R,
                     residual_A, residual_B, residual_C, residual_D});
}

EquivalenceReport equivalence(const SystemParams& g1, const SystemParams& g2) {
    if (g1.n_dof != g2.n_dof || g1.m != g2.m) {
        throw DimensionError("equivalence: systems must have equal (n, m)");
    }
    EquivalenceReport report;
    report.residual_S = max_abs(CMat(g1.S - g2.S));
    report.residual_K = max_abs(CMat(g1.K - g2.K));
    report.residual_R = max_abs(RMat(sym(g1.R) - sym(g2.R)));

    const QsdeMatrices q1 = qsde_matrices(g1);
    const QsdeMatrices q2 = qsde_matrices(g2);
    report.residual_A = max_abs(RMat(q1.A - q2.A));
    report.residual_B = max_abs(CMat(q1.B - q2.B));
    report.residual_C = max_abs(CMat(q1.C - q2.C));
    report.residual_D = max_abs(CMat(q1.D - q2.D));
    return report;
}

} // namespace qnetsyn
