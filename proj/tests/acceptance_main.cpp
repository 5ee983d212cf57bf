// acceptance_main.cpp — end-to-end acceptance checks, one line per criterion.
// Exits nonzero if any criterion fails. Tolerances are fixed here, not
// configurable: 1e-9 on every residual, 1e-12 on drift-matrix realness.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "qnetsyn/json_io.hpp"
#include "qnetsyn/model_matrix.hpp"
#include "qnetsyn/slh_algebra.hpp"
#include "qnetsyn/synthesis.hpp"
#include "qnetsyn/verify.hpp"
#include "test_util.hpp"

using namespace qnetsyn;
using testutil::ci;

namespace {

constexpr double kTol = 1e-9;
constexpr double kDriftRealnessTol = 1e-12;

int g_failures = 0;

void criterion(int number, const std::string& name, bool ok, double worst) {
    std::printf("[%s] criterion %d: %s (worst residual %.3e)\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), worst);
    if (!ok) {
        ++g_failures;
    }
}

SystemParams realize(const SynthesisNetlist& netlist) {
    ModelMatrix model = build_model(netlist_oscillator(netlist, 1), "G1");
    for (int j = 2; j <= netlist.n_dof; ++j) {
        model = concat_models(model, build_model(netlist_oscillator(netlist, j),
                                                 "G" + std::to_string(j)));
    }
    auto red = eliminate_simultaneous(
        model, AdjacencyMatrix::from_edges(model, netlist.interaction_edges));
    red = eliminate_edges(red, netlist.cascade_edges);
    return red.params;
}

// imaginary residual of the drift matrix evaluated in complex arithmetic
double drift_imag_residual(const SystemParams& g) {
    const CMat m = g.K.adjoint() * g.K;
    const CMat im_op = (m - m.conjugate()) / Complex(0, 2);
    const CMat a = 2.0 * symplectic_form(g.n_dof).cast<Complex>() *
                   (g.R.cast<Complex>() + im_op);
    return realness_residual(a);
}

void criterion_1_example1() {
    double worst = std::abs(coupling_delta(ci(1, 0), ci(0, 1)) - ci(-1, 1));

    const auto netlist = synthesize(testutil::example1_target());
    CMat k21_expected(1, 2);
    k21_expected << ci(1.25, -0.25), ci(1.75, 0.75);
    worst = std::max(worst, max_abs(CMat(netlist.oscillators[1].couplings[0].K - k21_expected)));

    RMat r1(2, 2);
    r1 << 1, 0.5, 0.5, 2;
    RMat r2(2, 2);
    r2 << -0.625, -2, -2, -2.625;
    worst = std::max(worst, max_abs(RMat(netlist.oscillators[0].R - r1)));
    worst = std::max(worst, max_abs(RMat(netlist.oscillators[1].R - r2)));
    criterion(1, "two-oscillator example reproduction", worst <= kTol, worst);
}

void criterion_2_example2() {
    const auto netlist = synthesize_passive(testutil::example2_target());
    CMat k21_expected(1, 2);
    k21_expected << ci(0.5, -0.5), ci(0.5, 0.5);
    double worst = max_abs(CMat(netlist.oscillators[1].couplings[0].K - k21_expected));
    worst = std::max(worst, max_abs(netlist.oscillators[0].R));
    worst = std::max(worst,
                     max_abs(RMat(netlist.oscillators[1].R - 0.5 * RMat::Identity(2, 2))));
    for (const auto& block : netlist.oscillators) {
        worst = std::max(worst, oscillator_passivity_residual(block));
    }
    criterion(2, "passive example reproduction and structural scan",
              netlist.passive && worst <= kTol, worst);
}

struct RoundtripInstance {
    SystemParams target;
    SynthesisNetlist netlist;
    VerificationReport report;
};

std::vector<RoundtripInstance> run_roundtrips() {
    std::vector<RoundtripInstance> instances;
    testutil::Rng rng(20240817);

    const auto add = [&](const SystemParams& target) {
        RoundtripInstance inst;
        inst.target = target;
        inst.netlist = synthesize(target);
        inst.report = roundtrip(target, inst.netlist, 10, rng());
        instances.push_back(std::move(inst));
    };

    add(testutil::example1_target());
    add(testutil::example2_target());
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 4;
        const int m = 1 + (trial / 4) % 2;  // every (n, m) combination appears
        add(testutil::random_target(n, m, rng));
    }
    return instances;
}

void criterion_3_roundtrip(const std::vector<RoundtripInstance>& instances) {
    double worst = 0.0;
    for (const auto& inst : instances) {
        worst = std::max({worst, inst.report.max_residual_S, inst.report.max_residual_K,
                          inst.report.max_residual_R});
    }
    criterion(3, "round-trip realization on examples and 50 random targets", worst <= kTol,
              worst);
}

void criterion_4_order_independence(const std::vector<RoundtripInstance>& instances) {
    double worst = 0.0;
    for (const auto& inst : instances) {
        worst = std::max(worst, inst.report.max_order_disagreement);
    }
    criterion(4, "elimination-order independence (10 sequential + simultaneous)", worst <= kTol,
              worst);
}

void criterion_5_series_vs_elimination() {
    testutil::Rng rng(424242);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + trial % 2;
        auto g1 = testutil::random_system(1, m, rng);
        auto g2 = testutil::random_system(1, m, rng);
        g1.out_ports = {{"a_out", m}};
        g1.in_ports = {{"a_in", m}};
        g2.out_ports = {{"b_out", m}};
        g2.in_ports = {{"b_in", m}};
        const auto reduced = eliminate_edge(build_model(concat(g1, g2)), "a_out", "b_in");
        const auto chained = series(g2, g1);
        worst = std::max(worst, equivalence(reduced.params, chained).max_residual());
    }
    criterion(5, "series product equals cascade-edge elimination (50 pairs)", worst <= kTol,
              worst);
}

void criterion_6_coupling_residual() {
    testutil::Rng rng(777);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    std::uniform_real_distribution<double> gain(0.1, 4.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const RMat r = testutil::random_rmat(2, 2, rng);
        Complex s12;
        Complex s21;
        do {
            s12 = std::polar(1.0, angle(rng));
            s21 = std::polar(1.0, angle(rng));
        } while (std::abs(1.0 - s12 * s21) < 1e-3);
        const double kappa = gain(rng) * (trial % 2 == 0 ? 1.0 : -1.0);
        for (const auto param : {CouplingParam::ForwardK1, CouplingParam::ForwardK2}) {
            const auto [k1, k2] = direct_coupling_solve(r, s12, s21, kappa, param);
            const Complex denom = 1.0 - s12 * s21;
            const CMat term = (s12 / denom) * (k1.adjoint() * k2) +
                              (s21 / denom) * (k1.transpose() * k2.conjugate());
            worst = std::max(worst, max_abs(RMat(r - im_real(term))));
        }
    }
    criterion(6, "coupling-equation residual (100 draws, both parameterizations)", worst <= kTol,
              worst);
}

void criterion_7_cascade_decomposition() {
    testutil::Rng rng(31337);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto target = testutil::random_target(3, 1 + trial % 2, rng);
        const auto recomposed = recompose_cascade(cascade_direct_decompose(target));
        worst = std::max(worst, equivalence(recomposed, target).max_residual());
    }
    criterion(7, "cascade + direct-interaction recomposition (20 random 3-DOF)", worst <= kTol,
              worst);
}

void criterion_8_choice_invariance() {
    testutil::Rng rng(555);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const int n = 2 + t % 3;
        const auto target = testutil::random_target(n, 1 + t % 2, rng);
        std::vector<SystemParams> realized;
        for (int variant = 0; variant < 5; ++variant) {
            realized.push_back(realize(synthesize(target, testutil::random_choices(n, rng))));
        }
        for (std::size_t a = 0; a < realized.size(); ++a) {
            for (std::size_t b = a + 1; b < realized.size(); ++b) {
                double d = max_abs(CMat(realized[a].S - realized[b].S));
                d = std::max(d, max_abs(CMat(realized[a].K - realized[b].K)));
                d = std::max(d, max_abs(RMat(realized[a].R - realized[b].R)));
                worst = std::max(worst, d);
            }
        }
    }
    criterion(8, "realized system invariant under coupling choices (10 x 5)", worst <= kTol,
              worst);
}

void criterion_9_qsde_consistency(const std::vector<RoundtripInstance>& instances) {
    double worst_abcd = 0.0;
    double worst_imag = 0.0;
    for (const auto& inst : instances) {
        worst_abcd = std::max(worst_abcd, inst.report.max_residual_ABCD);
        worst_imag = std::max(worst_imag, drift_imag_residual(inst.target));
        worst_imag = std::max(worst_imag, drift_imag_residual(realize(inst.netlist)));
    }
    const bool ok = worst_abcd <= kTol && worst_imag <= kDriftRealnessTol;
    criterion(9, "state-space consistency and drift realness", ok,
              std::max(worst_abcd, worst_imag));
}

} // namespace

int main() {
    criterion_1_example1();
    criterion_2_example2();
    const auto instances = run_roundtrips();
    criterion_3_roundtrip(instances);
    criterion_4_order_independence(instances);
    criterion_5_series_vs_elimination();
    criterion_6_coupling_residual();
    criterion_7_cascade_decomposition();
    criterion_8_choice_invariance();
    criterion_9_qsde_consistency(instances);

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
