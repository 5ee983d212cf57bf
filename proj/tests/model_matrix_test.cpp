#include "qnetsyn/model_matrix.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qnetsyn/errors.hpp"
#include "qnetsyn/slh_algebra.hpp"
#include "test_util.hpp"

using namespace qnetsyn;
using testutil::ci;

namespace {

double param_distance(const SystemParams& a, const SystemParams& b) {
    double worst = max_abs(CMat(a.S - b.S));
    worst = std::max(worst, max_abs(CMat(a.K - b.K)));
    worst = std::max(worst, max_abs(RMat(a.R - b.R)));
    return worst;
}

// the two oscillator stages of the first worked example, with the
// s_jk / r_jk port labelling
ModelMatrix example1_network() {
    CMat s1(2, 2);
    s1 << ci(1, 0), ci(0, 0), ci(0, 0), ci(1, 0);  // diag(I_1, S_12), S_12 = 1
    CMat k1(2, 2);
    k1 << ci(1.5, 0), ci(0, 0.5),  // K_11 = K_1
          ci(1, 0), ci(0, 1);      // K_12 = [1, i]
    RMat r1(2, 2);
    r1 << 1, 0.5, 0.5, 2;
    const auto g1 = SystemParams::make(s1, k1, r1, {{"s11", 1}, {"s12", 1}},
                                       {{"r11", 1}, {"r12", 1}});

    CMat s2(2, 2);
    s2 << ci(0, 1), ci(0, 0), ci(0, 0), ci(1, 0);  // diag(S_21, I_1), S_21 = i
    CMat k2(2, 2);
    k2 << ci(1.25, -0.25), ci(1.75, 0.75),  // K_21
          ci(1, 0), ci(0, 1);               // K_22 = K_2
    RMat r2(2, 2);
    r2 << -0.625, -2, -2, -2.625;
    const auto g2 = SystemParams::make(s2, k2, r2, {{"s21", 1}, {"s22", 1}},
                                       {{"r21", 1}, {"r22", 1}});

    return concat_models(build_model(g1, "G1"), build_model(g2, "G2"));
}

const std::vector<Edge> kInteractionEdges{{"s12", "r21"}, {"s21", "r12"}};
const Edge kCascadeEdge{"s11", "r22"};

} // namespace

TEST(BuildModel, StaticScatteringIdentity) {
    const auto g = SystemParams::make(CMat::Identity(2, 2), CMat::Zero(2, 0), RMat::Zero(0, 0),
                                      {{"s1", 1}, {"s2", 1}}, {{"r1", 1}, {"r2", 1}});
    const auto m = build_model(g);
    EXPECT_EQ(m.out_ports().size(), 2u);
    EXPECT_EQ(m.in_ports().size(), 2u);
    EXPECT_EQ(m.params.K.rows(), 2);
    EXPECT_EQ(m.params.K.cols(), 0);
    EXPECT_EQ(m.row_groups[0], "G");
}

TEST(ConcatModels, EmptyIsIdentity) {
    const auto m = build_model(testutil::example1_target());
    const auto joined = concat_models(m, build_model(SystemParams::empty()));
    EXPECT_EQ(param_distance(joined.params, m.params), 0.0);
    EXPECT_EQ(joined.out_ports(), m.out_ports());
}

TEST(ConcatModels, TwoStaticDevices) {
    CMat phase(1, 1);
    phase << ci(0, 1);
    CMat flip(1, 1);
    flip << ci(-1, 0);
    auto a = SystemParams::static_device(phase);
    auto b = SystemParams::static_device(flip);
    b.out_ports = {{"s2", 1}};
    b.in_ports = {{"r2", 1}};
    const auto joined = concat_models(build_model(a, "A"), build_model(b, "B"));
    CMat expected(2, 2);
    expected << ci(0, 1), ci(0, 0), ci(0, 0), ci(-1, 0);
    EXPECT_EQ(max_abs(CMat(joined.params.S - expected)), 0.0);
}

TEST(ConcatModels, MatchesConcatOfSystems) {
    testutil::Rng rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        auto g1 = testutil::random_system(1, 2, rng);
        auto g2 = testutil::random_system(2, 1, rng);
        g1.out_ports = {{"a_s", 2}};
        g1.in_ports = {{"a_r", 2}};
        g2.out_ports = {{"b_s", 1}};
        g2.in_ports = {{"b_r", 1}};
        const auto via_models = concat_models(build_model(g1), build_model(g2));
        const auto via_systems = build_model(concat(g1, g2));
        EXPECT_EQ(param_distance(via_models.params, via_systems.params), 0.0);
    }
}

TEST(ConcatModels, RejectsLabelCollisions) {
    const auto m = build_model(testutil::example1_target());
    EXPECT_THROW(concat_models(m, m), LabelError);
}

TEST(Model, WorkedExamplePartition) {
    const auto model = example1_network();
    ASSERT_EQ(model.out_ports().size(), 4u);
    EXPECT_EQ(model.out_ports()[0].label, "s11");
    EXPECT_EQ(model.out_ports()[1].label, "s12");
    EXPECT_EQ(model.out_ports()[2].label, "s21");
    EXPECT_EQ(model.out_ports()[3].label, "s22");
    EXPECT_EQ(model.in_ports()[0].label, "r11");
    EXPECT_EQ(model.in_ports()[3].label, "r22");
    // S = diag(1, S_12, S_21, 1) with S_12 = 1, S_21 = i
    CMat expected = CMat::Zero(4, 4);
    expected(0, 0) = ci(1, 0);
    expected(1, 1) = ci(1, 0);
    expected(2, 2) = ci(0, 1);
    expected(3, 3) = ci(1, 0);
    EXPECT_EQ(max_abs(CMat(model.params.S - expected)), 0.0);
}

// with an all-zero scattering matrix the single-edge update collapses to
// mere port removal
TEST(EliminateEdge, ZeroScatteringCollapses) {
    testutil::Rng rng(43);
    const CMat k = testutil::random_cmat(2, 2, rng);
    const RMat r = testutil::random_symmetric(2, rng);
    const auto g = SystemParams::make(CMat::Zero(2, 2), k, r, {{"s1", 1}, {"s2", 1}},
                                      {{"r1", 1}, {"r2", 1}});
    const auto reduced = eliminate_edge(build_model(g), "s1", "r2");
    EXPECT_EQ(reduced.out_ports().size(), 1u);
    EXPECT_EQ(reduced.out_ports()[0].label, "s2");
    EXPECT_EQ(max_abs(reduced.params.S), 0.0);
    EXPECT_EQ(max_abs(CMat(reduced.params.K - k.row(1))), 0.0);
    EXPECT_EQ(max_abs(RMat(reduced.params.R - r)), 0.0);
}

TEST(EliminateEdge, UnknownPortAndMultiplicity) {
    const auto model = example1_network();
    EXPECT_THROW(eliminate_edge(model, "s99", "r11"), UnknownPort);
    EXPECT_THROW(eliminate_edge(model, "s11", "r99"), UnknownPort);

    auto g = SystemParams::make(CMat::Identity(3, 3), CMat::Zero(3, 2), RMat::Zero(2, 2),
                                {{"wide", 2}, {"narrow", 1}}, {{"in_a", 1}, {"in_b", 2}});
    EXPECT_THROW(eliminate_edge(build_model(g), "wide", "in_a"), MultiplicityMismatch);
}

TEST(EliminateEdge, SingularConnection) {
    // a self-loop on a static identity device: I - S_kj = 0
    const auto g = SystemParams::static_device(CMat::Identity(1, 1));
    EXPECT_THROW(eliminate_edge(build_model(g), "s1", "r1"), SingularConnection);

    // same loop through the adjacency route: eta - S_ii = 0
    const auto model = build_model(g);
    const auto adjacency = AdjacencyMatrix::from_edges(model, {{"s1", "r1"}});
    EXPECT_THROW(eliminate_simultaneous(model, adjacency), SingularConnection);
}

TEST(EliminateEdge, SequentialOrderIndependence) {
    const auto model = example1_network();
    const auto forward =
        eliminate_edge(eliminate_edge(model, "s12", "r21"), "s21", "r12");
    const auto backward =
        eliminate_edge(eliminate_edge(model, "s21", "r12"), "s12", "r21");
    EXPECT_LE(param_distance(forward.params, backward.params), 1e-12);
}

TEST(EliminateSimultaneous, EmptyAdjacencyIsIdentity) {
    const auto model = example1_network();
    AdjacencyMatrix none;
    none.eta = Eigen::MatrixXi::Zero(0, 0);
    const auto out = eliminate_simultaneous(model, none);
    EXPECT_EQ(param_distance(out.params, model.params), 0.0);
}

// frozen from tests/oracles/reference_values.py
TEST(EliminateSimultaneous, WorkedExampleReduction) {
    const auto model = example1_network();
    const auto adjacency = AdjacencyMatrix::from_edges(model, kInteractionEdges);

    ASSERT_EQ(adjacency.eta.rows(), 2);
    EXPECT_EQ(adjacency.eta(0, 1), 1);  // s12 -> r21
    EXPECT_EQ(adjacency.eta(1, 0), 1);  // s21 -> r12
    EXPECT_EQ(adjacency.eta(0, 0), 0);

    const auto red = eliminate_simultaneous(model, adjacency);
    ASSERT_EQ(red.out_ports().size(), 2u);
    EXPECT_EQ(red.out_ports()[0].label, "s11");
    EXPECT_EQ(red.out_ports()[1].label, "s22");

    EXPECT_LE(max_abs(CMat(red.params.S - CMat::Identity(2, 2))), 1e-12);

    const auto target = testutil::example1_target();
    CMat k_expected = CMat::Zero(2, 4);
    k_expected.block(0, 0, 1, 2) = target.coupling_block(1);
    k_expected.block(1, 2, 1, 2) = target.coupling_block(2);
    EXPECT_LE(max_abs(CMat(red.params.K - k_expected)), 1e-12);

    RMat r_expected(4, 4);
    r_expected << 2, 0.5, 1, 2.5,
                  0.5, 3, -1.5, -1,
                  1, -1.5, 1, 0,
                  2.5, -1, 0, 1;
    EXPECT_LE(max_abs(RMat(red.params.R - r_expected)), 1e-12);
}

TEST(EliminateSimultaneous, AgreesWithSequential) {
    const auto model = example1_network();
    const auto adjacency = AdjacencyMatrix::from_edges(model, kInteractionEdges);
    const auto simultaneous = eliminate_simultaneous(model, adjacency);
    const auto sequential = eliminate_edges(model, kInteractionEdges);
    EXPECT_LE(param_distance(simultaneous.params, sequential.params), 1e-12);
}

TEST(EliminateSimultaneous, CascadeRecoversTarget) {
    const auto model = example1_network();
    const auto adjacency = AdjacencyMatrix::from_edges(model, kInteractionEdges);
    auto net = eliminate_simultaneous(model, adjacency);
    net = eliminate_edge(net, kCascadeEdge);
    EXPECT_LE(param_distance(net.params, testutil::example1_target()), 1e-12);
    EXPECT_EQ(net.out_ports()[0].label, "s22");
    EXPECT_EQ(net.in_ports()[0].label, "r11");
}

TEST(Adjacency, Validation) {
    const auto model = example1_network();
    EXPECT_THROW(AdjacencyMatrix::from_edges(model, {{"s12", "zzz"}}), UnknownPort);
    EXPECT_THROW(AdjacencyMatrix::from_edges(model, {{"s12", "r21"}, {"s12", "r12"}}),
                 InconsistentAdjacency);

    // a hand-tweaked eta that no longer matches its edge list is rejected
    auto adjacency = AdjacencyMatrix::from_edges(model, kInteractionEdges);
    adjacency.eta(0, 0) = 1;
    EXPECT_THROW(eliminate_simultaneous(model, adjacency), InconsistentAdjacency);
}

// random concatenated networks with a random valid channel pairing:
// the simultaneous reduction equals sequential elimination in any order
TEST(Reduction, RandomNetworksOrderIndependence) {
    testutil::Rng rng(47);
    for (int trial = 0; trial < 6; ++trial) {
        const int blocks = 2 + static_cast<int>(rng() % 2);
        ModelMatrix model = build_model(SystemParams::empty());
        for (int b = 0; b < blocks; ++b) {
            auto g = testutil::random_system(1, 2, rng);
            g.out_ports = {{"s" + std::to_string(b) + "a", 1}, {"s" + std::to_string(b) + "b", 1}};
            g.in_ports = {{"r" + std::to_string(b) + "a", 1}, {"r" + std::to_string(b) + "b", 1}};
            model = concat_models(model, build_model(g, "G" + std::to_string(b)));
        }

        // pair a few distinct output ports with distinct input ports
        std::vector<std::string> outs;
        std::vector<std::string> ins;
        for (const auto& p : model.out_ports()) {
            outs.push_back(p.label);
        }
        for (const auto& p : model.in_ports()) {
            ins.push_back(p.label);
        }
        std::shuffle(outs.begin(), outs.end(), rng);
        std::shuffle(ins.begin(), ins.end(), rng);
        const int n_edges = 2 + static_cast<int>(rng() % 2);
        std::vector<Edge> edges;
        for (int e = 0; e < n_edges; ++e) {
            edges.push_back({outs[e], ins[e]});
        }

        const auto simultaneous =
            eliminate_simultaneous(model, AdjacencyMatrix::from_edges(model, edges));
        for (int order = 0; order < 10; ++order) {
            std::shuffle(edges.begin(), edges.end(), rng);
            const auto sequential = eliminate_edges(model, edges);
            EXPECT_LE(param_distance(simultaneous.params, sequential.params), 1e-9);
        }

        // unitarity is preserved and external multiplicities are conserved
        EXPECT_LE(unitarity_residual(simultaneous.params.S), 1e-9);
        EXPECT_EQ(total_multiplicity(simultaneous.params.out_ports),
                  model.params.m - n_edges);
    }
}

// multiplicity-2 ports expand to two unit channels inside eta
TEST(EliminateSimultaneous, WidePortExpansion) {
    testutil::Rng rng(131);
    auto g1 = testutil::random_system(1, 2, rng);
    auto g2 = testutil::random_system(2, 2, rng);
    g1.out_ports = {{"a_out", 2}};
    g1.in_ports = {{"a_in", 2}};
    g2.out_ports = {{"b_out", 2}};
    g2.in_ports = {{"b_in", 2}};
    const auto model = concat_models(build_model(g1, "A"), build_model(g2, "B"));
    const std::vector<Edge> edges{{"a_out", "b_in"}};
    const auto adjacency = AdjacencyMatrix::from_edges(model, edges);
    ASSERT_EQ(adjacency.eta.rows(), 2);
    EXPECT_EQ(adjacency.eta(0, 0), 1);
    EXPECT_EQ(adjacency.eta(1, 1), 1);
    EXPECT_EQ(adjacency.eta(0, 1), 0);

    const auto simultaneous = eliminate_simultaneous(model, adjacency);
    const auto sequential = eliminate_edges(model, edges);
    EXPECT_LE(param_distance(simultaneous.params, sequential.params), 1e-12);
    // this cascade is the series product of the two blocks
    EXPECT_LE(param_distance(simultaneous.params, series(g2, g1)), 1e-9);
}

// closing every port leaves a field-free system carrying only Hamiltonian
// dynamics
TEST(EliminateSimultaneous, FullyClosedLoop) {
    testutil::Rng rng(127);
    auto g1 = testutil::random_system(1, 1, rng);
    auto g2 = testutil::random_system(1, 1, rng);
    g1.out_ports = {{"a_out", 1}};
    g1.in_ports = {{"a_in", 1}};
    g2.out_ports = {{"b_out", 1}};
    g2.in_ports = {{"b_in", 1}};
    const auto model = concat_models(build_model(g1, "A"), build_model(g2, "B"));
    const std::vector<Edge> loop{{"a_out", "b_in"}, {"b_out", "a_in"}};
    const auto closed = eliminate_simultaneous(model, AdjacencyMatrix::from_edges(model, loop));
    EXPECT_EQ(closed.params.m, 0);
    EXPECT_EQ(closed.params.n_dof, 2);
    EXPECT_TRUE(closed.out_ports().empty());
    // sequential elimination of the loop agrees
    const auto sequential = eliminate_edges(model, loop);
    EXPECT_LE(max_abs(RMat(closed.params.R - sequential.params.R)), 1e-9);
}

TEST(Dot, NetworkView) {
    const auto model = example1_network();
    const auto dot = model_to_dot(model, kInteractionEdges);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(dot.find("\"G1\" -> \"G2\""), std::string::npos);
    EXPECT_NE(dot.find("\"G2\" -> \"G1\""), std::string::npos);
    EXPECT_NE(dot.find("ext_r11"), std::string::npos);
    EXPECT_NE(dot.find("ext_s22"), std::string::npos);
    // internal ports do not dangle
    EXPECT_EQ(dot.find("ext_r21"), std::string::npos);
}
