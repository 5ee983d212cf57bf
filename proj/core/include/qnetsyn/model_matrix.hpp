// model_matrix.hpp — the port-partitioned model matrix view of a system and
// its reduction calculus: single-edge elimination and simultaneous
// elimination through an adjacency matrix.
//
// The Hamiltonian corner block −iH−½L†L is never materialized; reductions
// are carried on (S, K, R) with Hamiltonian updates folded into R.

#pragma once

#include <string>
#include <vector>

#include "qnetsyn/core_types.hpp"

namespace qnetsyn {

// Directed internal channel from an output port to an input port of equal
// multiplicity.
struct Edge {
    std::string out_label;
    std::string in_label;

    bool operator==(const Edge&) const = default;
};

// A system together with its port partition read as a model matrix: rows are
// output ports (blocks of K and block rows of S), columns are input ports
// (block columns of S). row/col_groups tag each port with the subsystem it
// came from, for the DOT network view.
struct ModelMatrix {
    SystemParams params;
    std::vector<std::string> row_groups;
    std::vector<std::string> col_groups;

    const std::vector<Port>& out_ports() const { return params.out_ports; }
    const std::vector<Port>& in_ports() const { return params.in_ports; }
};

ModelMatrix build_model(const SystemParams& g, const std::string& group = "G");

// M(G1) ⊞ M(G2) = M(G1 ⊞ G2) with zero off-diagonal scattering blocks.
// Throws LabelError when the port label sets collide.
ModelMatrix concat_models(const ModelMatrix& m1, const ModelMatrix& m2);

// Connects output port out_label to input port in_label and takes the
// zero-delay limit:
//   S'_pq = S_pq + S_pj (I − S_kj)⁻¹ S_kq
//   L'_p  = L_p + S_pj (I − S_kj)⁻¹ L_k
//   R'    = R + fold of Σ_p Im{L_p† S_pj (I − S_kj)⁻¹ L_k}
// The connected ports disappear from the partition.
ModelMatrix eliminate_edge(const ModelMatrix& m,
                           const std::string& out_label, const std::string& in_label);

ModelMatrix eliminate_edge(const ModelMatrix& m, const Edge& edge);

// Sequential elimination in the given order.
ModelMatrix eliminate_edges(const ModelMatrix& m, const std::vector<Edge>& edges);

// 0/1 pairing of internal unit channels. Ports of multiplicity c expand to c
// consecutive unit channels; edges pair them in order. At most a single 1 in
// any row or column.
struct AdjacencyMatrix {
    Eigen::MatrixXi eta;      // internal output channels × internal input channels
    std::vector<Edge> edges;  // whole-port edges, in the model's port order

    // Builds η for the edges within m. Throws UnknownPort,
    // MultiplicityMismatch, or InconsistentAdjacency (duplicate port use).
    static AdjacencyMatrix from_edges(const ModelMatrix& m, const std::vector<Edge>& edges);
};

// Simultaneous elimination of all internal edges:
//   S_red = S_ee + S_ei (η − S_ii)⁻¹ S_ie
//   L_red = L_e + S_ei (η − S_ii)⁻¹ L_i
//   R_red = R + fold of Σ_{b∈{i,e}} Im{L_b† S_bi (η − S_ii)⁻¹ L_i}
ModelMatrix eliminate_simultaneous(const ModelMatrix& m, const AdjacencyMatrix& adjacency);

// Network view: one node per subsystem group, solid arrows for internal
// edges, dangling arrows for external ports.
std::string model_to_dot(const ModelMatrix& m, const std::vector<Edge>& internal_edges = {});

} // namespace qnetsyn
