#include "qnetsyn/model_matrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "qnetsyn/errors.hpp"
#include "qnetsyn/slh_algebra.hpp"

namespace qnetsyn {

namespace {

// (η − S_ii) and (I − S_kj) inverses share this guard.
CMat guarded_inverse(const CMat& a, const std::string& what) {
    Eigen::PartialPivLU<CMat> lu(a);
    if (!(lu.rcond() >= 1.0 / kConditionLimit)) {
        throw SingularConnection(what + " is numerically singular (rcond " +
                                 std::to_string(lu.rcond()) + ")");
    }
    return lu.inverse();
}

int port_index(const std::vector<Port>& ports, const std::string& label) {
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (ports[i].label == label) {
            return static_cast<int>(i);
        }
    }
    throw UnknownPort("no port labelled '" + label + "'");
}

} // namespace

ModelMatrix build_model(const SystemParams& g, const std::string& group) {
    ModelMatrix m;
    m.params = g;
    m.row_groups.assign(g.out_ports.size(), group);
    m.col_groups.assign(g.in_ports.size(), group);
    return m;
}

ModelMatrix concat_models(const ModelMatrix& m1, const ModelMatrix& m2) {
    const auto collide = [](const std::vector<Port>& a, const std::vector<Port>& b,
                            const char* side) {
        std::set<std::string> labels;
        for (const auto& p : a) {
            labels.insert(p.label);
        }
        for (const auto& p : b) {
            if (labels.count(p.label)) {
                throw LabelError(std::string("concat_models: duplicate ") + side +
                                 " port label '" + p.label + "'");
            }
        }
    };
    collide(m1.params.out_ports, m2.params.out_ports, "output");
    collide(m1.params.in_ports, m2.params.in_ports, "input");

    ModelMatrix m;
    m.params = concat(m1.params, m2.params);
    m.row_groups = m1.row_groups;
    m.row_groups.insert(m.row_groups.end(), m2.row_groups.begin(), m2.row_groups.end());
    m.col_groups = m1.col_groups;
    m.col_groups.insert(m.col_groups.end(), m2.col_groups.begin(), m2.col_groups.end());
    return m;
}

ModelMatrix eliminate_edge(const ModelMatrix& m,
                           const std::string& out_label, const std::string& in_label) {
    const SystemParams& g = m.params;
    const auto [k_off, k_mult] = port_span(g.out_ports, out_label);
    const auto [j_off, j_mult] = port_span(g.in_ports, in_label);
    if (k_mult != j_mult) {
        throw MultiplicityMismatch("edge (" + out_label + ", " + in_label + ") pairs ports of multiplicity " +
                                   std::to_string(k_mult) + " and " + std::to_string(j_mult));
    }
    const int c = k_mult;
    const int k_idx = port_index(g.out_ports, out_label);
    const int j_idx = port_index(g.in_ports, in_label);

    const CMat s_kj = g.S.block(k_off, j_off, c, c);
    const CMat w = guarded_inverse(CMat::Identity(c, c) - s_kj,
                                   "I - S(" + out_label + "," + in_label + ")");
    const CMat l_k = g.K.middleRows(k_off, c);

    // S'_pq = S_pq + S_pj W S_kq over the surviving port blocks
    CMat s_new(g.m - c, g.m - c);
    CMat k_new(g.m - c, 2 * g.n_dof);
    int row = 0;
    int p_off = 0;
    for (std::size_t p = 0; p < g.out_ports.size(); ++p) {
        const int pm = g.out_ports[p].multiplicity;
        if (static_cast<int>(p) == k_idx) {
            p_off += pm;
            continue;
        }
        const CMat s_pj = g.S.block(p_off, j_off, pm, c);
        int col = 0;
        int q_off = 0;
        for (std::size_t q = 0; q < g.in_ports.size(); ++q) {
            const int qm = g.in_ports[q].multiplicity;
            if (static_cast<int>(q) == j_idx) {
                q_off += qm;
                continue;
            }
            s_new.block(row, col, pm, qm) =
                g.S.block(p_off, q_off, pm, qm) + s_pj * w * g.S.block(k_off, q_off, c, qm);
            col += qm;
            q_off += qm;
        }
        // L'_p = L_p + S_pj W L_k
        k_new.middleRows(row, pm) = g.K.middleRows(p_off, pm) + s_pj * w * l_k;
        row += pm;
        p_off += pm;
    }

    // H' = H + Σ_p Im{L_p† S_pj W L_k}, the sum running over every output
    // port including the eliminated one
    CMat q_ham = CMat::Zero(2 * g.n_dof, 2 * g.n_dof);
    p_off = 0;
    for (const auto& port : g.out_ports) {
        const int pm = port.multiplicity;
        q_ham += g.K.middleRows(p_off, pm).adjoint() * g.S.block(p_off, j_off, pm, c) * w * l_k;
        p_off += pm;
    }
    const RMat r_new = fold_hamiltonian_term(g.R, q_ham);

    std::vector<Port> outs;
    std::vector<Port> ins;
    std::vector<std::string> row_groups;
    std::vector<std::string> col_groups;
    for (std::size_t p = 0; p < g.out_ports.size(); ++p) {
        if (static_cast<int>(p) != k_idx) {
            outs.push_back(g.out_ports[p]);
            row_groups.push_back(m.row_groups[p]);
        }
    }
    for (std::size_t q = 0; q < g.in_ports.size(); ++q) {
        if (static_cast<int>(q) != j_idx) {
            ins.push_back(g.in_ports[q]);
            col_groups.push_back(m.col_groups[q]);
        }
    }

    ModelMatrix out;
    out.params = SystemParams::make(std::move(s_new), std::move(k_new), r_new,
                                    std::move(outs), std::move(ins));
    out.row_groups = std::move(row_groups);
    out.col_groups = std::move(col_groups);
    return out;
}

ModelMatrix eliminate_edge(const ModelMatrix& m, const Edge& edge) {
    return eliminate_edge(m, edge.out_label, edge.in_label);
}

ModelMatrix eliminate_edges(const ModelMatrix& m, const std::vector<Edge>& edges) {
    ModelMatrix current = m;
    for (const auto& e : edges) {
        current = eliminate_edge(current, e);
    }
    return current;
}

AdjacencyMatrix AdjacencyMatrix::from_edges(const ModelMatrix& m, const std::vector<Edge>& edges) {
    const SystemParams& g = m.params;

    std::set<std::string> out_used;
    std::set<std::string> in_used;
    for (const auto& e : edges) {
        const auto [o_off, o_mult] = port_span(g.out_ports, e.out_label);
        const auto [i_off, i_mult] = port_span(g.in_ports, e.in_label);
        (void)o_off;
        (void)i_off;
        if (o_mult != i_mult) {
            throw MultiplicityMismatch("edge (" + e.out_label + ", " + e.in_label +
                                       ") pairs ports of multiplicity " + std::to_string(o_mult) +
                                       " and " + std::to_string(i_mult));
        }
        if (!out_used.insert(e.out_label).second) {
            throw InconsistentAdjacency("output port '" + e.out_label + "' appears in two edges");
        }
        if (!in_used.insert(e.in_label).second) {
            throw InconsistentAdjacency("input port '" + e.in_label + "' appears in two edges");
        }
    }

    // channel offsets of internal ports, in the model's own port order
    std::map<std::string, int> out_channel;
    std::map<std::string, int> in_channel;
    int n_out = 0;
    for (const auto& p : g.out_ports) {
        if (out_used.count(p.label)) {
            out_channel[p.label] = n_out;
            n_out += p.multiplicity;
        }
    }
    int n_in = 0;
    for (const auto& p : g.in_ports) {
        if (in_used.count(p.label)) {
            in_channel[p.label] = n_in;
            n_in += p.multiplicity;
        }
    }

    AdjacencyMatrix adjacency;
    adjacency.edges = edges;
    adjacency.eta = Eigen::MatrixXi::Zero(n_out, n_in);
    for (const auto& e : edges) {
        const auto [o_off, mult] = port_span(g.out_ports, e.out_label);
        (void)o_off;
        const int row0 = out_channel.at(e.out_label);
        const int col0 = in_channel.at(e.in_label);
        for (int t = 0; t < mult; ++t) {
            adjacency.eta(row0 + t, col0 + t) = 1;
        }
    }
    return adjacency;
}

ModelMatrix eliminate_simultaneous(const ModelMatrix& m, const AdjacencyMatrix& adjacency) {
    if (adjacency.edges.empty()) {
        if (adjacency.eta.size() != 0) {
            throw InconsistentAdjacency("nonempty adjacency matrix with no edges");
        }
        return m;
    }

    const auto rebuilt = AdjacencyMatrix::from_edges(m, adjacency.edges);
    if (rebuilt.eta.rows() != adjacency.eta.rows() || rebuilt.eta.cols() != adjacency.eta.cols() ||
        rebuilt.eta != adjacency.eta) {
        throw InconsistentAdjacency("adjacency matrix does not match its edge list");
    }

    const SystemParams& g = m.params;
    std::set<std::string> out_internal;
    std::set<std::string> in_internal;
    for (const auto& e : adjacency.edges) {
        out_internal.insert(e.out_label);
        in_internal.insert(e.in_label);
    }

    std::vector<int> rows_i;
    std::vector<int> rows_e;
    std::vector<int> cols_i;
    std::vector<int> cols_e;
    int off = 0;
    for (const auto& p : g.out_ports) {
        auto& dst = out_internal.count(p.label) ? rows_i : rows_e;
        for (int t = 0; t < p.multiplicity; ++t) {
            dst.push_back(off + t);
        }
        off += p.multiplicity;
    }
    off = 0;
    for (const auto& p : g.in_ports) {
        auto& dst = in_internal.count(p.label) ? cols_i : cols_e;
        for (int t = 0; t < p.multiplicity; ++t) {
            dst.push_back(off + t);
        }
        off += p.multiplicity;
    }

    const CMat s_ii = g.S(rows_i, cols_i);
    const CMat s_ie = g.S(rows_i, cols_e);
    const CMat s_ei = g.S(rows_e, cols_i);
    const CMat s_ee = g.S(rows_e, cols_e);
    const CMat k_i = g.K(rows_i, Eigen::all);
    const CMat k_e = g.K(rows_e, Eigen::all);

    const CMat w = guarded_inverse(adjacency.eta.cast<Complex>() - s_ii, "eta - S_ii");

    CMat s_red = s_ee + s_ei * w * s_ie;
    CMat k_red = k_e + s_ei * w * k_i;
    // H_red = H + Σ_{b∈{i,e}} Im{L_b† S_bi W L_i}
    const CMat q_ham = k_i.adjoint() * s_ii * w * k_i + k_e.adjoint() * s_ei * w * k_i;
    RMat r_red = fold_hamiltonian_term(g.R, q_ham);

    std::vector<Port> outs;
    std::vector<Port> ins;
    std::vector<std::string> row_groups;
    std::vector<std::string> col_groups;
    for (std::size_t p = 0; p < g.out_ports.size(); ++p) {
        if (!out_internal.count(g.out_ports[p].label)) {
            outs.push_back(g.out_ports[p]);
            row_groups.push_back(m.row_groups[p]);
        }
    }
    for (std::size_t q = 0; q < g.in_ports.size(); ++q) {
        if (!in_internal.count(g.in_ports[q].label)) {
            ins.push_back(g.in_ports[q]);
            col_groups.push_back(m.col_groups[q]);
        }
    }

    ModelMatrix out;
    out.params = SystemParams::make(std::move(s_red), std::move(k_red), r_red,
                                    std::move(outs), std::move(ins));
    out.row_groups = std::move(row_groups);
    out.col_groups = std::move(col_groups);
    return out;
}

std::string model_to_dot(const ModelMatrix& m, const std::vector<Edge>& internal_edges) {
    std::set<std::string> internal_out;
    std::set<std::string> internal_in;
    for (const auto& e : internal_edges) {
        internal_out.insert(e.out_label);
        internal_in.insert(e.in_label);
    }

    std::map<std::string, std::string> out_group;
    std::map<std::string, std::string> in_group;
    for (std::size_t p = 0; p < m.params.out_ports.size(); ++p) {
        out_group[m.params.out_ports[p].label] = m.row_groups[p];
    }
    for (std::size_t q = 0; q < m.params.in_ports.size(); ++q) {
        in_group[m.params.in_ports[q].label] = m.col_groups[q];
    }

    std::ostringstream dot;
    dot << "digraph network {\n  rankdir=LR;\n  node [shape=box];\n";
    std::set<std::string> groups;
    for (const auto& g : m.row_groups) {
        groups.insert(g);
    }
    for (const auto& g : m.col_groups) {
        groups.insert(g);
    }
    for (const auto& g : groups) {
        dot << "  \"" << g << "\";\n";
    }
    for (const auto& e : internal_edges) {
        dot << "  \"" << out_group.at(e.out_label) << "\" -> \"" << in_group.at(e.in_label)
            << "\" [label=\"" << e.out_label << "->" << e.in_label << "\"];\n";
    }
    for (const auto& p : m.params.in_ports) {
        if (internal_in.count(p.label)) {
            continue;
        }
        dot << "  \"ext_" << p.label << "\" [shape=point];\n";
        dot << "  \"ext_" << p.label << "\" -> \"" << in_group.at(p.label)
            << "\" [label=\"" << p.label << "\"];\n";
    }
    for (const auto& p : m.params.out_ports) {
        if (internal_out.count(p.label)) {
            continue;
        }
        dot << "  \"ext_" << p.label << "\" [shape=point];\n";
        dot << "  \"" << out_group.at(p.label) << "\" -> \"ext_" << p.label
            << "\" [label=\"" << p.label << "\"];\n";
    }
    dot << "}\n";
    return dot.str();
}

} // namespace qnetsyn
