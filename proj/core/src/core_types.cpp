#include "qnetsyn/core_types.hpp"

#include <set>
#include <utility>

#include "qnetsyn/errors.hpp"

namespace qnetsyn {

CMat conj_elem(const CMat& a) {
    return a.conjugate();
}

RMat re_real(const CMat& a) {
    return a.real();
}

RMat im_real(const CMat& a) {
    return a.imag();
}

RMat sym(const RMat& a) {
    return (a + a.transpose()) / 2.0;
}

double max_abs(const CMat& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double max_abs(const RMat& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double unitarity_residual(const CMat& s) {
    if (s.rows() != s.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    const CMat d = s * s.adjoint() - CMat::Identity(s.rows(), s.rows());
    return max_abs(d);
}

double hermiticity_residual(const CMat& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return max_abs(CMat(a - a.adjoint()));
}

double realness_residual(const CMat& a) {
    return max_abs(RMat(a.imag()));
}

double symmetry_residual(const CMat& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return max_abs(CMat(a - a.transpose()));
}

double symmetry_residual(const RMat& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return max_abs(RMat(a - a.transpose()));
}

bool is_unitary(const CMat& s, double tol) {
    return unitarity_residual(s) <= tol;
}

bool is_hermitian(const CMat& a, double tol) {
    return hermiticity_residual(a) <= tol;
}

bool is_real(const CMat& a, double tol) {
    return realness_residual(a) <= tol;
}

bool is_symmetric(const CMat& a, double tol) {
    return symmetry_residual(a) <= tol;
}

RMat symplectic_form(int n_dof) {
    RMat theta = RMat::Zero(2 * n_dof, 2 * n_dof);
    for (int j = 0; j < n_dof; ++j) {
        theta(2 * j, 2 * j + 1) = 1.0;
        theta(2 * j + 1, 2 * j) = -1.0;
    }
    return theta;
}

SymplecticStructure SymplecticStructure::of(int n_dof) {
    if (n_dof < 0) {
        throw DimensionError("SymplecticStructure: n_dof must be nonnegative");
    }
    return SymplecticStructure{n_dof, symplectic_form(n_dof)};
}

int total_multiplicity(const std::vector<Port>& ports) {
    int total = 0;
    for (const auto& p : ports) {
        total += p.multiplicity;
    }
    return total;
}

std::pair<int, int> port_span(const std::vector<Port>& ports, const std::string& label) {
    int offset = 0;
    for (const auto& p : ports) {
        if (p.label == label) {
            return {offset, p.multiplicity};
        }
        offset += p.multiplicity;
    }
    throw UnknownPort("no port labelled '" + label + "'");
}

bool has_port(const std::vector<Port>& ports, const std::string& label) {
    for (const auto& p : ports) {
        if (p.label == label) {
            return true;
        }
    }
    return false;
}

SystemParams SystemParams::make(CMat S, CMat K, const RMat& R,
                                std::vector<Port> out_ports, std::vector<Port> in_ports) {
    const int m = static_cast<int>(S.rows());
    if (S.cols() != m) {
        throw DimensionError("SystemParams: S must be square");
    }
    if (K.rows() != m) {
        throw DimensionError("SystemParams: K must have m rows");
    }
    if (K.cols() % 2 != 0) {
        throw DimensionError("SystemParams: K must have 2n columns");
    }
    const int n = static_cast<int>(K.cols()) / 2;
    if (R.rows() != 2 * n || R.cols() != 2 * n) {
        throw DimensionError("SystemParams: R must be 2n x 2n");
    }
    if (total_multiplicity(out_ports) != m || total_multiplicity(in_ports) != m) {
        throw DimensionError("SystemParams: port multiplicities must sum to m");
    }

    SystemParams g;
    g.n_dof = n;
    g.m = m;
    g.S = std::move(S);
    g.K = std::move(K);
    g.r_asymmetry = symmetry_residual(R);
    g.R = sym(R);
    g.out_ports = std::move(out_ports);
    g.in_ports = std::move(in_ports);
    return g;
}

SystemParams SystemParams::make(CMat S, CMat K, const RMat& R) {
    std::vector<Port> outs;
    std::vector<Port> ins;
    const int m = static_cast<int>(S.rows());
    if (m > 0) {
        outs.push_back({"s1", m});
        ins.push_back({"r1", m});
    }
    return make(std::move(S), std::move(K), R, std::move(outs), std::move(ins));
}

SystemParams SystemParams::static_device(CMat S) {
    const int m = static_cast<int>(S.rows());
    return make(std::move(S), CMat::Zero(m, 0), RMat::Zero(0, 0));
}

SystemParams SystemParams::empty() {
    return make(CMat::Zero(0, 0), CMat::Zero(0, 0), RMat::Zero(0, 0));
}

CMat SystemParams::coupling_block(int j) const {
    if (j < 1 || j > n_dof) {
        throw DimensionError("coupling_block: oscillator index out of range");
    }
    return K.middleCols(2 * (j - 1), 2);
}

RMat SystemParams::r_block(int j, int k) const {
    if (j < 1 || j > n_dof || k < 1 || k > n_dof) {
        throw DimensionError("r_block: oscillator index out of range");
    }
    return R.block(2 * (j - 1), 2 * (k - 1), 2, 2);
}

namespace {

void check_ports(const std::vector<Port>& ports, const char* side, int m,
                 std::vector<Violation>& out) {
    std::set<std::string> seen;
    for (const auto& p : ports) {
        if (p.multiplicity <= 0) {
            out.push_back({std::string(side) + " port '" + p.label + "' multiplicity positive", 1.0});
        }
        if (!seen.insert(p.label).second) {
            out.push_back({std::string(side) + " port label '" + p.label + "' unique", 1.0});
        }
    }
    const int total = total_multiplicity(ports);
    if (total != m) {
        out.push_back({std::string(side) + " port multiplicities sum to m",
                       static_cast<double>(std::abs(total - m))});
    }
}

} // namespace

std::vector<Violation> validate_system(const SystemParams& g, double tol) {
    std::vector<Violation> violations;

    if (g.n_dof < 0 || g.m < 0) {
        violations.push_back({"n_dof and m nonnegative", 1.0});
        return violations;
    }
    if (g.S.rows() != g.m || g.S.cols() != g.m) {
        violations.push_back({"S is m x m", 1.0});
    }
    if (g.K.rows() != g.m || g.K.cols() != 2 * g.n_dof) {
        violations.push_back({"K is m x 2n", 1.0});
    }
    if (g.R.rows() != 2 * g.n_dof || g.R.cols() != 2 * g.n_dof) {
        violations.push_back({"R is 2n x 2n", 1.0});
    }
    if (!violations.empty()) {
        return violations;  // residual checks need consistent shapes
    }

    if (const double res = unitarity_residual(g.S); res > tol) {
        violations.push_back({"S unitary", res});
    }
    if (g.r_asymmetry > tol) {
        violations.push_back({"R symmetric", g.r_asymmetry});
    }
    if (const double res = symmetry_residual(g.R); res > tol) {
        violations.push_back({"R symmetric (stored)", res});
    }
    check_ports(g.out_ports, "output", g.m, violations);
    check_ports(g.in_ports, "input", g.m, violations);
    return violations;
}

} // namespace qnetsyn
