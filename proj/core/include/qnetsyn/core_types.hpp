// core_types.hpp — matrix conventions, canonical structure constants, and the
// (S, Kx, ½xᵀRx) system parameter type shared by every other module.
//
// Conventions: for a complex matrix A, A^# is the elementwise conjugate,
// A† = (A^#)ᵀ, Re{A} = (A + A^#)/2 and Im{A} = (A − A^#)/2i. The canonical
// operator vector is x = (q₁,p₁,…,q_n,p_n)ᵀ with xxᵀ − (xxᵀ)ᵀ = 2iΘ.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace qnetsyn {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

// Default tolerance of every structural predicate and residual check.
inline constexpr double kDefaultTol = 1e-9;

// Reciprocal-condition floor below which a connection matrix counts as
// singular (condition number above 1e12).
inline constexpr double kConditionLimit = 1e12;

// ------------------------------ elementwise maps -----------------------------

CMat conj_elem(const CMat& a);  // A^#
RMat re_real(const CMat& a);    // Re{A} as a real matrix
RMat im_real(const CMat& a);    // Im{A} as a real matrix
RMat sym(const RMat& a);        // (A + Aᵀ)/2

double max_abs(const CMat& a);
double max_abs(const RMat& a);

// ---------------------------- structural predicates --------------------------

double unitarity_residual(const CMat& s);    // ‖SS† − I‖_max
double hermiticity_residual(const CMat& a);  // ‖A − A†‖_max
double realness_residual(const CMat& a);     // ‖Im{A}‖_max
double symmetry_residual(const CMat& a);     // ‖A − Aᵀ‖_max
double symmetry_residual(const RMat& a);

bool is_unitary(const CMat& s, double tol = kDefaultTol);
bool is_hermitian(const CMat& a, double tol = kDefaultTol);
bool is_real(const CMat& a, double tol = kDefaultTol);
bool is_symmetric(const CMat& a, double tol = kDefaultTol);

// --------------------------- canonical structure -----------------------------

// Θ = diag_n(J) with J = [[0,1],[−1,0]]; antisymmetric, Θ² = −I.
RMat symplectic_form(int n_dof);

struct SymplecticStructure {
    int n_dof = 0;
    RMat theta;  // 2n × 2n

    static SymplecticStructure of(int n_dof);
};

// --------------------------------- ports -------------------------------------

// A port groups consecutive field channels under one label. Output ports
// partition the rows of K and the block rows of S; input ports partition the
// block columns of S. Multiplicities on each side sum to m.
struct Port {
    std::string label;
    int multiplicity = 1;

    bool operator==(const Port&) const = default;
};

int total_multiplicity(const std::vector<Port>& ports);

// Offset of the first channel of the port with this label, paired with its
// multiplicity. Throws UnknownPort.
std::pair<int, int> port_span(const std::vector<Port>& ports, const std::string& label);

bool has_port(const std::vector<Port>& ports, const std::string& label);

// ------------------------------ system parameters ----------------------------

// A linear quantum stochastic system G = (S, Kx, ½xᵀRx):
//   S  m×m unitary scattering matrix,
//   K  m×2n complex coupling matrix (L = Kx),
//   R  2n×2n real symmetric Hamiltonian matrix.
// n_dof = 0 describes a static device (K and R empty). Instances are
// immutable values once built; every operation on them is a pure function.
struct SystemParams {
    int n_dof = 0;
    int m = 0;
    CMat S;
    CMat K;
    RMat R;
    std::vector<Port> in_ports;
    std::vector<Port> out_ports;

    // ‖R_raw − R_rawᵀ‖_max recorded at ingestion; R itself is stored
    // symmetrized. validate_system flags it when above tolerance.
    double r_asymmetry = 0.0;

    // Builds a system with explicit ports. Throws DimensionError on shape
    // mismatch between S, K, R and the port multiplicities.
    static SystemParams make(CMat S, CMat K, const RMat& R,
                             std::vector<Port> out_ports, std::vector<Port> in_ports);

    // Same, with default ports: a single output "s1" and input "r1" of
    // multiplicity m (no ports when m = 0).
    static SystemParams make(CMat S, CMat K, const RMat& R);

    // Static device (S, 0, 0).
    static SystemParams static_device(CMat S);

    // The empty system (n = 0, m = 0), identity of the concatenation product.
    static SystemParams empty();

    // Block of K coupling to oscillator j (columns 2j−2, 2j−1 for 1-based j).
    CMat coupling_block(int j) const;

    // 2×2 block R_{jk} of R (1-based oscillator indices).
    RMat r_block(int j, int k) const;
};

// ------------------------------- validation ----------------------------------

struct Violation {
    std::string predicate;
    double residual = 0.0;
};

// Reports every violated invariant of g at the given tolerance; never throws.
// Empty result means g is a valid system.
std::vector<Violation> validate_system(const SystemParams& g, double tol = kDefaultTol);

// ------------------------------ QSDE matrices --------------------------------

// State-space quadruple of the quantum stochastic differential equation
//   dX = AX dt + B [dA; dA^#],   dY = CX dt + D dA.
struct QsdeMatrices {
    RMat A;  // 2n × 2n
    CMat B;  // 2n × 2m
    CMat C;  // m × 2n
    CMat D;  // m × m
};

} // namespace qnetsyn
