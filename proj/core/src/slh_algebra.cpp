#include "qnetsyn/slh_algebra.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "qnetsyn/errors.hpp"

namespace qnetsyn {

namespace {

// Renames g2-side labels that collide with g1-side ones: label~2, label~3, …
std::vector<Port> disambiguate(const std::vector<Port>& first, std::vector<Port> second) {
    std::set<std::string> taken;
    for (const auto& p : first) {
        taken.insert(p.label);
    }
    for (auto& p : second) {
        if (taken.count(p.label) == 0) {
            taken.insert(p.label);
            continue;
        }
        for (int suffix = 2;; ++suffix) {
            std::string candidate = p.label + "~" + std::to_string(suffix);
            if (taken.insert(candidate).second) {
                p.label = std::move(candidate);
                break;
            }
        }
    }
    return second;
}

std::vector<Port> concat_ports(const std::vector<Port>& a, const std::vector<Port>& b) {
    std::vector<Port> out = a;
    const auto renamed = disambiguate(a, b);
    out.insert(out.end(), renamed.begin(), renamed.end());
    return out;
}

} // namespace

SystemParams concat(const SystemParams& g1, const SystemParams& g2) {
    const int m = g1.m + g2.m;
    const int n = g1.n_dof + g2.n_dof;

    CMat s = CMat::Zero(m, m);
    s.topLeftCorner(g1.m, g1.m) = g1.S;
    s.bottomRightCorner(g2.m, g2.m) = g2.S;

    CMat k = CMat::Zero(m, 2 * n);
    k.topLeftCorner(g1.m, 2 * g1.n_dof) = g1.K;
    k.bottomRightCorner(g2.m, 2 * g2.n_dof) = g2.K;

    RMat r = RMat::Zero(2 * n, 2 * n);
    r.topLeftCorner(2 * g1.n_dof, 2 * g1.n_dof) = g1.R;
    r.bottomRightCorner(2 * g2.n_dof, 2 * g2.n_dof) = g2.R;

    return SystemParams::make(std::move(s), std::move(k), r,
                              concat_ports(g1.out_ports, g2.out_ports),
                              concat_ports(g1.in_ports, g2.in_ports));
}

RMat fold_hamiltonian_term(const RMat& r, const CMat& q) {
    if (q.rows() != r.rows() || q.cols() != r.cols()) {
        throw DimensionError("fold_hamiltonian_term: shape mismatch");
    }
    return r + 2.0 * sym(im_real(q));
}

SystemParams series(const SystemParams& g2, const SystemParams& g1) {
    if (g1.m != g2.m) {
        throw DimensionError("series: operands must carry the same number of fields (" +
                             std::to_string(g2.m) + " vs " + std::to_string(g1.m) + ")");
    }
    const int n = g1.n_dof + g2.n_dof;
    const int m = g1.m;

    CMat k = CMat::Zero(m, 2 * n);
    k.leftCols(2 * g1.n_dof) = g2.S * g1.K;
    k.rightCols(2 * g2.n_dof) = g2.K;

    RMat r = RMat::Zero(2 * n, 2 * n);
    r.topLeftCorner(2 * g1.n_dof, 2 * g1.n_dof) = g1.R;
    r.bottomRightCorner(2 * g2.n_dof, 2 * g2.n_dof) = g2.R;

    // Im{L2† S2 L1} = Im{x2ᵀ (K2† S2 K1) x1} as a joint quadratic form
    CMat q = CMat::Zero(2 * n, 2 * n);
    q.bottomLeftCorner(2 * g2.n_dof, 2 * g1.n_dof) = g2.K.adjoint() * g2.S * g1.K;
    r = fold_hamiltonian_term(r, q);

    return SystemParams::make(g2.S * g1.S, std::move(k), r,
                              g2.out_ports, g1.in_ports);
}

QsdeMatrices qsde_matrices(const SystemParams& g) {
    const int n = g.n_dof;
    const int m = g.m;
    const RMat theta = symplectic_form(n);

    QsdeMatrices out;
    const CMat kdk = g.K.adjoint() * g.K;
    out.A = 2.0 * theta * (g.R + im_real(kdk));

    CMat stacked(2 * n, 2 * m);
    stacked.leftCols(m) = -g.K.adjoint() * g.S;
    stacked.rightCols(m) = g.K.transpose() * g.S.conjugate();
    out.B = Complex(0.0, 2.0) * theta * stacked;

    out.C = g.K;
    out.D = g.S;
    return out;
}

CMat annihilation_map(int n_dof) {
    CMat sigma = CMat::Zero(n_dof, 2 * n_dof);
    for (int j = 0; j < n_dof; ++j) {
        sigma(j, 2 * j) = Complex(0.5, 0.0);
        sigma(j, 2 * j + 1) = Complex(0.0, 0.5);
    }
    return sigma;
}

namespace {

// Deviation of (R, K) from the structural passivity criteria.
double structural_residual(const SystemParams& g) {
    double worst = 0.0;
    for (int j = 1; j <= g.n_dof; ++j) {
        const RMat rjj = g.r_block(j, j);
        const double lambda = rjj.trace() / 2.0;
        worst = std::max(worst, max_abs(RMat(rjj - lambda * RMat::Identity(2, 2))));

        // coupling columns: K(:,2j) = i·K(:,2j−1)
        const CMat kj = g.coupling_block(j);
        if (kj.rows() > 0) {
            worst = std::max(worst, max_abs(CMat(kj.col(1) - Complex(0, 1) * kj.col(0))));
        }

        for (int k = 1; k <= g.n_dof; ++k) {
            if (k == j) {
                continue;
            }
            const RMat rjk = g.r_block(j, k);
            const double alpha = (rjk(0, 0) + rjk(1, 1)) / 2.0;
            const double beta = (rjk(0, 1) - rjk(1, 0)) / 2.0;
            RMat rot(2, 2);
            rot << alpha, beta, -beta, alpha;
            worst = std::max(worst, max_abs(RMat(rjk - rot)));
        }
    }
    return worst;
}

} // namespace

PassiveForm to_passive_form(const SystemParams& g) {
    const CMat sigma = annihilation_map(g.n_dof);

    PassiveForm form;
    CMat r_tilde = 8.0 * sigma * g.R * sigma.adjoint();
    form.R_tilde = (r_tilde + r_tilde.adjoint()) / 2.0;  // Hermitian sector
    form.K_tilde = 2.0 * g.K * sigma.adjoint();

    const auto [r_back, k_back] = passive_to_xbasis(form.R_tilde, form.K_tilde);
    double residual = std::max(max_abs(RMat(g.R - r_back)), max_abs(CMat(g.K - k_back)));
    residual = std::max(residual, structural_residual(g));
    form.residual = residual;
    return form;
}

bool is_passive(const SystemParams& g, double tol) {
    return to_passive_form(g).residual <= tol;
}

std::pair<RMat, CMat> passive_to_xbasis(const CMat& r_tilde, const CMat& k_tilde) {
    const int n = static_cast<int>(r_tilde.rows());
    if (r_tilde.cols() != n) {
        throw DimensionError("passive_to_xbasis: R_tilde must be square");
    }
    if (k_tilde.cols() != n) {
        throw DimensionError("passive_to_xbasis: K_tilde must have n columns");
    }
    const CMat sigma = annihilation_map(n);
    RMat r = re_real(sigma.adjoint() * r_tilde * sigma);
    CMat k = k_tilde * sigma;
    return {std::move(r), std::move(k)};
}

} // namespace qnetsyn
