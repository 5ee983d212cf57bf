#include "qnetsyn/synthesis.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "qnetsyn/errors.hpp"
#include "qnetsyn/json_io.hpp"
#include "qnetsyn/slh_algebra.hpp"

namespace qnetsyn {

namespace {

constexpr double kDegenerateLimit = 1e-12;

std::string pair_text(int j, int k) {
    return "{" + std::to_string(j) + "," + std::to_string(k) + "}";
}

std::string index_pair(int j, int k) {
    // no separator needed while both indices are single digits
    if (j < 10 && k < 10) {
        return std::to_string(j) + std::to_string(k);
    }
    return std::to_string(j) + "_" + std::to_string(k);
}

void check_choice(const CouplingChoice& choice, int j, int k) {
    if (choice.kappa == 0.0) {
        throw SchemaError("coupling choice for pair " + pair_text(j, k) + ": kappa must be nonzero");
    }
    if (std::abs(1.0 - choice.s_jk() * choice.s_kj()) < kDegenerateLimit) {
        throw DegenerateScattering("coupling choice for pair " + pair_text(j, k) +
                                   ": theta_jk + theta_kj = 0 (mod 2pi)");
    }
}

CouplingChoice choice_for(const ChoiceMap& choices, int j, int k) {
    const auto it = choices.find({j, k});
    CouplingChoice choice = it == choices.end() ? CouplingChoice{} : it->second;
    check_choice(choice, j, k);
    return choice;
}

void require_identity_scattering(const SystemParams& target, const char* who) {
    const CMat eye = CMat::Identity(target.m, target.m);
    if (max_abs(CMat(target.S - eye)) > kDefaultTol) {
        throw Error(std::string(who) +
                    ": target scattering must be the identity; use synthesize_with_scattering");
    }
}

void require_valid(const SystemParams& target, const char* who) {
    const auto violations = validate_system(target);
    if (!violations.empty()) {
        throw Error(std::string(who) + ": target fails validation (" + violations.front().predicate + ")");
    }
}

} // namespace

Complex CouplingChoice::s_jk() const {
    return std::polar(1.0, theta_jk);
}

Complex CouplingChoice::s_kj() const {
    return std::polar(1.0, theta_kj);
}

std::string out_port_label(int j, int k) {
    return "s" + index_pair(j, k);
}

std::string in_port_label(int j, int k) {
    return "r" + index_pair(j, k);
}

Complex coupling_delta(Complex s12, Complex s21) {
    const Complex one_minus = 1.0 - s12 * s21;
    if (std::abs(one_minus) < kDegenerateLimit) {
        throw DegenerateScattering("coupling_delta: |1 - S12*S21| = " +
                                   std::to_string(std::abs(one_minus)));
    }
    return 2.0 * (s21 - std::conj(s12)) / std::norm(one_minus);
}

std::pair<CMat, CMat> direct_coupling_solve(const RMat& R, Complex s12, Complex s21,
                                            double kappa, CouplingParam param) {
    if (R.rows() != 2 || R.cols() != 2) {
        throw DimensionError("direct_coupling_solve: R must be 2 x 2");
    }
    if (kappa == 0.0) {
        throw SchemaError("direct_coupling_solve: kappa must be nonzero");
    }
    const Complex delta = coupling_delta(s12, s21);
    const Complex two_i(0.0, 2.0);

    CMat free_side(1, 2);
    free_side << Complex(kappa, 0.0), Complex(0.0, kappa);

    if (param == CouplingParam::ForwardK1) {
        // K2 = 2i [1 0] [-K1† Δ*, K1ᵀ Δ]⁻¹ R
        CMat m(2, 2);
        m.col(0) = -free_side.adjoint() * std::conj(delta);
        m.col(1) = free_side.transpose() * delta;
        const CMat solved = two_i * m.inverse() * R.cast<Complex>();
        return {free_side, solved.row(0)};
    }

    // K1 = 2i [1 0] [K2† Δ, -K2ᵀ Δ*]⁻¹ Rᵀ
    CMat m(2, 2);
    m.col(0) = free_side.adjoint() * delta;
    m.col(1) = -free_side.transpose() * std::conj(delta);
    const CMat solved = two_i * m.inverse() * R.transpose().cast<Complex>();
    return {solved.row(0), free_side};
}

SynthesisNetlist synthesize(const SystemParams& target, const ChoiceMap& choices) {
    require_valid(target, "synthesize");
    if (target.n_dof < 1) {
        throw DimensionError("synthesize: target must have at least one oscillator");
    }
    require_identity_scattering(target, "synthesize");
    for (const auto& [key, unused] : choices) {
        if (key.first >= key.second || key.first < 1 || key.second > target.n_dof) {
            throw Error("synthesize: choice key " + pair_text(key.first, key.second) +
                        " is not an ordered oscillator pair of this target");
        }
    }

    const int n = target.n_dof;
    const int m = target.m;

    // pair couplings: indexed by ordered (j, k), j != k
    std::map<std::pair<int, int>, CMat> coupling;
    std::map<std::pair<int, int>, Complex> loop_product;  // S_jk * S_kj per ordered pair
    for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) {
            const CouplingChoice choice = choice_for(choices, j, k);
            const RMat r_pair = target.r_block(j, k) -
                                im_real(target.coupling_block(j).transpose() *
                                        target.coupling_block(k).conjugate());
            CMat k_jk;
            CMat k_kj;
            try {
                std::tie(k_jk, k_kj) = direct_coupling_solve(r_pair, choice.s_jk(), choice.s_kj(),
                                                             choice.kappa, choice.param);
            } catch (const DegenerateScattering& e) {
                throw DegenerateScattering("pair " + pair_text(j, k) + ": " + e.what());
            }
            coupling[{j, k}] = std::move(k_jk);
            coupling[{k, j}] = std::move(k_kj);
            const Complex prod = choice.s_jk() * choice.s_kj();
            loop_product[{j, k}] = prod;
            loop_product[{k, j}] = prod;
        }
    }

    std::map<std::pair<int, int>, Complex> scattering;  // S_jk per ordered pair
    for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) {
            const CouplingChoice choice = choice_for(choices, j, k);
            scattering[{j, k}] = choice.s_jk();
            scattering[{k, j}] = choice.s_kj();
        }
    }

    SynthesisNetlist netlist;
    netlist.n_dof = n;
    netlist.m = m;
    netlist.target_hash = system_digest(target);

    for (int j = 1; j <= n; ++j) {
        OscillatorBlock block;
        block.index = j;

        // R_j = R_jj - 2 sym(Σ_{k≠j} Im{K_jk† K_jk / (1 - S_jk S_kj)})
        RMat correction = RMat::Zero(2, 2);
        for (int k = 1; k <= n; ++k) {
            if (k == j) {
                continue;
            }
            const CMat& k_jk = coupling.at({j, k});
            const CMat q = (k_jk.adjoint() * k_jk) / (1.0 - loop_product.at({j, k}));
            correction += 2.0 * sym(im_real(q));
        }
        block.R = target.r_block(j, j) - correction;

        for (int k = 1; k <= n; ++k) {
            OscillatorBlock::Coupling part;
            if (k == j) {
                part.S = CMat::Identity(m, m);
                part.K = target.coupling_block(j);
            } else {
                part.S = CMat::Constant(1, 1, scattering.at({j, k}));
                part.K = coupling.at({j, k});
            }
            block.couplings.push_back(std::move(part));
        }
        netlist.oscillators.push_back(std::move(block));
    }

    for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) {
            netlist.interaction_edges.push_back({out_port_label(j, k), in_port_label(k, j)});
            netlist.interaction_edges.push_back({out_port_label(k, j), in_port_label(j, k)});
        }
    }
    // no cascade chain without external fields (the s_kk ports are empty)
    if (m > 0) {
        for (int k = 1; k + 1 <= n; ++k) {
            netlist.cascade_edges.push_back({out_port_label(k, k), in_port_label(k + 1, k + 1)});
        }
    }
    return netlist;
}

std::pair<SystemParams, SynthesisNetlist>
synthesize_with_scattering(const SystemParams& target, const ChoiceMap& choices) {
    require_valid(target, "synthesize_with_scattering");
    SystemParams static_stage = SystemParams::static_device(target.S);
    SystemParams inner = SystemParams::make(CMat::Identity(target.m, target.m), target.K, target.R,
                                            target.out_ports, target.in_ports);
    SynthesisNetlist netlist = synthesize(inner, choices);
    return {std::move(static_stage), std::move(netlist)};
}

SystemParams construct_h_red(const SynthesisNetlist& netlist) {
    const int n = netlist.n_dof;
    const int m = netlist.m;

    CMat s_red = CMat::Zero(n * m, n * m);
    CMat k_red = CMat::Zero(n * m, 2 * n);
    RMat r = RMat::Zero(2 * n, 2 * n);
    std::vector<Port> outs;
    std::vector<Port> ins;

    for (int k = 1; k <= n; ++k) {
        const OscillatorBlock& block = netlist.oscillators[k - 1];
        s_red.block((k - 1) * m, (k - 1) * m, m, m) = block.couplings[k - 1].S;
        k_red.block((k - 1) * m, 2 * (k - 1), m, 2) = block.couplings[k - 1].K;
        r.block(2 * (k - 1), 2 * (k - 1), 2, 2) = block.R;
        if (m > 0) {
            outs.push_back({out_port_label(k, k), m});
            ins.push_back({in_port_label(k, k), m});
        }
    }

    // H_red = Σ H_k + Σ_{j<k} Im{[L_jk† L_kj†] [[I, -S_jk],[-S_kj, I]]⁻¹ [L_jk; L_kj]}
    for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) {
            const CMat& s_jk = netlist.oscillators[j - 1].couplings[k - 1].S;
            const CMat& s_kj = netlist.oscillators[k - 1].couplings[j - 1].S;
            const CMat& k_jk = netlist.oscillators[j - 1].couplings[k - 1].K;
            const CMat& k_kj = netlist.oscillators[k - 1].couplings[j - 1].K;
            const int c = static_cast<int>(s_jk.rows());

            CMat loop(2 * c, 2 * c);
            loop.topLeftCorner(c, c) = CMat::Identity(c, c);
            loop.topRightCorner(c, c) = -s_jk;
            loop.bottomLeftCorner(c, c) = -s_kj;
            loop.bottomRightCorner(c, c) = CMat::Identity(c, c);

            Eigen::PartialPivLU<CMat> lu(loop);
            if (!(lu.rcond() >= 1.0 / kConditionLimit)) {
                throw SingularConnection("pair " + pair_text(j, k) +
                                         ": interaction loop matrix is numerically singular");
            }

            CMat stacked = CMat::Zero(2 * c, 2 * n);
            stacked.block(0, 2 * (j - 1), c, 2) = k_jk;
            stacked.block(c, 2 * (k - 1), c, 2) = k_kj;
            r = fold_hamiltonian_term(r, stacked.adjoint() * lu.inverse() * stacked);
        }
    }

    return SystemParams::make(std::move(s_red), std::move(k_red), r,
                              std::move(outs), std::move(ins));
}

CascadeDecomposition cascade_direct_decompose(const SystemParams& target) {
    require_valid(target, "cascade_direct_decompose");
    require_identity_scattering(target, "cascade_direct_decompose");

    CascadeDecomposition out;
    for (int k = 1; k <= target.n_dof; ++k) {
        out.oscillators.push_back(SystemParams::make(CMat::Identity(target.m, target.m),
                                                     target.coupling_block(k),
                                                     target.r_block(k, k)));
    }
    // Hᵈ_{jk} = x_kᵀ (R_jkᵀ - Im{K_k† K_j}) x_j
    for (int j = 1; j <= target.n_dof; ++j) {
        for (int k = j + 1; k <= target.n_dof; ++k) {
            const RMat term = target.r_block(j, k).transpose() -
                              im_real(target.coupling_block(k).adjoint() * target.coupling_block(j));
            out.hd_terms[{j, k}] = term;
        }
    }
    return out;
}

SystemParams recompose_cascade(const CascadeDecomposition& decomposition) {
    if (decomposition.oscillators.empty()) {
        throw DimensionError("recompose_cascade: no oscillators");
    }
    SystemParams acc = decomposition.oscillators.front();
    for (std::size_t k = 1; k < decomposition.oscillators.size(); ++k) {
        acc = series(decomposition.oscillators[k], acc);
    }
    // concatenate the field-free system (0, 0, Hᵈ) living on the same modes
    RMat r = acc.R;
    for (const auto& [key, term] : decomposition.hd_terms) {
        const auto [j, k] = key;
        r.block(2 * (k - 1), 2 * (j - 1), 2, 2) += term;
        r.block(2 * (j - 1), 2 * (k - 1), 2, 2) += term.transpose();
    }
    return SystemParams::make(acc.S, acc.K, r, acc.out_ports, acc.in_ports);
}

double oscillator_passivity_residual(const OscillatorBlock& block) {
    const double lambda = block.R.trace() / 2.0;
    double worst = max_abs(RMat(block.R - lambda * RMat::Identity(2, 2)));
    for (const auto& part : block.couplings) {
        if (part.K.rows() > 0) {
            worst = std::max(worst, max_abs(CMat(part.K.col(1) - Complex(0, 1) * part.K.col(0))));
        }
    }
    return worst;
}

SynthesisNetlist synthesize_passive(const SystemParams& target, const ChoiceMap& choices,
                                    double tol) {
    const PassiveForm form = to_passive_form(target);
    if (form.residual > tol) {
        throw NotPassive("target passivity residual " + std::to_string(form.residual) +
                         " exceeds tolerance");
    }
    SynthesisNetlist netlist = synthesize(target, choices);
    // blocks are exactly passive for exactly passive input; scale the scan
    // with the input's own imperfection
    const double scan_tol = std::max(tol, 100.0 * form.residual);
    for (const auto& block : netlist.oscillators) {
        const double res = oscillator_passivity_residual(block);
        if (res > scan_tol) {
            throw PassivityBroken("oscillator " + std::to_string(block.index) +
                                  " failed the structural passivity scan (residual " +
                                  std::to_string(res) + ")");
        }
    }
    netlist.passive = true;
    return netlist;
}

std::string netlist_to_dot(const SynthesisNetlist& netlist) {
    std::ostringstream dot;
    dot << "digraph netlist {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int j = 1; j <= netlist.n_dof; ++j) {
        dot << "  \"G" << j << "\";\n";
    }
    const auto owner = [](const std::string& label) {
        // oscillator index is the first subscript of s{jk} / r{kj}
        std::size_t end = 1;
        while (end < label.size() && std::isdigit(static_cast<unsigned char>(label[end]))) {
            ++end;
        }
        const std::string digits = label.substr(1, end - 1);
        if (label.find('_') != std::string::npos) {
            return label.substr(1, label.find('_') - 1);
        }
        return digits.size() <= 1 ? digits : digits.substr(0, digits.size() - 1);
    };
    for (const auto& e : netlist.interaction_edges) {
        dot << "  \"G" << owner(e.out_label) << "\" -> \"G" << owner(e.in_label)
            << "\" [label=\"" << e.out_label << "->" << e.in_label << "\"];\n";
    }
    for (const auto& e : netlist.cascade_edges) {
        dot << "  \"G" << owner(e.out_label) << "\" -> \"G" << owner(e.in_label)
            << "\" [style=bold, label=\"" << e.out_label << "->" << e.in_label << "\"];\n";
    }
    if (netlist.m > 0 && netlist.n_dof > 0) {
        dot << "  \"in\" [shape=point];\n  \"in\" -> \"G1\" [label=\""
            << in_port_label(1, 1) << "\"];\n";
        dot << "  \"out\" [shape=point];\n  \"G" << netlist.n_dof << "\" -> \"out\" [label=\""
            << out_port_label(netlist.n_dof, netlist.n_dof) << "\"];\n";
    }
    dot << "}\n";
    return dot.str();
}

} // namespace qnetsyn
