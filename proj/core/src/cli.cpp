#include "qnetsyn/cli.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "qnetsyn/errors.hpp"
#include "qnetsyn/json_io.hpp"
#include "qnetsyn/slh_algebra.hpp"
#include "qnetsyn/verify.hpp"

namespace qnetsyn {

namespace {

void emit_document(const RunConfig& config, const json& doc, std::ostream& out) {
    if (config.output_path.empty()) {
        out << doc.dump(2) << "\n";
    } else {
        write_text_file(config.output_path, doc.dump(2) + "\n");
    }
}

// summaries go to stdout unless the JSON document itself occupies it
std::ostream& summary_stream(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return config.output_path.empty() ? err : out;
}

void emit_dot(const RunConfig& config, const std::string& dot) {
    if (!config.dot_path.empty()) {
        write_text_file(config.dot_path, dot);
    }
}

SystemParams load_system(const RunConfig& config, std::ostream& err) {
    SystemParams g = system_from_json(load_json_file(config.input_path));
    const auto violations = validate_system(g, config.tolerance);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid system:";
        for (const auto& v : violations) {
            msg << " [" << v.predicate << ", residual " << v.residual << "]";
        }
        err << msg.str() << "\n";
        throw SchemaError(msg.str());
    }
    return g;
}

int run_synthesize(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const SystemParams target = load_system(config, err);
    const ChoiceMap choices =
        choices_from_overrides(target.n_dof, config.thetas, config.kappas, config.param);

    json doc;
    SynthesisNetlist netlist;
    SystemParams realized = target;
    const CMat eye = CMat::Identity(target.m, target.m);
    if (max_abs(CMat(target.S - eye)) <= config.tolerance) {
        netlist = synthesize(target, choices);
    } else {
        auto [stage, inner_netlist] = synthesize_with_scattering(target, choices);
        netlist = std::move(inner_netlist);
        realized = SystemParams::make(eye, target.K, target.R, target.out_ports, target.in_ports);
        doc["static_stage"] = system_to_json(stage);
    }

    const VerificationReport report =
        roundtrip(realized, netlist, config.orders, config.seed, config.tolerance);

    json netlist_doc = netlist_to_json(netlist);
    for (auto& [key, value] : netlist_doc.items()) {
        doc[key] = value;
    }
    doc["target"] = system_to_json(realized);
    doc["report"] = report_to_json(report);

    emit_document(config, doc, out);
    emit_dot(config, netlist_to_dot(netlist));
    summary_stream(config, out, err)
        << (report.passed ? "verification passed" : "verification FAILED")
        << " (max residual S " << report.max_residual_S << ", K " << report.max_residual_K
        << ", R " << report.max_residual_R << ", ABCD " << report.max_residual_ABCD << ")\n";
    return report.passed ? 0 : 1;
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const json doc = load_json_file(config.input_path);
    const SynthesisNetlist netlist = netlist_from_json(doc);
    if (!doc.contains("target")) {
        throw SchemaError("verify: netlist document carries no \"target\" system");
    }
    const SystemParams target = system_from_json(doc.at("target"));

    const VerificationReport report =
        roundtrip(target, netlist, config.orders, config.seed, config.tolerance);
    emit_document(config, report_to_json(report), out);
    summary_stream(config, out, err)
        << (report.passed ? "verification passed" : "verification FAILED")
        << " (max residual S " << report.max_residual_S << ", K " << report.max_residual_K
        << ", R " << report.max_residual_R << ", ABCD " << report.max_residual_ABCD
        << ", orders " << report.elimination_orders_tested << ")\n";
    return report.passed ? 0 : 1;
}

int run_reduce(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const ModelMatrix model = model_or_system_from_json(load_json_file(config.input_path));

    ModelMatrix reduced = model;
    if (config.sequential_reduce) {
        reduced = eliminate_edges(model, config.edges);
    } else if (!config.edges.empty()) {
        reduced = eliminate_simultaneous(model, AdjacencyMatrix::from_edges(model, config.edges));
    }

    emit_document(config, model_to_json(reduced), out);
    emit_dot(config, model_to_dot(model, config.edges));
    summary_stream(config, out, err) << "eliminated " << config.edges.size() << " edge(s); "
        << reduced.params.out_ports.size() << " output / "
        << reduced.params.in_ports.size() << " input port(s) remain\n";
    return 0;
}

int run_passive_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const SystemParams g = load_system(config, err);
    const PassiveForm form = to_passive_form(g);
    const bool passive = form.residual <= config.tolerance;

    json doc;
    doc["format"] = "qnetsyn.passive_check";
    doc["version"] = 1;
    doc["passive"] = passive;
    doc["residual"] = form.residual;
    doc["R_tilde"] = cmat_to_json(form.R_tilde);
    doc["K_tilde"] = cmat_to_json(form.K_tilde);
    emit_document(config, doc, out);

    std::ostringstream line;
    line << (passive ? "passive" : "not passive") << ": residual "
         << std::scientific << std::setprecision(1) << form.residual;
    summary_stream(config, out, err) << line.str() << "\n";
    return passive ? 0 : 1;
}

int run_decompose(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const SystemParams target = load_system(config, err);
    const CascadeDecomposition decomposition = cascade_direct_decompose(target);

    json doc;
    doc["format"] = "qnetsyn.cascade_decomposition";
    doc["version"] = 1;
    json oscillators = json::array();
    for (const auto& g : decomposition.oscillators) {
        oscillators.push_back(system_to_json(g));
    }
    doc["oscillators"] = std::move(oscillators);
    json terms = json::array();
    for (const auto& [key, matrix] : decomposition.hd_terms) {
        terms.push_back({{"j", key.first}, {"k", key.second}, {"matrix", rmat_to_json(matrix)}});
    }
    doc["hd_terms"] = std::move(terms);

    const double residual =
        equivalence(recompose_cascade(decomposition), target).max_residual();
    doc["recomposition_residual"] = residual;
    emit_document(config, doc, out);
    summary_stream(config, out, err) << "recomposition residual " << residual << "\n";
    return residual <= config.tolerance ? 0 : 1;
}

int run_qsde(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const SystemParams g = load_system(config, err);
    emit_document(config, qsde_to_json(qsde_matrices(g)), out);
    return 0;
}

} // namespace

ChoiceMap choices_from_overrides(int n_dof, const std::vector<PairOverride>& thetas,
                                 const std::vector<PairOverride>& kappas, CouplingParam param) {
    ChoiceMap choices;
    const auto slot = [&](int j, int k) -> CouplingChoice& {
        if (j == k || j < 1 || k < 1 || j > n_dof || k > n_dof) {
            throw SchemaError("choice override names an invalid oscillator pair (" +
                              std::to_string(j) + ", " + std::to_string(k) + ")");
        }
        const PairKey key{std::min(j, k), std::max(j, k)};
        auto [it, inserted] = choices.try_emplace(key);
        if (inserted) {
            it->second.param = param;
        }
        return it->second;
    };

    for (const auto& t : thetas) {
        auto& choice = slot(t.j, t.k);
        const double two_pi = 2.0 * 3.14159265358979323846;
        double value = std::fmod(t.value, two_pi);
        if (value < 0) {
            value += two_pi;
        }
        if (t.j < t.k) {
            choice.theta_jk = value;
        } else {
            choice.theta_kj = value;
        }
    }
    for (const auto& kv : kappas) {
        slot(kv.j, kv.k).kappa = kv.value;
    }
    if (param != CouplingParam::ForwardK1) {
        for (int j = 1; j <= n_dof; ++j) {
            for (int k = j + 1; k <= n_dof; ++k) {
                slot(j, k).param = param;
            }
        }
    }

    // eager validity check, naming the pair
    for (const auto& [key, choice] : choices) {
        if (choice.kappa == 0.0) {
            throw SchemaError("kappa for pair (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") must be nonzero");
        }
        if (std::abs(1.0 - choice.s_jk() * choice.s_kj()) < 1e-12) {
            throw DegenerateScattering("pair (" + std::to_string(key.first) + ", " +
                                       std::to_string(key.second) +
                                       "): theta_jk + theta_kj = 0 (mod 2pi)");
        }
    }
    return choices;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::Synthesize:
                return run_synthesize(config, out, err);
            case Command::Verify:
                return run_verify(config, out, err);
            case Command::Reduce:
                return run_reduce(config, out, err);
            case Command::PassiveCheck:
                return run_passive_check(config, out, err);
            case Command::Decompose:
                return run_decompose(config, out, err);
            case Command::Qsde:
                return run_qsde(config, out, err);
        }
        err << "error: unknown command\n";
        return 2;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateScattering& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SingularConnection& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qnetsyn
