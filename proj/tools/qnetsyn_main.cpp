// qnetsyn — synthesize, reduce, and verify linear quantum stochastic
// networks from the command line.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnetsyn/cli.hpp"
#include "qnetsyn/errors.hpp"

namespace {

using qnetsyn::RunConfig;

void add_common(CLI::App* sub, RunConfig& config) {
    sub->add_option("input", config.input_path, "input JSON document")->required();
    sub->add_option("-o,--output", config.output_path, "write the result here instead of stdout");
    sub->add_option("--tol", config.tolerance, "tolerance for residual checks")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", config.seed, "seed of the elimination-order generator");
    sub->add_option("--orders", config.orders, "number of random sequential elimination orders")
        ->check(CLI::NonNegativeNumber);
}

std::vector<qnetsyn::PairOverride> parse_triples(const std::vector<std::string>& flat,
                                                 const std::string& flag) {
    std::vector<qnetsyn::PairOverride> out;
    if (flat.size() % 3 != 0) {
        throw CLI::ValidationError(flag + " expects j k value triples");
    }
    for (std::size_t i = 0; i < flat.size(); i += 3) {
        qnetsyn::PairOverride entry;
        try {
            entry.j = std::stoi(flat[i]);
            entry.k = std::stoi(flat[i + 1]);
            entry.value = std::stod(flat[i + 2]);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag + ": cannot parse '" + flat[i] + " " + flat[i + 1] +
                                       " " + flat[i + 2] + "'");
        }
        out.push_back(entry);
    }
    return out;
}

int run_main(int argc, char** argv) {
    CLI::App app{"synthesis and verification of linear quantum stochastic networks"};
    app.require_subcommand(1);

    RunConfig config;
    std::vector<std::string> theta_flat;
    std::vector<std::string> kappa_flat;
    std::vector<std::string> edge_flat;
    std::string param_name = "k1";

    auto* synth = app.add_subcommand(
        "synthesize", "realize a system as a field-coupled oscillator network");
    add_common(synth, config);
    synth->add_option("--theta", theta_flat, "scattering phase override: j k value (repeatable)")
        ->expected(-3);
    synth->add_option("--kappa", kappa_flat, "coupling gain override: j k value (repeatable)")
        ->expected(-3);
    synth->add_option("--param", param_name, "coupling parameterization")
        ->check(CLI::IsMember({"k1", "k2"}));
    synth->add_option("--dot", config.dot_path, "write the network topology as DOT");

    auto* verify = app.add_subcommand("verify", "re-check a synthesized netlist document");
    add_common(verify, config);

    auto* reduce = app.add_subcommand("reduce", "eliminate internal edges of a model matrix");
    add_common(reduce, config);
    reduce->add_option("--edge", edge_flat, "internal edge: OUT_PORT IN_PORT (repeatable)")
        ->expected(-2);
    reduce->add_flag("--sequential", config.sequential_reduce,
                     "eliminate one edge at a time instead of simultaneously");
    reduce->add_option("--dot", config.dot_path, "write the pre-reduction topology as DOT");

    auto* passive = app.add_subcommand("passive-check", "annihilation-operator form and residual");
    add_common(passive, config);

    auto* decompose = app.add_subcommand(
        "decompose", "cascade plus direct-interaction decomposition");
    add_common(decompose, config);

    auto* qsde = app.add_subcommand("qsde", "state-space matrices (A, B, C, D)");
    add_common(qsde, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        config.thetas = parse_triples(theta_flat, "--theta");
        config.kappas = parse_triples(kappa_flat, "--kappa");
        if (edge_flat.size() % 2 != 0) {
            std::cerr << "error: --edge expects OUT_PORT IN_PORT pairs\n";
            return 2;
        }
        for (std::size_t i = 0; i < edge_flat.size(); i += 2) {
            config.edges.push_back({edge_flat[i], edge_flat[i + 1]});
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    config.param = param_name == "k2" ? qnetsyn::CouplingParam::ForwardK2
                                      : qnetsyn::CouplingParam::ForwardK1;

    if (synth->parsed()) {
        config.command = qnetsyn::Command::Synthesize;
    } else if (verify->parsed()) {
        config.command = qnetsyn::Command::Verify;
    } else if (reduce->parsed()) {
        config.command = qnetsyn::Command::Reduce;
    } else if (passive->parsed()) {
        config.command = qnetsyn::Command::PassiveCheck;
    } else if (decompose->parsed()) {
        config.command = qnetsyn::Command::Decompose;
    } else if (qsde->parsed()) {
        config.command = qnetsyn::Command::Qsde;
    }

    return qnetsyn::run(config, std::cout, std::cerr);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
