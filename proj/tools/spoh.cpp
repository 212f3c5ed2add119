#include <iostream>

#include "CLI11.hpp"
#include "spoh/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet problems for anisotropic stable operators and their Pohozaev identities"};
    app.require_subcommand(1);
    spoh::CliOptions opt;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    const char* names[][2] = {
        {"symbol", "tabulate A, B and the half-kernel density b"},
        {"solve", "solve the Dirichlet problem; CSV and binary dumps"},
        {"verify", "solve on refinement levels and check the identities"},
        {"trace", "boundary quotient u/d^s and regularity diagnostics"},
        {"fit-singularity", "fit the log singularity of L^{1/2}u at boundary nodes"},
        {"oneD-lemma", "one-dimensional derivative formula for A log|t| + B chi"},
        {"report", "re-hash a finished run and print its reports"},
    };
    for (auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "run configuration (JSON)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--levels", opt.levels, "number of refinement levels")->check(CLI::Range(1, 6));
        sub->add_option("--threshold", threshold, "relative defect threshold")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", seed, "RNG seed for randomized diagnostics");
        if (std::string(name) != "report") sub->get_option("--config")->required();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : spoh::exit_validation;
    }
    opt.threshold = threshold;
    opt.seed = seed;
    return spoh::run_command(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
