#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fplab/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::string> out;

    fplab::cli::CommonArgs common() const { return {config, seed, samples, out}; }
};

void add_common(CLI::App* cmd, Flags& f, bool needs_config) {
    auto* opt = cmd->add_option("--config", f.config, "Config file (key = value lines)");
    if (needs_config) opt->required();
    cmd->add_option("--seed", f.seed, "Override the config seed");
    cmd->add_option("--samples", f.samples, "Sample count for randomized checks");
    cmd->add_option("--out", f.out, "Primary output path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional p-Laplacian evolution toolkit"};
    app.require_subcommand(1);
    Flags flags;
    std::string suite = "all";

    auto* simulate = app.add_subcommand("simulate", "Integrate the semi-discrete model and write records");
    add_common(simulate, flags, true);
    auto* verify = app.add_subcommand("verify", "Run randomized inequality suites");
    add_common(verify, flags, false);
    verify->add_option("--suite", suite, "Suite name or 'all'");
    auto* cstar = app.add_subcommand("estimate-cstar", "Estimate the discrete best Sobolev constant");
    add_common(cstar, flags, true);
    auto* cert = app.add_subcommand("blowup-cert", "Build a blow-up certificate");
    add_common(cert, flags, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fplab::cli::exit_code::config_error;
    }

    const auto args = flags.common();
    if (simulate->parsed()) return fplab::cli::cmd_simulate(args, std::cout, std::cerr);
    if (verify->parsed()) return fplab::cli::cmd_verify(suite, args, std::cout, std::cerr);
    if (cstar->parsed()) return fplab::cli::cmd_estimate_cstar(args, std::cout, std::cerr);
    return fplab::cli::cmd_blowup_cert(args, std::cout, std::cerr);
}
