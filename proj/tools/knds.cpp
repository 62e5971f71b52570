#include "knds/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void add_params(CLI::App* cmd, knds::JobConfig& c) {
    cmd->add_option("--mass", c.mass, "Mass m > 0");
    cmd->add_option("--spin", c.spin, "Spin parameter a >= 0");
    cmd->add_option("--charge", c.charge, "Charge Q >= 0");
    cmd->add_option("--lambda", c.lambda, "Cosmological constant > 0");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Horizon geometry, Laplace spectra and trace inversion for Kerr-Newman-de Sitter"};
    app.require_subcommand(1);

    knds::JobConfig c;
    std::string output;
    std::string format = "json";

    auto* forward = app.add_subcommand("forward", "Horizons, geometry and closed-form traces");
    add_params(forward, c);
    forward->add_option("--k", c.ks, "Nonzero modes to report (comma separated)")->delimiter(',');

    auto* spectrum = app.add_subcommand("spectrum", "Numerical Laplace spectrum and traces per mode");
    add_params(spectrum, c);
    spectrum->add_option("--profile", c.profile_source, "round | horizon | explicit")
        ->check(CLI::IsMember({"round", "horizon", "explicit"}));
    spectrum->add_option("--horizon", c.horizon, "event | cosmological")
        ->check(CLI::IsMember({"event", "cosmological", "cosmo"}));
    spectrum->add_option("--xi", c.xi, "Explicit profile parameter xi in [0, 1)");
    spectrum->add_option("--beta-sq", c.beta_sq, "Explicit profile parameter beta^2 in [0, 1)");
    spectrum->add_option("--k", c.ks, "Modes to compute (default 0,1)")->delimiter(',');
    spectrum->add_option("--grid", c.grid_size, "Finite-difference grid size")->capture_default_str();
    spectrum->add_option("--count", c.count, "Eigenvalues per mode")->capture_default_str();

    auto* inverse = app.add_subcommand("inverse", "Recover (m, a, Q, Lambda) from horizon traces");
    inverse->add_option("--traces", c.traces_path, "Trace JSON file (or a forward report)");
    inverse->add_option("--gamma0-event", c.gamma0_event);
    inverse->add_option("--gamma1-event", c.gamma1_event);
    inverse->add_option("--gamma0-cosmo", c.gamma0_cosmo);
    inverse->add_option("--gamma1-cosmo", c.gamma1_cosmo);

    auto* roundtrip = app.add_subcommand("roundtrip", "Forward traces followed by reconstruction");
    add_params(roundtrip, c);
    roundtrip->add_flag("--use-numerical-traces", c.use_numerical_traces,
                        "Feed traces computed from the numerical spectrum");
    roundtrip->add_option("--random", c.random_draws, "Number of random parameter draws");
    roundtrip->add_option("--seed", c.seed, "Seed for --random")->capture_default_str();
    roundtrip->add_option("--grid", c.grid_size, "Grid size for numerical traces")->capture_default_str();
    roundtrip->add_option("--count", c.count, "Eigenvalues per mode for numerical traces")
        ->capture_default_str();

    for (auto* cmd : {forward, spectrum, inverse, roundtrip}) {
        cmd->add_option("--output,-o", output, "Write the report to this file instead of stdout");
        cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return knds::kExitUsage;
    }

    if (forward->parsed()) c.command = knds::Command::forward;
    else if (spectrum->parsed()) c.command = knds::Command::spectrum;
    else if (inverse->parsed()) c.command = knds::Command::inverse;
    else c.command = knds::Command::roundtrip;
    c.format = format == "csv" ? knds::OutputFormat::csv : knds::OutputFormat::json;

    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) {
            std::cerr << "error: cannot open " << output << " for writing\n";
            return knds::kExitUsage;
        }
    }
    std::ostream& out = output.empty() ? std::cout : file;

    try {
        return knds::run(c, out, std::cerr);
    } catch (const knds::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return knds::kExitUsage;
    }
}
