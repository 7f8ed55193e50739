#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "parctrl/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"parctrl: boundary optimal control of the heat equation"};
    app.require_subcommand(1);

    std::string config;
    std::string out = "parctrl-out";
    const char* help[] = {
        "state and adjoint for the configured flux",
        "reduced-space CG for the boundary control",
        "closed-form scalar controls and comparison checks",
        "Robin to Dirichlet study over [model] alphas",
        "decay towards the steady state",
        "run the property suites on the configured problem",
    };
    const auto commands = parctrl::cli_commands();
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], help[i]);
        sub->add_option("--config", config, "config file or a manifest.json from an earlier run")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : parctrl::kExitInvalid;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return parctrl::run_command(command, config, out, std::cout, std::cerr);
}
