// swnoon: batch driver for the spin-wave NOON interferometer simulator.
#include <CLI11.hpp>
#include <iostream>

#include "swnoon/commands.hpp"
#include "swnoon/fitting.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file (defaults apply when omitted)");
    cmd->add_option("--set", args.overrides, "override a config field, key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-wave NOON interferometer simulator"};
    app.require_subcommand(1);

    CommonArgs herald_args, fringe_args, sweep_args, ghz_args, state_args, net_args;
    std::vector<double> powers = {0.0, 0.75, 1.5, 3.0, 4.5, 6.0};
    int ghz_n_max = 4;

    auto* c_herald = app.add_subcommand("herald-stats", "NOON heralding probability vs N");
    add_common(c_herald, herald_args);
    auto* c_fringe = app.add_subcommand("fringe", "acquire a fringe dataset and fit it");
    add_common(c_fringe, fringe_args);
    auto* c_sweep = app.add_subcommand("pump-sweep", "fitted period and velocity vs pump power");
    add_common(c_sweep, sweep_args);
    c_sweep->add_option("--powers", powers, "pump powers in mW");
    auto* c_ghz = app.add_subcommand("ghz-table", "analytic GHZ fringe periods vs N");
    add_common(c_ghz, ghz_args);
    c_ghz->add_option("--n-max", ghz_n_max, "largest N to tabulate");
    auto* c_state = app.add_subcommand("dump-state", "serialize the write state");
    add_common(c_state, state_args);
    auto* c_net = app.add_subcommand("dump-network", "describe the NOON detection network");
    add_common(c_net, net_args);

    CLI11_PARSE(app, argc, argv);

    try {
        swnoon::OutputFiles files;
        std::string out_dir = ".";
        if (c_herald->parsed()) {
            files = swnoon::cmd_herald_stats(
                swnoon::load_config(herald_args.config_path, herald_args.overrides));
            out_dir = herald_args.out_dir;
        } else if (c_fringe->parsed()) {
            files = swnoon::cmd_fringe(
                swnoon::load_config(fringe_args.config_path, fringe_args.overrides));
            out_dir = fringe_args.out_dir;
        } else if (c_sweep->parsed()) {
            files = swnoon::cmd_pump_sweep(
                swnoon::load_config(sweep_args.config_path, sweep_args.overrides), powers);
            out_dir = sweep_args.out_dir;
        } else if (c_ghz->parsed()) {
            files = swnoon::cmd_ghz_table(
                swnoon::load_config(ghz_args.config_path, ghz_args.overrides), ghz_n_max);
            out_dir = ghz_args.out_dir;
        } else if (c_state->parsed()) {
            files = swnoon::cmd_dump_state(
                swnoon::load_config(state_args.config_path, state_args.overrides));
            out_dir = state_args.out_dir;
        } else if (c_net->parsed()) {
            files = swnoon::cmd_dump_network(
                swnoon::load_config(net_args.config_path, net_args.overrides));
            out_dir = net_args.out_dir;
        }
        swnoon::write_outputs(files, out_dir);
        for (const auto& [name, _] : files) {
            std::cout << "wrote " << out_dir << "/" << name << '\n';
        }
        return 0;
    } catch (const swnoon::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}
