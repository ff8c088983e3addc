// Batch commands behind the CLI: each one runs an experiment from the config
// and returns the files it would emit (name -> contents), so runs are
// testable and byte-reproducible.
#pragma once

#include <string>
#include <vector>

#include "swnoon/config.hpp"

namespace swnoon {

using OutputFiles = std::vector<std::pair<std::string, std::string>>;

struct CommandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// herald_stats.csv: N,chi,probability,mean_attempts for N = 1..min(4, cutoff)
OutputFiles cmd_herald_stats(const ExperimentConfig& cfg);

// fringe.csv + fringe_meta.txt + fit_report.txt + fit.csv + residuals.csv for
// the configured order. Aborts (CommandError) when the herald timeout rate
// exceeds 50% at any grid point.
OutputFiles cmd_fringe(const ExperimentConfig& cfg);

// pump_sweep.csv: power_mw, T_us, sigma_T_us, vc_hat_mps, fit_ok per power;
// per-point fit failures are recorded and the sweep continues.
OutputFiles cmd_pump_sweep(const ExperimentConfig& cfg, const std::vector<double>& powers_mw);

// ghz_table.csv: N, dphi_period_rad, dt_period_us, ratio_to_N1 (analytic).
OutputFiles cmd_ghz_table(const ExperimentConfig& cfg, int n_max);

// state.txt: serialized write state for the config.
OutputFiles cmd_dump_state(const ExperimentConfig& cfg);

// network.txt: the noon_network(cfg.noon_n) element dump.
OutputFiles cmd_dump_network(const ExperimentConfig& cfg);

void write_outputs(const OutputFiles& files, const std::string& out_dir);

}  // namespace swnoon
