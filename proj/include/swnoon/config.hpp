// Experiment configuration: one JSON file holds every physical parameter,
// trial count, grid and seed. Validation is total — every invalid field is
// reported by name before anything runs.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swnoon/dynamics.hpp"
#include "swnoon/source_herald.hpp"

namespace swnoon {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DtGrid {
    double start_s = 0.0;
    double stop_s = 600e-6;
    int count = 25;
};

struct ExperimentConfig {
    double chi = 0.01;  // not reported in the experiment; simulation default
    int cutoff = 4;
    double lambda_m = 794.98e-9;
    double theta_rad = 0.010471975511965976;  // 0.6 degrees
    double v0_mps = 0.03;
    double pump_power_mw = 6.0;
    PumpModel pump_model{0.09, 1.2};
    double tau_s = 200e-6;
    double gamma0 = 0.15;   // simulation default, not a measured value
    double gamma_b = 0.002; // simulation default, not a measured value
    double phi_stab_rad = 0.0;
    long trials_per_point = 10000;
    DtGrid dt_grid;
    int order = 1;  // 1 or 2
    int noon_n = 2;
    std::uint64_t seed = 20100913;
    std::string detector_mode = "threshold";  // or "number-resolving"
    long herald_max_attempts = 1000000;

    std::vector<std::string> validate() const;  // field-named messages, empty when valid
    void validate_or_throw() const;

    bool number_resolving() const { return detector_mode == "number-resolving"; }
    MotionParams motion_params() const;  // vp derived from pump_power_mw
    WriteParams write_params() const;
    std::vector<double> grid() const;

    // key = value lines covering every field (metadata sidecars)
    std::vector<std::pair<std::string, std::string>> metadata() const;
};

ExperimentConfig default_config();
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Applies one "key=value" override (dotted keys reach nested fields).
void apply_override(std::string& json_text, const std::string& assignment);

}  // namespace swnoon
