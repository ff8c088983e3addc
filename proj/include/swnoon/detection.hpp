// Anti-Stokes readout: retrieval thinning, readout optics, closed-form click
// and coincidence probabilities, Monte-Carlo click sampling, and fringe
// dataset acquisition.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swnoon/config.hpp"
#include "swnoon/dynamics.hpp"
#include "swnoon/fock.hpp"
#include "swnoon/rng.hpp"
#include "swnoon/source_herald.hpp"

namespace swnoon {

struct DetectorModel {
    double gamma0 = 0.15;   // peak retrieval-and-detection efficiency
    double gamma_b = 0.002; // background click probability per detector per trial
    bool number_resolving = false;

    void validate() const;
};

struct FringePoint {
    double dt_s = 0.0;
    long trials = 0;
    std::vector<long> counts;  // parallel to FringeDataset::channels
};

struct FringeDataset {
    std::vector<std::string> channels;
    std::vector<FringePoint> points;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t channel(const std::string& name) const;  // throws if absent
    long count(std::size_t point, const std::string& name) const;
    void validate() const;  // counts within trials, dt strictly increasing
};

// Closed forms from the fitting model:
//   p_AS1 = gamma(dt) cos^2(dphi(dt) + phi0) + gamma_b
//   p_AS2 = gamma(dt) sin^2(dphi(dt) + phi0) + gamma_b
// herald_sign -1 (conditioning on D_S2) swaps cos^2 and sin^2.
std::pair<double, double> first_order_probabilities(double dt_s, const DetectorModel& det,
                                                    const MotionParams& p, int herald_sign);

// p = 1/2 gamma^2(dt) sin^2(2 dphi(dt) + phi0') + 2 gamma_b gamma(dt) + gamma_b^2
double second_order_coincidence(double dt_s, const DetectorModel& det, const MotionParams& p);

// One Monte-Carlo readout of a conditional spin-wave state: evolve by dt,
// thin each excitation into an anti-Stokes photon with probability
// gamma0 * envelope(dt), pass the surviving photons through the analyzer,
// sample one click pattern from the exact distribution, then OR in
// independent background clicks. Detector labels: D_AS1, D_AS2.
ClickPattern simulate_readout(const FockVector& conditional_state, double dt_s,
                              const DetectorModel& det, const MotionParams& p, RngStream& rng);

// Full fringe acquisition: for every grid point, repeat-until-success
// heralding of the order-1 (either Stokes port) or order-2 (coincidence)
// state followed by readout sampling. Order 1 tallies AS clicks split by
// heralding detector; order 2 tallies AS1*AS2 coincidences. Each grid point
// draws from substream(seed, point_index).
FringeDataset acquire_fringe(const ExperimentConfig& cfg, int order,
                             const std::vector<double>& dt_grid, std::uint64_t seed);

std::string fringe_to_csv(const FringeDataset& ds);
FringeDataset fringe_from_csv(const std::string& text);
std::string metadata_to_text(const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace swnoon
