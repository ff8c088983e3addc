// Write-process atom-light state generation and measurement-induced
// heralding: detector-pattern projection of the Stokes photons conditions the
// spin waves, including the repeat-until-success cycle used to deliver
// heralded states on demand.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swnoon/fock.hpp"
#include "swnoon/optics.hpp"
#include "swnoon/rng.hpp"

namespace swnoon {

struct HeraldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WriteParams {
    double chi = 0.01;  // per-mode excitation probability, equal for a and b
    int cutoff = 4;

    void validate() const;
};

// Detector outcomes keyed by detector label (a bare photonic mode label also
// works, which pins undetected ports). Threshold detectors read 0 as
// no-click and >=1 as click; number-resolving detectors read exact counts.
// Detectors absent from the map are unconstrained (summed over).
struct ClickPattern {
    std::map<std::string, int> outcomes;
};

struct HeraldResult {
    FockVector state;          // normalized conditional spin-wave state
    double probability = 0.0;  // pattern probability per attempt
    long attempts = 1;
    bool timed_out = false;

    HeraldResult() : state(ModeLayout{{kSWa}, 1}) {}
    explicit HeraldResult(FockVector s) : state(std::move(s)) {}
};

ModeLayout write_layout(int cutoff);

// Normalized 4-mode state on [SWa, SWb, S_H, S_V]: the tensor product of two
// truncated two-mode-squeezed expansions sum_n chi^(n/2) |n>_SW |n>_photon,
// with the mode-a Stokes photon V-polarized and the mode-b photon
// H-polarized after the combining PBS.
FockVector write_state(const WriteParams& p);

// Applies the network, projects the detector modes onto the pattern, drops
// the photonic modes and returns the normalized conditional spin-wave state
// together with the exact pattern probability. Photonic configurations that
// a threshold pattern cannot distinguish (extra photons beyond the heralded
// order, weight O(chi) relative) are merged coherently. Throws HeraldError
// on a zero-probability pattern.
HeraldResult herald(const FockVector& state, const DetectionNetwork& network,
                    const ClickPattern& pattern, bool number_resolving = false);

// Pattern probability only (same conditioning as herald, no state build).
double herald_probability(const FockVector& state, const DetectionNetwork& network,
                          const ClickPattern& pattern, bool number_resolving = false);

// Ideal polarization projection of the Stokes light onto
// (|H>^N − |V>^N)/sqrt(2); the oracle the rail network is checked against,
// and the network-independent heralding probability P(N) ~ chi^N.
HeraldResult project_noon(const FockVector& state, int n);

// Success probability of the N-fold NOON herald for N = 1..n_max, computed
// exactly from the write state via the ideal projection.
std::vector<std::pair<int, double>> herald_probability_scaling(double chi, int n_max, int cutoff);

// Repeats fresh write attempts (each preceded by an implicit clean-pulse
// reset) until the pattern fires, sampling one Bernoulli(p) per attempt.
// Returns timed_out=true with attempts=max_attempts when exhausted.
HeraldResult repeat_until_success(const WriteParams& p, const DetectionNetwork& network,
                                  const ClickPattern& pattern, long max_attempts, RngStream& rng,
                                  bool number_resolving = false);

// All 2^k threshold patterns over the network's detectors, in binary order
// (bit i of the pattern index = click on detector i).
std::vector<ClickPattern> enumerate_threshold_patterns(const DetectionNetwork& network);

}  // namespace swnoon
