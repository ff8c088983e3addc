// Linear-optical elements acting on photonic Fock modes, and the detection
// networks built from them: the Stokes polarization analyzer and the general
// N-rail NOON-projection circuit (beamsplitter chain + per-rail phase
// shifters + 45-degree polarization analyzers).
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swnoon/fock.hpp"

namespace swnoon {

inline constexpr double kUnitaryTol = 1e-12;

// Mode-mixing element: the matrix maps input creation operators to output
// creation operators over the same labels, a†_j -> sum_k U(j,k) a†_k.
struct OpticalElement {
    std::string name;
    std::vector<std::string> modes;
    Eigen::MatrixXcd matrix;

    void validate() const;  // square, label count match, unitary to kUnitaryTol
};

struct DetectorPort {
    std::string label;  // e.g. "D_S1"
    std::string mode;   // output mode the detector watches
};

struct DetectionNetwork {
    std::string name;
    std::vector<OpticalElement> elements;     // applied in order
    std::vector<DetectorPort> detectors;
    std::vector<std::string> photonic_modes;  // every optical mode the network touches

    void validate() const;
    const DetectorPort& detector(const std::string& label) const;
    bool is_photonic(const std::string& mode) const;
};

// Expands each basis ket's creation-operator monomial through the element
// matrix and re-collects amplitudes. Photon number is conserved; components
// pushed past the cutoff are dropped into the truncation bucket.
FockVector apply_element(const FockVector& state, const OpticalElement& element);

FockVector apply_network(const FockVector& state, const DetectionNetwork& network);

// Half-wave plate with fast axis at `angle`:
// (H,V) -> (cos2θ·H + sin2θ·V, sin2θ·H − cos2θ·V).
OpticalElement hwp(double angle_rad, const std::string& h_mode, const std::string& v_mode);

// Phase shifter PS_j for an N-rail circuit: V -> −exp(i·2πj/N)·V.
OpticalElement phase_shifter(int j, int n, const std::string& v_mode);

// Lossless beamsplitter with intensity reflectivity R; reflected-arm
// amplitude i·sqrt(R), transmitted sqrt(1−R).
OpticalElement beam_splitter(double reflectivity, const std::string& mode1,
                             const std::string& mode2, const std::string& name = "BS");

// Polarization-preserving beamsplitter acting on two spatial modes that each
// carry an (H, V) pair; block diagonal in polarization.
OpticalElement beam_splitter_pol(double reflectivity, const std::string& main_h,
                                 const std::string& main_v, const std::string& tap_h,
                                 const std::string& tap_v, const std::string& name);

// Single-mode phase a† -> exp(iφ)·a†.
OpticalElement mode_phase(double phi, const std::string& mode, const std::string& name = "PHASE");

// Main-text Stokes analyzer: HWP at 22.5° on (S_H, S_V) followed by a PBS,
// modeled as port relabeling. D_S1 watches the transmitted (|+>) port,
// D_S2 the reflected (|->) port.
DetectionNetwork stokes_analyzer();

// Anti-Stokes analyzer, same construction on (AS_H, AS_V) with detectors
// D_AS1/D_AS2. `phi_stab` is the stabilized propagation phase applied to the
// V arm before the waveplate.
DetectionNetwork anti_stokes_analyzer(double phi_stab);

// N-rail NOON projection circuit: BS_i with intensity reflectivity 1/(i+1)
// split the beam into N equal rails, PS_j acts on rail j's V mode, and each
// rail ends in a 45°-oriented PBS whose transmitted (|+>) port feeds D_j.
// The N-fold coincidence D_1..D_N projects the photons onto |H>^N − |V>^N.
DetectionNetwork noon_network(int n);

// Extra vacuum rail modes a state needs before noon_network(n) can be applied
// (rails 2..n; rail 1 reuses S_H/S_V).
std::vector<std::string> noon_rail_labels(int n);

// Plain-text dump: one element block per entry, matrices row by row.
std::string describe_network(const DetectionNetwork& network);

}  // namespace swnoon
