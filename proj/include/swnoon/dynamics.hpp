// Collective-motion phase accumulation on the spin-wave modes, the Gaussian
// dephasing envelope, the radiation-pressure velocity model, and the analytic
// NOON/GHZ fringe laws.
#pragma once

#include <optional>

#include "swnoon/fock.hpp"

namespace swnoon {

struct MotionParams {
    double lambda_m = 794.98e-9;  // write-laser wavelength (87Rb D1)
    double theta_rad = 0.010471975511965976;  // 0.6 degree detection half-angle
    double v0_mps = 0.03;         // residual velocity along delta-k
    double vp_mps = 0.0;          // pump-induced velocity
    double tau_s = 200e-6;        // spin-wave coherence time
    double phi_stab_rad = 0.0;    // stabilized propagation phase phi1+phi2

    void validate() const;
};

struct PumpModel {
    double v_max_mps = 0.09;
    double p_sat_mw = 1.2;
};

struct GhzSpec {
    int n = 1;
};

// |delta k| = (2 pi / lambda) sin(theta); odd in theta.
double delta_k(const MotionParams& p);

double collective_velocity(const MotionParams& p);  // v0 + vp

// delta_phi(dt) = delta_k * v_c * dt
double delta_phi(double dt_s, const MotionParams& p);

// phi0 = -(phi1 + phi2)/2 as it enters the closed-form fringe models
double phi0_from_stab(const MotionParams& p);

// Each component |n_a, n_b, ...> acquires exp(i (n_a - n_b) delta_phi(dt));
// populations are untouched. The layout must contain SWa and SWb.
FockVector evolve(const FockVector& state, double dt_s, const MotionParams& p);

// exp(-dt^2/tau^2); the gamma0 prefactor lives in DetectorModel. An
// N-excitation component retrieves with envelope^N.
double dephasing_envelope(double dt_s, const MotionParams& p);

// v_p = v_max (1 - exp(-P/P_sat)): monotone, saturating.
double pump_velocity(double power_mw, const PumpModel& m);

// T = pi / (delta_k v_c); nullopt marks the no-fringe case v_c = 0.
std::optional<double> period_from_velocity(double v_c, const MotionParams& p);
std::optional<double> velocity_from_period(double period_s, const MotionParams& p);

// Ideal parity-readout fringe sin^2(N dphi + phi0) for an N-ensemble GHZ
// state (analytic only; no Fock simulation behind it).
double ghz_fringe(const GhzSpec& spec, double dphi, double phi0 = 0.0);

}  // namespace swnoon
