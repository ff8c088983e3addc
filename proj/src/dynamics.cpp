#include "swnoon/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swnoon {

void MotionParams::validate() const {
    if (!(lambda_m > 0.0)) throw std::invalid_argument("MotionParams: lambda_m must be > 0");
    if (!(tau_s > 0.0)) throw std::invalid_argument("MotionParams: tau_s must be > 0");
    if (!(std::abs(theta_rad) < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("MotionParams: |theta_rad| must be < pi/2");
    }
}

double delta_k(const MotionParams& p) {
    p.validate();
    return 2.0 * std::numbers::pi / p.lambda_m * std::sin(p.theta_rad);
}

double collective_velocity(const MotionParams& p) { return p.v0_mps + p.vp_mps; }

double delta_phi(double dt_s, const MotionParams& p) {
    return delta_k(p) * collective_velocity(p) * dt_s;
}

double phi0_from_stab(const MotionParams& p) { return -0.5 * p.phi_stab_rad; }

FockVector evolve(const FockVector& state, double dt_s, const MotionParams& p) {
    const auto& layout = state.layout();
    if (!layout.has_mode(kSWa) || !layout.has_mode(kSWb)) {
        throw std::invalid_argument("evolve: state lacks the SWa/SWb modes");
    }
    const std::size_t ia = layout.mode_index(kSWa);
    const std::size_t ib = layout.mode_index(kSWb);
    const double dphi = delta_phi(dt_s, p);

    FockVector out(layout);
    const auto& in = state.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == Complex{}) continue;
        const auto occ = state.occupation_of(i);
        const double phase = static_cast<double>(occ[ia] - occ[ib]) * dphi;
        out.amplitudes()[i] = in[i] * std::exp(Complex{0.0, phase});
    }
    out.add_truncation_loss(state.truncation_loss());
    return out;
}

double dephasing_envelope(double dt_s, const MotionParams& p) {
    if (!(p.tau_s > 0.0)) throw std::invalid_argument("dephasing_envelope: tau must be > 0");
    const double x = dt_s / p.tau_s;
    return std::exp(-x * x);
}

double pump_velocity(double power_mw, const PumpModel& m) {
    if (power_mw < 0.0) throw std::invalid_argument("pump_velocity: negative power");
    if (!(m.p_sat_mw > 0.0)) throw std::invalid_argument("pump_velocity: p_sat_mw must be > 0");
    return m.v_max_mps * (1.0 - std::exp(-power_mw / m.p_sat_mw));
}

std::optional<double> period_from_velocity(double v_c, const MotionParams& p) {
    const double dk = delta_k(p);
    if (v_c == 0.0 || dk == 0.0) return std::nullopt;
    return std::numbers::pi / (dk * v_c);
}

std::optional<double> velocity_from_period(double period_s, const MotionParams& p) {
    const double dk = delta_k(p);
    if (period_s == 0.0 || dk == 0.0) return std::nullopt;
    return std::numbers::pi / (dk * period_s);
}

double ghz_fringe(const GhzSpec& spec, double dphi, double phi0) {
    if (spec.n < 1) throw std::invalid_argument("ghz_fringe: N must be >= 1");
    const double s = std::sin(static_cast<double>(spec.n) * dphi + phi0);
    return s * s;
}

}  // namespace swnoon
