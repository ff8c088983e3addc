#include "swnoon/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "swnoon/io.hpp"
#include "swnoon/optics.hpp"

namespace swnoon {

void DetectorModel::validate() const {
    if (!(gamma0 > 0.0) || gamma0 > 1.0) {
        throw std::invalid_argument("DetectorModel: gamma0 must lie in (0, 1]");
    }
    if (gamma_b < 0.0 || gamma_b >= 1.0) {
        throw std::invalid_argument("DetectorModel: gamma_b must lie in [0, 1)");
    }
}

std::size_t FringeDataset::channel(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i] == name) return i;
    }
    throw std::invalid_argument("dataset has no channel: " + name);
}

long FringeDataset::count(std::size_t point, const std::string& name) const {
    return points.at(point).counts.at(channel(name));
}

void FringeDataset::validate() const {
    double prev = -1.0;
    for (const auto& pt : points) {
        if (pt.counts.size() != channels.size()) {
            throw std::invalid_argument("dataset: channel count mismatch");
        }
        if (!(pt.dt_s > prev)) throw std::invalid_argument("dataset: dt values must increase");
        prev = pt.dt_s;
    }
}

std::pair<double, double> first_order_probabilities(double dt_s, const DetectorModel& det,
                                                    const MotionParams& p, int herald_sign) {
    det.validate();
    const double g = det.gamma0 * dephasing_envelope(dt_s, p);
    const double arg = delta_phi(dt_s, p) + phi0_from_stab(p);
    const double c2 = std::cos(arg) * std::cos(arg);
    const double s2 = 1.0 - c2;
    if (herald_sign >= 0) return {g * c2 + det.gamma_b, g * s2 + det.gamma_b};
    return {g * s2 + det.gamma_b, g * c2 + det.gamma_b};
}

double second_order_coincidence(double dt_s, const DetectorModel& det, const MotionParams& p) {
    det.validate();
    const double g = det.gamma0 * dephasing_envelope(dt_s, p);
    const double arg = 2.0 * delta_phi(dt_s, p) + phi0_from_stab(p);
    const double s2 = std::sin(arg) * std::sin(arg);
    return 0.5 * g * g * s2 + 2.0 * det.gamma_b * g + det.gamma_b * det.gamma_b;
}

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Photon loss as a beamsplitter to an unobserved environment: enumerate the
// per-mode loss counts (kh, kv), sample one outcome from its exact
// probability, and return the conditional surviving state (unnormalized).
FockVector sample_thinning(const FockVector& photons, double survival, RngStream& rng) {
    const int cutoff = photons.cutoff();
    const std::size_t ih = photons.layout().mode_index(kAsH);
    const std::size_t iv = photons.layout().mode_index(kAsV);
    const double eta = std::clamp(survival, 0.0, 1.0);

    std::vector<FockVector> branches;
    std::vector<double> weights;
    for (int kh = 0; kh <= cutoff; ++kh) {
        for (int kv = 0; kv <= cutoff; ++kv) {
            FockVector branch(photons.layout());
            bool any = false;
            const auto& in = photons.amplitudes();
            for (std::size_t i = 0; i < in.size(); ++i) {
                if (in[i] == Complex{}) continue;
                auto occ = photons.occupation_of(i);
                const int nh = occ[ih], nv = occ[iv];
                if (nh < kh || nv < kv) continue;
                const double amp_fac = std::sqrt(binom(nh, kh) * binom(nv, kv) *
                                                 std::pow(eta, nh - kh + nv - kv) *
                                                 std::pow(1.0 - eta, kh + kv));
                if (amp_fac == 0.0) continue;
                occ[ih] = nh - kh;
                occ[iv] = nv - kv;
                branch.amplitudes()[branch.index_of(occ)] += in[i] * amp_fac;
                any = true;
            }
            if (!any) continue;
            const double w = branch.norm2();
            if (w <= 0.0) continue;
            branches.push_back(std::move(branch));
            weights.push_back(w);
        }
    }

    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return branches[i];
    }
    return branches.back();
}

}  // namespace

ClickPattern simulate_readout(const FockVector& conditional_state, double dt_s,
                              const DetectorModel& det, const MotionParams& p, RngStream& rng) {
    det.validate();
    const FockVector evolved = evolve(conditional_state, dt_s, p);
    // each spin wave converts to an anti-Stokes photon: SWa -> AS_H, SWb -> AS_V
    const FockVector as_photons = rename_modes(evolved, {{kSWa, kAsH}, {kSWb, kAsV}});

    const double survival = det.gamma0 * dephasing_envelope(dt_s, p);
    const FockVector surviving = sample_thinning(as_photons, survival, rng);

    const FockVector analyzed = apply_network(surviving, anti_stokes_analyzer(p.phi_stab_rad));
    const std::size_t ih = analyzed.layout().mode_index(kAsH);
    const std::size_t iv = analyzed.layout().mode_index(kAsV);

    int n1 = 0, n2 = 0;
    const auto& amps = analyzed.amplitudes();
    if (det.number_resolving) {
        // sample exact counts
        std::vector<double> w;
        std::vector<std::pair<int, int>> outcome;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (amps[i] == Complex{}) continue;
            const auto occ = analyzed.occupation_of(i);
            w.push_back(std::norm(amps[i]));
            outcome.push_back({occ[ih], occ[iv]});
        }
        double total = 0.0;
        for (double x : w) total += x;
        double u = rng.uniform() * total;
        std::size_t pick = w.size() - 1;
        for (std::size_t i = 0; i < w.size(); ++i) {
            u -= w[i];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        n1 = outcome[pick].first;
        n2 = outcome[pick].second;
        n1 += rng.bernoulli(det.gamma_b) ? 1 : 0;
        n2 += rng.bernoulli(det.gamma_b) ? 1 : 0;
    } else {
        // threshold detectors: 4 click categories
        double w[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (amps[i] == Complex{}) continue;
            const auto occ = analyzed.occupation_of(i);
            const int c1 = occ[ih] >= 1 ? 1 : 0;
            const int c2 = occ[iv] >= 1 ? 1 : 0;
            w[c1 * 2 + c2] += std::norm(amps[i]);
        }
        const double total = w[0] + w[1] + w[2] + w[3];
        double u = rng.uniform() * total;
        int cat = 3;
        for (int i = 0; i < 4; ++i) {
            u -= w[i];
            if (u <= 0.0) {
                cat = i;
                break;
            }
        }
        n1 = cat >> 1;
        n2 = cat & 1;
        if (rng.bernoulli(det.gamma_b)) n1 = n1 ? n1 : 1;
        if (rng.bernoulli(det.gamma_b)) n2 = n2 ? n2 : 1;
    }

    ClickPattern out;
    out.outcomes["D_AS1"] = n1;
    out.outcomes["D_AS2"] = n2;
    return out;
}

namespace {

long geometric_attempts(double p, RngStream& rng) {
    if (p >= 1.0) return 1;
    if (p <= 0.0) return std::numeric_limits<long>::max();
    const double u = rng.uniform();
    const double x = std::ceil(std::log1p(-u) / std::log1p(-p));
    if (!(x < 9.0e18)) return std::numeric_limits<long>::max();
    return std::max<long>(1, static_cast<long>(x));
}

}  // namespace

FringeDataset acquire_fringe(const ExperimentConfig& cfg, int order,
                             const std::vector<double>& dt_grid, std::uint64_t seed) {
    cfg.validate_or_throw();
    if (order != 1 && order != 2) throw std::invalid_argument("acquire_fringe: order must be 1 or 2");
    if (dt_grid.empty()) throw std::invalid_argument("acquire_fringe: empty dt grid");

    const auto network = stokes_analyzer();
    const auto ws = write_state(cfg.write_params());
    const bool nr = cfg.number_resolving();
    const MotionParams motion = cfg.motion_params();
    DetectorModel det{cfg.gamma0, cfg.gamma_b, nr};

    // the herald stage does not depend on dt: condition once
    ClickPattern plus_pat{{{"D_S1", 1}, {"D_S2", 0}}};
    ClickPattern minus_pat{{{"D_S1", 0}, {"D_S2", 1}}};
    ClickPattern coinc_pat{{{"D_S1", 1}, {"D_S2", 1}}};

    FringeDataset ds;
    ds.metadata = cfg.metadata();
    ds.metadata.emplace_back("acquire_order", std::to_string(order));
    ds.metadata.emplace_back("acquire_seed", std::to_string(seed));

    if (order == 1) {
        ds.channels = {"plus_trials", "plus_as1", "plus_as2",
                       "minus_trials", "minus_as1", "minus_as2", "timeouts"};
        const auto hplus = herald(ws, network, plus_pat, nr);
        const auto hminus = herald(ws, network, minus_pat, nr);
        const double q = hplus.probability + hminus.probability;
        for (std::size_t gi = 0; gi < dt_grid.size(); ++gi) {
            RngStream rng = RngStream::substream(seed, gi);
            FringePoint pt;
            pt.dt_s = dt_grid[gi];
            pt.trials = cfg.trials_per_point;
            long cplus = 0, c1p = 0, c2p = 0, cminus = 0, c1m = 0, c2m = 0, timeouts = 0;
            for (long t = 0; t < cfg.trials_per_point; ++t) {
                if (geometric_attempts(q, rng) > cfg.herald_max_attempts) {
                    ++timeouts;
                    continue;
                }
                const bool is_plus = rng.uniform() < hplus.probability / q;
                const auto& cond = is_plus ? hplus.state : hminus.state;
                const auto clicks = simulate_readout(cond, pt.dt_s, det, motion, rng);
                const int a1 = clicks.outcomes.at("D_AS1") >= 1 ? 1 : 0;
                const int a2 = clicks.outcomes.at("D_AS2") >= 1 ? 1 : 0;
                if (is_plus) {
                    ++cplus;
                    c1p += a1;
                    c2p += a2;
                } else {
                    ++cminus;
                    c1m += a1;
                    c2m += a2;
                }
            }
            pt.counts = {cplus, c1p, c2p, cminus, c1m, c2m, timeouts};
            ds.points.push_back(std::move(pt));
        }
    } else {
        ds.channels = {"noon_trials", "coinc", "as1", "as2", "timeouts"};
        const auto hnoon = herald(ws, network, coinc_pat, nr);
        for (std::size_t gi = 0; gi < dt_grid.size(); ++gi) {
            RngStream rng = RngStream::substream(seed, gi);
            FringePoint pt;
            pt.dt_s = dt_grid[gi];
            pt.trials = cfg.trials_per_point;
            long heralded = 0, coinc = 0, a1s = 0, a2s = 0, timeouts = 0;
            for (long t = 0; t < cfg.trials_per_point; ++t) {
                if (geometric_attempts(hnoon.probability, rng) > cfg.herald_max_attempts) {
                    ++timeouts;
                    continue;
                }
                ++heralded;
                const auto clicks = simulate_readout(hnoon.state, pt.dt_s, det, motion, rng);
                const int a1 = clicks.outcomes.at("D_AS1") >= 1 ? 1 : 0;
                const int a2 = clicks.outcomes.at("D_AS2") >= 1 ? 1 : 0;
                a1s += a1;
                a2s += a2;
                coinc += a1 & a2;
            }
            pt.counts = {heralded, coinc, a1s, a2s, timeouts};
            ds.points.push_back(std::move(pt));
        }
    }
    ds.validate();
    return ds;
}

std::string fringe_to_csv(const FringeDataset& ds) {
    std::ostringstream os;
    os << "dt_us,trials";
    for (const auto& c : ds.channels) os << ",ch_" << c;
    os << '\n';
    for (const auto& pt : ds.points) {
        os << format_g17(pt.dt_s * 1e6) << ',' << pt.trials;
        for (long c : pt.counts) os << ',' << c;
        os << '\n';
    }
    return os.str();
}

FringeDataset fringe_from_csv(const std::string& text) {
    const Table t = read_table(text);
    if (t.header.size() < 2 || t.header[0] != "dt_us" || t.header[1] != "trials") {
        throw std::invalid_argument("fringe csv: expected header dt_us,trials,ch_...");
    }
    FringeDataset ds;
    for (std::size_t i = 2; i < t.header.size(); ++i) {
        if (t.header[i].rfind("ch_", 0) != 0) {
            throw std::invalid_argument("fringe csv: non-channel column " + t.header[i]);
        }
        ds.channels.push_back(t.header[i].substr(3));
    }
    for (const auto& row : t.rows) {
        FringePoint pt;
        pt.dt_s = std::stod(row[0]) * 1e-6;
        pt.trials = std::stol(row[1]);
        for (std::size_t i = 2; i < row.size(); ++i) pt.counts.push_back(std::stol(row[i]));
        ds.points.push_back(std::move(pt));
    }
    ds.validate();
    return ds;
}

std::string metadata_to_text(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ostringstream os;
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
    return os.str();
}

}  // namespace swnoon
