#include "swnoon/source_herald.hpp"

#include <algorithm>
#include <cmath>

namespace swnoon {

void WriteParams::validate() const {
    if (!(chi >= 0.0) || chi >= 1.0) {
        throw std::invalid_argument("WriteParams: chi must lie in [0, 1)");
    }
    if (cutoff < 1) throw std::invalid_argument("WriteParams: cutoff must be >= 1");
}

ModeLayout write_layout(int cutoff) {
    return ModeLayout{{kSWa, kSWb, kStokesH, kStokesV}, cutoff};
}

FockVector write_state(const WriteParams& p) {
    p.validate();
    // pair a: SW_a correlated with a V-polarized Stokes photon
    ModeLayout pair_a{{kSWa, kStokesV}, p.cutoff};
    ModeLayout pair_b{{kSWb, kStokesH}, p.cutoff};
    std::vector<std::pair<std::vector<int>, Complex>> terms_a, terms_b;
    for (int n = 0; n <= p.cutoff; ++n) {
        const double c = std::pow(p.chi, 0.5 * n);
        terms_a.push_back({{n, n}, Complex{c, 0.0}});
        terms_b.push_back({{n, n}, Complex{c, 0.0}});
    }
    const auto sa = FockVector::from_terms(pair_a, terms_a);
    const auto sb = FockVector::from_terms(pair_b, terms_b);
    return reorder_modes(tensor(sa, sb), {kSWa, kSWb, kStokesH, kStokesV}).normalized();
}

namespace {

struct PatternMatcher {
    // per photonic mode: -1 unconstrained, -2 threshold click (>=1),
    // otherwise the exact required count
    std::vector<int> requirement;
    std::vector<std::size_t> photonic_ids;
    std::vector<std::size_t> sw_ids;
    ModeLayout sw_layout;
};

PatternMatcher build_matcher(const FockVector& state, const DetectionNetwork& network,
                             const ClickPattern& pattern, bool number_resolving) {
    const auto& layout = state.layout();
    for (const auto& m : network.photonic_modes) {
        if (!layout.has_mode(m)) {
            throw std::invalid_argument("herald: network mode " + m + " missing from state layout");
        }
    }
    PatternMatcher mm;
    mm.requirement.assign(layout.modes.size(), -1);
    for (const auto& [label, outcome] : pattern.outcomes) {
        // keys are detector labels; a bare photonic mode label also works,
        // which lets callers pin undetected ports (e.g. the |-> loss ports)
        std::string mode;
        bool found = false;
        for (const auto& d : network.detectors) {
            if (d.label == label) {
                mode = d.mode;
                found = true;
                break;
            }
        }
        if (!found) {
            if (!network.is_photonic(label)) {
                throw std::invalid_argument("herald: unknown detector or photonic mode " + label);
            }
            mode = label;
        }
        const std::size_t id = layout.mode_index(mode);
        if (outcome < 0) throw std::invalid_argument("herald: negative outcome for " + label);
        if (number_resolving) {
            mm.requirement[id] = outcome;
        } else {
            mm.requirement[id] = (outcome >= 1) ? -2 : 0;
        }
    }
    for (std::size_t i = 0; i < layout.modes.size(); ++i) {
        if (network.is_photonic(layout.modes[i])) {
            mm.photonic_ids.push_back(i);
        } else {
            mm.sw_ids.push_back(i);
            mm.sw_layout.modes.push_back(layout.modes[i]);
        }
    }
    mm.sw_layout.cutoff = layout.cutoff;
    if (mm.sw_ids.empty()) throw std::invalid_argument("herald: no spin-wave modes left to condition");
    return mm;
}

}  // namespace

HeraldResult herald(const FockVector& state, const DetectionNetwork& network,
                    const ClickPattern& pattern, bool number_resolving) {
    const FockVector transformed = apply_network(state, network);
    const auto mm = build_matcher(transformed, network, pattern, number_resolving);

    FockVector cond(mm.sw_layout);
    double prob = 0.0;
    const auto& amps = transformed.amplitudes();
    std::vector<int> sw_occ(mm.sw_ids.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const Complex a = amps[i];
        if (a == Complex{}) continue;
        const auto occ = transformed.occupation_of(i);
        bool ok = true;
        for (std::size_t k = 0; k < occ.size() && ok; ++k) {
            const int req = mm.requirement[k];
            if (req == -1) continue;
            if (req == -2) {
                ok = occ[k] >= 1;
            } else {
                ok = occ[k] == req;
            }
        }
        if (!ok) continue;
        prob += std::norm(a);
        for (std::size_t k = 0; k < mm.sw_ids.size(); ++k) sw_occ[k] = occ[mm.sw_ids[k]];
        cond.amplitudes()[cond.index_of(sw_occ)] += a;
    }

    if (prob <= 0.0) {
        throw HeraldError("herald: impossible outcome (zero-probability pattern)");
    }
    HeraldResult res(canonical_phase(cond.normalized()));
    res.probability = prob;
    return res;
}

double herald_probability(const FockVector& state, const DetectionNetwork& network,
                          const ClickPattern& pattern, bool number_resolving) {
    const FockVector transformed = apply_network(state, network);
    const auto mm = build_matcher(transformed, network, pattern, number_resolving);
    double prob = 0.0;
    const auto& amps = transformed.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == Complex{}) continue;
        const auto occ = transformed.occupation_of(i);
        bool ok = true;
        for (std::size_t k = 0; k < occ.size() && ok; ++k) {
            const int req = mm.requirement[k];
            if (req == -1) continue;
            if (req == -2) {
                ok = occ[k] >= 1;
            } else {
                ok = occ[k] == req;
            }
        }
        if (ok) prob += std::norm(amps[i]);
    }
    return prob;
}

HeraldResult project_noon(const FockVector& state, int n) {
    if (n < 1) throw std::invalid_argument("project_noon: N must be >= 1");
    if (n > state.cutoff()) throw std::invalid_argument("project_noon: N exceeds the cutoff");
    const auto& layout = state.layout();
    const std::size_t ih = layout.mode_index(kStokesH);
    const std::size_t iv = layout.mode_index(kStokesV);

    ModeLayout sw_layout;
    sw_layout.cutoff = layout.cutoff;
    std::vector<std::size_t> sw_ids;
    for (std::size_t i = 0; i < layout.modes.size(); ++i) {
        if (i == ih || i == iv) continue;
        sw_ids.push_back(i);
        sw_layout.modes.push_back(layout.modes[i]);
    }

    // <phi| = (<N_H, 0_V| - <0_H, N_V|)/sqrt(2) applied to the photon modes
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    FockVector cond(sw_layout);
    const auto& amps = state.amplitudes();
    std::vector<int> sw_occ(sw_ids.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == Complex{}) continue;
        const auto occ = state.occupation_of(i);
        double bra;
        if (occ[ih] == n && occ[iv] == 0) {
            bra = inv_sqrt2;
        } else if (occ[ih] == 0 && occ[iv] == n) {
            bra = -inv_sqrt2;
        } else {
            continue;
        }
        for (std::size_t k = 0; k < sw_ids.size(); ++k) sw_occ[k] = occ[sw_ids[k]];
        cond.amplitudes()[cond.index_of(sw_occ)] += bra * amps[i];
    }
    const double prob = cond.norm2();
    if (prob <= 0.0) throw HeraldError("project_noon: zero-probability projection");
    HeraldResult res(canonical_phase(cond.normalized()));
    res.probability = prob;
    return res;
}

std::vector<std::pair<int, double>> herald_probability_scaling(double chi, int n_max, int cutoff) {
    if (n_max < 1) throw std::invalid_argument("herald_probability_scaling: n_max must be >= 1");
    if (n_max > cutoff) {
        throw std::invalid_argument("herald_probability_scaling: n_max exceeds the cutoff");
    }
    const auto ws = write_state(WriteParams{chi, cutoff});
    std::vector<std::pair<int, double>> out;
    for (int n = 1; n <= n_max; ++n) {
        double p = 0.0;
        if (chi > 0.0) {
            p = project_noon(ws, n).probability;
        }
        out.push_back({n, p});
    }
    return out;
}

HeraldResult repeat_until_success(const WriteParams& p, const DetectionNetwork& network,
                                  const ClickPattern& pattern, long max_attempts, RngStream& rng,
                                  bool number_resolving) {
    if (max_attempts < 1) throw std::invalid_argument("repeat_until_success: max_attempts >= 1");
    const auto ws = write_state(p);
    HeraldResult res = herald(ws, network, pattern, number_resolving);
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        if (rng.bernoulli(res.probability)) {
            res.attempts = attempt;
            return res;
        }
    }
    res.attempts = max_attempts;
    res.timed_out = true;
    return res;
}

std::vector<ClickPattern> enumerate_threshold_patterns(const DetectionNetwork& network) {
    const std::size_t k = network.detectors.size();
    std::vector<ClickPattern> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        ClickPattern pat;
        for (std::size_t i = 0; i < k; ++i) {
            pat.outcomes[network.detectors[i].label] = (mask >> i) & 1 ? 1 : 0;
        }
        out.push_back(std::move(pat));
    }
    return out;
}

}  // namespace swnoon
