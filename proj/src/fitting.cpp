#include "swnoon/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "swnoon/io.hpp"
#include "swnoon/rng.hpp"

namespace swnoon {

namespace {

constexpr double kWeightFloor = 1e-6;
constexpr double kRelStepTol = 1e-8;
constexpr int kMaxIterations = 200;

double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi + std::numbers::pi, two_pi);
    if (phi < 0.0) phi += two_pi;
    return phi - std::numbers::pi;
}

}  // namespace

std::pair<double, double> eval_first_order(const FirstOrderParams& p, double dt_s) {
    const double e = std::exp(-dt_s * dt_s / (p.tau * p.tau));
    const double th = std::numbers::pi * dt_s / p.T + p.phi0;
    const double c2 = std::cos(th) * std::cos(th);
    const double den = 1.0 + p.a * e;
    return {(0.5 + p.a * c2 * e) / den, (0.5 + p.a * (1.0 - c2) * e) / den};
}

double eval_second_order(const SecondOrderParams& p, double dt_s) {
    const double e = std::exp(-dt_s * dt_s / (p.tau * p.tau));
    const double th = std::numbers::pi * dt_s / p.T_prime + p.phi0_prime;
    const double s = std::sin(th);
    return p.b * s * s * e * e + p.d * e;
}

double FitResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[static_cast<Eigen::Index>(i)];
    }
    throw std::invalid_argument("fit result has no parameter " + name);
}

double FitResult::sigma(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return sigmas[static_cast<Eigen::Index>(i)];
    }
    throw std::invalid_argument("fit result has no parameter " + name);
}

namespace {

// Observation list shared by both model kinds; `series` distinguishes the
// f_{+|+} curve (0) from f_{+|-} (1) in the joint first-order fit.
struct Observations {
    std::vector<double> t;
    std::vector<int> series;
    std::vector<double> y;
    std::vector<double> n;
    std::vector<double> w;
};

struct ModelSpec {
    FitKind kind;
    double tau;
    std::vector<std::string> names;
    Eigen::VectorXd lo, hi;       // box bounds (phase entries handled by wrapping)
    int phase_index;

    double eval(const Eigen::VectorXd& p, double t, int series) const {
        if (kind == FitKind::FirstOrderJoint) {
            FirstOrderParams q{p[0], p[1], p[2], tau};
            const auto [fp, fm] = eval_first_order(q, t);
            return series == 0 ? fp : fm;
        }
        SecondOrderParams q{p[0], p[1], p[2], p[3], tau};
        return eval_second_order(q, t);
    }

    void gradient(const Eigen::VectorXd& p, double t, int series, Eigen::VectorXd& g) const {
        if (kind == FitKind::FirstOrderJoint) {
            const double a = p[0], T = p[1], phi0 = p[2];
            const double e = std::exp(-t * t / (tau * tau));
            const double th = std::numbers::pi * t / T + phi0;
            double c2 = std::cos(th) * std::cos(th);
            double dc2 = -std::sin(2.0 * th);  // d cos^2 / d th
            if (series == 1) {
                c2 = 1.0 - c2;
                dc2 = -dc2;
            }
            const double den = 1.0 + a * e;
            const double num = 0.5 + a * c2 * e;
            g[0] = (c2 * e * den - num * e) / (den * den);
            const double dm_dth = a * e * dc2 / den;
            g[1] = dm_dth * (-std::numbers::pi * t / (T * T));
            g[2] = dm_dth;
            return;
        }
        const double b = p[0], Tp = p[2], phi0p = p[3];
        const double e = std::exp(-t * t / (tau * tau));
        const double th = std::numbers::pi * t / Tp + phi0p;
        const double s = std::sin(th);
        g[0] = s * s * e * e;
        g[1] = e;
        const double dm_dth = b * std::sin(2.0 * th) * e * e;
        g[2] = dm_dth * (-std::numbers::pi * t / (Tp * Tp));
        g[3] = dm_dth;
    }

    Eigen::VectorXd clamp(Eigen::VectorXd p) const {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (i == phase_index) {
                p[i] = wrap_phase(p[i]);
            } else {
                p[i] = std::clamp(p[i], lo[i], hi[i]);
            }
        }
        return p;
    }
};

double weighted_rss(const ModelSpec& spec, const Observations& obs, const Eigen::VectorXd& p) {
    double rss = 0.0;
    for (std::size_t i = 0; i < obs.t.size(); ++i) {
        const double r = obs.y[i] - spec.eval(p, obs.t[i], obs.series[i]);
        rss += obs.w[i] * r * r;
    }
    return rss;
}

// Damped Gauss-Newton with Levenberg-style lambda adaptation; accepted steps
// never increase the weighted residual sum.
FitResult levenberg_fit(const ModelSpec& spec, const Observations& obs, Eigen::VectorXd p0) {
    const Eigen::Index np = p0.size();
    FitResult res;
    res.names = spec.names;

    Eigen::VectorXd p = spec.clamp(std::move(p0));
    double rss = weighted_rss(spec, obs, p);
    res.rss_trace.push_back(rss);

    double lambda = 1e-3;
    int iter = 0;
    bool converged = false;
    Eigen::VectorXd grad(np);
    while (iter < kMaxIterations) {
        ++iter;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(np);
        for (std::size_t i = 0; i < obs.t.size(); ++i) {
            spec.gradient(p, obs.t[i], obs.series[i], grad);
            const double r = obs.y[i] - spec.eval(p, obs.t[i], obs.series[i]);
            A.noalias() += obs.w[i] * grad * grad.transpose();
            g.noalias() += obs.w[i] * r * grad;
        }

        bool accepted = false;
        for (int tries = 0; tries < 14 && !accepted; ++tries) {
            Eigen::MatrixXd Adamp = A;
            for (Eigen::Index k = 0; k < np; ++k) {
                Adamp(k, k) += lambda * std::max(A(k, k), 1e-30);
            }
            const Eigen::VectorXd step = Adamp.ldlt().solve(g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd p_try = spec.clamp(p + step);
            const double rss_try = weighted_rss(spec, obs, p_try);
            if (rss_try <= rss) {
                const double rel = (p_try - p).norm() / (p.norm() + 1e-30);
                p = p_try;
                rss = rss_try;
                res.rss_trace.push_back(rss);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel < kRelStepTol) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted || converged) {
            converged = converged || !accepted;  // stalled at a minimum of the damping ladder
            break;
        }
    }

    res.values = p;
    res.rss = rss;
    res.iterations = iter;
    res.converged = converged;

    // covariance from the undamped normal matrix at the optimum
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t i = 0; i < obs.t.size(); ++i) {
        spec.gradient(p, obs.t[i], obs.series[i], grad);
        A.noalias() += obs.w[i] * grad * grad.transpose();
    }
    Eigen::MatrixXd cov = A.completeOrthogonalDecomposition().pseudoInverse();
    res.sigmas.resize(np);
    for (Eigen::Index k = 0; k < np; ++k) {
        res.sigmas[k] = cov(k, k) > 0.0 ? std::sqrt(cov(k, k)) : 0.0;
    }
    return res;
}

void data_weights(Observations& obs) {
    obs.w.resize(obs.y.size());
    for (std::size_t i = 0; i < obs.y.size(); ++i) {
        obs.w[i] = obs.n[i] / (obs.y[i] * (1.0 - obs.y[i]) + kWeightFloor);
    }
}

void model_weights(const ModelSpec& spec, const Eigen::VectorXd& p, Observations& obs) {
    for (std::size_t i = 0; i < obs.y.size(); ++i) {
        const double f = std::clamp(spec.eval(p, obs.t[i], obs.series[i]), 0.0, 1.0);
        obs.w[i] = obs.n[i] / (f * (1.0 - f) + kWeightFloor);
    }
}

std::uint64_t dataset_seed(const FringeDataset& ds) {
    for (const auto& [k, v] : ds.metadata) {
        if (k == "seed") return std::stoull(v);
    }
    return 0;
}

FitResult run_multistart(const ModelSpec& spec, Observations obs, const Eigen::VectorXd& base,
                         std::uint64_t jitter_seed) {
    data_weights(obs);

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(base);
    const Eigen::Index it_period = spec.kind == FitKind::FirstOrderJoint ? 1 : 2;
    for (double f : {0.55, 1.6}) {
        Eigen::VectorXd s = base;
        s[it_period] *= f;
        starts.push_back(s);
    }
    {
        Eigen::VectorXd s = base;
        s[spec.phase_index] = wrap_phase(s[spec.phase_index] + std::numbers::pi / 2.0);
        starts.push_back(s);
    }
    RngStream jitter(jitter_seed);
    {
        Eigen::VectorXd s = base;
        for (Eigen::Index k = 0; k < s.size(); ++k) {
            s[k] *= 0.8 + 0.4 * jitter.uniform();
        }
        starts.push_back(s);
    }

    std::optional<FitResult> best;
    for (const auto& s : starts) {
        FitResult r = levenberg_fit(spec, obs, s);
        if (!best || r.rss < best->rss) best = std::move(r);
    }

    // one reweighting pass with model-based binomial weights
    model_weights(spec, best->values, obs);
    FitResult refined = levenberg_fit(spec, obs, best->values);
    if (!refined.values.allFinite()) return *best;
    return refined;
}

FitSeries series_from_channels(const FringeDataset& ds, const std::string& num,
                               const std::string& den_a, const std::string& den_b) {
    FitSeries s;
    const auto ci = ds.channel(num);
    const auto ca = ds.channel(den_a);
    const auto cb = den_b.empty() ? ca : ds.channel(den_b);
    for (const auto& pt : ds.points) {
        const double denom = den_b.empty()
                                 ? static_cast<double>(pt.counts[ca])
                                 : static_cast<double>(pt.counts[ca] + pt.counts[cb]);
        if (denom <= 0.0) continue;  // uninformative point
        s.t.push_back(pt.dt_s);
        s.y.push_back(static_cast<double>(pt.counts[ci]) / denom);
        s.n.push_back(denom);
    }
    return s;
}

void check_not_degenerate(const FitSeries& s) {
    if (s.y.empty()) throw FitError("no fringe: dataset has no informative points");
    const auto [mn, mx] = std::minmax_element(s.y.begin(), s.y.end());
    if (*mx - *mn < 1e-9) throw FitError("no fringe: fidelities are all equal");
}

double grid_min_spacing(const std::vector<double>& t) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) m = std::min(m, t[i] - t[i - 1]);
    return m;
}

}  // namespace

Eigen::VectorXd init_guess(const FitSeries& series, FitKind kind, double tau) {
    if (series.t.size() < 4) throw FitError("init_guess: need at least 4 points");
    check_not_degenerate(series);

    const std::size_t n = series.t.size();
    const double span = series.t.back() - series.t.front();
    if (!(span > 0.0)) throw FitError("init_guess: zero time span");
    const double minspac = grid_min_spacing(series.t);
    const double t_lo = 2.0 * minspac;
    const double t_hi = 4.0 * span;

    double mean = 0.0;
    for (double y : series.y) mean += y;
    mean /= static_cast<double>(n);

    // direct periodogram on the mean-subtracted series, 4x oversampled
    const int kmax = std::max(2, static_cast<int>(std::floor(4.0 * span / t_lo)));
    double best_power = -1.0;
    double best_freq = 1.0 / span;
    Complex best_coeff{0.0, 0.0};
    for (int k = 1; k <= kmax; ++k) {
        const double f = static_cast<double>(k) / (4.0 * span);
        if (1.0 / f > t_hi || 1.0 / f < t_lo) continue;
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -2.0 * std::numbers::pi * f * series.t[i];
            acc += (series.y[i] - mean) * Complex{std::cos(ph), std::sin(ph)};
        }
        const double power = std::norm(acc);
        if (power > best_power) {
            best_power = power;
            best_freq = f;
            best_coeff = acc;
        }
    }
    const double period = std::clamp(1.0 / best_freq, t_lo, t_hi);

    const auto [mn_it, mx_it] = std::minmax_element(series.y.begin(), series.y.end());
    const double lo = *mn_it, hi = *mx_it;

    if (kind == FitKind::FirstOrderJoint) {
        // f in [0.5/(1+a), (0.5+a)/(1+a)] at dt=0: contrast ~ a/(1+a)
        const double contrast = std::clamp(hi - lo, 0.01, 0.95);
        const double a0 = contrast / (1.0 - contrast);
        // y - mean ~ +(a e / (2(1+a e))) cos(2 pi t / T + 2 phi0)
        const double phi0 = wrap_phase(0.5 * std::arg(best_coeff));
        Eigen::VectorXd p(3);
        p << std::clamp(a0, 1e-3, 1e6), period, phi0;
        return p;
    }
    // c = b sin^2(pi t/T' + phi0') env^2 + d env: cos coefficient is -b/2
    const double d0 = std::max(lo, 1e-9);
    const double b0 = std::max(2.0 * (hi - lo), 1e-9);
    const double phi0p = wrap_phase(0.5 * (std::arg(best_coeff) + std::numbers::pi));
    Eigen::VectorXd p(4);
    p << b0, d0, period, phi0p;
    (void)tau;
    return p;
}

std::pair<FringeDataset, FringeDataset> split_first_order(const FringeDataset& ds) {
    FringeDataset plus, minus;
    plus.channels = {"as1", "as2"};
    minus.channels = {"as1", "as2"};
    plus.metadata = ds.metadata;
    minus.metadata = ds.metadata;
    const auto p1 = ds.channel("plus_as1");
    const auto p2 = ds.channel("plus_as2");
    const auto pt_ = ds.channel("plus_trials");
    const auto m1 = ds.channel("minus_as1");
    const auto m2 = ds.channel("minus_as2");
    const auto mt = ds.channel("minus_trials");
    for (const auto& pt : ds.points) {
        plus.points.push_back({pt.dt_s, pt.counts[pt_], {pt.counts[p1], pt.counts[p2]}});
        minus.points.push_back({pt.dt_s, pt.counts[mt], {pt.counts[m1], pt.counts[m2]}});
    }
    return {std::move(plus), std::move(minus)};
}

FitResult fit_first_order(const FringeDataset& ds_plus, const FringeDataset& ds_minus, double tau,
                          std::optional<Eigen::VectorXd> init) {
    if (!(tau > 0.0)) throw FitError("fit_first_order: tau must be > 0");
    const FitSeries sp = series_from_channels(ds_plus, "as1", "as1", "as2");
    const FitSeries sm = series_from_channels(ds_minus, "as1", "as1", "as2");
    if (sp.t.size() + sm.t.size() < 6) {
        throw FitError("fit_first_order: need at least 6 informative points");
    }
    check_not_degenerate(sp);

    Observations obs;
    for (std::size_t i = 0; i < sp.t.size(); ++i) {
        obs.t.push_back(sp.t[i]);
        obs.series.push_back(0);
        obs.y.push_back(sp.y[i]);
        obs.n.push_back(sp.n[i]);
    }
    for (std::size_t i = 0; i < sm.t.size(); ++i) {
        obs.t.push_back(sm.t[i]);
        obs.series.push_back(1);
        obs.y.push_back(sm.y[i]);
        obs.n.push_back(sm.n[i]);
    }

    const double span = *std::max_element(obs.t.begin(), obs.t.end()) -
                        *std::min_element(obs.t.begin(), obs.t.end());
    ModelSpec spec;
    spec.kind = FitKind::FirstOrderJoint;
    spec.tau = tau;
    spec.names = {"a", "T", "phi0"};
    spec.lo = Eigen::Vector3d(1e-6, 2.0 * grid_min_spacing(sp.t), -std::numbers::pi);
    spec.hi = Eigen::Vector3d(1e9, 4.0 * span, std::numbers::pi);
    spec.phase_index = 2;

    const Eigen::VectorXd base = init ? spec.clamp(*init) : init_guess(sp, spec.kind, tau);
    return run_multistart(spec, std::move(obs), base, splitmix64(dataset_seed(ds_plus)));
}

FitResult fit_second_order(const FringeDataset& ds, double tau, std::optional<Eigen::VectorXd> init) {
    if (!(tau > 0.0)) throw FitError("fit_second_order: tau must be > 0");
    FitSeries s;
    if (std::find(ds.channels.begin(), ds.channels.end(), "coinc") != ds.channels.end()) {
        const auto cc = ds.channel("coinc");
        const auto ct = ds.channel("noon_trials");
        for (const auto& pt : ds.points) {
            if (pt.counts[ct] <= 0) continue;
            s.t.push_back(pt.dt_s);
            s.y.push_back(static_cast<double>(pt.counts[cc]) / static_cast<double>(pt.counts[ct]));
            s.n.push_back(static_cast<double>(pt.counts[ct]));
        }
    } else {
        s = series_from_channels(ds, "y", "n", "");
    }
    if (s.t.size() < 5) throw FitError("fit_second_order: need at least 5 informative points");
    check_not_degenerate(s);

    Observations obs;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        obs.t.push_back(s.t[i]);
        obs.series.push_back(0);
        obs.y.push_back(s.y[i]);
        obs.n.push_back(s.n[i]);
    }

    const double span = s.t.back() - s.t.front();
    ModelSpec spec;
    spec.kind = FitKind::SecondOrder;
    spec.tau = tau;
    spec.names = {"b", "d", "T_prime", "phi0_prime"};
    spec.lo = Eigen::Vector4d(1e-12, 0.0, 2.0 * grid_min_spacing(s.t), -std::numbers::pi);
    spec.hi = Eigen::Vector4d(1e6, 1e6, 4.0 * span, std::numbers::pi);
    spec.phase_index = 3;

    const Eigen::VectorXd base = init ? spec.clamp(*init) : init_guess(s, spec.kind, tau);
    return run_multistart(spec, std::move(obs), base, splitmix64(dataset_seed(ds) + 1));
}

std::string fit_report_text(const FitResult& r) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        os << r.names[i] << " = " << format_g17(r.values[static_cast<Eigen::Index>(i)]) << " +- "
           << format_g17(r.sigmas[static_cast<Eigen::Index>(i)]) << '\n';
    }
    os << "rss = " << format_g17(r.rss) << '\n';
    os << "converged = " << (r.converged ? "true" : "false") << '\n';
    os << "iterations = " << r.iterations << '\n';
    return os.str();
}

std::string fit_result_csv(const FitResult& r) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        if (i) os << ',';
        os << r.names[i] << ',' << "sigma_" << r.names[i];
    }
    os << ",rss,converged,iterations\n";
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        if (i) os << ',';
        os << format_g17(r.values[static_cast<Eigen::Index>(i)]) << ','
           << format_g17(r.sigmas[static_cast<Eigen::Index>(i)]);
    }
    os << ',' << format_g17(r.rss) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << '\n';
    return os.str();
}

}  // namespace swnoon
