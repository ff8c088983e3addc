#include "swnoon/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "swnoon/detection.hpp"
#include "swnoon/fitting.hpp"
#include "swnoon/io.hpp"
#include "swnoon/optics.hpp"

namespace swnoon {

OutputFiles cmd_herald_stats(const ExperimentConfig& cfg) {
    cfg.validate_or_throw();
    const int n_max = std::min(4, cfg.cutoff);
    const auto scaling = herald_probability_scaling(cfg.chi, n_max, cfg.cutoff);
    std::ostringstream os;
    os << "N,chi,probability,mean_attempts\n";
    for (const auto& [n, p] : scaling) {
        os << n << ',' << format_g17(cfg.chi) << ',' << format_g17(p) << ','
           << format_g17(p > 0.0 ? 1.0 / p : std::numeric_limits<double>::infinity()) << '\n';
    }
    return {{"herald_stats.csv", os.str()}};
}

namespace {

// residuals per point for the fitted model, one csv per fit
std::string residuals_csv(const FringeDataset& ds, int order, const FitResult& fit, double tau) {
    std::ostringstream os;
    if (order == 1) {
        os << "dt_us,series,y,model,residual\n";
        const auto [plus, minus] = split_first_order(ds);
        FirstOrderParams p{fit.value("a"), fit.value("T"), fit.value("phi0"), tau};
        for (int s = 0; s < 2; ++s) {
            const auto& d = s == 0 ? plus : minus;
            for (const auto& pt : d.points) {
                const long n = pt.counts[0] + pt.counts[1];
                if (n <= 0) continue;
                const double y = static_cast<double>(pt.counts[0]) / static_cast<double>(n);
                const auto [fp, fm] = eval_first_order(p, pt.dt_s);
                const double m = s == 0 ? fp : fm;
                os << format_g17(pt.dt_s * 1e6) << ',' << (s == 0 ? "plus" : "minus") << ','
                   << format_g17(y) << ',' << format_g17(m) << ',' << format_g17(y - m) << '\n';
            }
        }
    } else {
        os << "dt_us,series,y,model,residual\n";
        SecondOrderParams p{fit.value("b"), fit.value("d"), fit.value("T_prime"),
                            fit.value("phi0_prime"), tau};
        const auto cc = ds.channel("coinc");
        const auto ct = ds.channel("noon_trials");
        for (const auto& pt : ds.points) {
            if (pt.counts[ct] <= 0) continue;
            const double y = static_cast<double>(pt.counts[cc]) / static_cast<double>(pt.counts[ct]);
            const double m = eval_second_order(p, pt.dt_s);
            os << format_g17(pt.dt_s * 1e6) << ",coinc," << format_g17(y) << ',' << format_g17(m)
               << ',' << format_g17(y - m) << '\n';
        }
    }
    return os.str();
}

}  // namespace

OutputFiles cmd_fringe(const ExperimentConfig& cfg) {
    cfg.validate_or_throw();
    const auto grid = cfg.grid();
    const FringeDataset ds = acquire_fringe(cfg, cfg.order, grid, cfg.seed);

    const auto timeout_ch = ds.channel("timeouts");
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        const auto& pt = ds.points[i];
        if (pt.trials > 0 &&
            2 * pt.counts[timeout_ch] > pt.trials) {
            throw CommandError("herald timeout rate exceeds 50% at dt = " +
                               format_g17(pt.dt_s * 1e6) + " us (" +
                               std::to_string(pt.counts[timeout_ch]) + "/" +
                               std::to_string(pt.trials) + " attempts timed out)");
        }
    }

    FitResult fit;
    if (cfg.order == 1) {
        const auto [plus, minus] = split_first_order(ds);
        fit = fit_first_order(plus, minus, cfg.tau_s);
    } else {
        fit = fit_second_order(ds, cfg.tau_s);
    }

    OutputFiles out;
    out.emplace_back("fringe.csv", fringe_to_csv(ds));
    out.emplace_back("fringe_meta.txt", metadata_to_text(ds.metadata));
    out.emplace_back("fit_report.txt", fit_report_text(fit));
    out.emplace_back("fit.csv", fit_result_csv(fit));
    out.emplace_back("residuals.csv", residuals_csv(ds, cfg.order, fit, cfg.tau_s));
    return out;
}

OutputFiles cmd_pump_sweep(const ExperimentConfig& cfg, const std::vector<double>& powers_mw) {
    cfg.validate_or_throw();
    if (powers_mw.empty()) throw CommandError("pump sweep: no powers given");
    const auto grid = cfg.grid();
    std::ostringstream os;
    os << "power_mw,T_us,sigma_T_us,vc_hat_mps,fit_ok\n";
    for (std::size_t i = 0; i < powers_mw.size(); ++i) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.pump_power_mw = powers_mw[i];
        point_cfg.order = 1;
        point_cfg.seed = splitmix64(cfg.seed + i);
        std::string t_us = "nan", sig_us = "nan", vhat = "nan";
        int ok = 0;
        try {
            const FringeDataset ds = acquire_fringe(point_cfg, 1, grid, point_cfg.seed);
            const auto [plus, minus] = split_first_order(ds);
            const FitResult fit = fit_first_order(plus, minus, cfg.tau_s);
            const double T = fit.value("T");
            t_us = format_g17(T * 1e6);
            sig_us = format_g17(fit.sigma("T") * 1e6);
            const auto v = velocity_from_period(T, point_cfg.motion_params());
            if (v) vhat = format_g17(*v);
            ok = fit.converged ? 1 : 0;
        } catch (const std::exception&) {
            ok = 0;  // recorded, sweep continues
        }
        os << format_g17(powers_mw[i]) << ',' << t_us << ',' << sig_us << ',' << vhat << ',' << ok
           << '\n';
    }
    return {{"pump_sweep.csv", os.str()}};
}

OutputFiles cmd_ghz_table(const ExperimentConfig& cfg, int n_max) {
    cfg.validate_or_throw();
    if (n_max < 1) throw CommandError("ghz table: n_max must be >= 1");
    const MotionParams motion = cfg.motion_params();
    const double dk = delta_k(motion);
    const double vc = collective_velocity(motion);
    std::ostringstream os;
    os << "N,dphi_period_rad,dt_period_us,ratio_to_N1\n";
    for (int n = 1; n <= n_max; ++n) {
        const double dphi_period = std::numbers::pi / static_cast<double>(n);
        const double dt_period_us =
            (dk != 0.0 && vc != 0.0) ? dphi_period / (dk * vc) * 1e6
                                     : std::numeric_limits<double>::infinity();
        os << n << ',' << format_g17(dphi_period) << ',' << format_g17(dt_period_us) << ','
           << format_g17(1.0 / static_cast<double>(n)) << '\n';
    }
    return {{"ghz_table.csv", os.str()}};
}

OutputFiles cmd_dump_state(const ExperimentConfig& cfg) {
    cfg.validate_or_throw();
    return {{"state.txt", serialize_state(write_state(cfg.write_params()))}};
}

OutputFiles cmd_dump_network(const ExperimentConfig& cfg) {
    cfg.validate_or_throw();
    return {{"network.txt", describe_network(noon_network(cfg.noon_n))}};
}

void write_outputs(const OutputFiles& files, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (const auto& [name, contents] : files) {
        std::ofstream of(fs::path(out_dir) / name, std::ios::binary);
        if (!of) throw CommandError("cannot write output file: " + name);
        of << contents;
    }
}

}  // namespace swnoon
