// Weighted nonlinear least squares for the fringe models: joint first-order
// fidelity curves with shared (a, T, phi0) and the second-order coincidence
// model (b, d, T', phi0'). tau is always a fixed input, never fitted.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "swnoon/detection.hpp"

namespace swnoon {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FirstOrderParams {
    double a = 1.0;
    double T = 1.0;     // seconds
    double phi0 = 0.0;  // wrapped to [-pi, pi)
    double tau = 1.0;   // fixed
};

struct SecondOrderParams {
    double b = 1.0;
    double d = 0.0;
    double T_prime = 1.0;
    double phi0_prime = 0.0;
    double tau = 1.0;  // fixed
};

// f_{+|+}(dt) = (0.5 + a cos^2(pi dt/T + phi0) e^{-dt^2/tau^2}) / (1 + a e^{-dt^2/tau^2})
// f_{+|-}(dt) = same with sin^2.
std::pair<double, double> eval_first_order(const FirstOrderParams& p, double dt_s);

// c(dt) = b sin^2(pi dt/T' + phi0') e^{-2 dt^2/tau^2} + d e^{-dt^2/tau^2}
double eval_second_order(const SecondOrderParams& p, double dt_s);

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd values;
    Eigen::VectorXd sigmas;     // 1-sigma from the inverse normal matrix
    double rss = 0.0;           // weighted residual sum at the optimum
    bool converged = false;
    int iterations = 0;
    std::vector<double> rss_trace;  // accepted-step residuals of the final solver run

    double value(const std::string& name) const;
    double sigma(const std::string& name) const;
};

// One binomial-estimator series: y_i successes fractions with n_i effective
// trials at times t_i.
struct FitSeries {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> n;
};

// Joint weighted fit of both conditioning curves with shared parameters.
// Weights are n/(f(1-f)+eps) with eps=1e-6; after the first pass the fit is
// repeated once with weights from the fitted model, which removes the small
// period bias that estimated weights cause on near-empty tail points.
// ds_plus/ds_minus carry channels "as1"/"as2"; the estimator per point is
// as1/(as1+as2).
FitResult fit_first_order(const FringeDataset& ds_plus, const FringeDataset& ds_minus, double tau,
                          std::optional<Eigen::VectorXd> init = std::nullopt);

// Second-order model fit; estimator coinc/trials from channels
// "coinc"/"noon_trials" (falling back to generic "y"/"n" channels).
FitResult fit_second_order(const FringeDataset& ds, double tau,
                           std::optional<Eigen::VectorXd> init = std::nullopt);

enum class FitKind { FirstOrderJoint, SecondOrder };

// Periodogram-seeded initial guess: the period comes from the dominant
// frequency of the mean-subtracted series, phase from the spectral phase,
// amplitude/offset from the data range. Throws FitError on degenerate data.
Eigen::VectorXd init_guess(const FitSeries& series, FitKind kind, double tau);

// Splits an order-1 acquisition into the (plus, minus) datasets fit_first_order
// expects.
std::pair<FringeDataset, FringeDataset> split_first_order(const FringeDataset& ds);

// key = value +- sigma report plus machine-readable forms.
std::string fit_report_text(const FitResult& r);
std::string fit_result_csv(const FitResult& r);

}  // namespace swnoon
