#pragma once

#include <map>
#include <vector>

#include "nbundle/steady.hpp"
#include "nbundle/trajectory.hpp"

namespace nbundle {

struct Bundle {
    double t_start = 0.0;   ///< units of 1/gamma_a
    double t_end = 0.0;
    int size = 0;
};

/// Cavity clicks grouped by inter-click gap < window (greedy, left to
/// right). Emitter clicks are excluded: that channel is at another
/// frequency and collected in a different solid angle.
struct BundleStream {
    std::vector<Bundle> bundles;
    double window = 0.0;            ///< units of 1/gamma_a
    double observation_time = 0.0;  ///< duration - burn_in
};

struct SizeHistogram {
    std::map<int, std::size_t> counts;
    double observation_time = 0.0;

    std::size_t total_bundles() const;
    std::size_t total_clicks() const;
};

/// lambda_1, lambda_N and the aggregated rate of all other sizes, with
/// sqrt(count)/T standard errors. Rates are in units of gamma_a.
struct RateEstimate {
    double lambda_1 = 0.0;
    double lambda_n = 0.0;
    double other_rate = 0.0;
    double err_lambda_1 = 0.0;
    double err_lambda_n = 0.0;
    double err_other = 0.0;
    int n_target = 0;
};

struct PurityResult {
    double value = 0.0;
    double std_error = 0.0;
};

BundleStream cluster(const ClickRecord& record, double window);

SizeHistogram histogram(const BundleStream& stream);

/// Rates from direct size classification. Throws for N < 2.
RateEstimate estimate_rates(const SizeHistogram& hist, int n_target);

/// pi_N = lambda_N / (lambda_1 + lambda_N), with propagated standard
/// error. Throws when both rates vanish.
PurityResult purity(const RateEstimate& est);

/// P(X_1 + N X_N = n) for independent Poisson processes with rates
/// lambda_1, lambda_N over a window T: the convolution
///   e^{-(l1+lN)T} sum_{k=0}^{floor(n/N)} (l1 T)^{n-Nk} (lN T)^k / (k! (n-Nk)!).
double counting_pmf(double lambda_1, double lambda_n, int n_target, double t,
                    int n);

/// Maximum-likelihood fit of counting_pmf to a per-window photon count
/// histogram; cross-check estimator for (lambda_1, lambda_N).
struct CountingFit {
    double lambda_1 = 0.0;
    double lambda_n = 0.0;
    double log_likelihood = 0.0;
};

CountingFit fit_counting(const std::vector<int>& window_counts, int n_target,
                         double window_t);

/// Photon counts per consecutive window of length window_t (1/gamma_a).
std::vector<int> window_counts(const ClickRecord& record, double window_t);

/// Coincidence histogram of point events, normalized by the Poisson
/// expectation at the measured rate with the finite-duration boundary
/// correction. Values come with sqrt(count) standard errors.
CorrelationSeries coincidence_g2(const std::vector<double>& event_times,
                                 double t_obs,
                                 const std::vector<double>& tau_edges,
                                 const std::string& kind);

/// coincidence_g2 over bundle timestamps (first click of each bundle)
/// filtered to size == size_filter.
CorrelationSeries bundle_g2_from_clicks(const BundleStream& stream,
                                        int size_filter,
                                        const std::vector<double>& tau_edges);

/// Third-order coincidences over gap pairs (tau1, tau2), Poisson
/// normalized; diagnostic for the N-photon laser regime.
struct Correlation2D {
    std::vector<double> tau1_centers;
    std::vector<double> tau2_centers;
    Eigen::MatrixXd values;
    Eigen::MatrixXd std_errors;
};

Correlation2D bundle_g3_check(const BundleStream& stream, int size_filter,
                              const std::vector<double>& tau1_edges,
                              const std::vector<double>& tau2_edges);

} // namespace nbundle
