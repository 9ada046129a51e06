#include "nbundle/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nbundle {

std::size_t SizeHistogram::total_bundles() const {
    std::size_t n = 0;
    for (const auto& [size, c] : counts) n += c;
    return n;
}

std::size_t SizeHistogram::total_clicks() const {
    std::size_t n = 0;
    for (const auto& [size, c] : counts) n += std::size_t(size) * c;
    return n;
}

BundleStream cluster(const ClickRecord& record, double window) {
    if (!(window > 0.0))
        throw std::invalid_argument("cluster: window must be > 0");
    BundleStream out;
    out.window = window;
    out.observation_time = record.duration - record.burn_in;

    Bundle cur;
    bool open = false;
    double last_t = 0.0;
    for (const auto& c : record.clicks) {
        if (c.channel != Channel::cavity) continue;
        if (!open) {
            cur = {c.time, c.time, 1};
            open = true;
        } else if (c.time - last_t < window) {
            cur.t_end = c.time;
            ++cur.size;
        } else {
            out.bundles.push_back(cur);
            cur = {c.time, c.time, 1};
        }
        last_t = c.time;
    }
    if (open) out.bundles.push_back(cur);
    return out;
}

SizeHistogram histogram(const BundleStream& stream) {
    SizeHistogram h;
    h.observation_time = stream.observation_time;
    for (const auto& b : stream.bundles) ++h.counts[b.size];
    return h;
}

RateEstimate estimate_rates(const SizeHistogram& hist, int n_target) {
    if (n_target < 2)
        throw std::invalid_argument(
            "estimate_rates: N must be >= 2 (purity is undefined for N = 1)");
    if (!(hist.observation_time > 0.0))
        throw std::invalid_argument("estimate_rates: observation time must be > 0");
    const double t = hist.observation_time;
    RateEstimate est;
    est.n_target = n_target;
    std::size_t n1 = 0, nn = 0, other = 0;
    for (const auto& [size, c] : hist.counts) {
        if (size == 1) n1 = c;
        else if (size == n_target) nn = c;
        else other += c;
    }
    est.lambda_1 = double(n1) / t;
    est.lambda_n = double(nn) / t;
    est.other_rate = double(other) / t;
    est.err_lambda_1 = std::sqrt(double(n1)) / t;
    est.err_lambda_n = std::sqrt(double(nn)) / t;
    est.err_other = std::sqrt(double(other)) / t;
    return est;
}

PurityResult purity(const RateEstimate& est) {
    const double sum = est.lambda_1 + est.lambda_n;
    if (!(sum > 0.0))
        throw std::runtime_error("purity: lambda_1 + lambda_N = 0, undefined");
    PurityResult out;
    out.value = est.lambda_n / sum;
    // First-order propagation of independent Poisson errors.
    const double dn = est.lambda_1 / (sum * sum);  // d pi / d lambda_n
    const double d1 = -est.lambda_n / (sum * sum); // d pi / d lambda_1
    out.std_error = std::sqrt(dn * dn * est.err_lambda_n * est.err_lambda_n +
                              d1 * d1 * est.err_lambda_1 * est.err_lambda_1);
    return out;
}

double counting_pmf(double lambda_1, double lambda_n, int n_target, double t,
                    int n) {
    if (lambda_1 < 0.0 || lambda_n < 0.0 || !(t > 0.0) || n_target < 2)
        throw std::invalid_argument("counting_pmf: bad arguments");
    if (n < 0) return 0.0;
    const double mu1 = lambda_1 * t;
    const double mun = lambda_n * t;
    double sum = 0.0;
    for (int k = 0; k <= n / n_target; ++k) {
        const int singles = n - n_target * k;
        // log-space term to stay stable for large n.
        double log_term = -std::lgamma(double(k) + 1.0) -
                          std::lgamma(double(singles) + 1.0);
        if (singles > 0) {
            if (mu1 == 0.0) continue;
            log_term += singles * std::log(mu1);
        }
        if (k > 0) {
            if (mun == 0.0) continue;
            log_term += k * std::log(mun);
        }
        sum += std::exp(log_term);
    }
    return std::exp(-(mu1 + mun)) * sum;
}

CountingFit fit_counting(const std::vector<int>& window_counts, int n_target,
                         double window_t) {
    if (window_counts.empty())
        throw std::invalid_argument("fit_counting: no windows");
    const double m = double(window_counts.size());
    double mean = 0.0, var = 0.0;
    for (int c : window_counts) mean += c;
    mean /= m;
    for (int c : window_counts) var += (c - mean) * (c - mean);
    var /= m;

    // Moment seed: E[n] = (l1 + N lN) T, Var[n] = (l1 + N^2 lN) T.
    const double nT = double(n_target);
    double ln0 = std::max((var - mean) / (nT * (nT - 1.0) * window_t), 1e-12);
    double l10 = std::max(mean / window_t - nT * ln0, 1e-12);

    std::map<int, std::size_t> mult;
    for (int c : window_counts) ++mult[c];
    auto nll = [&](double l1, double ln) {
        double acc = 0.0;
        for (const auto& [c, m] : mult) {
            const double p = counting_pmf(l1, ln, n_target, window_t, c);
            acc -= double(m) * std::log(std::max(p, 1e-300));
        }
        return acc;
    };

    // Coordinate descent with golden-section line searches.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto line_min = [&](double lo, double hi, auto f) {
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo); f1 = f(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo); f2 = f(x2);
            }
        }
        return 0.5 * (lo + hi);
    };

    double l1 = l10, ln = ln0;
    for (int round = 0; round < 4; ++round) {
        l1 = line_min(l10 * 1e-3, l10 * 10.0 + 1e-9,
                      [&](double x) { return nll(x, ln); });
        ln = line_min(ln0 * 1e-3, ln0 * 10.0 + 1e-9,
                      [&](double x) { return nll(l1, x); });
    }
    return {l1, ln, -nll(l1, ln)};
}

std::vector<int> window_counts(const ClickRecord& record, double window_t) {
    if (!(window_t > 0.0))
        throw std::invalid_argument("window_counts: window must be > 0");
    const double t0 = record.burn_in;
    const int n_windows = int((record.duration - t0) / window_t);
    std::vector<int> counts(n_windows, 0);
    for (const auto& c : record.clicks) {
        if (c.channel != Channel::cavity) continue;
        const int w = int((c.time - t0) / window_t);
        if (w >= 0 && w < n_windows) ++counts[w];
    }
    return counts;
}

namespace {

std::vector<double> bundle_times(const BundleStream& stream, int size_filter) {
    std::vector<double> ts;
    for (const auto& b : stream.bundles)
        if (b.size == size_filter) ts.push_back(b.t_start);
    return ts;
}

} // namespace

CorrelationSeries coincidence_g2(const std::vector<double>& event_times,
                                 double t_obs,
                                 const std::vector<double>& tau_edges,
                                 const std::string& kind) {
    if (tau_edges.size() < 2)
        throw std::invalid_argument("coincidence_g2: need >= 2 bin edges");
    if (event_times.size() < 2)
        throw std::runtime_error("coincidence_g2: fewer than two events");

    const std::vector<double>& ts = event_times;
    const double rate = double(ts.size()) / t_obs;
    const std::size_t n_bins = tau_edges.size() - 1;
    std::vector<std::size_t> counts(n_bins, 0);

    const double tau_max = tau_edges.back();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double gap = ts[j] - ts[i];
            if (gap >= tau_max) break;
            const auto it =
                std::upper_bound(tau_edges.begin(), tau_edges.end(), gap);
            const std::size_t bin = std::size_t(it - tau_edges.begin()) - 1;
            if (bin < n_bins) ++counts[bin];
        }
    }

    CorrelationSeries out;
    out.kind = kind;
    out.normalization = rate;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double width = tau_edges[b + 1] - tau_edges[b];
        const double center = 0.5 * (tau_edges[b] + tau_edges[b + 1]);
        // Ordered-pair Poisson expectation with the finite-record
        // boundary correction: rate^2 * integral_bin (T - tau) dtau.
        const double expected = rate * rate * width * (t_obs - center);
        out.tau_grid.push_back(center);
        out.values.push_back(double(counts[b]) / expected);
        out.std_errors.push_back(std::sqrt(double(counts[b])) / expected);
        out.poisson_expectations.push_back(expected);
    }
    return out;
}

CorrelationSeries bundle_g2_from_clicks(const BundleStream& stream,
                                        int size_filter,
                                        const std::vector<double>& tau_edges) {
    const std::vector<double> ts = bundle_times(stream, size_filter);
    if (ts.size() < 2)
        throw std::runtime_error(
            "bundle_g2_from_clicks: fewer than two bundles after filtering");
    return coincidence_g2(ts, stream.observation_time, tau_edges,
                          "g2_clicks_size" + std::to_string(size_filter));
}

Correlation2D bundle_g3_check(const BundleStream& stream, int size_filter,
                              const std::vector<double>& tau1_edges,
                              const std::vector<double>& tau2_edges) {
    if (tau1_edges.size() < 2 || tau2_edges.size() < 2)
        throw std::invalid_argument("bundle_g3_check: need >= 2 bin edges");
    const std::vector<double> ts = bundle_times(stream, size_filter);
    if (ts.size() < 3)
        throw std::runtime_error(
            "bundle_g3_check: fewer than three bundles after filtering");

    const double t_obs = stream.observation_time;
    const double rate = double(ts.size()) / t_obs;
    const std::size_t n1 = tau1_edges.size() - 1;
    const std::size_t n2 = tau2_edges.size() - 1;
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(Eigen::Index(n1),
                                                   Eigen::Index(n2));
    const double max1 = tau1_edges.back();
    const double max2 = tau2_edges.back();

    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double gap1 = ts[j] - ts[i];
            if (gap1 >= max1) break;
            const auto it1 =
                std::upper_bound(tau1_edges.begin(), tau1_edges.end(), gap1);
            const std::size_t b1 = std::size_t(it1 - tau1_edges.begin()) - 1;
            if (b1 >= n1) continue;
            for (std::size_t k = j + 1; k < ts.size(); ++k) {
                const double gap2 = ts[k] - ts[j];
                if (gap2 >= max2) break;
                const auto it2 = std::upper_bound(tau2_edges.begin(),
                                                  tau2_edges.end(), gap2);
                const std::size_t b2 = std::size_t(it2 - tau2_edges.begin()) - 1;
                if (b2 < n2) counts(Eigen::Index(b1), Eigen::Index(b2)) += 1.0;
            }
        }
    }

    Correlation2D out;
    out.values.resize(Eigen::Index(n1), Eigen::Index(n2));
    out.std_errors.resize(Eigen::Index(n1), Eigen::Index(n2));
    for (std::size_t b = 0; b < n1; ++b)
        out.tau1_centers.push_back(0.5 * (tau1_edges[b] + tau1_edges[b + 1]));
    for (std::size_t b = 0; b < n2; ++b)
        out.tau2_centers.push_back(0.5 * (tau2_edges[b] + tau2_edges[b + 1]));
    for (std::size_t b1 = 0; b1 < n1; ++b1) {
        const double w1 = tau1_edges[b1 + 1] - tau1_edges[b1];
        for (std::size_t b2 = 0; b2 < n2; ++b2) {
            const double w2 = tau2_edges[b2 + 1] - tau2_edges[b2];
            const double expected =
                rate * rate * rate * w1 * w2 *
                (t_obs - out.tau1_centers[b1] - out.tau2_centers[b2]);
            const double c = counts(Eigen::Index(b1), Eigen::Index(b2));
            out.values(Eigen::Index(b1), Eigen::Index(b2)) = c / expected;
            out.std_errors(Eigen::Index(b1), Eigen::Index(b2)) =
                std::sqrt(c) / expected;
        }
    }
    return out;
}

} // namespace nbundle
