#include "sip/estimators.hpp"

#include "sip/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sip {

namespace {

void require_stats(const LagDiffStats& t, std::size_t m) {
    require_lag_order(m, t.n());
    if (t.k_max() < m + 2)
        throw std::invalid_argument("estimator needs T_1..T_" + std::to_string(m + 2) + ", only " +
                                    std::to_string(t.k_max()) + " available");
}

}  // namespace

void require_lag_order(std::size_t m, std::size_t n) {
    if (m < 1) throw std::invalid_argument("lag order m must be >= 1");
    if (2 * (m + 2) >= n)
        throw std::invalid_argument("lag order m=" + std::to_string(m) + " requires m+2 < n/2 (n=" +
                                    std::to_string(n) + ")");
}

AcovEstimates estimate_gamma_unchecked(const LagDiffStats& t, std::size_t m) {
    require_stats(t, m);
    const double scale = 1.0 / (2.0 * static_cast<double>(t.n()));
    const double t_m1 = t.at(m + 1);
    const double t_m2 = t.at(m + 2);

    AcovEstimates est;
    est.m = m;
    est.n = t.n();
    est.gamma0_hat = scale * (static_cast<double>(m + 2) * t_m1 - static_cast<double>(m + 1) * t_m2);
    est.gamma_hat.resize(m);
    for (std::size_t h = 1; h <= m; ++h) {
        const double hi = static_cast<double>(m + 2 - h);
        const double lo = static_cast<double>(m + 1 - h);
        est.gamma_hat[h - 1] = scale * (-t.at(h) + hi * t_m1 - lo * t_m2);
    }
    if (est.gamma0_hat > 0.0) {
        est.rho_hat.resize(m);
        for (std::size_t h = 0; h < m; ++h) est.rho_hat[h] = est.gamma_hat[h] / est.gamma0_hat;
    }
    return est;
}

AcovEstimates estimate_gamma(const LagDiffStats& t, std::size_t m) {
    auto est = estimate_gamma_unchecked(t, m);
    if (!(est.gamma0_hat > 0.0))
        throw DegenerateVariance("gamma0_hat is not positive; autocorrelations undefined", est.gamma0_hat);
    return est;
}

AcovEstimates estimate_gamma(const TimeSeries& x, std::size_t m) {
    require_lag_order(m, x.size());
    return estimate_gamma(compute_lag_diffs(x, m + 2), m);
}

JumpEnergyEstimate estimate_w_diff(const LagDiffStats& t, std::size_t m, double gamma0_hat) {
    require_stats(t, m);
    if (!(gamma0_hat > 0.0)) throw std::invalid_argument("estimate_w_diff: gamma0_hat must be positive");
    JumpEnergyEstimate est;
    est.method = JumpEnergyMethod::difference;
    est.w_hat = (t.at(m + 2) - t.at(m + 1)) / (static_cast<double>(t.n()) * gamma0_hat);
    est.w_clamped = std::max(est.w_hat, 0.0);
    return est;
}

JumpEnergyEstimate estimate_w_diff(const TimeSeries& x, std::size_t m, double gamma0_hat) {
    require_lag_order(m, x.size());
    return estimate_w_diff(compute_lag_diffs(x, m + 2), m, gamma0_hat);
}

JumpEnergyEstimate eve_fit(const LagDiffStats& t, std::size_t m) {
    require_stats(t, m);
    const std::size_t k = m + 2;
    const double scale = 1.0 / (2.0 * static_cast<double>(t.n()));
    const double h_mean = static_cast<double>(k + 1) / 2.0;
    double y_mean = 0.0;
    for (std::size_t h = 1; h <= k; ++h) y_mean += scale * t.at(h);
    y_mean /= static_cast<double>(k);

    double sxy = 0.0, sxx = 0.0;
    for (std::size_t h = 1; h <= k; ++h) {
        const double dh = static_cast<double>(h) - h_mean;
        sxy += dh * (scale * t.at(h) - y_mean);
        sxx += dh * dh;
    }
    const double beta = sxy / sxx;
    const double alpha = y_mean - beta * h_mean;
    if (!(alpha > 0.0))
        throw DegenerateVariance("EVE intercept alpha_hat is not positive; variance estimate degenerate", alpha);

    JumpEnergyEstimate est;
    est.method = JumpEnergyMethod::eve;
    est.alpha_hat = alpha;
    est.beta_hat = beta;
    est.w_hat = 2.0 * beta / alpha;
    est.w_clamped = std::max(est.w_hat, 0.0);
    return est;
}

JumpEnergyEstimate eve_fit(const TimeSeries& x, std::size_t m) {
    require_lag_order(m, x.size());
    return eve_fit(compute_lag_diffs(x, m + 2), m);
}

}  // namespace sip
