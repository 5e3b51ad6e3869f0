#include "sip/portmanteau.hpp"

#include "sip/covariance.hpp"
#include "sip/detail/summation.hpp"
#include "sip/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sip {

std::string_view to_string(SipVariant v) noexcept {
    return v == SipVariant::sip1 ? "sip1" : "sip2";
}

std::string_view to_string(BaselineMethod m) noexcept {
    switch (m) {
        case BaselineMethod::box: return "box";
        case BaselineMethod::oracle: return "oracle";
        case BaselineMethod::p_oracle: return "p_oracle";
    }
    return "box";
}

SipTestResult sip_test(const LagDiffStats& t, std::size_t m, SipVariant variant, bool conservative) {
    const auto acov = estimate_gamma_unchecked(t, m);

    SipTestResult res;
    res.variant = variant;
    res.conservative = conservative;
    res.m = m;
    res.n = t.n();
    res.df = m;

    if (variant == SipVariant::sip1) {
        if (!(acov.gamma0_hat > 0.0))
            throw DegenerateVariance("SIP 1: gamma0_hat is not positive", acov.gamma0_hat);
        const auto w = estimate_w_diff(t, m, acov.gamma0_hat);
        res.gamma0_used = acov.gamma0_hat;
        res.w_raw = w.w_hat;
    } else {
        const auto w = eve_fit(t, m);
        res.gamma0_used = *w.alpha_hat;
        res.w_raw = w.w_hat;
    }
    res.w_used = std::max(res.w_raw, 0.0);
    if (conservative) res.w_used *= 2.0;

    res.rho_hat.resize(m);
    for (std::size_t h = 0; h < m; ++h) res.rho_hat[h] = acov.gamma_hat[h] / res.gamma0_used;

    res.statistic = quadratic_statistic(res.rho_hat, SigmaRho(m, res.w_used), res.n);
    res.p_value = chi_square_sf(res.statistic, m);
    return res;
}

SipTestResult sip_test(const TimeSeries& x, std::size_t m, SipVariant variant, bool conservative) {
    require_lag_order(m, x.size());
    return sip_test(compute_lag_diffs(x, m + 2), m, variant, conservative);
}

std::vector<double> sample_autocorrelations(std::span<const double> x, std::size_t max_lag, bool demean) {
    const std::size_t n = x.size();
    if (max_lag < 1 || max_lag >= n)
        throw std::invalid_argument("sample_autocorrelations: need 1 <= max_lag < n (max_lag=" +
                                    std::to_string(max_lag) + ", n=" + std::to_string(n) + ")");
    double mean = 0.0;
    if (demean) {
        detail::CompensatedSum s;
        for (double v : x) s.add(v);
        mean = s.value() / static_cast<double>(n);
    }
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;

    detail::CompensatedSum c0;
    for (double v : centered) c0.add(v * v);
    const double denom = c0.value();
    if (!(denom > 0.0)) throw DegenerateVariance("sample variance is zero", denom);

    std::vector<double> r(max_lag);
    for (std::size_t h = 1; h <= max_lag; ++h) {
        detail::CompensatedSum ch;
        for (std::size_t i = 0; i + h < n; ++i) ch.add(centered[i] * centered[i + h]);
        r[h - 1] = ch.value() / denom;
    }
    return r;
}

BaselineResult box_pierce_from_acf(std::span<const double> r, std::size_t n, std::size_t m, BaselineMethod method) {
    if (m < 1 || m > r.size()) throw std::invalid_argument("box_pierce: m outside available autocorrelations");
    double q = 0.0;
    for (std::size_t h = 0; h < m; ++h) q += r[h] * r[h];
    BaselineResult res;
    res.method = method;
    res.m = m;
    res.statistic = static_cast<double>(n) * q;
    res.p_value = chi_square_sf(res.statistic, m);
    return res;
}

BaselineResult box_pierce(const TimeSeries& x, std::size_t m, bool demean) {
    if (m < 1 || m >= x.size()) throw std::invalid_argument("box_pierce: need 1 <= m < n");
    const auto r = sample_autocorrelations(x.values(), m, demean);
    return box_pierce_from_acf(r, x.size(), m, BaselineMethod::box);
}

std::vector<double> segment_demean(std::span<const double> x, std::span<const std::size_t> changepoints) {
    const std::size_t n = x.size();
    std::size_t prev = 0;
    for (std::size_t cp : changepoints) {
        if (cp <= prev || cp >= n)
            throw std::invalid_argument("changepoints must be strictly increasing within [1, n)");
        prev = cp;
    }
    if (changepoints.size() + 1 == n)
        throw std::invalid_argument("every segment has length 1; segment-wise residuals are identically zero");

    std::vector<double> resid(n);
    std::size_t begin = 0;
    for (std::size_t s = 0; s <= changepoints.size(); ++s) {
        const std::size_t end = s < changepoints.size() ? changepoints[s] : n;
        detail::CompensatedSum acc;
        for (std::size_t i = begin; i < end; ++i) acc.add(x[i]);
        const double mean = acc.value() / static_cast<double>(end - begin);
        for (std::size_t i = begin; i < end; ++i) resid[i] = x[i] - mean;
        begin = end;
    }
    return resid;
}

BaselineResult pseudo_oracle_test(const TimeSeries& x, std::span<const std::size_t> changepoints, std::size_t m) {
    if (m < 1 || m >= x.size()) throw std::invalid_argument("pseudo_oracle_test: need 1 <= m < n");
    const auto resid = segment_demean(x.values(), changepoints);
    const auto r = sample_autocorrelations(resid, m, false);
    return box_pierce_from_acf(r, x.size(), m, BaselineMethod::p_oracle);
}

BaselineResult oracle_test(const TimeSeries& noise, std::size_t m) {
    if (m < 1 || m >= noise.size()) throw std::invalid_argument("oracle_test: need 1 <= m < n");
    const auto r = sample_autocorrelations(noise.values(), m, true);
    return box_pierce_from_acf(r, noise.size(), m, BaselineMethod::oracle);
}

}  // namespace sip
