#pragma once

// Shift-immune portmanteau tests (SIP 1, SIP 2) and the Box-Pierce based
// baselines they are compared against.

#include "sip/estimators.hpp"
#include "sip/quadform.hpp"
#include "sip/time_series.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sip {

inline constexpr std::size_t kDefaultLagOrder = 4;

enum class SipVariant { sip1, sip2 };

struct SipTestResult {
    SipVariant variant = SipVariant::sip2;
    bool conservative = false;
    std::size_t m = 0;
    std::size_t n = 0;
    double statistic = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    double gamma0_used = 0.0;
    double w_raw = 0.0;
    double w_used = 0.0;
    std::vector<double> rho_hat;
};

enum class BaselineMethod { box, oracle, p_oracle };

struct BaselineResult {
    BaselineMethod method = BaselineMethod::box;
    std::size_t m = 0;
    double statistic = 0.0;
    double p_value = 1.0;
};

[[nodiscard]] std::string_view to_string(SipVariant v) noexcept;
[[nodiscard]] std::string_view to_string(BaselineMethod m) noexcept;

/// SIP test of order m. sip1 pairs gamma0_hat with w_hat_1; sip2 pairs the
/// EVE intercept with w_hat_2. The covariance uses max(w_hat, 0), doubled in
/// conservative mode. Throws DegenerateVariance if the variance estimate is
/// not positive and std::invalid_argument unless m+2 < n/2.
[[nodiscard]] SipTestResult sip_test(const TimeSeries& x, std::size_t m, SipVariant variant = SipVariant::sip2,
                                     bool conservative = false);

/// Same test on precomputed lag differences (t.k_max() >= m+2). Lets a caller
/// scan the series once and evaluate several orders and variants.
[[nodiscard]] SipTestResult sip_test(const LagDiffStats& t, std::size_t m, SipVariant variant,
                                     bool conservative = false);

/// Conventional (linear, 1/n normalised) sample autocorrelations r_1..r_max_lag.
/// With demean=false the series is taken to have mean zero. Throws
/// DegenerateVariance for a zero sum of squares.
[[nodiscard]] std::vector<double> sample_autocorrelations(std::span<const double> x, std::size_t max_lag,
                                                          bool demean);

/// Box-Pierce statistic n * sum_{h<=m} r_h^2 from precomputed autocorrelations.
[[nodiscard]] BaselineResult box_pierce_from_acf(std::span<const double> r, std::size_t n, std::size_t m,
                                                 BaselineMethod method = BaselineMethod::box);

[[nodiscard]] BaselineResult box_pierce(const TimeSeries& x, std::size_t m, bool demean = true);

/// Subtracts each segment's sample mean, then Box-Pierce on the residuals.
/// `changepoints` are the last 1-based indices of all but the final segment:
/// strictly increasing in [1, n).
[[nodiscard]] std::vector<double> segment_demean(std::span<const double> x, std::span<const std::size_t> changepoints);
[[nodiscard]] BaselineResult pseudo_oracle_test(const TimeSeries& x, std::span<const std::size_t> changepoints,
                                                std::size_t m);

/// Box-Pierce applied to the true noise sequence (simulation only).
[[nodiscard]] BaselineResult oracle_test(const TimeSeries& noise, std::size_t m);

}  // namespace sip
