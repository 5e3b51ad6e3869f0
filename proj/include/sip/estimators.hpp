#pragma once

// Shift-immune autocovariance estimators and the two jump-energy estimators.
// Every estimator here is a fixed linear combination of T_1..T_{m+2}, so all
// of them are unaffected by a piecewise-constant mean with segments of
// length >= m+2 and by a global level shift.

#include "sip/quadform.hpp"
#include "sip/time_series.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sip {

struct AcovEstimates {
    double gamma0_hat = 0.0;
    std::vector<double> gamma_hat;  // lags 1..m
    std::vector<double> rho_hat;    // empty when gamma0_hat <= 0
    std::size_t m = 0;
    std::size_t n = 0;
};

enum class JumpEnergyMethod { difference, eve };

struct JumpEnergyEstimate {
    double w_hat = 0.0;      // raw, can be negative in finite samples
    double w_clamped = 0.0;  // max(w_hat, 0)
    JumpEnergyMethod method = JumpEnergyMethod::difference;
    std::optional<double> alpha_hat;  // EVE intercept (variance estimate)
    std::optional<double> beta_hat;   // EVE slope
};

/// Throws std::invalid_argument unless m >= 1 and 2(m+2) < n.
void require_lag_order(std::size_t m, std::size_t n);

/// gamma_hat_h = (2n)^-1 [-T_h + (m+2-h) T_{m+1} - (m+1-h) T_{m+2}],
/// gamma0_hat = (2n)^-1 [(m+2) T_{m+1} - (m+1) T_{m+2}], rho_hat = gamma_hat / gamma0_hat.
///
/// Needs t.k_max() >= m+2. Does not throw on gamma0_hat <= 0; rho_hat is left
/// empty instead so that callers with a different variance estimate can still
/// use gamma_hat.
[[nodiscard]] AcovEstimates estimate_gamma_unchecked(const LagDiffStats& t, std::size_t m);

/// As above but throws DegenerateVariance when gamma0_hat <= 0.
[[nodiscard]] AcovEstimates estimate_gamma(const LagDiffStats& t, std::size_t m);
[[nodiscard]] AcovEstimates estimate_gamma(const TimeSeries& x, std::size_t m);

/// w_hat_1 = (T_{m+2} - T_{m+1}) / (n * gamma0_hat).
[[nodiscard]] JumpEnergyEstimate estimate_w_diff(const LagDiffStats& t, std::size_t m, double gamma0_hat);
[[nodiscard]] JumpEnergyEstimate estimate_w_diff(const TimeSeries& x, std::size_t m, double gamma0_hat);

/// Least-squares fit of T_h / (2n) = alpha + h*beta over h = 1..m+2.
/// alpha estimates gamma_0 and w_hat_2 = 2 beta / alpha. Throws
/// DegenerateVariance when alpha_hat <= 0.
[[nodiscard]] JumpEnergyEstimate eve_fit(const LagDiffStats& t, std::size_t m);
[[nodiscard]] JumpEnergyEstimate eve_fit(const TimeSeries& x, std::size_t m);

}  // namespace sip
