#pragma once

// ACF data for plotting: the shift-immune variant next to the classical one.

#include "sip/time_series.hpp"

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sip {

enum class AcfKind { shift_immune, classical };
enum class AcfFormat { csv, json, svg };

/// How the per-lag estimator order is chosen for the shift-immune ACF.
/// lag_matched uses order h at lag h, so the value estimates
/// gamma_h - 2 gamma_{h+1} + gamma_{h+2} (scaled by gamma_0).
/// order_h_plus_2 uses order h+2 at lag h instead; kept for comparison.
enum class AcfOrder { lag_matched, order_h_plus_2 };

inline constexpr std::string_view kAcfSchema = "sip-acf/1";

struct AcfData {
    AcfKind kind = AcfKind::shift_immune;
    std::size_t max_lag = 0;
    std::vector<double> values;  // lags 1..max_lag
    double bound = 0.0;          // half-width of the 95% band
    double w_hat_used = 0.0;     // shift-immune only
    std::size_t n = 0;

    friend bool operator==(const AcfData&, const AcfData&) = default;
};

[[nodiscard]] std::string_view to_string(AcfKind k) noexcept;

/// Shift-immune values with band 1.96 sqrt((6 + 4 w)/n), where w is
/// max(w_hat_1, 0) at order s. Requires s+2 < n/2 (s+4 < n/2 for
/// order_h_plus_2). Throws DegenerateVariance naming the lag whose variance
/// estimate is not positive.
[[nodiscard]] AcfData shift_immune_acf(const TimeSeries& x, std::size_t s, AcfOrder order = AcfOrder::lag_matched);

/// Demeaned sample autocorrelations with band 1.96/sqrt(n). Requires s < n.
[[nodiscard]] AcfData classical_acf(const TimeSeries& x, std::size_t s);

void emit_acf(const AcfData& data, AcfFormat format, std::ostream& out);

void to_json(nlohmann::json& j, const AcfData& d);
void from_json(const nlohmann::json& j, AcfData& d);

}  // namespace sip
