#pragma once

// File formats: numeric series input, the key-value study configuration, and
// the CSV/JSON report and result schemas.

#include "sip/portmanteau.hpp"
#include "sip/simulate.hpp"
#include "sip/time_series.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sip {

inline constexpr std::string_view kResultSchema = "sip-result/1";
inline constexpr std::string_view kSimSchema = "sip-sim/1";

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SeriesFormat { plain, csv };

struct SeriesFile {
    std::string path;
    SeriesFormat format = SeriesFormat::plain;
    std::string column;  // csv only
    std::size_t n = 0;
};

/// plain: one number per line. csv: header row, values taken from `column`.
/// Trailing blank lines are ignored; anything else that does not parse to a
/// finite real is a ParseError naming the line.
[[nodiscard]] std::vector<double> parse_series(std::istream& in, SeriesFormat format, const std::string& column = {});

/// Reads and validates a series file; fills `info` when given.
[[nodiscard]] TimeSeries read_series_file(const std::string& path, SeriesFormat format,
                                          const std::string& column = {}, SeriesFile* info = nullptr);

/// `key = value` lines, `#` comments. Keys: name, n, jumps, l_min,
/// mean_range (lo, hi), noise, ma_coeffs, ar_phi, reps, m_list, alpha,
/// methods, seed, conservative. Missing keys keep SimConfig defaults.
/// Throws ParseError on unknown/duplicate keys or bad values; the result is
/// validated.
[[nodiscard]] SimConfig parse_sim_config(std::istream& in);
[[nodiscard]] SimConfig load_sim_config(const std::string& path);
[[nodiscard]] std::string sim_config_to_text(const SimConfig& config);

/// One row per (method, m): method,m,reps,rejections,degenerate,rejection_rate,mc_standard_error
void write_sim_report_csv(const SimReport& report, std::ostream& out);

void to_json(nlohmann::json& j, const SimConfig& c);
void to_json(nlohmann::json& j, const SimReport& r);
void to_json(nlohmann::json& j, const SipTestResult& r);
void from_json(const nlohmann::json& j, SipTestResult& r);
void to_json(nlohmann::json& j, const BaselineResult& r);

/// {"schema": "sip-result/1", "command": [...], "timestamp": ..., "payload": ..., "warnings": [...]}
[[nodiscard]] nlohmann::json make_envelope(const std::vector<std::string>& command, nlohmann::json payload,
                                           const std::vector<std::string>& warnings);

[[nodiscard]] std::string utc_timestamp();

}  // namespace sip
