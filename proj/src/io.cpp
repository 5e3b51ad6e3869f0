#include "sip/io.hpp"

#include "sip/format.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

namespace sip {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

bool parse_real(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

[[noreturn]] void fail_line(std::size_t line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

double config_real(std::string_view v, std::size_t line) {
    double out = 0.0;
    if (!parse_real(v, out)) fail_line(line, "expected a real number, got '" + std::string(v) + "'");
    return out;
}

std::size_t config_size(std::string_view v, std::size_t line) {
    std::size_t out = 0;
    if (!parse_int(v, out)) fail_line(line, "expected a nonnegative integer, got '" + std::string(v) + "'");
    return out;
}

}  // namespace

std::vector<double> parse_series(std::istream& in, SeriesFormat format, const std::string& column) {
    const auto lines = read_lines(in);
    std::vector<double> values;
    if (format == SeriesFormat::plain) {
        values.reserve(lines.size());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            double v = 0.0;
            if (!parse_real(trim(lines[i]), v)) fail_line(i + 1, "not a finite number: '" + lines[i] + "'");
            values.push_back(v);
        }
    } else {
        if (lines.empty()) throw ParseError("csv input has no header");
        const auto header = split(lines[0], ',');
        const auto it = std::find(header.begin(), header.end(), std::string_view(column));
        if (it == header.end()) throw ParseError("csv header has no column '" + column + "'");
        const auto col = static_cast<std::size_t>(it - header.begin());
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto fields = split(lines[i], ',');
            double v = 0.0;
            if (col >= fields.size() || !parse_real(fields[col], v))
                fail_line(i + 1, "column '" + column + "' is not a finite number");
            values.push_back(v);
        }
    }
    if (values.empty()) throw ParseError("series is empty");
    return values;
}

TimeSeries read_series_file(const std::string& path, SeriesFormat format, const std::string& column, SeriesFile* info) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    auto values = parse_series(in, format, column);
    if (info) *info = SeriesFile{path, format, column, values.size()};
    return TimeSeries(std::move(values));
}

SimConfig parse_sim_config(std::istream& in) {
    SimConfig c;
    std::map<std::string, std::size_t> seen;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail_line(lineno, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view val = trim(line.substr(eq + 1));
        if (!seen.emplace(key, lineno).second) fail_line(lineno, "duplicate key '" + key + "'");

        try {
            if (key == "name") {
                c.name = std::string(val);
            } else if (key == "n") {
                c.n = config_size(val, lineno);
            } else if (key == "jumps") {
                c.jumps = config_size(val, lineno);
            } else if (key == "l_min") {
                c.l_min = config_size(val, lineno);
            } else if (key == "mean_range") {
                const auto parts = split(val, ',');
                if (parts.size() != 2) fail_line(lineno, "mean_range needs 'lo, hi'");
                c.mean_lo = config_real(parts[0], lineno);
                c.mean_hi = config_real(parts[1], lineno);
            } else if (key == "noise") {
                c.noise.family = parse_noise_family(val);
            } else if (key == "ma_coeffs") {
                c.noise.ma_coeffs.clear();
                if (!val.empty())
                    for (auto p : split(val, ',')) c.noise.ma_coeffs.push_back(config_real(p, lineno));
            } else if (key == "ar_phi") {
                c.noise.ar_phi = config_real(val, lineno);
            } else if (key == "reps") {
                c.reps = config_size(val, lineno);
            } else if (key == "m_list") {
                c.m_list.clear();
                for (auto p : split(val, ',')) c.m_list.push_back(config_size(p, lineno));
            } else if (key == "alpha") {
                c.alpha = config_real(val, lineno);
            } else if (key == "methods") {
                c.methods.clear();
                for (auto p : split(val, ',')) c.methods.push_back(parse_method(p));
            } else if (key == "seed") {
                if (!parse_int(val, c.seed)) fail_line(lineno, "seed must be an unsigned 64-bit integer");
            } else if (key == "conservative") {
                if (val == "true")
                    c.conservative = true;
                else if (val == "false")
                    c.conservative = false;
                else
                    fail_line(lineno, "conservative must be true or false");
            } else {
                fail_line(lineno, "unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            fail_line(lineno, e.what());
        }
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid configuration: ") + e.what());
    }
    return c;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    return parse_sim_config(in);
}

std::string sim_config_to_text(const SimConfig& c) {
    std::ostringstream out;
    const auto join = [](const auto& items, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += fmt(items[i]);
        }
        return s;
    };
    out << "name = " << c.name << '\n'
        << "n = " << c.n << '\n'
        << "jumps = " << c.jumps << '\n'
        << "l_min = " << c.l_min << '\n'
        << "mean_range = " << format_double(c.mean_lo) << ", " << format_double(c.mean_hi) << '\n'
        << "noise = " << to_string(c.noise.family) << '\n';
    if (!c.noise.ma_coeffs.empty())
        out << "ma_coeffs = " << join(c.noise.ma_coeffs, [](double v) { return format_double(v); }) << '\n';
    if (c.noise.family == NoiseFamily::ar1) out << "ar_phi = " << format_double(c.noise.ar_phi) << '\n';
    out << "reps = " << c.reps << '\n'
        << "m_list = " << join(c.m_list, [](std::size_t v) { return std::to_string(v); }) << '\n'
        << "alpha = " << format_double(c.alpha) << '\n'
        << "methods = " << join(c.methods, [](Method m) { return std::string(to_string(m)); }) << '\n'
        << "seed = " << c.seed << '\n'
        << "conservative = " << (c.conservative ? "true" : "false") << '\n';
    return out.str();
}

void write_sim_report_csv(const SimReport& report, std::ostream& out) {
    out << "method,m,reps,rejections,degenerate,rejection_rate,mc_standard_error\n";
    for (const auto& c : report.cells)
        out << to_string(c.method) << ',' << c.m << ',' << c.reps << ',' << c.rejections << ',' << c.degenerate << ','
            << format_double(c.rejection_rate) << ',' << format_double(c.mc_standard_error) << '\n';
}

void to_json(nlohmann::json& j, const SimConfig& c) {
    std::vector<std::string> methods;
    for (auto m : c.methods) methods.emplace_back(to_string(m));
    j = nlohmann::json{{"name", c.name},
                       {"n", c.n},
                       {"jumps", c.jumps},
                       {"l_min", c.l_min},
                       {"mean_range", {c.mean_lo, c.mean_hi}},
                       {"noise",
                        {{"family", to_string(c.noise.family)},
                         {"ma_coeffs", c.noise.ma_coeffs},
                         {"ar_phi", c.noise.ar_phi}}},
                       {"reps", c.reps},
                       {"m_list", c.m_list},
                       {"alpha", c.alpha},
                       {"methods", methods},
                       {"seed", c.seed},
                       {"conservative", c.conservative}};
}

void to_json(nlohmann::json& j, const SimReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"method", to_string(c.method)},
                         {"m", c.m},
                         {"reps", c.reps},
                         {"rejections", c.rejections},
                         {"degenerate", c.degenerate},
                         {"rejection_rate", c.rejection_rate},
                         {"mc_standard_error", c.mc_standard_error}});
    nlohmann::json w = nlohmann::json::array();
    for (const auto& s : r.w_estimates)
        w.push_back({{"m", s.m}, {"mean_w_diff", s.mean_w_diff}, {"mean_w_eve", s.mean_w_eve}});
    j = nlohmann::json{{"schema", kSimSchema},
                       {"config", r.config},
                       {"profile",
                        {{"jumps", r.profile_jumps},
                         {"min_segment_length", r.profile_min_segment},
                         {"jump_energy", r.jump_energy},
                         {"true_w", r.true_w}}},
                       {"cells", cells},
                       {"w_estimates", w}};
}

void to_json(nlohmann::json& j, const SipTestResult& r) {
    j = nlohmann::json{{"kind", "sip_test"},
                       {"variant", to_string(r.variant)},
                       {"conservative", r.conservative},
                       {"m", r.m},
                       {"n", r.n},
                       {"statistic", r.statistic},
                       {"df", r.df},
                       {"p_value", r.p_value},
                       {"gamma0_used", r.gamma0_used},
                       {"w_raw", r.w_raw},
                       {"w_used", r.w_used},
                       {"rho_hat", r.rho_hat}};
}

void from_json(const nlohmann::json& j, SipTestResult& r) {
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "sip1")
        r.variant = SipVariant::sip1;
    else if (variant == "sip2")
        r.variant = SipVariant::sip2;
    else
        throw std::invalid_argument("unknown SIP variant '" + variant + "'");
    j.at("conservative").get_to(r.conservative);
    j.at("m").get_to(r.m);
    j.at("n").get_to(r.n);
    j.at("statistic").get_to(r.statistic);
    j.at("df").get_to(r.df);
    j.at("p_value").get_to(r.p_value);
    j.at("gamma0_used").get_to(r.gamma0_used);
    j.at("w_raw").get_to(r.w_raw);
    j.at("w_used").get_to(r.w_used);
    j.at("rho_hat").get_to(r.rho_hat);
}

void to_json(nlohmann::json& j, const BaselineResult& r) {
    j = nlohmann::json{{"kind", "baseline_test"},
                       {"method", to_string(r.method)},
                       {"m", r.m},
                       {"statistic", r.statistic},
                       {"df", r.m},
                       {"p_value", r.p_value}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json make_envelope(const std::vector<std::string>& command, nlohmann::json payload,
                             const std::vector<std::string>& warnings) {
    return nlohmann::json{{"schema", kResultSchema},
                          {"command", command},
                          {"timestamp", utc_timestamp()},
                          {"payload", std::move(payload)},
                          {"warnings", warnings}};
}

}  // namespace sip
