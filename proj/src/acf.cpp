#include "sip/acf.hpp"

#include "sip/covariance.hpp"
#include "sip/errors.hpp"
#include "sip/estimators.hpp"
#include "sip/format.hpp"
#include "sip/portmanteau.hpp"
#include "sip/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace sip {

namespace {

constexpr double kZ975 = 1.96;

void emit_csv(const AcfData& d, std::ostream& out) {
    out << "lag,value,bound_lo,bound_hi\n";
    for (std::size_t h = 0; h < d.values.size(); ++h)
        out << (h + 1) << ',' << format_double(d.values[h]) << ',' << format_double(-d.bound) << ','
            << format_double(d.bound) << '\n';
}

void emit_svg(const AcfData& d, std::ostream& out) {
    constexpr double width = 640, height = 360, left = 50, right = 20, top = 30, bottom = 40;
    double ymax = d.bound;
    for (double v : d.values) ymax = std::max(ymax, std::fabs(v));
    ymax = ymax > 0 ? ymax * 1.1 : 1.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const auto ypix = [&](double v) { return top + plot_h * (0.5 - v / (2.0 * ymax)); };
    const double step = plot_w / static_cast<double>(d.values.size() + 1);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<title>" << (d.kind == AcfKind::shift_immune ? "Shift-immune ACF" : "ACF") << " (n=" << d.n
        << ")</title>\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << ypix(0) << "\" x2=\"" << width - right << "\" y2=\"" << ypix(0)
        << "\" stroke=\"black\"/>\n";
    for (double b : {d.bound, -d.bound})
        out << "<line x1=\"" << left << "\" y1=\"" << ypix(b) << "\" x2=\"" << width - right << "\" y2=\""
            << ypix(b) << "\" stroke=\"blue\" stroke-dasharray=\"6,4\"/>\n";
    for (std::size_t h = 0; h < d.values.size(); ++h) {
        const double x = left + step * static_cast<double>(h + 1);
        out << "<line x1=\"" << x << "\" y1=\"" << ypix(0) << "\" x2=\"" << x << "\" y2=\"" << ypix(d.values[h])
            << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << height - bottom + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
            << (h + 1) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 6 << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">Lag</text>\n";
    out << "</svg>\n";
}

}  // namespace

std::string_view to_string(AcfKind k) noexcept {
    return k == AcfKind::shift_immune ? "shift_immune" : "classical";
}

AcfData shift_immune_acf(const TimeSeries& x, std::size_t s, AcfOrder order) {
    if (s < 1) throw std::invalid_argument("shift_immune_acf: max lag must be >= 1");
    const std::size_t n = x.size();
    const std::size_t extra = order == AcfOrder::lag_matched ? 0 : 2;
    require_lag_order(s + extra, n);
    require_lag_order(s, n);
    const auto t = compute_lag_diffs(x, s + extra + 2);

    AcfData d;
    d.kind = AcfKind::shift_immune;
    d.max_lag = s;
    d.n = n;
    d.values.resize(s);
    for (std::size_t h = 1; h <= s; ++h) {
        const auto est = estimate_gamma_unchecked(t, h + extra);
        if (!(est.gamma0_hat > 0.0))
            throw DegenerateVariance("shift-immune ACF: variance estimate not positive at lag " + std::to_string(h),
                                     est.gamma0_hat);
        d.values[h - 1] = est.gamma_hat[h - 1] / est.gamma0_hat;
    }

    const auto at_s = estimate_gamma_unchecked(t, s);
    if (!(at_s.gamma0_hat > 0.0))
        throw DegenerateVariance("shift-immune ACF: variance estimate not positive at lag " + std::to_string(s),
                                 at_s.gamma0_hat);
    d.w_hat_used = estimate_w_diff(t, s, at_s.gamma0_hat).w_clamped;
    // The (s,s) diagonal of Sigma_rho is 6 + 4w for every s; read it from there.
    const SigmaRho sigma(s, d.w_hat_used);
    d.bound = kZ975 * std::sqrt(sigma(s - 1, s - 1) / static_cast<double>(n));
    return d;
}

AcfData classical_acf(const TimeSeries& x, std::size_t s) {
    if (s < 1 || s >= x.size()) throw std::invalid_argument("classical_acf: need 1 <= s < n");
    AcfData d;
    d.kind = AcfKind::classical;
    d.max_lag = s;
    d.n = x.size();
    d.values = sample_autocorrelations(x.values(), s, true);
    d.bound = kZ975 / std::sqrt(static_cast<double>(d.n));
    return d;
}

void emit_acf(const AcfData& data, AcfFormat format, std::ostream& out) {
    switch (format) {
        case AcfFormat::csv: emit_csv(data, out); break;
        case AcfFormat::json: out << nlohmann::json(data).dump(2) << '\n'; break;
        case AcfFormat::svg: emit_svg(data, out); break;
    }
}

void to_json(nlohmann::json& j, const AcfData& d) {
    j = nlohmann::json{{"schema", kAcfSchema},     {"kind", to_string(d.kind)}, {"max_lag", d.max_lag},
                       {"n", d.n},                 {"values", d.values},        {"bound", d.bound},
                       {"w_hat_used", d.w_hat_used}};
}

void from_json(const nlohmann::json& j, AcfData& d) {
    if (j.at("schema").get<std::string>() != kAcfSchema) throw std::invalid_argument("AcfData: unknown schema");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "shift_immune")
        d.kind = AcfKind::shift_immune;
    else if (kind == "classical")
        d.kind = AcfKind::classical;
    else
        throw std::invalid_argument("AcfData: unknown kind '" + kind + "'");
    j.at("max_lag").get_to(d.max_lag);
    j.at("n").get_to(d.n);
    j.at("values").get_to(d.values);
    j.at("bound").get_to(d.bound);
    j.at("w_hat_used").get_to(d.w_hat_used);
}

}  // namespace sip
