#include "sip/simulate.hpp"

#include "sip/errors.hpp"
#include "sip/estimators.hpp"
#include "sip/portmanteau.hpp"
#include "sip/quadform.hpp"
#include "sip/time_series.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace sip {

namespace {

constexpr std::size_t kArBurnIn = 1000;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool is_sip(Method m) { return m == Method::sip1 || m == Method::sip2; }

std::size_t max_m(const SimConfig& c) { return *std::max_element(c.m_list.begin(), c.m_list.end()); }

SimReport aggregate(const SimConfig& config, const MeanProfile& profile, const std::vector<ReplicateOutcome>& outs) {
    SimReport rep;
    rep.config = config;
    rep.profile_jumps = profile.changepoints.size();
    rep.profile_min_segment = profile.min_segment_length;
    rep.jump_energy = profile.jump_energy();
    rep.true_w = rep.jump_energy / (static_cast<double>(config.n) * config.noise.variance());

    const std::size_t n_m = config.m_list.size();
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        for (std::size_t k = 0; k < n_m; ++k) {
            const std::size_t slot = mi * n_m + k;
            SimCell cell;
            cell.method = config.methods[mi];
            cell.m = config.m_list[k];
            cell.reps = outs.size();
            for (const auto& o : outs) {
                cell.rejections += o.rejected[slot];
                cell.degenerate += o.degenerate[slot];
            }
            const double p = static_cast<double>(cell.rejections) / static_cast<double>(cell.reps);
            cell.rejection_rate = p;
            cell.mc_standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(cell.reps));
            rep.cells.push_back(cell);
        }
    }

    for (std::size_t k = 0; k < n_m; ++k) {
        WEstimateSummary s;
        s.m = config.m_list[k];
        double sum1 = 0.0, sum2 = 0.0;
        std::size_t c1 = 0, c2 = 0;
        for (const auto& o : outs) {
            if (!std::isnan(o.w_diff[k])) {
                sum1 += o.w_diff[k];
                ++c1;
            }
            if (!std::isnan(o.w_eve[k])) {
                sum2 += o.w_eve[k];
                ++c2;
            }
        }
        s.mean_w_diff = c1 ? sum1 / static_cast<double>(c1) : kNaN;
        s.mean_w_eve = c2 ? sum2 / static_cast<double>(c2) : kNaN;
        rep.w_estimates.push_back(s);
    }
    return rep;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ splitmix64(stream);
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
        const std::uint64_t v = splitmix64(state);
        words[2 * i] = static_cast<std::uint32_t>(v);
        words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return Rng(seq);
}

double MeanProfile::jump_energy() const {
    if (segment_means.size() < 2) return 0.0;
    double w = 0.0;
    for (std::size_t j = 0; j < segment_means.size(); ++j) {
        const double d = segment_means[j] - segment_means[(j + 1) % segment_means.size()];
        w += d * d;
    }
    return w;
}

MeanProfile generate_mean_profile(std::size_t n, std::size_t jumps, std::size_t l_min,
                                  std::pair<double, double> range, Rng& rng) {
    if (n < 1) throw std::invalid_argument("generate_mean_profile: n must be >= 1");
    if (l_min < 1) throw std::invalid_argument("generate_mean_profile: l_min must be >= 1");
    if ((jumps + 1) * l_min > n)
        throw InfeasibleDesign("infeasible design: (J+1)*L_min = " + std::to_string((jumps + 1) * l_min) +
                               " exceeds n = " + std::to_string(n));
    if (jumps > 0 && !(range.first < range.second))
        throw InfeasibleDesign("infeasible design: distinct segment means need lo < hi");

    // A J-subset of {0..slack+J-1}, shifted, is a nondecreasing sequence in
    // [0, slack]; adding j*l_min gives a placement with every gap >= l_min.
    // This bijection makes the draw uniform over all valid placements.
    const std::size_t slack = n - (jumps + 1) * l_min;
    std::vector<std::size_t> pool(slack + jumps);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> picks;
    picks.reserve(jumps);
    std::sample(pool.begin(), pool.end(), std::back_inserter(picks), jumps, rng);

    MeanProfile p;
    p.changepoints.resize(jumps);
    for (std::size_t j = 0; j < jumps; ++j) p.changepoints[j] = (j + 1) * l_min + (picks[j] - j);

    std::uniform_real_distribution<double> unif(range.first, range.second);
    p.segment_means.resize(jumps + 1);
    for (std::size_t j = 0; j <= jumps; ++j) {
        double mu = unif(rng);
        while (j > 0 && mu == p.segment_means[j - 1]) mu = unif(rng);
        p.segment_means[j] = mu;
    }

    p.theta.resize(n);
    std::size_t begin = 0;
    p.min_segment_length = n;
    for (std::size_t j = 0; j <= jumps; ++j) {
        const std::size_t end = j < jumps ? p.changepoints[j] : n;
        std::fill(p.theta.begin() + static_cast<std::ptrdiff_t>(begin), p.theta.begin() + static_cast<std::ptrdiff_t>(end),
                  p.segment_means[j]);
        p.min_segment_length = std::min(p.min_segment_length, end - begin);
        begin = end;
    }
    return p;
}

std::string_view to_string(NoiseFamily f) noexcept {
    switch (f) {
        case NoiseFamily::iid_gaussian: return "iid_gaussian";
        case NoiseFamily::iid_t6_scaled: return "iid_t6_scaled";
        case NoiseFamily::iid_exp_centered: return "iid_exp_centered";
        case NoiseFamily::ma: return "ma";
        case NoiseFamily::ar1: return "ar1";
    }
    return "iid_gaussian";
}

NoiseFamily parse_noise_family(std::string_view s) {
    for (auto f : {NoiseFamily::iid_gaussian, NoiseFamily::iid_t6_scaled, NoiseFamily::iid_exp_centered,
                   NoiseFamily::ma, NoiseFamily::ar1})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown noise family '" + std::string(s) + "'");
}

double NoiseSpec::autocovariance(std::size_t h) const {
    switch (family) {
        case NoiseFamily::iid_gaussian:
        case NoiseFamily::iid_t6_scaled:
        case NoiseFamily::iid_exp_centered: return h == 0 ? 1.0 : 0.0;
        case NoiseFamily::ma: {
            const std::size_t q = ma_coeffs.size();
            if (h > q) return 0.0;
            const auto coef = [&](std::size_t j) { return j == 0 ? 1.0 : ma_coeffs[j - 1]; };
            double g = 0.0;
            for (std::size_t j = 0; j + h <= q; ++j) g += coef(j) * coef(j + h);
            return g;
        }
        case NoiseFamily::ar1: return std::pow(ar_phi, static_cast<double>(h)) / (1.0 - ar_phi * ar_phi);
    }
    return 0.0;
}

std::vector<double> generate_noise(const NoiseSpec& spec, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (spec.family) {
        case NoiseFamily::iid_gaussian:
            for (auto& v : out) v = normal(rng);
            break;
        case NoiseFamily::iid_t6_scaled: {
            std::student_t_distribution<double> t6(6.0);
            const double scale = std::sqrt(2.0 / 3.0);
            for (auto& v : out) v = scale * t6(rng);
            break;
        }
        case NoiseFamily::iid_exp_centered: {
            std::exponential_distribution<double> ex(1.0);
            for (auto& v : out) v = ex(rng) - 1.0;
            break;
        }
        case NoiseFamily::ma: {
            const auto& w = spec.ma_coeffs;
            const std::size_t q = w.size();
            std::vector<double> z(n + q);
            for (auto& v : z) v = normal(rng);
            for (std::size_t i = 0; i < n; ++i) {
                double e = z[i + q];
                for (std::size_t j = 1; j <= q; ++j) e += w[j - 1] * z[i + q - j];
                out[i] = e;
            }
            break;
        }
        case NoiseFamily::ar1: {
            const double phi = spec.ar_phi;
            if (!(std::fabs(phi) < 1.0)) throw std::invalid_argument("AR(1) noise requires |phi| < 1");
            double e = normal(rng) / std::sqrt(1.0 - phi * phi);
            for (std::size_t i = 0; i < kArBurnIn; ++i) e = phi * e + normal(rng);
            for (auto& v : out) {
                e = phi * e + normal(rng);
                v = e;
            }
            break;
        }
    }
    return out;
}

std::vector<double> ma_autocorrelations(const std::vector<double>& omega) {
    NoiseSpec spec{NoiseFamily::ma, omega, 0.0};
    std::vector<double> rho(omega.size());
    const double g0 = spec.variance();
    for (std::size_t h = 1; h <= omega.size(); ++h) rho[h - 1] = spec.autocovariance(h) / g0;
    return rho;
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::sip1: return "sip1";
        case Method::sip2: return "sip2";
        case Method::box: return "box";
        case Method::oracle: return "oracle";
        case Method::p_oracle: return "p_oracle";
    }
    return "sip2";
}

Method parse_method(std::string_view s) {
    for (auto m : {Method::sip1, Method::sip2, Method::box, Method::oracle, Method::p_oracle})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (m_list.empty()) throw std::invalid_argument("m_list must not be empty");
    if (methods.empty()) throw std::invalid_argument("methods must not be empty");
    for (std::size_t m : m_list) require_lag_order(m, n);
    if (noise.family == NoiseFamily::ar1 && !(std::fabs(noise.ar_phi) < 1.0))
        throw std::invalid_argument("AR(1) noise requires |phi| < 1");
    if (!(mean_lo <= mean_hi)) throw std::invalid_argument("mean range must satisfy lo <= hi");
}

const SimCell& SimReport::cell(Method method, std::size_t m) const {
    for (const auto& c : cells)
        if (c.method == method && c.m == m) return c;
    throw std::out_of_range("SimReport: no cell for " + std::string(to_string(method)) + ", m=" + std::to_string(m));
}

MeanProfile study_profile(const SimConfig& config) {
    config.validate();
    Rng rng = make_stream(config.seed, kProfileStream);
    return generate_mean_profile(config.n, config.jumps, config.l_min, {config.mean_lo, config.mean_hi}, rng);
}

ReplicateOutcome simulate_replicate(const SimConfig& config, const MeanProfile& profile, std::uint64_t replicate) {
    const std::size_t n_m = config.m_list.size();
    const std::size_t cells = config.methods.size() * n_m;
    ReplicateOutcome out;
    out.rejected.assign(cells, 0);
    out.degenerate.assign(cells, 0);
    out.statistic.assign(cells, kNaN);
    out.p_value.assign(cells, kNaN);
    out.w_diff.assign(n_m, kNaN);
    out.w_eve.assign(n_m, kNaN);

    Rng rng = make_stream(config.seed, replicate);
    std::vector<double> noise = generate_noise(config.noise, config.n, rng);
    std::vector<double> x(config.n);
    for (std::size_t i = 0; i < config.n; ++i) x[i] = profile.theta[i] + noise[i];

    const std::size_t top = max_m(config);
    const auto record = [&](std::size_t slot, double stat, double p) {
        out.statistic[slot] = stat;
        out.p_value[slot] = p;
        out.rejected[slot] = p < config.alpha ? 1 : 0;
    };

    const bool any_sip = std::any_of(config.methods.begin(), config.methods.end(), is_sip);
    std::optional<LagDiffStats> t;
    if (any_sip) t = compute_lag_diffs(TimeSeries(x), top + 2);

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method method = config.methods[mi];
        std::vector<double> r;
        try {
            switch (method) {
                case Method::box: r = sample_autocorrelations(x, top, true); break;
                case Method::oracle: r = sample_autocorrelations(noise, top, true); break;
                case Method::p_oracle:
                    r = sample_autocorrelations(segment_demean(x, profile.changepoints), top, false);
                    break;
                default: break;
            }
        } catch (const DegenerateVariance&) {
            for (std::size_t k = 0; k < n_m; ++k) out.degenerate[mi * n_m + k] = 1;
            continue;
        }

        for (std::size_t k = 0; k < n_m; ++k) {
            const std::size_t m = config.m_list[k];
            const std::size_t slot = mi * n_m + k;
            if (is_sip(method)) {
                const auto variant = method == Method::sip1 ? SipVariant::sip1 : SipVariant::sip2;
                try {
                    const auto res = sip_test(*t, m, variant, config.conservative);
                    record(slot, res.statistic, res.p_value);
                    (variant == SipVariant::sip1 ? out.w_diff : out.w_eve)[k] = res.w_raw;
                } catch (const DegenerateVariance&) {
                    out.degenerate[slot] = 1;
                }
            } else {
                const auto res = box_pierce_from_acf(r, config.n, m);
                record(slot, res.statistic, res.p_value);
            }
        }
    }
    return out;
}

std::vector<ReplicateOutcome> run_replicates(const SimConfig& config, const MeanProfile& profile, int threads) {
    std::vector<ReplicateOutcome> outs(config.reps);
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
    const auto reps = static_cast<std::int64_t>(config.reps);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
    for (std::int64_t r = 0; r < reps; ++r)
        outs[static_cast<std::size_t>(r)] = simulate_replicate(config, profile, static_cast<std::uint64_t>(r));
    return outs;
}

SimReport run_rejection_study(const SimConfig& config, int threads) {
    const auto start = std::chrono::steady_clock::now();
    const MeanProfile profile = study_profile(config);
    const auto outs = run_replicates(config, profile, threads);
    SimReport rep = aggregate(config, profile, outs);
    rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

SimReport run_rejection_study_serial(const SimConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const MeanProfile profile = study_profile(config);
    std::vector<ReplicateOutcome> outs;
    outs.reserve(config.reps);
    for (std::size_t r = 0; r < config.reps; ++r) outs.push_back(simulate_replicate(config, profile, r));
    SimReport rep = aggregate(config, profile, outs);
    rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace sip
