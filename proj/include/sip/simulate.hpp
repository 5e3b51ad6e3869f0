#pragma once

// Synthetic data (piecewise-constant means plus stationary noise) and the
// replicate engine for rejection-rate studies.
//
// Every replicate draws from its own random stream keyed by (seed, replicate
// index), and per-replicate outcomes are merged in replicate order, so a study
// gives bit-identical reports for any thread count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sip {

using Rng = std::mt19937_64;

/// Independent generator for stream `stream` under master seed `seed`.
[[nodiscard]] Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Stream index reserved for the mean profile of a study.
inline constexpr std::uint64_t kProfileStream = ~std::uint64_t{0};

struct MeanProfile {
    std::vector<double> theta;
    std::vector<std::size_t> changepoints;  // last 1-based index of segments 1..J
    std::vector<double> segment_means;      // J+1 values
    std::size_t min_segment_length = 0;

    /// W(theta) = sum_i (theta_i - theta_{i+1})^2 with circular wrap, i.e.
    /// including (mu_{J+1} - mu_1)^2.
    [[nodiscard]] double jump_energy() const;
};

/// Uniform over all placements of J changepoints whose J+1 segments have
/// length >= l_min; segment means IID Uniform[lo, hi] with adjacent equal
/// draws resampled. Throws InfeasibleDesign if (J+1) l_min > n.
[[nodiscard]] MeanProfile generate_mean_profile(std::size_t n, std::size_t jumps, std::size_t l_min,
                                                std::pair<double, double> range, Rng& rng);

enum class NoiseFamily { iid_gaussian, iid_t6_scaled, iid_exp_centered, ma, ar1 };

[[nodiscard]] std::string_view to_string(NoiseFamily f) noexcept;
[[nodiscard]] NoiseFamily parse_noise_family(std::string_view s);

struct NoiseSpec {
    NoiseFamily family = NoiseFamily::iid_gaussian;
    std::vector<double> ma_coeffs;  // omega_1..omega_q
    double ar_phi = 0.0;

    /// Lag-h autocovariance of the generated process (unit innovations).
    [[nodiscard]] double autocovariance(std::size_t h) const;
    [[nodiscard]] double variance() const { return autocovariance(0); }
};

/// n draws of the noise process. MA uses q pre-samples, AR(1) starts from the
/// stationary marginal and discards a 1000-step burn-in.
[[nodiscard]] std::vector<double> generate_noise(const NoiseSpec& spec, std::size_t n, Rng& rng);

/// rho_h = sum_j w_j w_{j+h} / sum_j w_j^2 with w_0 = 1, h = 1..q.
[[nodiscard]] std::vector<double> ma_autocorrelations(const std::vector<double>& omega);

enum class Method { sip1, sip2, box, oracle, p_oracle };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] Method parse_method(std::string_view s);

struct SimConfig {
    std::string name = "study";
    std::size_t n = 10000;
    std::size_t jumps = 100;
    std::size_t l_min = 20;
    double mean_lo = -5.0;
    double mean_hi = 5.0;
    NoiseSpec noise;
    std::size_t reps = 1000;
    std::vector<std::size_t> m_list{1, 2, 4, 8};
    double alpha = 0.05;
    std::vector<Method> methods{Method::sip1, Method::sip2, Method::box, Method::oracle, Method::p_oracle};
    std::uint64_t seed = 1;
    bool conservative = false;  // SIP methods use 2 * w_hat

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

struct SimCell {
    Method method = Method::sip2;
    std::size_t m = 0;
    std::size_t reps = 0;
    std::size_t rejections = 0;
    std::size_t degenerate = 0;  // counted as non-rejections
    double rejection_rate = 0.0;
    double mc_standard_error = 0.0;
};

/// Mean of the raw jump-energy estimates over replicates (NaN if the method
/// was not run or every replicate was degenerate).
struct WEstimateSummary {
    std::size_t m = 0;
    double mean_w_diff = 0.0;
    double mean_w_eve = 0.0;
};

struct SimReport {
    SimConfig config;
    std::size_t profile_jumps = 0;
    std::size_t profile_min_segment = 0;
    double jump_energy = 0.0;  // W(theta)
    double true_w = 0.0;       // W(theta) / (n gamma_0)
    std::vector<SimCell> cells;  // method-major, then m in m_list order
    std::vector<WEstimateSummary> w_estimates;
    double wall_time_seconds = 0.0;  // not part of serialised reports

    [[nodiscard]] const SimCell& cell(Method method, std::size_t m) const;
};

/// Outcome of one replicate, one slot per (method, m) cell.
struct ReplicateOutcome {
    std::vector<std::uint8_t> rejected;
    std::vector<std::uint8_t> degenerate;
    std::vector<double> statistic;  // NaN when degenerate
    std::vector<double> p_value;    // NaN when degenerate
    std::vector<double> w_diff;     // per m; NaN if unavailable
    std::vector<double> w_eve;      // per m; NaN if unavailable
};

[[nodiscard]] MeanProfile study_profile(const SimConfig& config);

[[nodiscard]] ReplicateOutcome simulate_replicate(const SimConfig& config, const MeanProfile& profile,
                                                  std::uint64_t replicate);

/// Runs all replicates; `threads` = 0 leaves the OpenMP default.
[[nodiscard]] SimReport run_rejection_study(const SimConfig& config, int threads = 0);

/// Serial reference implementation of run_rejection_study.
[[nodiscard]] SimReport run_rejection_study_serial(const SimConfig& config);

/// Runs the replicates (in parallel) and returns the raw outcomes in
/// replicate order.
[[nodiscard]] std::vector<ReplicateOutcome> run_replicates(const SimConfig& config, const MeanProfile& profile,
                                                           int threads = 0);

}  // namespace sip
