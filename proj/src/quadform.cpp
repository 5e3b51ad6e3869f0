#include "sip/quadform.hpp"

#include "sip/detail/summation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace sip {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr std::size_t kDenseCap = 1024;
constexpr double kEquationTol = 1e-10;

void require_lag_range(std::size_t n, std::size_t k_max) {
    if (k_max < 1 || k_max >= n)
        throw std::invalid_argument("compute_lag_diffs: need 1 <= k_max < n (k_max=" +
                                    std::to_string(k_max) + ", n=" + std::to_string(n) + ")");
}

// Accumulates (x_i - x_{i+h})^2 for i in [begin, end) into acc.
void accumulate_lag(std::span<const double> x, std::size_t h, std::size_t begin, std::size_t end,
                    detail::CompensatedSum& acc) {
    const std::size_t n = x.size();
    const std::size_t wrap = n - h;
    const std::size_t mid = std::min(end, std::max(begin, wrap));
    for (std::size_t i = begin; i < mid; ++i) {
        const double d = x[i] - x[i + h];
        acc.add(d * d);
    }
    for (std::size_t i = mid; i < end; ++i) {
        const double d = x[i] - x[i + h - n];
        acc.add(d * d);
    }
}

}  // namespace

LagDiffStats::LagDiffStats(std::vector<double> t, std::size_t n) : t_(std::move(t)), n_(n) {}

double LagDiffStats::at(std::size_t h) const {
    if (h < 1 || h > t_.size())
        throw std::out_of_range("LagDiffStats: lag " + std::to_string(h) + " outside 1.." +
                                std::to_string(t_.size()));
    return t_[h - 1];
}

ShiftImmuneCoefficients::ShiftImmuneCoefficients(std::vector<double> a)
    : ShiftImmuneCoefficients(std::move(a), 0.0) {}

ShiftImmuneCoefficients::ShiftImmuneCoefficients(std::vector<double> a, double a0)
    : a_(std::move(a)), a0_(a0) {
    for (double v : a_)
        if (!std::isfinite(v)) throw std::invalid_argument("ShiftImmuneCoefficients: non-finite entry");
}

ShiftImmuneCoefficients ShiftImmuneCoefficients::with_diagonal_balance(std::vector<double> a) {
    double s = 0.0;
    for (double v : a) s += v;
    return ShiftImmuneCoefficients(std::move(a), -2.0 * s);
}

bool ShiftImmuneCoefficients::in_shift_immune_class(double rel_tol) const {
    double sum = 0.0, sum_abs = 0.0, moment = 0.0, moment_abs = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double h = static_cast<double>(i + 1);
        sum += a_[i];
        sum_abs += std::fabs(a_[i]);
        moment += h * a_[i];
        moment_abs += h * std::fabs(a_[i]);
    }
    if (sum_abs == 0.0) return true;
    return std::fabs(sum) <= rel_tol * sum_abs && std::fabs(moment) <= rel_tol * moment_abs;
}

ShiftImmuneCoefficients ShiftImmuneCoefficients::padded(std::size_t new_order) const {
    if (new_order < a_.size()) throw std::invalid_argument("padded: cannot shrink coefficient vector");
    std::vector<double> out(a_);
    out.resize(new_order, 0.0);
    return ShiftImmuneCoefficients(std::move(out), a0_);
}

double ToeplitzRow::quadratic_form(std::span<const double> x) const {
    if (x.size() != coeffs.size()) throw std::invalid_argument("ToeplitzRow: dimension mismatch");
    const std::size_t n = x.size();
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += coeffs[i > j ? i - j : j - i] * x[j];
        acc.add(x[i] * row);
    }
    return acc.value();
}

LagDiffStats compute_lag_diffs(const TimeSeries& x, std::size_t k_max) {
    const std::size_t n = x.size();
    require_lag_range(n, k_max);
    const auto values = x.values();
    const std::size_t blocks = (n + kBlock - 1) / kBlock;

    std::vector<detail::CompensatedSum> partial(blocks * k_max);
    const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (blocks > 1 && !omp_in_parallel())
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t end = std::min(n, begin + kBlock);
        for (std::size_t h = 1; h <= k_max; ++h)
            accumulate_lag(values, h, begin, end, partial[static_cast<std::size_t>(b) * k_max + h - 1]);
    }

    std::vector<double> t(k_max);
    for (std::size_t h = 0; h < k_max; ++h) {
        detail::CompensatedSum total;
        for (std::size_t b = 0; b < blocks; ++b) total.add(partial[b * k_max + h]);
        t[h] = total.value();
    }
    return LagDiffStats(std::move(t), n);
}

LagDiffStats compute_lag_diffs_reference(const TimeSeries& x, std::size_t k_max) {
    const std::size_t n = x.size();
    require_lag_range(n, k_max);
    std::vector<double> t(k_max);
    for (std::size_t h = 1; h <= k_max; ++h) {
        detail::CompensatedSum acc;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - x.circular(i, h);
            acc.add(d * d);
        }
        t[h - 1] = acc.value();
    }
    return LagDiffStats(std::move(t), n);
}

double quadratic_form_from_t(const ShiftImmuneCoefficients& a, const LagDiffStats& t) {
    if (a.order() > t.k_max())
        throw std::invalid_argument("quadratic_form_from_t: coefficient order " + std::to_string(a.order()) +
                                    " exceeds available lags " + std::to_string(t.k_max()));
    detail::CompensatedSum acc;
    const auto coef = a.a();
    const auto tv = t.values();
    for (std::size_t h = 0; h < coef.size(); ++h) acc.add(-coef[h] * tv[h]);
    return acc.value();
}

ToeplitzRow build_dense_circulant(const ShiftImmuneCoefficients& a, std::size_t n) {
    const std::size_t order = a.order();
    if (2 * order >= n)
        throw std::invalid_argument("build_dense_circulant: need 2L < n (L=" + std::to_string(order) +
                                    ", n=" + std::to_string(n) + ")");
    if (n > kDenseCap) throw std::invalid_argument("build_dense_circulant: n above dense oracle cap");
    ToeplitzRow row{std::vector<double>(n, 0.0)};
    row.coeffs[0] = a.a0();
    const auto coef = a.a();
    for (std::size_t h = 1; h <= order; ++h) {
        row.coeffs[h] = coef[h - 1];
        row.coeffs[n - h] = coef[h - 1];
    }
    return row;
}

bool check_theta_annihilating(const ToeplitzRow& row, std::size_t l_min) {
    const std::size_t n = row.size();
    if (l_min < 1 || 2 * l_min >= n)
        throw std::invalid_argument("check_theta_annihilating: need 1 <= L < n/2");
    const auto& a = row.coeffs;
    const std::size_t L = l_min;

    double diag = a[0];
    double moment = 0.0;
    for (std::size_t h = 1; h <= L; ++h) {
        diag += 2.0 * a[h];
        moment += static_cast<double>(h) * a[h];
    }
    if (std::fabs(diag) > kEquationTol || std::fabs(moment) > kEquationTol) return false;

    for (std::size_t h = L + 1; h + L + 1 <= n; ++h)
        if (std::fabs(a[h]) > kEquationTol) return false;

    double tail = 0.0;
    for (std::size_t k = 0; k < L; ++k) tail += static_cast<double>(L - k) * a[n - L + k];
    return std::fabs(tail) <= kEquationTol;
}

std::vector<double> project_onto_shift_immune(std::span<const double> v) {
    const std::size_t len = v.size();
    if (len < 3) throw std::invalid_argument("project_onto_shift_immune: length must be >= 3");
    const double k = static_cast<double>(len);
    const double s1 = k * (k + 1.0) / 2.0;
    const double s2 = k * (k + 1.0) * (2.0 * k + 1.0) / 6.0;
    double z1 = 0.0, z2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        z1 += v[i];
        z2 += static_cast<double>(i + 1) * v[i];
    }
    // (Z'Z)^{-1} Z'v with Z = [1, eta].
    const double det = k * s2 - s1 * s1;
    const double c0 = (s2 * z1 - s1 * z2) / det;
    const double c1 = (k * z2 - s1 * z1) / det;
    std::vector<double> out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = v[i] - c0 - c1 * static_cast<double>(i + 1);
    return out;
}

}  // namespace sip
