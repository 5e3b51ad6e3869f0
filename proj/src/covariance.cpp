#include "sip/covariance.hpp"

#include "sip/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace sip {

namespace {

constexpr double kGammaEps = 1e-12;
constexpr int kGammaMaxIter = 10000;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kGammaEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kGammaEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

Cholesky::Cholesky(const SymmetricMatrix& a) : dim_(a.dim()), lower_(a.dim() * a.dim(), 0.0) {
    for (std::size_t j = 0; j < dim_; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower_[j * dim_ + k] * lower_[j * dim_ + k];
        if (!(diag > 0.0))
            throw NotPositiveDefinite("Cholesky: nonpositive pivot at column " + std::to_string(j));
        const double ljj = std::sqrt(diag);
        lower_[j * dim_ + j] = ljj;
        for (std::size_t i = j + 1; i < dim_; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= lower_[i * dim_ + k] * lower_[j * dim_ + k];
            lower_[i * dim_ + j] = v / ljj;
        }
    }
}

std::vector<double> Cholesky::forward(std::span<const double> b) const {
    if (b.size() != dim_) throw std::invalid_argument("Cholesky: dimension mismatch");
    std::vector<double> y(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= lower_[i * dim_ + k] * y[k];
        y[i] = v / lower_[i * dim_ + i];
    }
    return y;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
    auto x = forward(b);
    for (std::size_t ii = dim_; ii-- > 0;) {
        double v = x[ii];
        for (std::size_t k = ii + 1; k < dim_; ++k) v -= lower_[k * dim_ + ii] * x[k];
        x[ii] = v / lower_[ii * dim_ + ii];
    }
    return x;
}

double Cholesky::inverse_quadratic(std::span<const double> b) const {
    const auto y = forward(b);
    double s = 0.0;
    for (double v : y) s += v * v;
    return s;
}

SigmaRho::SigmaRho(std::size_t m, double w) : w_(w), matrix_(m) {
    if (m < 1) throw std::invalid_argument("build_sigma_rho: m must be >= 1");
    if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("build_sigma_rho: w must be finite and >= 0 (clamp upstream)");
    // Each entry is (integer part) + w * (integer part). Both integer parts are
    // formed exactly, so the w-free terms cancel without rounding and the
    // (m,m) entry comes out as 6 + 4w to the last bit.
    const auto mi = static_cast<std::int64_t>(m);
    const std::int64_t ones0 = 2 * mi * mi + 6 * mi + 5;
    const std::int64_t ones1 = 2 * (mi * mi + 3 * mi + 2);
    const std::int64_t cross0 = 2 * mi + 3;
    const std::int64_t cross1 = 2 * (mi + 2);
    for (std::size_t i = 0; i < m; ++i) {
        const auto ei = static_cast<std::int64_t>(i + 1);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto ej = static_cast<std::int64_t>(j + 1);
            const std::int64_t base = (i == j ? 1 : 0) + ones0 - cross0 * (ei + ej) + 2 * ei * ej;
            const std::int64_t slope = ones1 - cross1 * (ei + ej) + 2 * ei * ej + 2 * std::min(ei, ej);
            const double v = static_cast<double>(base) + static_cast<double>(slope) * w;
            matrix_(i, j) = v;
            matrix_(j, i) = v;
        }
    }
}

double quadratic_statistic(std::span<const double> rho_hat, const SigmaRho& sigma, std::size_t n) {
    if (rho_hat.size() != sigma.m())
        throw std::invalid_argument("quadratic_statistic: rho_hat has length " + std::to_string(rho_hat.size()) +
                                    ", Sigma is " + std::to_string(sigma.m()) + "x" + std::to_string(sigma.m()));
    const Cholesky chol(sigma.matrix());
    return static_cast<double>(n) * chol.inverse_quadratic(rho_hat);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_q: a must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("regularized_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double x, std::size_t df) {
    if (df < 1) throw std::invalid_argument("chi_square_sf: df must be >= 1");
    if (!(x >= 0.0)) throw std::invalid_argument("chi_square_sf: x must be >= 0");
    if (std::isinf(x)) return 0.0;
    return regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

}  // namespace sip
