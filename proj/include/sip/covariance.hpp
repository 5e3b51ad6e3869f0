#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sip {

/// Row-major dense symmetric matrix, just enough for the m x m systems here.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }

private:
    std::size_t dim_;
    std::vector<double> data_;
};

/// Lower-triangular Cholesky factor of an SPD matrix. Throws
/// NotPositiveDefinite on a nonpositive pivot; no jitter is ever added.
class Cholesky {
public:
    explicit Cholesky(const SymmetricMatrix& a);

    /// Solves A x = b.
    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
    /// b' A^{-1} b via one forward substitution.
    [[nodiscard]] double inverse_quadratic(std::span<const double> b) const;

private:
    [[nodiscard]] std::vector<double> forward(std::span<const double> b) const;

    std::size_t dim_;
    std::vector<double> lower_;
};

/// Asymptotic covariance of sqrt(n) * rho_hat under the IID null, as a
/// function of the normalised jump energy w:
///
///   I + [(2m^2+6m+5) + 2(m^2+3m+2) w] 11' - [(2m+3) + 2(m+2) w](eta 1' + 1 eta')
///     + (2+2w) eta eta' + 2w H,   H_ij = min(i,j), eta = (1..m).
///
/// The (m,m) entry is always 6 + 4w.
class SigmaRho {
public:
    /// Requires m >= 1 and w >= 0 (callers clamp negative estimates).
    SigmaRho(std::size_t m, double w);

    [[nodiscard]] std::size_t m() const noexcept { return matrix_.dim(); }
    [[nodiscard]] double w() const noexcept { return w_; }
    [[nodiscard]] const SymmetricMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return matrix_(i, j); }

private:
    double w_;
    SymmetricMatrix matrix_;
};

[[nodiscard]] inline SigmaRho build_sigma_rho(std::size_t m, double w) { return SigmaRho(m, w); }

/// n * rho' Sigma^{-1} rho through a Cholesky solve.
[[nodiscard]] double quadratic_statistic(std::span<const double> rho_hat, const SigmaRho& sigma, std::size_t n);

/// Upper tail P(chi^2_df > x) = Q(df/2, x/2), the regularised upper
/// incomplete gamma function.
[[nodiscard]] double chi_square_sf(double x, std::size_t df);

/// Regularised upper incomplete gamma Q(a, x) for a > 0, x >= 0. Series
/// expansion below x < a + 1, Lentz continued fraction above.
[[nodiscard]] double regularized_gamma_q(double a, double x);

}  // namespace sip
