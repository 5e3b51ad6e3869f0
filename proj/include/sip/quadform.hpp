#pragma once

// Circular lag-difference statistics and the circulant quadratic forms whose
// expectation does not depend on a piecewise-constant mean.

#include "sip/time_series.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sip {

/// T_h = sum_i (X_i - X_{i+h})^2 with circular indexing, for h = 1..k_max.
class LagDiffStats {
public:
    LagDiffStats(std::vector<double> t, std::size_t n);

    [[nodiscard]] std::size_t k_max() const noexcept { return t_.size(); }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return t_; }

    /// 1-based lag access, matching T_h.
    [[nodiscard]] double at(std::size_t h) const;

private:
    std::vector<double> t_;
    std::size_t n_;
};

/// Coefficients (a_1..a_L) of a circulant quadratic form together with the
/// diagonal entry a_0.
///
/// The default constructor sets a_0 = 0, which is the form used by every
/// estimator: for a in the class A°_L (sum a_h = 0 and sum h*a_h = 0) the
/// induced matrix annihilates every mean vector with segments of length >= L
/// and the form is free of the noise variance. `with_diagonal_balance` sets
/// a_0 = -2 * sum a_h instead, the unique choice that makes the circulant
/// matrix invariant under a global shift for arbitrary a.
class ShiftImmuneCoefficients {
public:
    explicit ShiftImmuneCoefficients(std::vector<double> a);
    static ShiftImmuneCoefficients with_diagonal_balance(std::vector<double> a);

    [[nodiscard]] std::span<const double> a() const noexcept { return a_; }
    [[nodiscard]] double a0() const noexcept { return a0_; }
    [[nodiscard]] std::size_t order() const noexcept { return a_.size(); }

    /// Both linear constraints of A°_L hold to `rel_tol` relative to the
    /// magnitude of the terms involved.
    [[nodiscard]] bool in_shift_immune_class(double rel_tol = 1e-12) const;

    /// Natural embedding A°_L -> A°_{L'} by trailing zeros (L' >= L).
    [[nodiscard]] ShiftImmuneCoefficients padded(std::size_t new_order) const;

private:
    ShiftImmuneCoefficients(std::vector<double> a, double a0);

    std::vector<double> a_;
    double a0_;
};

/// First row (a_0..a_{n-1}) of a symmetric Toeplitz matrix.
struct ToeplitzRow {
    std::vector<double> coeffs;

    [[nodiscard]] std::size_t size() const noexcept { return coeffs.size(); }

    /// x' A x with A_ij = coeffs[|i - j|]. Dense O(n^2); test oracle only.
    [[nodiscard]] double quadratic_form(std::span<const double> x) const;
};

/// T_1..T_{k_max}. Blocks of the index range are summed in parallel (OpenMP)
/// with compensated accumulation and merged in block order, so the result does
/// not depend on the thread count. Requires 1 <= k_max < n.
[[nodiscard]] LagDiffStats compute_lag_diffs(const TimeSeries& x, std::size_t k_max);

/// Single-threaded reference for compute_lag_diffs: one compensated pass per lag.
[[nodiscard]] LagDiffStats compute_lag_diffs_reference(const TimeSeries& x, std::size_t k_max);

/// -sum_{h=1..L} a_h T_h, which equals x' A_a x for the circulant matrix
/// built with a_0 = -2 sum a_h (and hence for every member of A°_L).
[[nodiscard]] double quadratic_form_from_t(const ShiftImmuneCoefficients& a, const LagDiffStats& t);

/// Row (a_0, a_1..a_L, 0..0, a_L..a_1) of length n. Requires 2L < n and
/// n <= 1024 (this is an O(n^2) oracle, never a production path).
[[nodiscard]] ToeplitzRow build_dense_circulant(const ShiftImmuneCoefficients& a, std::size_t n);

/// True iff the Toeplitz matrix given by `row` has theta' A theta = 0 for
/// every mean vector whose constant segments all have length >= l_min.
/// Checks the four linear characterisation equations to 1e-10 absolute.
[[nodiscard]] bool check_theta_annihilating(const ToeplitzRow& row, std::size_t l_min);

/// Orthogonal projection of v (length K >= 3) onto
/// {a : sum a_h = 0, sum h a_h = 0}.
[[nodiscard]] std::vector<double> project_onto_shift_immune(std::span<const double> v);

}  // namespace sip
