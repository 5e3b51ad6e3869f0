#pragma once

#include <stdexcept>
#include <string>

namespace sip {

// Invalid arguments are reported with std::invalid_argument. The two error
// types below mark outcomes that callers (CLI, simulation engine) treat
// differently from a plain usage error.

/// A variance estimate came out nonpositive, so no autocorrelation or p-value
/// can be formed. `estimate()` holds the offending value.
class DegenerateVariance : public std::runtime_error {
public:
    DegenerateVariance(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}

    [[nodiscard]] double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// A simulation design that cannot be realised, e.g. (J+1)*L_min > n.
class InfeasibleDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky factorisation hit a nonpositive pivot.
class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sip
