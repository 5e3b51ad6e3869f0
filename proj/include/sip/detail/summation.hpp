#pragma once

#include <cmath>

namespace sip::detail {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) noexcept {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    void add(const CompensatedSum& other) noexcept {
        add(other.sum);
        add(other.comp);
    }

    [[nodiscard]] double value() const noexcept { return sum + comp; }
};

}  // namespace sip::detail
