#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sip {

/// Observed series X_1..X_n. Construction rejects empty input and
/// non-finite values. Lag operations on a TimeSeries wrap around: X_{n+i}
/// reads X_i.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Value at 0-based position i + lag, wrapped modulo n.
    [[nodiscard]] double circular(std::size_t i, std::size_t lag) const noexcept {
        std::size_t j = i + lag;
        while (j >= values_.size()) j -= values_.size();
        return values_[j];
    }

private:
    std::vector<double> values_;
};

}  // namespace sip
