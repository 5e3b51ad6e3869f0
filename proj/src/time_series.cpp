#include "sip/time_series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sip {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("TimeSeries: empty series");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("TimeSeries: non-finite value at index " + std::to_string(i));
    }
}

}  // namespace sip
