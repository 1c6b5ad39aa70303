#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crashlens {

// Time-indexed log-price observations. Times are trading-day indices:
// CSV ingestion assigns consecutive integers 0..n-1 from the window start,
// simulators may fill a fractional dt-grid. All model arithmetic treats
// them as reals.
struct PriceSeries {
    std::vector<double> times;
    std::vector<double> log_prices;
    std::vector<std::string> labels;  // optional ISO dates, empty or parallel to times

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    bool has_labels() const { return !labels.empty(); }

    void validate() const {
        if (times.size() != log_prices.size())
            throw std::invalid_argument("PriceSeries: times/log_prices length mismatch");
        if (!labels.empty() && labels.size() != times.size())
            throw std::invalid_argument("PriceSeries: labels length mismatch");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i]) || !std::isfinite(log_prices[i]))
                throw std::invalid_argument("PriceSeries: non-finite entry at position " +
                                            std::to_string(i));
            if (i > 0 && times[i] <= times[i - 1])
                throw std::invalid_argument("PriceSeries: times not strictly increasing at position " +
                                            std::to_string(i));
        }
    }
};

}  // namespace crashlens
