#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "crashlens/price_series.hpp"

namespace crashlens {

// Local minima of a (smoothed) log-price series, detected with a windowed
// strict-minimum rule.
struct MinimaSet {
    std::vector<std::size_t> indices;  // strictly increasing trading-day indices
    std::size_t window = 0;            // half-width used for detection
};

enum class Aggregation { last_triple, mean_over_triples };

// Scale ratio and accumulation point derived from consecutive minima.
struct ScalingEstimate {
    double lambda = 0.0;  // > 1
    double t_c = 0.0;     // accumulation point, ahead of the source triple
    double omega = 0.0;   // 2*pi / ln(lambda), derived
    std::array<double, 3> source_triple{};  // the three t_n used
};

// All interior indices i whose smoothed log-price is strictly below every
// other smoothed value in [i-window, i+window]; equal values are won by the
// earlier index. smoothing is a centered moving-average width (1 = none),
// truncated at the series ends. Requires series length > 2*window + 1.
MinimaSet detect_minima(const PriceSeries& series, std::size_t window, std::size_t smoothing);

// lambda = (t2 - t1) / (t3 - t2). Requires t1 < t2 < t3.
double estimate_lambda(double t1, double t2, double t3);

// t_c = (t2^2 - t3*t1) / (2*t2 - t1 - t3), evaluated in the algebraically
// identical form t3 + (t3 - t2)^2 / ((t2 - t1) - (t3 - t2)) which avoids the
// large-square cancellation. Requires t1 < t2 < t3 and lambda > 1.
double estimate_tc(double t1, double t2, double t3);

// omega = 2*pi / ln(lambda). Requires lambda > 1.
double omega_from_lambda(double lambda);

// Aggregates consecutive-minima triples into a ScalingEstimate. last_triple
// uses the three most recent minima; mean_over_triples averages lambda and
// the per-triple t_c arithmetically over all consecutive triples (omega is
// derived from the aggregated lambda). Requires >= 3 minima and lambda > 1
// for every triple involved.
ScalingEstimate scaling_from_minima(const MinimaSet& minima, Aggregation aggregation);

}  // namespace crashlens
