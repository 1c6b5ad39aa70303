#include "crashlens/scaling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crashlens {

namespace {

// Centered moving average of width `width`, truncated at the ends. Even
// widths take one extra point on the right.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t width) {
    if (width <= 1) return values;
    const std::size_t n = values.size();
    const std::size_t left = (width - 1) / 2;
    const std::size_t right = width / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += values[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace

MinimaSet detect_minima(const PriceSeries& series, std::size_t window, std::size_t smoothing) {
    series.validate();
    if (window < 1) throw std::invalid_argument("detect_minima: window must be >= 1");
    if (smoothing < 1) throw std::invalid_argument("detect_minima: smoothing must be >= 1");
    const std::size_t n = series.size();
    if (n <= 2 * window + 1)
        throw std::invalid_argument("detect_minima: series too short for window " +
                                    std::to_string(window));
    const std::vector<double> smoothed = moving_average(series.log_prices, smoothing);
    MinimaSet result;
    result.window = window;
    for (std::size_t i = window; i + window < n; ++i) {
        bool is_min = true;
        for (std::size_t j = i - window; j <= i + window && is_min; ++j) {
            if (j == i) continue;
            // equal values break the tie toward the earlier index
            if (smoothed[j] < smoothed[i] || (smoothed[j] == smoothed[i] && j < i))
                is_min = false;
        }
        if (is_min) result.indices.push_back(i);
    }
    return result;
}

double estimate_lambda(double t1, double t2, double t3) {
    if (!(t1 < t2 && t2 < t3))
        throw std::domain_error("estimate_lambda: require t1 < t2 < t3");
    return (t2 - t1) / (t3 - t2);
}

double estimate_tc(double t1, double t2, double t3) {
    if (!(t1 < t2 && t2 < t3))
        throw std::domain_error("estimate_tc: require t1 < t2 < t3");
    const double d1 = t2 - t1;
    const double d2 = t3 - t2;
    if (!(d1 > d2))
        throw std::domain_error("estimate_tc: spacings must contract (lambda > 1)");
    return t3 + d2 * d2 / (d1 - d2);
}

double omega_from_lambda(double lambda) {
    if (!(lambda > 1.0)) throw std::domain_error("omega_from_lambda: require lambda > 1");
    return 2.0 * std::numbers::pi / std::log(lambda);
}

ScalingEstimate scaling_from_minima(const MinimaSet& minima, Aggregation aggregation) {
    const auto& idx = minima.indices;
    if (idx.size() < 3)
        throw std::invalid_argument("scaling_from_minima: need at least 3 minima");
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (idx[i] <= idx[i - 1])
            throw std::invalid_argument("scaling_from_minima: indices not strictly increasing");

    ScalingEstimate est;
    const std::size_t k = idx.size();
    est.source_triple = {static_cast<double>(idx[k - 3]), static_cast<double>(idx[k - 2]),
                         static_cast<double>(idx[k - 1])};
    if (aggregation == Aggregation::last_triple) {
        est.lambda = estimate_lambda(est.source_triple[0], est.source_triple[1], est.source_triple[2]);
        est.t_c = estimate_tc(est.source_triple[0], est.source_triple[1], est.source_triple[2]);
    } else {
        double lambda_sum = 0.0;
        double tc_sum = 0.0;
        const std::size_t triples = k - 2;
        for (std::size_t i = 0; i < triples; ++i) {
            const double t1 = static_cast<double>(idx[i]);
            const double t2 = static_cast<double>(idx[i + 1]);
            const double t3 = static_cast<double>(idx[i + 2]);
            lambda_sum += estimate_lambda(t1, t2, t3);
            tc_sum += estimate_tc(t1, t2, t3);
        }
        est.lambda = lambda_sum / static_cast<double>(triples);
        est.t_c = tc_sum / static_cast<double>(triples);
    }
    if (!(est.lambda > 1.0))
        throw std::domain_error("scaling_from_minima: aggregated lambda must exceed 1");
    est.omega = omega_from_lambda(est.lambda);
    return est;
}

}  // namespace crashlens
