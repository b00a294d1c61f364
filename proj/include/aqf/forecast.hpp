#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aqf/aqi.hpp"
#include "aqf/errors.hpp"
#include "aqf/network.hpp"
#include "aqf/preprocess.hpp"
#include "aqf/timeseries.hpp"

namespace aqf {

struct ForecastStep {
    std::int64_t timestamp = 0;
    double pm25 = 0.0;  // ug/m3
    double pm10 = 0.0;  // ug/m3
    AqiResult aqi;
};

namespace detail {

struct TargetSlots {
    int pm25_feature = -1;  // row in the feature window, -1 when absent
    int pm10_feature = -1;
    int pm25_scaler = -1;   // column in the scaler
    int pm10_scaler = -1;
};

inline TargetSlots find_target_slots(const BiLstmNetwork& net) {
    TargetSlots s;
    for (std::size_t i = 0; i < net.features.size(); ++i) {
        if (net.features[i] == "pm25") s.pm25_feature = static_cast<int>(i);
        if (net.features[i] == "pm10") s.pm10_feature = static_cast<int>(i);
    }
    s.pm25_scaler = net.scaler.index_of("pm25");
    s.pm10_scaler = net.scaler.index_of("pm10");
    if (s.pm25_scaler < 0 || s.pm10_scaler < 0)
        throw_data("ShapeMismatch", "model scaler lacks the pm25/pm10 target columns");
    return s;
}

}  // namespace detail

// One-step-ahead forecasts in original units; steps > 1 feeds predictions back
// into the pm25/pm10 input slots while every other feature holds its last
// observed value.
inline std::vector<ForecastStep> predict(const BiLstmNetwork& net, const ObservationFrame& frame,
                                         int steps, const BreakpointTable& table,
                                         AqiMode mode = AqiMode::Trailing24h) {
    if (steps < 1) throw_usage("BadConfig", "steps must be >= 1");
    const int lookback = net.lookback;
    if (static_cast<int>(frame.size()) < lookback)
        throw_data("InsufficientHistory",
                   "need at least lookback=" + std::to_string(lookback) + " trailing rows");

    const auto slots = detail::find_target_slots(net);

    // Scale the trailing lookback rows over the scaler's columns.
    ObservationFrame tail;
    tail.records.assign(frame.records.end() - lookback, frame.records.end());
    const Eigen::MatrixXd scaled = transform(net.scaler, tail);  // lookback x k

    // Feature window, features x lookback.
    Eigen::MatrixXd window(net.feature_count(), lookback);
    for (int t = 0; t < lookback; ++t)
        for (int f = 0; f < net.feature_count(); ++f)
            window(f, t) = scaled(t, net.scaler.index_of(net.features[f]));

    if (steps > 1 && (slots.pm25_feature < 0 || slots.pm10_feature < 0))
        throw_data("ShapeMismatch",
                   "multi-step forecasting requires pm25 and pm10 among the input features");

    AqiTracker tracker(table, mode);
    // Seed the trailing-mean window with the observed history before the
    // forecast horizon (all but the step being predicted).
    if (mode == AqiMode::Trailing24h) {
        const std::size_t seed_n = std::min<std::size_t>(frame.size(), 23);
        for (std::size_t i = frame.size() - seed_n; i < frame.size(); ++i)
            tracker.seed(frame.records[i].pm25, frame.records[i].pm10);
    }

    std::vector<ForecastStep> out;
    out.reserve(static_cast<std::size_t>(steps));
    ForwardCaches caches;
    std::int64_t ts = frame.records.back().timestamp;
    for (int s = 0; s < steps; ++s) {
        const Eigen::Vector2d scaled_pred = network_forward(net, window, caches);
        ForecastStep step;
        ts += 3600;
        step.timestamp = ts;
        step.pm25 = inverse_value(net.scaler, slots.pm25_scaler, scaled_pred[0]);
        step.pm10 = inverse_value(net.scaler, slots.pm10_scaler, scaled_pred[1]);
        step.aqi = tracker.step(step.pm25, step.pm10);
        out.push_back(step);

        if (s + 1 < steps) {
            // Slide the window: repeat the last feature vector, then overwrite
            // the pollutant slots with the scaled predictions.
            const Eigen::VectorXd last = window.col(lookback - 1);
            window.leftCols(lookback - 1) = window.rightCols(lookback - 1).eval();
            window.col(lookback - 1) = last;
            window(slots.pm25_feature, lookback - 1) = scaled_pred[0];
            window(slots.pm10_feature, lookback - 1) = scaled_pred[1];
        }
    }
    return out;
}

}  // namespace aqf
