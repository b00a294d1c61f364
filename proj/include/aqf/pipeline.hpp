#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "aqf/metrics.hpp"
#include "aqf/network.hpp"
#include "aqf/preprocess.hpp"
#include "aqf/timeseries.hpp"

namespace aqf {

// Scaler columns are the features plus the (pm25, pm10) targets; targets are
// appended when a custom feature subset leaves them out.
inline std::vector<std::string> scaler_columns_for(const std::vector<std::string>& features) {
    std::vector<std::string> cols = features;
    for (const char* target : {"pm25", "pm10"})
        if (std::find(cols.begin(), cols.end(), target) == cols.end()) cols.emplace_back(target);
    return cols;
}

struct PreparedData {
    ScalerParams scaler;       // fitted on the training rows only
    WindowedDataset train;
    WindowedDataset test;
    ObservationFrame train_frame;
    ObservationFrame test_frame;
};

inline PreparedData prepare_datasets(const ObservationFrame& cleaned,
                                     const std::vector<std::string>& features, int lookback,
                                     double train_fraction) {
    PreparedData out;
    auto [train_frame, test_frame] = chrono_split(cleaned, train_fraction);
    out.train_frame = std::move(train_frame);
    out.test_frame = std::move(test_frame);
    const auto cols = scaler_columns_for(features);
    out.scaler = fit_scaler(out.train_frame, cols);
    out.train = make_windows(transform(out.scaler, out.train_frame), cols, features, lookback);
    out.test = make_windows(transform(out.scaler, out.test_frame), cols, features, lookback);
    return out;
}

// Supervised windows for any frame under a trained model's scaler/features.
inline WindowedDataset windows_for_frame(const BiLstmNetwork& net, const ObservationFrame& frame) {
    return make_windows(transform(net.scaler, frame), net.scaler.columns, net.features,
                        net.lookback);
}

struct EvalOutput {
    MetricsReport report;
    std::vector<std::pair<double, double>> predictions;  // original units
    std::vector<std::pair<double, double>> truths;
};

// One-step predictions over every window of `frame`, scored against the
// observed next-step values. `scaled_units` scores in scaled space instead,
// comparable to training losses.
inline EvalOutput evaluate_model(const BiLstmNetwork& net, const ObservationFrame& frame,
                                 bool scaled_units = false) {
    const WindowedDataset data = windows_for_frame(net, frame);
    const int pm25_col = net.scaler.index_of("pm25");
    const int pm10_col = net.scaler.index_of("pm10");

    EvalOutput out;
    out.predictions.reserve(data.size());
    out.truths.reserve(data.size());
    ForwardCaches caches;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Eigen::Vector2d pred = network_forward(net, data.inputs[i], caches);
        if (scaled_units) {
            out.predictions.emplace_back(pred[0], pred[1]);
            out.truths.emplace_back(data.targets(static_cast<Eigen::Index>(i), 0),
                                    data.targets(static_cast<Eigen::Index>(i), 1));
        } else {
            out.predictions.emplace_back(inverse_value(net.scaler, pm25_col, pred[0]),
                                         inverse_value(net.scaler, pm10_col, pred[1]));
            const auto& rec = frame.records[i + static_cast<std::size_t>(net.lookback)];
            out.truths.emplace_back(rec.pm25, rec.pm10);
        }
    }
    out.report = evaluate(out.predictions, out.truths, scaled_units ? "scaled" : "ug/m3");
    return out;
}

}  // namespace aqf
