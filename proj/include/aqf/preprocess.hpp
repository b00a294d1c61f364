#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/timeseries.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Min-max scaling to [0, 1] with an exact inverse. Fitted on training rows
// only; the sigmoid output head requires targets in this range.
// ---------------------------------------------------------------------------

struct ScalerParams {
    std::vector<std::string> columns;
    Eigen::VectorXd mins;
    Eigen::VectorXd maxs;

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const ScalerParams& o) const {
        return columns == o.columns && mins == o.mins && maxs == o.maxs;
    }
};

inline Eigen::MatrixXd frame_matrix(const ObservationFrame& frame,
                                    const std::vector<std::string>& cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(frame.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto values = frame.column(cols[j]);
        for (std::size_t i = 0; i < values.size(); ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i];
    }
    return m;
}

inline ScalerParams fit_scaler(const ObservationFrame& frame,
                               const std::vector<std::string>& cols) {
    if (frame.empty()) throw_data("EmptyFrame", "cannot fit a scaler on an empty frame");
    for (const auto& c : cols)
        if (!frame.has_column(c)) throw_data("UnknownColumn", "no column named '" + c + "'");
    ScalerParams params;
    params.columns = cols;
    const Eigen::MatrixXd m = frame_matrix(frame, cols);
    params.mins = m.colwise().minCoeff();
    params.maxs = m.colwise().maxCoeff();
    return params;
}

inline double transform_value(const ScalerParams& p, int col, double v) {
    const double span = p.maxs[col] - p.mins[col];
    if (span == 0.0) return 0.0;  // constant column convention
    return (v - p.mins[col]) / span;
}

inline double inverse_value(const ScalerParams& p, int col, double v) {
    const double span = p.maxs[col] - p.mins[col];
    if (span == 0.0) return p.mins[col];
    return p.mins[col] + v * span;
}

inline Eigen::MatrixXd transform_matrix(const ScalerParams& p, const Eigen::MatrixXd& raw) {
    if (raw.cols() != static_cast<Eigen::Index>(p.columns.size()))
        throw_data("ShapeMismatch", "matrix has " + std::to_string(raw.cols()) +
                                        " columns, scaler expects " + std::to_string(p.columns.size()));
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j)
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            out(i, j) = transform_value(p, static_cast<int>(j), raw(i, j));
    return out;
}

inline Eigen::MatrixXd transform(const ScalerParams& p, const ObservationFrame& frame) {
    for (const auto& c : p.columns)
        if (!frame.has_column(c)) throw_data("ShapeMismatch", "frame lacks scaler column '" + c + "'");
    return transform_matrix(p, frame_matrix(frame, p.columns));
}

inline Eigen::MatrixXd inverse_transform(const ScalerParams& p, const Eigen::MatrixXd& scaled) {
    if (scaled.cols() != static_cast<Eigen::Index>(p.columns.size()))
        throw_data("ShapeMismatch", "matrix has " + std::to_string(scaled.cols()) +
                                        " columns, scaler expects " + std::to_string(p.columns.size()));
    Eigen::MatrixXd out(scaled.rows(), scaled.cols());
    for (Eigen::Index j = 0; j < scaled.cols(); ++j)
        for (Eigen::Index i = 0; i < scaled.rows(); ++i)
            out(i, j) = inverse_value(p, static_cast<int>(j), scaled(i, j));
    return out;
}

// ---------------------------------------------------------------------------
// Chronological split; no shuffling, temporal order preserved.
// ---------------------------------------------------------------------------

inline std::pair<ObservationFrame, ObservationFrame> chrono_split(const ObservationFrame& frame,
                                                                  double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw_data("DegenerateSplit", "train fraction must lie in (0, 1)");
    const std::size_t n = frame.size();
    const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * train_fraction);
    if (n_train == 0 || n_train == n)
        throw_data("DegenerateSplit", "split leaves an empty side (n=" + std::to_string(n) + ")");
    ObservationFrame train, test;
    train.records.assign(frame.records.begin(), frame.records.begin() + static_cast<long>(n_train));
    test.records.assign(frame.records.begin() + static_cast<long>(n_train), frame.records.end());
    if (frame.has_ratio()) {
        train.ratio.emplace(frame.ratio->begin(), frame.ratio->begin() + static_cast<long>(n_train));
        test.ratio.emplace(frame.ratio->begin() + static_cast<long>(n_train), frame.ratio->end());
    }
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Sliding-window supervised framing: lookback L of features, next-step
// (pm25, pm10) pair as the target.
// ---------------------------------------------------------------------------

struct WindowedDataset {
    // Window i as features x lookback; column t holds the feature vector at
    // step t, so sequences feed the recurrent layers without transposes.
    std::vector<Eigen::MatrixXd> inputs;
    Eigen::MatrixXd targets;  // n x 2, scaled (pm25, pm10)
    std::vector<std::string> feature_order;
    int lookback = 0;

    std::size_t size() const { return inputs.size(); }
};

inline WindowedDataset make_windows(const Eigen::MatrixXd& scaled,
                                    const std::vector<std::string>& matrix_columns,
                                    const std::vector<std::string>& features, int lookback) {
    if (lookback < 1) throw_data("SeriesTooShort", "lookback must be >= 1");
    if (scaled.cols() != static_cast<Eigen::Index>(matrix_columns.size()))
        throw_data("ShapeMismatch", "matrix/column-name size mismatch");
    const Eigen::Index n = scaled.rows();
    if (n <= lookback)
        throw_data("SeriesTooShort", "need more than lookback=" + std::to_string(lookback) +
                                         " rows, have " + std::to_string(n));

    auto col_of = [&](std::string_view name) {
        for (std::size_t j = 0; j < matrix_columns.size(); ++j)
            if (matrix_columns[j] == name) return static_cast<Eigen::Index>(j);
        throw_data("UnknownColumn", "matrix lacks column '" + std::string(name) + "'");
    };
    std::vector<Eigen::Index> feat_idx;
    feat_idx.reserve(features.size());
    for (const auto& f : features) feat_idx.push_back(col_of(f));
    const Eigen::Index pm25_col = col_of("pm25");
    const Eigen::Index pm10_col = col_of("pm10");

    WindowedDataset ds;
    ds.feature_order = features;
    ds.lookback = lookback;
    const Eigen::Index count = n - lookback;
    ds.targets.resize(count, 2);
    ds.inputs.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        Eigen::MatrixXd w(static_cast<Eigen::Index>(feat_idx.size()), lookback);
        for (Eigen::Index t = 0; t < lookback; ++t)
            for (std::size_t f = 0; f < feat_idx.size(); ++f)
                w(static_cast<Eigen::Index>(f), t) = scaled(i + t, feat_idx[f]);
        ds.inputs.push_back(std::move(w));
        ds.targets(i, 0) = scaled(i + lookback, pm25_col);
        ds.targets(i, 1) = scaled(i + lookback, pm10_col);
    }
    return ds;
}

}  // namespace aqf
