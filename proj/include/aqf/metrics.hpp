#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aqf/errors.hpp"

namespace aqf {

struct MetricStats {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    bool r2_defined = true;  // false when the truth vector is constant
    std::size_t n = 0;
};

inline MetricStats compute_metrics(const std::vector<double>& truth,
                                   const std::vector<double>& pred) {
    if (truth.size() != pred.size())
        throw_data("LengthMismatch", "prediction/truth lengths differ");
    if (truth.empty()) throw_data("EmptyInput", "no samples to evaluate");

    MetricStats m;
    m.n = truth.size();
    double ss_res = 0.0, abs_sum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = pred[i] - truth[i];
        ss_res += e * e;
        abs_sum += std::abs(e);
        mean += truth[i];
    }
    mean /= static_cast<double>(m.n);
    double ss_tot = 0.0;
    for (double y : truth) ss_tot += (y - mean) * (y - mean);

    m.mse = ss_res / static_cast<double>(m.n);
    m.rmse = std::sqrt(m.mse);
    m.mae = abs_sum / static_cast<double>(m.n);
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - ss_res / ss_tot;
    } else {
        m.r2_defined = false;
        m.r2 = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

// Per-pollutant and pooled regression metrics for (pm25, pm10) pairs.
struct MetricsReport {
    MetricStats pooled;
    MetricStats pm25;
    MetricStats pm10;
    std::size_t n = 0;
    std::string units;
};

inline MetricsReport evaluate(const std::vector<std::pair<double, double>>& predictions,
                              const std::vector<std::pair<double, double>>& truths,
                              std::string units = "ug/m3") {
    if (predictions.size() != truths.size())
        throw_data("LengthMismatch", "prediction/truth lengths differ");
    if (predictions.empty()) throw_data("EmptyInput", "no samples to evaluate");
    std::vector<double> p25, p10, t25, t10, p_all, t_all;
    p25.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        p25.push_back(predictions[i].first);
        p10.push_back(predictions[i].second);
        t25.push_back(truths[i].first);
        t10.push_back(truths[i].second);
        p_all.push_back(predictions[i].first);
        p_all.push_back(predictions[i].second);
        t_all.push_back(truths[i].first);
        t_all.push_back(truths[i].second);
    }
    MetricsReport r;
    r.n = predictions.size();
    r.units = std::move(units);
    r.pm25 = compute_metrics(t25, p25);
    r.pm10 = compute_metrics(t10, p10);
    r.pooled = compute_metrics(t_all, p_all);
    return r;
}

}  // namespace aqf
