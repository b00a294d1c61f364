#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqf/aqi.hpp"
#include "aqf/errors.hpp"
#include "aqf/forecast.hpp"
#include "aqf/metrics.hpp"
#include "aqf/numfmt.hpp"
#include "aqf/stats.hpp"
#include "aqf/timeseries.hpp"
#include "aqf/training.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Breakpoint tables as data: {"pm25": [{c_lo, c_hi, i_lo, i_hi}, ...], ...}
// ---------------------------------------------------------------------------

inline BreakpointTable breakpoint_table_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_data("CorruptFile", std::string("breakpoint table is not valid JSON: ") + e.what());
    }
    BreakpointTable t;
    try {
        const std::pair<const char*, std::vector<BreakpointSegment>*> sections[] = {
            {"pm25", &t.pm25}, {"pm10", &t.pm10}};
        for (const auto& [name, segs] : sections) {
            for (const auto& seg : j.at(name)) {
                BreakpointSegment s;
                s.c_lo = seg.at("c_lo").get<double>();
                s.c_hi = seg.at("c_hi").get<double>();
                s.i_lo = seg.at("i_lo").get<int>();
                s.i_hi = seg.at("i_hi").get<int>();
                segs->push_back(s);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw_data("CorruptFile", std::string("breakpoint table structure is invalid: ") + e.what());
    }
    t.validate();
    return t;
}

inline nlohmann::json aqi_result_to_json(const AqiResult& r) {
    return nlohmann::json{{"sub_index_pm25", r.sub_index_pm25},
                          {"sub_index_pm10", r.sub_index_pm10},
                          {"composite", r.composite},
                          {"dominant", r.dominant == Pollutant::Pm25 ? "pm25" : "pm10"},
                          {"category", std::string(category_name(r.category))},
                          {"above_scale", r.above_scale}};
}

// ---------------------------------------------------------------------------
// Analysis report: correlation + ADF + grouped means, as one JSON document and
// one flat CSV per section for external plotting.
// ---------------------------------------------------------------------------

struct AnalysisReport {
    CorrelationMatrix correlation;
    std::vector<AdfReportEntry> adf;
    GroupedMeans rh_bins;
    GroupedMeans wd_sectors;
    GroupedMeans day_night;
};

inline AnalysisReport analyze_frame(const ObservationFrame& frame, double adf_threshold = 0.05) {
    AnalysisReport r{.correlation = pearson_corr_matrix(
                         frame, {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"}),
                     .adf = adf_report(frame, adf_threshold),
                     .rh_bins = grouped_means(frame, Grouping::RhBins),
                     .wd_sectors = grouped_means(frame, Grouping::WdSectors),
                     .day_night = grouped_means(frame, Grouping::DayNight)};
    return r;
}

inline nlohmann::json grouped_means_to_json(const GroupedMeans& g) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& s : g.groups)
        groups.push_back({{"group", s.name},
                          {"mean_pm25", s.mean_pm25},
                          {"mean_pm10", s.mean_pm10},
                          {"count", s.count}});
    return nlohmann::json{{"label", g.label}, {"total", g.total}, {"groups", groups}};
}

inline nlohmann::json analysis_to_json(const AnalysisReport& r) {
    nlohmann::json corr_matrix = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.correlation.r.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < r.correlation.r.cols(); ++j)
            row.push_back(r.correlation.r(i, j));  // NaN serializes as null
        corr_matrix.push_back(row);
    }
    nlohmann::json adf = nlohmann::json::array();
    for (const auto& e : r.adf) {
        nlohmann::json entry{{"column", e.column}};
        if (e.result) {
            entry["statistic"] = e.result->statistic;
            entry["p_value"] = e.result->p_value;
            entry["lags"] = e.result->lags_used;
            entry["n_obs"] = e.result->n_obs;
            entry["verdict"] = e.result->stationary ? "Stationary" : "NonStationary";
        } else {
            entry["error"] = e.error_code;
        }
        adf.push_back(entry);
    }
    return nlohmann::json{
        {"correlation", {{"columns", r.correlation.columns}, {"matrix", corr_matrix}}},
        {"adf", adf},
        {"groups",
         {{"rh_bins", grouped_means_to_json(r.rh_bins)},
          {"wd_sectors", grouped_means_to_json(r.wd_sectors)},
          {"day_night", grouped_means_to_json(r.day_night)}}}};
}

inline std::string correlation_csv(const CorrelationMatrix& c) {
    std::ostringstream out;
    out << "column";
    for (const auto& name : c.columns) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < c.columns.size(); ++i) {
        out << c.columns[i];
        for (std::size_t j = 0; j < c.columns.size(); ++j) {
            const double v = c.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out << ',' << (std::isfinite(v) ? format_double(v) : "NaN");
        }
        out << '\n';
    }
    return out.str();
}

inline std::string adf_csv(const std::vector<AdfReportEntry>& entries) {
    std::ostringstream out;
    out << "column,statistic,p_value,lags,n_obs,verdict\n";
    for (const auto& e : entries) {
        out << e.column << ',';
        if (e.result) {
            out << format_double(e.result->statistic) << ',' << format_double(e.result->p_value)
                << ',' << e.result->lags_used << ',' << e.result->n_obs << ','
                << (e.result->stationary ? "Stationary" : "NonStationary");
        } else {
            out << ",,,,Error:" << e.error_code;
        }
        out << '\n';
    }
    return out.str();
}

inline std::string groups_csv(const AnalysisReport& r) {
    std::ostringstream out;
    out << "grouping,group,mean_pm25,mean_pm10,count\n";
    for (const auto* g : {&r.rh_bins, &r.wd_sectors, &r.day_night}) {
        for (const auto& s : g->groups) {
            out << g->label << ',' << s.name << ','
                << (s.count ? format_double(s.mean_pm25) : "NaN") << ','
                << (s.count ? format_double(s.mean_pm10) : "NaN") << ',' << s.count << '\n';
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Metrics / training log / forecast artifacts
// ---------------------------------------------------------------------------

inline nlohmann::json metric_stats_to_json(const MetricStats& m) {
    nlohmann::json j{{"mse", m.mse}, {"rmse", m.rmse}, {"mae", m.mae}, {"n", m.n}};
    if (m.r2_defined) j["r2"] = m.r2;
    else j["r2"] = nullptr;
    return j;
}

inline nlohmann::json metrics_to_json(const MetricsReport& r) {
    return nlohmann::json{{"pooled", metric_stats_to_json(r.pooled)},
                          {"pm25", metric_stats_to_json(r.pm25)},
                          {"pm10", metric_stats_to_json(r.pm10)},
                          {"n", r.n},
                          {"units", r.units}};
}

// Deterministic by default; wall-clock seconds only on request, since timing
// would make otherwise identical runs produce different bytes.
inline std::string training_log_csv(const TrainingLog& log, bool include_seconds = false) {
    std::ostringstream out;
    out << (include_seconds ? "epoch,mean_loss,seconds\n" : "epoch,mean_loss\n");
    for (const auto& e : log.epochs) {
        out << e.epoch << ',' << format_double(e.mean_loss);
        if (include_seconds) out << ',' << format_double(e.seconds);
        out << '\n';
    }
    return out.str();
}

inline std::string forecast_csv(const std::vector<ForecastStep>& steps) {
    std::ostringstream out;
    out << "timestamp,pm25,pm10,aqi,category\n";
    for (const auto& s : steps) {
        out << format_timestamp(s.timestamp) << ',' << format_double(s.pm25) << ','
            << format_double(s.pm10) << ',' << s.aqi.composite << ','
            << category_name(s.aqi.category) << '\n';
    }
    return out.str();
}

}  // namespace aqf
