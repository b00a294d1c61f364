#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "aqf/errors.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// EPA Air Quality Index: piecewise-linear interpolation over breakpoint
// segments, composite = max of the pollutant sub-indices.
// ---------------------------------------------------------------------------

enum class Pollutant { Pm25, Pm10 };

inline Pollutant pollutant_from_name(std::string_view name) {
    if (name == "pm25") return Pollutant::Pm25;
    if (name == "pm10") return Pollutant::Pm10;
    throw_data("UnknownPollutant", "no breakpoints for pollutant '" + std::string(name) + "'");
}

enum class AqiCategory { Good, Moderate, UnhealthySensitive, Unhealthy, VeryUnhealthy, Hazardous };

inline std::string_view category_name(AqiCategory c) {
    switch (c) {
        case AqiCategory::Good: return "Good";
        case AqiCategory::Moderate: return "Moderate";
        case AqiCategory::UnhealthySensitive: return "UnhealthySensitive";
        case AqiCategory::Unhealthy: return "Unhealthy";
        case AqiCategory::VeryUnhealthy: return "VeryUnhealthy";
        case AqiCategory::Hazardous: return "Hazardous";
    }
    return "Good";
}

inline AqiCategory categorize(int index) {
    if (index < 0 || index > 500) throw_data("OutOfRange", "AQI must lie in [0, 500]");
    if (index <= 50) return AqiCategory::Good;
    if (index <= 100) return AqiCategory::Moderate;
    if (index <= 150) return AqiCategory::UnhealthySensitive;
    if (index <= 200) return AqiCategory::Unhealthy;
    if (index <= 300) return AqiCategory::VeryUnhealthy;
    return AqiCategory::Hazardous;
}

struct BreakpointSegment {
    double c_lo = 0.0, c_hi = 0.0;  // concentration bounds, ug/m3
    int i_lo = 0, i_hi = 0;         // index bounds
};

struct BreakpointTable {
    std::vector<BreakpointSegment> pm25;
    std::vector<BreakpointSegment> pm10;

    const std::vector<BreakpointSegment>& segments(Pollutant p) const {
        return p == Pollutant::Pm25 ? pm25 : pm10;
    }

    // The published EPA 24-hour breakpoints for PM2.5 (2012 standard) and
    // PM10. Versioned data, not code: a replacement table can be loaded from
    // JSON at runtime.
    static BreakpointTable epa_default() {
        BreakpointTable t;
        t.pm25 = {{0.0, 12.0, 0, 50},      {12.1, 35.4, 51, 100},   {35.5, 55.4, 101, 150},
                  {55.5, 150.4, 151, 200}, {150.5, 250.4, 201, 300}, {250.5, 350.4, 301, 400},
                  {350.5, 500.4, 401, 500}};
        t.pm10 = {{0.0, 54.0, 0, 50},      {55.0, 154.0, 51, 100},   {155.0, 254.0, 101, 150},
                  {255.0, 354.0, 151, 200}, {355.0, 424.0, 201, 300}, {425.0, 504.0, 301, 400},
                  {505.0, 604.0, 401, 500}};
        return t;
    }

    void validate() const {
        for (const auto* segs : {&pm25, &pm10}) {
            if (segs->empty()) throw_data("CorruptFile", "breakpoint table has an empty pollutant");
            if (segs->front().c_lo != 0.0 || segs->front().i_lo != 0)
                throw_data("CorruptFile", "first breakpoint segment must start at (0, 0)");
            if (segs->back().i_hi != 500)
                throw_data("CorruptFile", "last breakpoint segment must end at index 500");
            for (std::size_t i = 0; i < segs->size(); ++i) {
                const auto& s = (*segs)[i];
                if (!(s.c_lo < s.c_hi) || !(s.i_lo < s.i_hi))
                    throw_data("CorruptFile", "breakpoint segment bounds must increase");
                if (i > 0) {
                    const auto& prev = (*segs)[i - 1];
                    if (!(s.c_lo > prev.c_hi) || s.i_lo != prev.i_hi + 1)
                        throw_data("CorruptFile", "breakpoint segments must be contiguous");
                }
            }
        }
    }
};

namespace detail {

// EPA truncation convention: PM2.5 to one decimal, PM10 to whole ug/m3.
inline double truncate_concentration(Pollutant p, double c) {
    return p == Pollutant::Pm25 ? std::floor(c * 10.0) / 10.0 : std::floor(c);
}

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace detail

struct SubIndex {
    int value = 0;
    bool above_scale = false;  // concentration beyond the table; clamped to 500
};

inline SubIndex sub_index_ex(const BreakpointTable& table, Pollutant pollutant, double concentration) {
    if (!(concentration >= 0.0))
        throw_data("NegativeConcentration", "concentration must be >= 0");
    const double c = detail::truncate_concentration(pollutant, concentration);
    const auto& segs = table.segments(pollutant);
    if (c > segs.back().c_hi) return {500, true};
    for (const auto& s : segs) {
        if (c >= s.c_lo && c <= s.c_hi) {
            const double index =
                (s.i_hi - s.i_lo) / (s.c_hi - s.c_lo) * (c - s.c_lo) + s.i_lo;
            return {detail::round_half_up(index), false};
        }
    }
    // Truncated concentrations always land in a segment of a valid table.
    throw_data("CorruptFile", "breakpoint table has a gap at concentration " + std::to_string(c));
}

inline int sub_index(const BreakpointTable& table, Pollutant pollutant, double concentration) {
    return sub_index_ex(table, pollutant, concentration).value;
}

struct AqiResult {
    int sub_index_pm25 = 0;
    int sub_index_pm10 = 0;
    int composite = 0;
    Pollutant dominant = Pollutant::Pm25;  // ties resolve to PM2.5
    AqiCategory category = AqiCategory::Good;
    bool above_scale = false;
};

inline AqiResult composite_aqi(const BreakpointTable& table, double pm25, double pm10) {
    const SubIndex s25 = sub_index_ex(table, Pollutant::Pm25, pm25);
    const SubIndex s10 = sub_index_ex(table, Pollutant::Pm10, pm10);
    AqiResult res;
    res.sub_index_pm25 = s25.value;
    res.sub_index_pm10 = s10.value;
    res.composite = std::max(s25.value, s10.value);
    res.dominant = s25.value >= s10.value ? Pollutant::Pm25 : Pollutant::Pm10;
    res.category = categorize(res.composite);
    res.above_scale = s25.above_scale || s10.above_scale;
    return res;
}

// ---------------------------------------------------------------------------
// AQI over a concentration stream: instantaneous, or the trailing 24-hour
// mean concentration (the default for hourly forecasts).
// ---------------------------------------------------------------------------

enum class AqiMode { Instant, Trailing24h };

inline std::string_view aqi_mode_name(AqiMode m) {
    return m == AqiMode::Instant ? "instant" : "trailing24h";
}

inline AqiMode aqi_mode_from_name(std::string_view name) {
    if (name == "instant") return AqiMode::Instant;
    if (name == "trailing24h") return AqiMode::Trailing24h;
    throw_usage("BadAqiMode", "aqi mode must be 'instant' or 'trailing24h'");
}

// Feeds hourly (pm25, pm10) pairs and yields the AQI of either the current
// hour or the trailing up-to-24-hour mean.
class AqiTracker {
public:
    AqiTracker(const BreakpointTable& table, AqiMode mode) : table_(table), mode_(mode) {}

    // Seed with already-observed history (most recent last).
    void seed(double pm25, double pm10) { push_window(pm25, pm10); }

    AqiResult step(double pm25, double pm10) {
        push_window(pm25, pm10);
        if (mode_ == AqiMode::Instant) return composite_aqi(table_, pm25, pm10);
        double s25 = 0.0, s10 = 0.0;
        for (const auto& [a, b] : window_) {
            s25 += a;
            s10 += b;
        }
        const double n = static_cast<double>(window_.size());
        return composite_aqi(table_, s25 / n, s10 / n);
    }

private:
    void push_window(double pm25, double pm10) {
        window_.emplace_back(pm25, pm10);
        while (window_.size() > 24) window_.pop_front();
    }

    const BreakpointTable& table_;
    AqiMode mode_;
    std::deque<std::pair<double, double>> window_;
};

}  // namespace aqf
