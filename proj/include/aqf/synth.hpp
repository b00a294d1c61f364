#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aqf/errors.hpp"
#include "aqf/rng.hpp"
#include "aqf/timeseries.hpp"

namespace aqf {

// Deterministic synthetic hourly dataset for desk-scale runs. The construction
// guarantees the properties the analysis and training suites assert:
//   - pm10 = base + diurnal sinusoid + daytime boost (hours 6-17) + noise,
//     floored at 1 and rounded to whole ug/m3 like real monitor readings;
//   - pm25 tracks pm10 through a fixed ratio plus small noise, so the two
//     columns correlate above 0.9;
//   - day-time PM means exceed night-time means (the injected boost);
//   - rh is anti-correlated with temp; wd is uniform on [0, 360);
//   - every column is mean-reverting, hence stationary under the ADF test.
struct SynthSpec {
    std::size_t rows = 5000;
    std::uint64_t seed = 7;
    std::int64_t start_timestamp = 1525132800;  // 2018-05-01 00:00:00
    double pm10_base = 70.0;
    double diurnal_amplitude = 30.0;
    double day_boost = 12.0;
    double noise_scale = 2.5;
    double pm_ratio = 0.4;  // target pm25/pm10
};

inline ObservationFrame synth_generate(const SynthSpec& spec) {
    if (spec.rows < 100) throw_usage("BadSpec", "need at least 100 rows");
    if (spec.pm_ratio <= 0.0) throw_usage("BadSpec", "pm ratio must be positive");
    if (spec.noise_scale < 0.0) throw_usage("BadSpec", "noise scale must be >= 0");
    if (spec.pm10_base - spec.diurnal_amplitude < 1.0)
        throw_usage("BadSpec", "base level must exceed the diurnal amplitude");

    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    Rng rng(spec.seed);
    ObservationFrame frame;
    frame.records.reserve(spec.rows);
    auto round1 = [](double v) { return std::round(v * 10.0) / 10.0; };

    for (std::size_t i = 0; i < spec.rows; ++i) {
        ObservationRecord r;
        r.timestamp = spec.start_timestamp + static_cast<std::int64_t>(i) * 3600;
        const int hour = hour_of_day(r.timestamp);
        const bool daytime = hour >= 6 && hour < 18;

        const double diurnal = spec.diurnal_amplitude * std::sin(two_pi * (hour - 9) / 24.0);
        const double pm10_raw = spec.pm10_base + diurnal + (daytime ? spec.day_boost : 0.0) +
                                spec.noise_scale * rng.normal();
        r.pm10 = std::max(1.0, std::round(pm10_raw));
        const double pm25_raw = spec.pm_ratio * r.pm10 + 0.4 * spec.noise_scale * rng.normal();
        r.pm25 = std::max(0.0, std::round(pm25_raw));

        const double temp_raw = 26.0 + 3.0 * std::sin(two_pi * (hour - 14) / 24.0) +
                                0.4 * rng.normal();
        r.temp = round1(temp_raw);
        r.rh = round1(std::clamp(82.0 - 2.5 * (r.temp - 26.0) + 1.5 * rng.normal(), 0.0, 100.0));
        r.wd = round1(rng.uniform(0.0, 359.9));
        r.ws = round1(std::max(0.0, 1.5 + 0.8 * rng.normal()));
        r.rfall = rng.uniform() < 0.08 ? round1(-2.0 * std::log(1.0 - rng.uniform())) : 0.0;

        frame.records.push_back(r);
    }
    return frame;
}

}  // namespace aqf
