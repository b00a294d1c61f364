#include <catch2/catch_amalgamated.hpp>

#include "aqf/aqi.hpp"
#include "aqf/json_io.hpp"
#include "support/test_util.hpp"

using namespace aqf;
using testutil::thrown_code;

namespace {
const BreakpointTable kTable = BreakpointTable::epa_default();
}

TEST_CASE("segment endpoints map exactly to index endpoints") {
    for (auto pollutant : {Pollutant::Pm25, Pollutant::Pm10}) {
        for (const auto& seg : kTable.segments(pollutant)) {
            CHECK(sub_index(kTable, pollutant, seg.c_lo) == seg.i_lo);
            CHECK(sub_index(kTable, pollutant, seg.c_hi) == seg.i_hi);
        }
    }
}

TEST_CASE("interior interpolation, hand-checked") {
    // 49/23.3 * 12.9 + 51 = 78.13 -> 78
    CHECK(sub_index(kTable, Pollutant::Pm25, 25.0) == 78);
    CHECK(sub_index(kTable, Pollutant::Pm25, 12.0) == 50);
    CHECK(sub_index(kTable, Pollutant::Pm10, 154.0) == 100);
    // 50/12 * 5 = 20.83 -> 21 and 50/54 * 22 = 20.37 -> 20
    CHECK(sub_index(kTable, Pollutant::Pm25, 5.0) == 21);
    CHECK(sub_index(kTable, Pollutant::Pm10, 22.0) == 20);
    // 49/94.9 * 19.5 + 151 = 161.07 -> 161
    CHECK(sub_index(kTable, Pollutant::Pm25, 75.0) == 161);
}

TEST_CASE("EPA truncation applies before lookup") {
    CHECK(sub_index(kTable, Pollutant::Pm25, 12.04) == 50);   // truncates to 12.0
    CHECK(sub_index(kTable, Pollutant::Pm10, 154.9) == 100);  // truncates to 154
}

TEST_CASE("concentrations above the table clamp to 500 with a flag") {
    const SubIndex s = sub_index_ex(kTable, Pollutant::Pm25, 900.0);
    CHECK(s.value == 500);
    CHECK(s.above_scale);
    CHECK_FALSE(sub_index_ex(kTable, Pollutant::Pm25, 120.0).above_scale);
}

TEST_CASE("sub_index rejects negative concentrations") {
    CHECK(thrown_code([] { sub_index(kTable, Pollutant::Pm25, -1.0); }) ==
          "NegativeConcentration");
}

TEST_CASE("sub_index is monotone over a fine sweep") {
    for (auto pollutant : {Pollutant::Pm25, Pollutant::Pm10}) {
        int prev = 0;
        for (double c = 0.0; c <= 600.0; c += 0.1) {
            const int idx = sub_index(kTable, pollutant, c);
            REQUIRE(idx >= prev);
            prev = idx;
        }
    }
}

TEST_CASE("composite takes the max and breaks ties toward PM2.5") {
    const AqiResult r = composite_aqi(kTable, 5.0, 22.0);
    CHECK(r.sub_index_pm25 == 21);
    CHECK(r.sub_index_pm10 == 20);
    CHECK(r.composite == 21);
    CHECK(r.dominant == Pollutant::Pm25);
    CHECK(r.category == AqiCategory::Good);

    const AqiResult zero = composite_aqi(kTable, 0.0, 0.0);
    CHECK(zero.composite == 0);
    CHECK(zero.category == AqiCategory::Good);
    CHECK(zero.dominant == Pollutant::Pm25);  // tie

    const AqiResult high = composite_aqi(kTable, 75.0, 197.0);
    CHECK(high.composite == 161);
    CHECK(high.category == AqiCategory::Unhealthy);
}

TEST_CASE("composite is symmetric in how sub-indices combine") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform(0.0, 300.0), b = rng.uniform(0.0, 500.0);
        const AqiResult r = composite_aqi(kTable, a, b);
        CHECK(r.composite == std::max(r.sub_index_pm25, r.sub_index_pm10));
    }
}

TEST_CASE("categorize boundaries") {
    CHECK(categorize(0) == AqiCategory::Good);
    CHECK(categorize(50) == AqiCategory::Good);
    CHECK(categorize(51) == AqiCategory::Moderate);
    CHECK(categorize(100) == AqiCategory::Moderate);
    CHECK(categorize(101) == AqiCategory::UnhealthySensitive);
    CHECK(categorize(150) == AqiCategory::UnhealthySensitive);
    CHECK(categorize(200) == AqiCategory::Unhealthy);
    CHECK(categorize(300) == AqiCategory::VeryUnhealthy);
    CHECK(categorize(301) == AqiCategory::Hazardous);
    CHECK(categorize(500) == AqiCategory::Hazardous);
    CHECK(thrown_code([] { categorize(-1); }) == "OutOfRange");
    CHECK(thrown_code([] { categorize(501); }) == "OutOfRange");
}

TEST_CASE("every index 0-500 has exactly one category") {
    for (int i = 0; i <= 500; ++i) CHECK_NOTHROW(categorize(i));
}

TEST_CASE("breakpoint tables load from JSON and validate") {
    const char* good = R"({
        "pm25": [{"c_lo": 0.0, "c_hi": 10.0, "i_lo": 0, "i_hi": 100},
                  {"c_lo": 10.1, "c_hi": 50.0, "i_lo": 101, "i_hi": 500}],
        "pm10": [{"c_lo": 0.0, "c_hi": 100.0, "i_lo": 0, "i_hi": 500}]
    })";
    const BreakpointTable t = breakpoint_table_from_json(good);
    CHECK(sub_index(t, Pollutant::Pm25, 5.0) == 50);
    CHECK(sub_index(t, Pollutant::Pm10, 50.0) == 250);

    CHECK(thrown_code([] { breakpoint_table_from_json("not json"); }) == "CorruptFile");
    CHECK(thrown_code([] { breakpoint_table_from_json(R"({"pm25": []})"); }) == "CorruptFile");
    // non-contiguous index ranges are rejected
    const char* gap = R"({
        "pm25": [{"c_lo": 0.0, "c_hi": 10.0, "i_lo": 0, "i_hi": 100},
                  {"c_lo": 10.1, "c_hi": 50.0, "i_lo": 150, "i_hi": 500}],
        "pm10": [{"c_lo": 0.0, "c_hi": 100.0, "i_lo": 0, "i_hi": 500}]
    })";
    CHECK(thrown_code([&] { breakpoint_table_from_json(gap); }) == "CorruptFile");
}

TEST_CASE("pollutant names") {
    CHECK(pollutant_from_name("pm25") == Pollutant::Pm25);
    CHECK(pollutant_from_name("pm10") == Pollutant::Pm10);
    CHECK(thrown_code([] { pollutant_from_name("o3"); }) == "UnknownPollutant");
}

TEST_CASE("trailing-24h tracker averages the window") {
    AqiTracker tracker(kTable, AqiMode::Trailing24h);
    // 23 hours at 10/20, then one hour spiking to 130/240
    for (int i = 0; i < 23; ++i) tracker.seed(10.0, 20.0);
    const AqiResult r = tracker.step(130.0, 240.0);
    const double mean25 = (23 * 10.0 + 130.0) / 24.0;
    const double mean10 = (23 * 20.0 + 240.0) / 24.0;
    const AqiResult expect = composite_aqi(kTable, mean25, mean10);
    CHECK(r.composite == expect.composite);

    AqiTracker instant(kTable, AqiMode::Instant);
    for (int i = 0; i < 23; ++i) instant.seed(10.0, 20.0);
    CHECK(instant.step(130.0, 240.0).composite == composite_aqi(kTable, 130.0, 240.0).composite);
}
