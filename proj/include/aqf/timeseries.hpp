#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/numfmt.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Timestamps. Hourly station data from a single site: epoch seconds with no
// timezone handling, formatted strictly as "YYYY-MM-DD HH:MM:SS".
// ---------------------------------------------------------------------------

namespace detail {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline bool all_digits(std::string_view s) {
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return !s.empty();
}

inline int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace detail

// Strict "YYYY-MM-DD HH:MM:SS"; returns nothing on any deviation.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    const auto year = s.substr(0, 4), mon = s.substr(5, 2), day = s.substr(8, 2);
    const auto hh = s.substr(11, 2), mm = s.substr(14, 2), ss = s.substr(17, 2);
    using detail::all_digits;
    if (!all_digits(year) || !all_digits(mon) || !all_digits(day) || !all_digits(hh) ||
        !all_digits(mm) || !all_digits(ss))
        return std::nullopt;
    using detail::to_int;
    const int y = to_int(year), mo = to_int(mon), d = to_int(day);
    const int h = to_int(hh), mi = to_int(mm), sec = to_int(ss);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 59) return std::nullopt;
    return detail::days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

inline std::string format_timestamp(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0, m = 0, d = 0;
    detail::civil_from_days(days, y, m, d);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return std::string(buf);
}

inline int hour_of_day(std::int64_t ts) {
    std::int64_t rem = ts % 86400;
    if (rem < 0) rem += 86400;
    return static_cast<int>(rem / 3600);
}

// ---------------------------------------------------------------------------
// Records and frames
// ---------------------------------------------------------------------------

// One hourly observation. Missing numeric fields are NaN until cleaning.
struct ObservationRecord {
    std::int64_t timestamp = 0;
    double wd = std::numeric_limits<double>::quiet_NaN();
    double ws = std::numeric_limits<double>::quiet_NaN();
    double temp = std::numeric_limits<double>::quiet_NaN();
    double rh = std::numeric_limits<double>::quiet_NaN();
    double rfall = std::numeric_limits<double>::quiet_NaN();
    double pm25 = std::numeric_limits<double>::quiet_NaN();
    double pm10 = std::numeric_limits<double>::quiet_NaN();

    bool complete() const {
        return std::isfinite(wd) && std::isfinite(ws) && std::isfinite(temp) &&
               std::isfinite(rh) && std::isfinite(rfall) && std::isfinite(pm25) &&
               std::isfinite(pm10);
    }

    // Physical ranges; only meaningful on complete records.
    bool in_range() const {
        return wd >= 0.0 && wd <= 360.0 && rh >= 0.0 && rh <= 100.0 && ws >= 0.0 &&
               rfall >= 0.0 && pm25 >= 0.0 && pm10 >= 0.0;
    }

    bool operator==(const ObservationRecord&) const = default;
};

inline constexpr std::array<std::string_view, 8> kBaseColumns = {
    "date", "wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"};
inline constexpr std::string_view kRatioColumn = "pm25_pm10_ratio";

struct ObservationFrame {
    std::vector<ObservationRecord> records;
    // Derived pm25/pm10 column, aligned with records when present.
    std::optional<std::vector<double>> ratio;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    bool has_ratio() const { return ratio.has_value(); }

    std::vector<std::string> columns() const {
        std::vector<std::string> names(kBaseColumns.begin(), kBaseColumns.end());
        if (has_ratio()) names.emplace_back(kRatioColumn);
        return names;
    }

    bool has_column(std::string_view name) const {
        for (auto c : kBaseColumns)
            if (c == name) return true;
        return name == kRatioColumn && has_ratio();
    }

    // Column values as doubles; "date" yields epoch seconds.
    std::vector<double> column(std::string_view name) const {
        std::vector<double> out;
        out.reserve(records.size());
        if (name == "date") {
            for (const auto& r : records) out.push_back(static_cast<double>(r.timestamp));
            return out;
        }
        if (name == kRatioColumn) {
            if (!has_ratio()) throw_data("UnknownColumn", "ratio column has not been derived");
            return *ratio;
        }
        double ObservationRecord::* field = nullptr;
        if (name == "wd") field = &ObservationRecord::wd;
        else if (name == "ws") field = &ObservationRecord::ws;
        else if (name == "temp") field = &ObservationRecord::temp;
        else if (name == "rh") field = &ObservationRecord::rh;
        else if (name == "rfall") field = &ObservationRecord::rfall;
        else if (name == "pm25") field = &ObservationRecord::pm25;
        else if (name == "pm10") field = &ObservationRecord::pm10;
        else throw_data("UnknownColumn", "no column named '" + std::string(name) + "'");
        for (const auto& r : records) out.push_back(r.*field);
        return out;
    }

    bool operator==(const ObservationFrame&) const = default;
};

// ---------------------------------------------------------------------------
// CSV ingestion / serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

// Empty cells and the literal "NaN" (any case) are missing; any other
// unparseable cell is treated the same way.
inline double parse_cell(std::string_view cell) {
    auto v = parse_double(cell);
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Parses the hourly-observation CSV (header row required; an unnamed leading
// index column is tolerated and skipped).
inline ObservationFrame parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw_data("EmptyInput", "no header row");
    const auto header = detail::split_csv_line(line);
    const std::size_t header_width = header.size();

    std::unordered_map<std::string, int> col_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string_view name = header[i];
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) col_index.emplace(std::string(name), static_cast<int>(i));
    }
    for (auto required : kBaseColumns) {
        if (!col_index.contains(std::string(required)))
            throw_data("MissingColumn", "header lacks required column '" + std::string(required) + "'");
    }
    const bool ratio_present = col_index.contains(std::string(kRatioColumn));

    ObservationFrame frame;
    if (ratio_present) frame.ratio.emplace();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        // A row with one extra cell carries a positional index (pandas style)
        // even when the header did not name it.
        std::size_t shift = 0;
        if (cells.size() == header_width + 1) shift = 1;

        auto cell = [&](std::string_view name) -> std::string_view {
            const std::size_t idx =
                static_cast<std::size_t>(col_index.at(std::string(name))) + shift;
            return idx < cells.size() ? cells[idx] : std::string_view{};
        };

        ObservationRecord rec;
        const auto ts = parse_timestamp(cell("date"));
        if (!ts)
            throw_data("BadTimestamp", "line " + std::to_string(line_no) +
                                           ": expected \"YYYY-MM-DD HH:MM:SS\", got \"" +
                                           std::string(cell("date")) + "\"");
        rec.timestamp = *ts;
        rec.wd = detail::parse_cell(cell("wd"));
        rec.ws = detail::parse_cell(cell("ws"));
        rec.temp = detail::parse_cell(cell("temp"));
        rec.rh = detail::parse_cell(cell("rh"));
        rec.rfall = detail::parse_cell(cell("rfall"));
        rec.pm25 = detail::parse_cell(cell("pm25"));
        rec.pm10 = detail::parse_cell(cell("pm10"));
        frame.records.push_back(rec);
        if (ratio_present) frame.ratio->push_back(detail::parse_cell(cell(kRatioColumn)));
    }
    if (frame.records.empty()) throw_data("EmptyInput", "no data rows");
    return frame;
}

inline ObservationFrame parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_csv(in);
}

inline void write_csv(const ObservationFrame& frame, std::ostream& out) {
    out << "date,wd,ws,temp,rh,rfall,pm25,pm10";
    if (frame.has_ratio()) out << ',' << kRatioColumn;
    out << '\n';
    auto put = [&](double v) {
        if (std::isfinite(v)) out << format_double(v);
        else out << "NaN";
    };
    for (std::size_t i = 0; i < frame.records.size(); ++i) {
        const auto& r = frame.records[i];
        out << format_timestamp(r.timestamp) << ',';
        put(r.wd); out << ','; put(r.ws); out << ','; put(r.temp); out << ',';
        put(r.rh); out << ','; put(r.rfall); out << ','; put(r.pm25); out << ',';
        put(r.pm10);
        if (frame.has_ratio()) { out << ','; put((*frame.ratio)[i]); }
        out << '\n';
    }
}

inline std::string to_csv(const ObservationFrame& frame) {
    std::ostringstream out;
    write_csv(frame, out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Cleaning
// ---------------------------------------------------------------------------

struct CleanReport {
    std::size_t missing = 0;       // rows with any missing value
    std::size_t out_of_range = 0;  // rows violating physical ranges
    std::size_t duplicate = 0;     // rows sharing an earlier row's timestamp

    std::size_t total() const { return missing + out_of_range + duplicate; }
    bool operator==(const CleanReport&) const = default;
};

struct CleanResult {
    ObservationFrame frame;
    CleanReport report;
};

// Drops rows with missing values (removal, not imputation), drops rows outside
// physical ranges, sorts by timestamp, and keeps the first occurrence among
// duplicate timestamps.
inline CleanResult clean(const ObservationFrame& input) {
    CleanResult res;
    struct Row {
        ObservationRecord rec;
        double ratio;
    };
    std::vector<Row> rows;
    rows.reserve(input.size());
    const bool carry_ratio = input.has_ratio();
    for (std::size_t i = 0; i < input.records.size(); ++i) {
        const auto& rec = input.records[i];
        const double ratio = carry_ratio ? (*input.ratio)[i] : 0.0;
        if (!rec.complete() || (carry_ratio && !std::isfinite(ratio))) {
            ++res.report.missing;
            continue;
        }
        if (!rec.in_range()) {
            ++res.report.out_of_range;
            continue;
        }
        rows.push_back({rec, ratio});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.rec.timestamp < b.rec.timestamp; });
    if (carry_ratio) res.frame.ratio.emplace();
    std::int64_t last_ts = 0;
    bool first = true;
    for (const auto& row : rows) {
        if (!first && row.rec.timestamp == last_ts) {
            ++res.report.duplicate;
            continue;
        }
        res.frame.records.push_back(row.rec);
        if (carry_ratio) res.frame.ratio->push_back(row.ratio);
        last_ts = row.rec.timestamp;
        first = false;
    }
    if (res.frame.records.empty()) throw_data("AllRowsDropped", "cleaning removed every row");
    return res;
}

struct RatioResult {
    ObservationFrame frame;
    std::size_t pm10_zero_dropped = 0;
};

// Adds the pm25/pm10 column; rows with pm10 == 0 are dropped with a count.
inline RatioResult add_ratio_column(const ObservationFrame& input) {
    RatioResult res;
    res.frame.ratio.emplace();
    for (const auto& rec : input.records) {
        if (rec.pm10 <= 0.0) {
            ++res.pm10_zero_dropped;
            continue;
        }
        res.frame.records.push_back(rec);
        res.frame.ratio->push_back(rec.pm25 / rec.pm10);
    }
    return res;
}

}  // namespace aqf
