#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/timeseries.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Pearson correlation matrix
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    std::vector<std::string> columns;
    Eigen::MatrixXd r;  // NaN rows/columns for constant inputs
};

inline CorrelationMatrix pearson_corr_matrix(const ObservationFrame& frame,
                                             const std::vector<std::string>& cols) {
    if (frame.size() < 2) throw_data("TooFewRows", "correlation needs at least 2 rows");
    const std::size_t k = cols.size();
    std::vector<Eigen::VectorXd> centered(k);
    std::vector<double> ss(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto values = frame.column(cols[j]);
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                              static_cast<Eigen::Index>(values.size()));
        centered[j] = v.array() - v.mean();
        ss[j] = centered[j].squaredNorm();
    }
    CorrelationMatrix out;
    out.columns = cols;
    out.r.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double r;
            if (ss[a] == 0.0 || ss[b] == 0.0) {
                r = nan;  // constant column: undefined, not a number
            } else if (a == b) {
                r = 1.0;
            } else {
                r = centered[a].dot(centered[b]) / std::sqrt(ss[a] * ss[b]);
                r = std::clamp(r, -1.0, 1.0);
            }
            out.r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
            out.r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ordinary least squares, the regression core of the ADF test.
// ---------------------------------------------------------------------------

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd tvalues;
    double ssr = 0.0;
    Eigen::Index n = 0;
    Eigen::Index k = 0;
    double aic = 0.0;  // -2 log L + 2k with the Gaussian log-likelihood
};

inline OlsFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = x.rows(), k = x.cols();
    if (n <= k) throw_numeric("SingularRegression", "more regressors than observations");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < k) throw_numeric("SingularRegression", "design matrix is rank deficient");

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coef = qr.solve(y);
    const Eigen::VectorXd resid = y - x * fit.coef;
    fit.ssr = resid.squaredNorm();

    // (X'X)^-1 from the pivoted QR: X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
    const Eigen::MatrixXd r_inv = qr.matrixR()
                                      .topLeftCorner(k, k)
                                      .triangularView<Eigen::Upper>()
                                      .solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();
    const auto perm = qr.colsPermutation();
    xtx_inv = perm * xtx_inv * perm.transpose();

    const double scale = fit.ssr / static_cast<double>(n - k);
    fit.se = (xtx_inv.diagonal() * scale).cwiseMax(0.0).cwiseSqrt();
    fit.tvalues.resize(k);
    for (Eigen::Index j = 0; j < k; ++j)
        fit.tvalues[j] = fit.se[j] > 0.0 ? fit.coef[j] / fit.se[j]
                                         : std::numeric_limits<double>::quiet_NaN();

    const double nd = static_cast<double>(n);
    if (fit.ssr <= 0.0) {
        fit.aic = -std::numeric_limits<double>::infinity();
    } else {
        const double llf = -0.5 * nd * (std::log(2.0 * M_PI) + std::log(fit.ssr / nd) + 1.0);
        fit.aic = -2.0 * llf + 2.0 * static_cast<double>(k);
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller test (constant, no trend), with lag order chosen by
// AIC and p-values from the MacKinnon (1994) regression-surface approximation.
// ---------------------------------------------------------------------------

struct AdfResult {
    double statistic = 0.0;  // t-ratio on the lagged level
    double p_value = 1.0;
    int lags_used = 0;
    int n_obs = 0;
    double threshold = 0.05;
    bool stationary = false;  // p_value <= threshold
};

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// MacKinnon approximation, constant-only case, one I(1) series.
inline double mackinnon_p_const(double stat) {
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    if (stat > tau_max) return 1.0;
    if (stat < tau_min) return 0.0;
    double poly;
    if (stat <= tau_star) {
        constexpr double c[3] = {2.1659, 1.4412, 3.8269e-2};
        poly = c[0] + stat * (c[1] + stat * c[2]);
    } else {
        constexpr double c[4] = {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};
        poly = c[0] + stat * (c[1] + stat * (c[2] + stat * c[3]));
    }
    return std_normal_cdf(poly);
}

// Design matrix for lag order p, trimmed so every row is complete:
// y_i = diff[p + i], regressors [level, d_1..d_p, const].
inline void adf_design(const std::vector<double>& x, int p, Eigen::MatrixXd& design,
                       Eigen::VectorXd& y) {
    const int n_diff = static_cast<int>(x.size()) - 1;
    const int nobs = n_diff - p;
    design.resize(nobs, p + 2);
    y.resize(nobs);
    for (int i = 0; i < nobs; ++i) {
        const int t = p + i;  // index into the differenced series
        y[i] = x[t + 1] - x[t];
        design(i, 0) = x[t];  // lagged level
        for (int j = 1; j <= p; ++j) design(i, j) = x[t - j + 1] - x[t - j];
        design(i, p + 1) = 1.0;  // constant
    }
}

}  // namespace detail

inline AdfResult adf_test(const std::vector<double>& series, std::optional<int> max_lag = {},
                          double threshold = 0.05) {
    const int n = static_cast<int>(series.size());
    if (n < 4) throw_data("SeriesTooShort", "need at least 4 observations");
    const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
    if (*mn == *mx) throw_data("ConstantSeries", "series is constant");

    int maxlag;
    if (max_lag) {
        maxlag = *max_lag;
        if (maxlag < 0) throw_data("SeriesTooShort", "max lag must be >= 0");
        if (maxlag > n / 2 - 2)
            throw_data("SeriesTooShort", "max lag too large for " + std::to_string(n) + " rows");
    } else {
        // Schwert's rule, capped so the trimmed regression keeps enough rows.
        maxlag = static_cast<int>(std::ceil(12.0 * std::pow(n / 100.0, 0.25)));
        maxlag = std::min(n / 2 - 2, maxlag);
        if (maxlag < 0) throw_data("SeriesTooShort", "sample too short for the lag search");
    }
    if (n < 10 + maxlag)
        throw_data("SeriesTooShort", "need at least " + std::to_string(10 + maxlag) +
                                         " observations for max lag " + std::to_string(maxlag));

    // Lag search on the common maxlag-trimmed sample so AICs are comparable.
    Eigen::MatrixXd design;
    Eigen::VectorXd y;
    detail::adf_design(series, maxlag, design, y);
    int best_lag = -1;
    double best_aic = std::numeric_limits<double>::infinity();
    bool any_fit = false;
    for (int p = 0; p <= maxlag; ++p) {
        // Candidate uses the level, the first p lagged differences, and the
        // constant (the trailing column of the full design).
        Eigen::MatrixXd sub(design.rows(), p + 2);
        sub.leftCols(p + 1) = design.leftCols(p + 1);
        sub.col(p + 1) = design.col(maxlag + 1);
        double aic;
        try {
            aic = ols_fit(sub, y).aic;
        } catch (const Error&) {
            continue;  // singular candidate; skip it
        }
        any_fit = true;
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = p;
        }
    }
    if (!any_fit) throw_numeric("SingularRegression", "every lag candidate was singular");

    // Refit with the chosen lag on the longest usable sample.
    detail::adf_design(series, best_lag, design, y);
    const OlsFit fit = ols_fit(design, y);
    const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (fit.ssr <= design.rows() * std::pow(1e-10 * y_scale, 2))
        throw_numeric("SingularRegression", "regression residuals are numerically zero");

    AdfResult res;
    res.statistic = fit.tvalues[0];
    res.p_value = detail::mackinnon_p_const(res.statistic);
    res.lags_used = best_lag;
    res.n_obs = static_cast<int>(design.rows());
    res.threshold = threshold;
    res.stationary = res.p_value <= threshold;
    return res;
}

// ---------------------------------------------------------------------------
// Per-column ADF report in the dataset's schema order. The timestamp column is
// tested as its epoch-seconds sequence; monotone time is expected to come out
// non-stationary. Errors are captured per column without aborting the rest.
// ---------------------------------------------------------------------------

struct AdfReportEntry {
    std::string column;
    std::optional<AdfResult> result;
    std::string error_code;  // set when the column could not be tested
};

inline std::vector<AdfReportEntry> adf_report(const ObservationFrame& frame,
                                              double threshold = 0.05) {
    std::vector<std::string> cols = {"date", "wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"};
    if (frame.has_ratio()) cols.emplace_back(kRatioColumn);
    std::vector<AdfReportEntry> report;
    report.reserve(cols.size());
    for (const auto& c : cols) {
        AdfReportEntry entry;
        entry.column = c == kRatioColumn ? "pm25/pm10" : c;
        try {
            entry.result = adf_test(frame.column(c), std::nullopt, threshold);
        } catch (const Error& e) {
            entry.error_code = e.code();
        }
        report.push_back(std::move(entry));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Grouped means behind the humidity / wind-direction / day-night analyses.
// ---------------------------------------------------------------------------

enum class Grouping { RhBins, WdSectors, DayNight };

struct GroupStat {
    std::string name;
    double mean_pm25 = std::numeric_limits<double>::quiet_NaN();
    double mean_pm10 = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
};

struct GroupedMeans {
    Grouping grouping;
    std::string label;
    std::vector<GroupStat> groups;
    std::size_t total = 0;
};

inline GroupedMeans grouped_means(const ObservationFrame& frame, Grouping grouping) {
    if (frame.empty()) throw_data("EmptyFrame", "cannot group an empty frame");
    GroupedMeans out;
    out.grouping = grouping;
    out.total = frame.size();

    std::vector<std::string> names;
    std::function<std::size_t(const ObservationRecord&)> group_of;
    switch (grouping) {
        case Grouping::RhBins:
            out.label = "rh-bin";
            names = {"0-20", "20-40", "40-60", "60-80", "80-100"};
            group_of = [](const ObservationRecord& r) -> std::size_t {
                if (r.rh >= 100.0) return 4;  // top bin closed at 100
                return static_cast<std::size_t>(r.rh / 20.0);
            };
            break;
        case Grouping::WdSectors:
            out.label = "wd-sector";
            names = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
            group_of = [](const ObservationRecord& r) -> std::size_t {
                // Sector k covers [45k - 22.5, 45k + 22.5) degrees, mod 360.
                const double wd = std::fmod(r.wd, 360.0);
                return static_cast<std::size_t>(std::fmod(wd + 22.5, 360.0) / 45.0);
            };
            break;
        case Grouping::DayNight:
            out.label = "day-night";
            names = {"Day", "Night"};
            group_of = [](const ObservationRecord& r) -> std::size_t {
                const int h = hour_of_day(r.timestamp);
                return (h >= 6 && h < 18) ? 0 : 1;
            };
            break;
    }

    std::vector<double> sum25(names.size(), 0.0), sum10(names.size(), 0.0);
    std::vector<std::size_t> counts(names.size(), 0);
    for (const auto& r : frame.records) {
        const std::size_t g = group_of(r);
        sum25[g] += r.pm25;
        sum10[g] += r.pm10;
        ++counts[g];
    }
    for (std::size_t g = 0; g < names.size(); ++g) {
        GroupStat s;
        s.name = names[g];
        s.count = counts[g];
        if (counts[g] > 0) {
            s.mean_pm25 = sum25[g] / static_cast<double>(counts[g]);
            s.mean_pm10 = sum10[g] / static_cast<double>(counts[g]);
        }
        out.groups.push_back(std::move(s));
    }
    return out;
}

}  // namespace aqf
