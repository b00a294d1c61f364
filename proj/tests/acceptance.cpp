// Acceptance suite: every criterion prints one [PASS]/[FAIL] line; the binary
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "adf_reference.hpp"
#include "aqf/aqi.hpp"
#include "aqf/cli.hpp"
#include "aqf/metrics.hpp"
#include "aqf/network.hpp"
#include "aqf/persistence.hpp"
#include "aqf/pipeline.hpp"
#include "aqf/stats.hpp"
#include "aqf/synth.hpp"
#include "aqf/timeseries.hpp"
#include "aqf/training.hpp"
#include "support/series_fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using namespace aqf;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }

    void note(const std::string& what) {
        if (ok) detail = what;
    }
};

// Shared between the training-regime and forecast-quality criteria: one
// training run of the reference regime on the default synthetic dataset.
struct TrainedRegime {
    PreparedData data;
    BiLstmNetwork net;
    TrainingLog log;
    double train_seconds = 0.0;
};

TrainedRegime train_default_regime() {
    TrainedRegime out;
    const ObservationFrame frame = synth_generate({.rows = 5000, .seed = 7});
    out.data = prepare_datasets(clean(frame).frame,
                                {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"}, 24, 0.8);
    NetworkConfig cfg;  // BiLSTM(20, relu) / BiLSTM(10, tanh) / Dense(1024, relu) / Dense(2, sigmoid)
    cfg.seed = 42;
    out.net = build_network(cfg, out.data.scaler);
    TrainingConfig tc;  // MSE, Adam, 20 epochs, batch 32
    tc.seed = 42;
    const auto t0 = std::chrono::steady_clock::now();
    out.log = train(out.net, out.data.train, tc);
    out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

char fmt_buf[256];

// --------------------------------------------------------------------------
// 1. Gradient oracle
// --------------------------------------------------------------------------

Check criterion_gradient_oracle() {
    Check c;
    NetworkConfig cfg;
    cfg.features = {"a", "b"};  // F = 2
    cfg.lookback = 4;           // T = 4
    cfg.hidden1 = 3;
    cfg.act1 = Activation::Relu;
    cfg.hidden2 = 3;
    cfg.act2 = Activation::Tanh;
    cfg.dense_hidden = 8;  // dense head 8 -> 2
    cfg.seed = 1234;
    ScalerParams sc;
    sc.columns = {"a", "b"};
    sc.mins = Eigen::VectorXd::Zero(2);
    sc.maxs = Eigen::VectorXd::Ones(2);
    BiLstmNetwork net = build_network(cfg, sc);

    Rng rng(99);
    Eigen::MatrixXd window(2, 4);
    for (Eigen::Index i = 0; i < window.size(); ++i) window(i) = rng.uniform();
    const Eigen::Vector2d target(0.3, 0.7);

    auto loss_of = [&]() {
        ForwardCaches fc;
        const Eigen::Vector2d p = network_forward(net, window, fc);
        return (p - target).squaredNorm() / 2.0;
    };

    ForwardCaches caches;
    const Eigen::Vector2d pred = network_forward(net, window, caches);
    NetworkGrads grads;
    grads.match(net);
    network_backward(net, caches, 2.0 * (pred - target) / 2.0, grads);

    std::vector<Eigen::MatrixXd*> gs;
    grads.for_each([&](Eigen::MatrixXd& g) { gs.push_back(&g); });
    std::size_t gi = 0;
    double worst = 0.0;
    int checked = 0;
    for_each_param(net, [&](Eigen::MatrixXd& p, const char* name) {
        const Eigen::MatrixXd& g = *gs[gi++];
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const double orig = p(i), eps = 1e-5;
            p(i) = orig + eps;
            const double lp = loss_of();
            p(i) = orig - eps;
            const double lm = loss_of();
            p(i) = orig;
            const double numeric = (lp - lm) / (2.0 * eps);
            const double analytic = g(i);
            const double err = std::abs(numeric - analytic) /
                               std::max({std::abs(numeric), std::abs(analytic), 1e-6});
            worst = std::max(worst, err);
            ++checked;
            if (err >= 1e-4)
                c.require(false, std::string("relative error ") + std::to_string(err) + " at " +
                                     name);
        }
    });
    std::snprintf(fmt_buf, sizeof(fmt_buf), "%d parameters, worst relative error %.2e", checked,
                  worst);
    c.note(fmt_buf);
    return c;
}

// --------------------------------------------------------------------------
// 2. Training-regime replication
// --------------------------------------------------------------------------

Check criterion_training_regime(const TrainedRegime& r) {
    Check c;
    const auto& epochs = r.log.epochs;
    c.require(epochs.size() == 20, "expected 20 epochs");
    if (!c.ok) return c;
    const double first = epochs.front().mean_loss;
    const double last = epochs.back().mean_loss;
    c.require(last < first, "loss did not decrease from epoch 1 to epoch 20");
    for (std::size_t i = 15; i < epochs.size(); ++i)
        c.require(epochs[i].mean_loss < 2e-3, "final epochs did not plateau below 2e-3");
    for (std::size_t i = 3; i + 1 < epochs.size(); ++i)
        c.require(epochs[i + 1].mean_loss <= 1.10 * epochs[i].mean_loss,
                  "loss rose by more than 10% after epoch 3");
    c.require(r.train_seconds < 300.0, "training exceeded 5 minutes");
    std::snprintf(fmt_buf, sizeof(fmt_buf), "loss %.3e -> %.3e over 20 epochs in %.0fs", first,
                  last, r.train_seconds);
    c.note(fmt_buf);
    return c;
}

// --------------------------------------------------------------------------
// 3. Forecast quality on the held-out slice
// --------------------------------------------------------------------------

Check criterion_forecast_quality(const TrainedRegime& r) {
    Check c;
    const EvalOutput eval = evaluate_model(r.net, r.data.test_frame, false);
    const double r2 = eval.report.pooled.r2;
    c.require(eval.report.pooled.r2_defined, "pooled r2 undefined");
    c.require(r2 >= 0.95, "pooled r2 below 0.95");

    double mean = 0.0;
    for (const auto& t : eval.truths) mean += t.second;
    mean /= static_cast<double>(eval.truths.size());
    double var = 0.0;
    for (const auto& t : eval.truths) var += (t.second - mean) * (t.second - mean);
    const double pm10_std = std::sqrt(var / static_cast<double>(eval.truths.size()));
    c.require(eval.report.pm10.rmse < 0.15 * pm10_std,
              "pm10 rmse not below 15% of the pm10 standard deviation");
    std::snprintf(fmt_buf, sizeof(fmt_buf), "r2 %.4f, pm10 rmse %.2f vs 15%% of std %.2f", r2,
                  eval.report.pm10.rmse, 0.15 * pm10_std);
    c.note(fmt_buf);
    return c;
}

// --------------------------------------------------------------------------
// 4. ADF oracle agreement
// --------------------------------------------------------------------------

Check criterion_adf_oracle() {
    Check c;
    int agree = 0;
    double worst_stat = 0.0, worst_p = 0.0;
    for (const auto& ref : fixtures::kAdfReferenceCases) {
        const auto series = ref.random_walk ? fixtures::random_walk_series(ref.seed, 500)
                                            : fixtures::iid_noise_series(ref.seed, 500);
        const AdfResult r = adf_test(series);
        worst_stat = std::max(worst_stat, std::abs(r.statistic - ref.statistic));
        worst_p = std::max(worst_p, std::abs(r.p_value - ref.p_value));
        c.require(std::abs(r.statistic - ref.statistic) < 1e-6,
                  std::string(ref.name) + ": statistic off by more than 1e-6");
        c.require(std::abs(r.p_value - ref.p_value) < 1e-4,
                  std::string(ref.name) + ": p-value off by more than 1e-4");
        const bool expect_stationary = !ref.random_walk;
        if (r.stationary == expect_stationary) ++agree;
        c.require(r.stationary == expect_stationary,
                  std::string(ref.name) + ": verdict disagrees with the reference");
    }
    c.require(agree == 10, "verdict agreement below 10/10");
    std::snprintf(fmt_buf, sizeof(fmt_buf),
                  "10/10 verdicts, worst |d stat| %.1e, worst |d p| %.1e", worst_stat, worst_p);
    c.note(fmt_buf);
    return c;
}

// --------------------------------------------------------------------------
// 5. AQI exactness
// --------------------------------------------------------------------------

Check criterion_aqi_exactness() {
    Check c;
    const BreakpointTable table = BreakpointTable::epa_default();
    for (auto pollutant : {Pollutant::Pm25, Pollutant::Pm10}) {
        for (const auto& seg : table.segments(pollutant)) {
            c.require(sub_index(table, pollutant, seg.c_lo) == seg.i_lo,
                      "segment start does not map to its index start");
            c.require(sub_index(table, pollutant, seg.c_hi) == seg.i_hi,
                      "segment end does not map to its index end");
        }
    }
    c.require(sub_index(table, Pollutant::Pm25, 25.0) == 78, "PM2.5 25.0 did not map to 78");
    const AqiResult row0 = composite_aqi(table, 5.0, 22.0);
    c.require(row0.composite == 21 && row0.category == AqiCategory::Good,
              "(5, 22) did not produce composite 21 Good");

    for (auto pollutant : {Pollutant::Pm25, Pollutant::Pm10}) {
        int prev = 0;
        for (int k = 0; k <= 6000; ++k) {  // 0 to 600 ug/m3 at 0.1 resolution
            const int idx = sub_index(table, pollutant, k * 0.1);
            c.require(idx >= prev, "sub_index decreased along the sweep");
            prev = idx;
        }
        c.require(sub_index(table, pollutant, 10000.0) == 500,
                  "above-scale concentration did not clamp at 500");
    }
    c.note("all endpoints exact, interior values match, sweep monotone");
    return c;
}

// --------------------------------------------------------------------------
// 6. Metrics identities
// --------------------------------------------------------------------------

Check criterion_metrics_identities() {
    Check c;
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> truth(50), pred(50);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            truth[i] = rng.uniform(0.0, 100.0);
            pred[i] = truth[i] + rng.normal();
        }
        const MetricStats m = compute_metrics(truth, pred);
        c.require(std::abs(m.rmse - std::sqrt(m.mse)) <= 1e-12, "rmse != sqrt(mse) within 1e-12");
    }
    const MetricStats hand = compute_metrics({1, 2, 3}, {1, 2, 4});
    c.require(std::abs(hand.mse - 0.3333) < 1e-4, "hand case mse");
    c.require(std::abs(hand.rmse - 0.5774) < 1e-4, "hand case rmse");
    c.require(std::abs(hand.mae - 0.3333) < 1e-4, "hand case mae");
    c.require(std::abs(hand.r2 - 0.5) < 1e-4, "hand case r2");
    // the reported reference pair is consistent with rmse = sqrt(mse)
    c.require(std::abs(std::sqrt(52.99) - 7.28) < 0.01, "(52.99, 7.28) inconsistent");
    std::snprintf(fmt_buf, sizeof(fmt_buf), "identities hold; sqrt(52.99) = %.4f vs 7.28",
                  std::sqrt(52.99));
    c.note(fmt_buf);
    return c;
}

// --------------------------------------------------------------------------
// 7. Determinism end to end
// --------------------------------------------------------------------------

Check criterion_determinism() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "aqf_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::ostringstream sink;
    auto train_once = [&](const char* run) {
        const fs::path out = dir / run;
        const std::vector<std::string> synth_args = {"synth",  "--rows", "800",
                                                     "--seed", "7",      "--out", out.string()};
        if (aqf::cli::run(synth_args, sink, sink) != 0) return false;
        const std::vector<std::string> train_args = {
            "train",    "--data",  (out / "synth.csv").string(),
            "--model",  (out / "model.json").string(),
            "--lookback", "12",    "--epochs", "3",
            "--seed",   "21",      "--out",    out.string()};
        return aqf::cli::run(train_args, sink, sink) == 0;
    };
    c.require(train_once("a"), "first training run failed");
    c.require(train_once("b"), "second training run failed");
    if (!c.ok) return c;

    c.require(slurp((dir / "a/synth.csv").string()) == slurp((dir / "b/synth.csv").string()),
              "synth outputs differ");
    c.require(slurp((dir / "a/model.json").string()) == slurp((dir / "b/model.json").string()),
              "model files differ");
    c.require(slurp((dir / "a/training_log.csv").string()) ==
                  slurp((dir / "b/training_log.csv").string()),
              "training logs differ");

    // save/load round trip: bit-identical predictions
    const BiLstmNetwork net = load_model((dir / "a/model.json").string());
    const fs::path resaved = dir / "resaved.json";
    save_model(net, resaved.string());
    const BiLstmNetwork net2 = load_model(resaved.string());
    std::ifstream data((dir / "a/synth.csv").string());
    const ObservationFrame frame = clean(parse_csv(data)).frame;
    const WindowedDataset windows = windows_for_frame(net, frame);
    ForwardCaches c1, c2;
    for (std::size_t i = 0; i < windows.size(); i += 97) {
        const Eigen::Vector2d a = network_forward(net, windows.inputs[i], c1);
        const Eigen::Vector2d b = network_forward(net2, windows.inputs[i], c2);
        c.require(a == b, "round-tripped model predictions are not bit-identical");
    }
    fs::remove_all(dir);
    c.note("byte-identical models and logs; round-trip predictions bit-identical");
    return c;
}

// --------------------------------------------------------------------------
// 8. Pipeline invariants
// --------------------------------------------------------------------------

Check criterion_pipeline_invariants() {
    Check c;
    const ObservationFrame frame = synth_generate({.rows = 600, .seed = 13});

    // scaler round trip
    const auto cols = std::vector<std::string>{"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"};
    const ScalerParams scaler = fit_scaler(frame, cols);
    const Eigen::MatrixXd raw = frame_matrix(frame, cols);
    const Eigen::MatrixXd round_trip = inverse_transform(scaler, transform(scaler, frame));
    c.require((round_trip - raw).cwiseAbs().maxCoeff() <= 1e-12,
              "scaler round trip above 1e-12");

    // clean idempotence
    ObservationFrame messy = frame;
    messy.records[5].pm25 = std::numeric_limits<double>::quiet_NaN();
    messy.records[9] = messy.records[10];
    std::swap(messy.records[100], messy.records[200]);
    const ObservationFrame once = clean(messy).frame;
    const CleanResult twice = clean(once);
    c.require(twice.frame == once && twice.report.total() == 0, "clean is not idempotent");

    // window/target alignment reconstructs the series
    const Eigen::MatrixXd scaled = transform(scaler, frame);
    const WindowedDataset ds = make_windows(scaled, cols, cols, 24);
    bool aligned = ds.size() == frame.size() - 24;
    for (std::size_t i = 0; i < ds.size() && aligned; ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(i);
        aligned = ds.targets(row, 0) == scaled(row + 24, 5) &&
                  ds.targets(row, 1) == scaled(row + 24, 6);
        for (int t = 0; t < 24 && aligned; ++t)
            aligned = (ds.inputs[i].col(t).transpose().eval().array() ==
                       scaled.row(row + t).array())
                          .all();
    }
    c.require(aligned, "windows/targets do not reconstruct the source rows");

    // correlation symmetry and unit diagonal
    const CorrelationMatrix corr = pearson_corr_matrix(frame, cols);
    for (Eigen::Index i = 0; i < corr.r.rows(); ++i) {
        c.require(corr.r(i, i) == 1.0, "correlation diagonal is not exactly 1");
        for (Eigen::Index j = 0; j < corr.r.cols(); ++j)
            c.require(corr.r(i, j) == corr.r(j, i), "correlation matrix is not symmetric");
    }

    // palindrome symmetry of the bidirectional layer
    NetworkConfig cfg;
    cfg.features = {"a", "b", "c"};
    cfg.hidden1 = 4;
    cfg.seed = 77;
    ScalerParams sc;
    sc.columns = {"a", "b", "c"};
    sc.mins = Eigen::VectorXd::Zero(3);
    sc.maxs = Eigen::VectorXd::Ones(3);
    BiLstmNetwork net = build_network(cfg, sc);
    BiLstmLayer layer = net.layer1;
    layer.backward_cell = layer.forward_cell;
    const int t_steps = 9;
    Eigen::MatrixXd inputs(3, t_steps);
    Rng rng(8);
    for (int t = 0; t <= t_steps / 2; ++t) {
        const Eigen::Vector3d v(rng.uniform(), rng.uniform(), rng.uniform());
        inputs.col(t) = v;
        inputs.col(t_steps - 1 - t) = v;
    }
    BiLstmCache cache;
    Eigen::MatrixXd out;
    bilstm_forward(layer, inputs, cache, out);
    for (int t = 0; t < t_steps; ++t) {
        const double gap = (out.topRows(layer.hidden).col(t) -
                            out.bottomRows(layer.hidden).col(t_steps - 1 - t))
                               .cwiseAbs()
                               .maxCoeff();
        c.require(gap <= 1e-12, "palindrome symmetry above 1e-12");
    }
    c.note("scaler, cleaning, windowing, correlation, and palindrome invariants hold");
    return c;
}

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<Check()> body;
};

}  // namespace

int main() {
    TrainedRegime regime;  // trained once, used by criteria 2 and 3
    bool regime_ready = false;
    auto ensure_regime = [&]() -> TrainedRegime& {
        if (!regime_ready) {
            regime = train_default_regime();
            regime_ready = true;
        }
        return regime;
    };

    const std::vector<Criterion> criteria = {
        {1, "gradient oracle vs central finite differences", 10.0, criterion_gradient_oracle},
        {2, "training-regime replication on the synthetic dataset", 300.0,
         [&] { return criterion_training_regime(ensure_regime()); }},
        {3, "held-out forecast quality", 60.0,
         [&] { return criterion_forecast_quality(ensure_regime()); }},
        {4, "stationarity test agreement with the reference package", 60.0,
         criterion_adf_oracle},
        {5, "AQI breakpoint exactness and monotonicity", 5.0, criterion_aqi_exactness},
        {6, "metrics identities", 5.0, criterion_metrics_identities},
        {7, "end-to-end determinism", 120.0, criterion_determinism},
        {8, "pipeline invariants", 60.0, criterion_pipeline_invariants},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check result;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            result = criterion.body();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (result.ok && elapsed > criterion.limit_seconds) {
            result.ok = false;
            result.detail = "runtime limit exceeded";
        }
        std::printf("[%s] %d. %s: %s (%.1fs)\n", result.ok ? "PASS" : "FAIL", criterion.id,
                    criterion.title, result.detail.c_str(), elapsed);
        std::fflush(stdout);
        failures += result.ok ? 0 : 1;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
