#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "aqf/forecast.hpp"
#include "aqf/pipeline.hpp"
#include "aqf/synth.hpp"
#include "aqf/training.hpp"
#include "support/test_util.hpp"

using namespace aqf;
using testutil::thrown_code;

namespace {

// Small end-to-end fixture: 400 synthetic rows, short lookback, narrow net.
struct SmallRun {
    PreparedData data;
    NetworkConfig net_cfg;
    TrainingConfig train_cfg;

    SmallRun() {
        const ObservationFrame frame = synth_generate({.rows = 400, .seed = 3});
        data = prepare_datasets(clean(frame).frame,
                                {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"}, 8, 0.8);
        net_cfg.lookback = 8;
        net_cfg.hidden1 = 6;
        net_cfg.hidden2 = 4;
        net_cfg.dense_hidden = 16;
        net_cfg.seed = 42;
        train_cfg.epochs = 4;
        train_cfg.batch_size = 32;
        train_cfg.seed = 42;
    }
};

}  // namespace

TEST_CASE("training is deterministic given the seed") {
    SmallRun run;
    BiLstmNetwork a = build_network(run.net_cfg, run.data.scaler);
    BiLstmNetwork b = build_network(run.net_cfg, run.data.scaler);
    const TrainingLog log_a = train(a, run.data.train, run.train_cfg);
    const TrainingLog log_b = train(b, run.data.train, run.train_cfg);

    REQUIRE(log_a.epochs.size() == log_b.epochs.size());
    for (std::size_t i = 0; i < log_a.epochs.size(); ++i)
        REQUIRE(log_a.epochs[i].mean_loss == log_b.epochs[i].mean_loss);  // bit-identical
    CHECK(a.dense1.w == b.dense1.w);
    CHECK(a.layer1.forward_cell.w_x == b.layer1.forward_cell.w_x);
    CHECK(a.layer2.backward_cell.w_h == b.layer2.backward_cell.w_h);
}

TEST_CASE("shuffled training is deterministic too, but visits a different order") {
    SmallRun run;
    run.train_cfg.shuffle = true;
    run.train_cfg.epochs = 2;
    BiLstmNetwork a = build_network(run.net_cfg, run.data.scaler);
    BiLstmNetwork b = build_network(run.net_cfg, run.data.scaler);
    const TrainingLog log_a = train(a, run.data.train, run.train_cfg);
    const TrainingLog log_b = train(b, run.data.train, run.train_cfg);
    CHECK(a.dense1.w == b.dense1.w);

    BiLstmNetwork c = build_network(run.net_cfg, run.data.scaler);
    TrainingConfig ordered = run.train_cfg;
    ordered.shuffle = false;
    const TrainingLog log_c = train(c, run.data.train, ordered);
    CHECK(log_a.epochs.back().mean_loss != log_c.epochs.back().mean_loss);
}

TEST_CASE("the loss declines on learnable data") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    TrainingConfig cfg = run.train_cfg;
    cfg.epochs = 6;
    const TrainingLog log = train(net, run.data.train, cfg);
    REQUIRE(log.epochs.size() == 6);
    CHECK(log.epochs.front().mean_loss > log.epochs.back().mean_loss);
    CHECK(log.steps_per_epoch == (run.data.train.size() + 31) / 32);
}

TEST_CASE("training rejects an empty dataset") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    WindowedDataset empty;
    CHECK(thrown_code([&] { train(net, empty, run.train_cfg); }) == "EmptyDataset");
}

TEST_CASE("a non-finite loss aborts with the epoch and batch location") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    WindowedDataset bad = run.data.train;
    bad.targets(5, 0) = std::numeric_limits<double>::infinity();
    try {
        train(net, bad, run.train_cfg);
        FAIL("expected NonFiniteLoss");
    } catch (const Error& e) {
        CHECK(e.code() == "NonFiniteLoss");
        CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
        CHECK(std::string(e.what()).find("batch 1") != std::string::npos);
    }
}

TEST_CASE("one-step predictions compose forward and inverse transform") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    train(net, run.data.train, run.train_cfg);

    const auto steps =
        predict(net, run.data.test_frame, 1, BreakpointTable::epa_default(), AqiMode::Instant);
    REQUIRE(steps.size() == 1);

    // Definitional route: explicit window, forward pass, inverse transform.
    const WindowedDataset windows = windows_for_frame(net, run.data.test_frame);
    ForwardCaches caches;
    Eigen::MatrixXd last_window(net.feature_count(), net.lookback);
    const Eigen::MatrixXd scaled = transform(net.scaler, run.data.test_frame);
    const Eigen::Index n = scaled.rows();
    for (int t = 0; t < net.lookback; ++t)
        for (int f = 0; f < net.feature_count(); ++f)
            last_window(f, t) =
                scaled(n - net.lookback + t, net.scaler.index_of(net.features[f]));
    const Eigen::Vector2d scaled_pred = network_forward(net, last_window, caches);
    CHECK(steps[0].pm25 ==
          inverse_value(net.scaler, net.scaler.index_of("pm25"), scaled_pred[0]));
    CHECK(steps[0].pm10 ==
          inverse_value(net.scaler, net.scaler.index_of("pm10"), scaled_pred[1]));
    CHECK(steps[0].timestamp == run.data.test_frame.records.back().timestamp + 3600);
}

TEST_CASE("multi-step forecasts stay inside the scaler range") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    train(net, run.data.train, run.train_cfg);
    const auto steps =
        predict(net, run.data.test_frame, 48, BreakpointTable::epa_default(), AqiMode::Trailing24h);
    REQUIRE(steps.size() == 48);
    const int i25 = net.scaler.index_of("pm25"), i10 = net.scaler.index_of("pm10");
    for (std::size_t s = 1; s < steps.size(); ++s)
        REQUIRE(steps[s].timestamp == steps[s - 1].timestamp + 3600);
    for (const auto& s : steps) {
        REQUIRE(s.pm25 >= net.scaler.mins[i25]);
        REQUIRE(s.pm25 <= net.scaler.maxs[i25]);
        REQUIRE(s.pm10 >= net.scaler.mins[i10]);
        REQUIRE(s.pm10 <= net.scaler.maxs[i10]);
        REQUIRE(s.pm25 >= 0.0);
    }
}

TEST_CASE("forecast AQI honors the trailing-24h mode") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    train(net, run.data.train, run.train_cfg);
    const BreakpointTable table = BreakpointTable::epa_default();

    const auto instant = predict(net, run.data.test_frame, 1, table, AqiMode::Instant);
    REQUIRE(instant.size() == 1);
    CHECK(instant[0].aqi.composite ==
          composite_aqi(table, instant[0].pm25, instant[0].pm10).composite);

    const auto trailing = predict(net, run.data.test_frame, 1, table, AqiMode::Trailing24h);
    double sum25 = trailing[0].pm25, sum10 = trailing[0].pm10;
    const auto& records = run.data.test_frame.records;
    for (std::size_t i = records.size() - 23; i < records.size(); ++i) {
        sum25 += records[i].pm25;
        sum10 += records[i].pm10;
    }
    CHECK(trailing[0].aqi.composite ==
          composite_aqi(table, sum25 / 24.0, sum10 / 24.0).composite);
}

TEST_CASE("predict requires enough trailing history") {
    SmallRun run;
    BiLstmNetwork net = build_network(run.net_cfg, run.data.scaler);
    ObservationFrame tiny;
    tiny.records.assign(run.data.test_frame.records.begin(),
                        run.data.test_frame.records.begin() + 3);
    CHECK(thrown_code([&] {
              predict(net, tiny, 1, BreakpointTable::epa_default(), AqiMode::Instant);
          }) == "InsufficientHistory");
}
