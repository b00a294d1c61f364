#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "aqf/persistence.hpp"
#include "aqf/pipeline.hpp"
#include "aqf/synth.hpp"
#include "aqf/training.hpp"
#include "support/test_util.hpp"

using namespace aqf;
using testutil::thrown_code;

namespace {

struct TrainedFixture {
    PreparedData data;
    BiLstmNetwork net;

    TrainedFixture() {
        const ObservationFrame frame = synth_generate({.rows = 300, .seed = 5});
        data = prepare_datasets(clean(frame).frame,
                                {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"}, 6, 0.8);
        NetworkConfig cfg;
        cfg.lookback = 6;
        cfg.hidden1 = 5;
        cfg.hidden2 = 3;
        cfg.dense_hidden = 12;
        cfg.seed = 77;
        net = build_network(cfg, data.scaler);
        TrainingConfig tc;
        tc.epochs = 2;
        train(net, data.train, tc);
    }
};

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("save/load round-trips to bit-identical predictions") {
    TrainedFixture fx;
    const auto path = temp_file("aqf_model_roundtrip.json");
    save_model(fx.net, path.string());
    const BiLstmNetwork loaded = load_model(path.string());

    CHECK(loaded.lookback == fx.net.lookback);
    CHECK(loaded.features == fx.net.features);
    CHECK(loaded.seed == fx.net.seed);
    CHECK(loaded.scaler == fx.net.scaler);
    CHECK(loaded.layer1.forward_cell.w_x == fx.net.layer1.forward_cell.w_x);
    CHECK(loaded.dense2.w == fx.net.dense2.w);

    ForwardCaches c1, c2;
    for (std::size_t i = 0; i < std::min<std::size_t>(fx.data.test.size(), 16); ++i) {
        const Eigen::Vector2d a = network_forward(fx.net, fx.data.test.inputs[i], c1);
        const Eigen::Vector2d b = network_forward(loaded, fx.data.test.inputs[i], c2);
        REQUIRE(a == b);  // bit-identical
    }
}

TEST_CASE("serialization is deterministic") {
    TrainedFixture fx;
    CHECK(serialize_model(fx.net) == serialize_model(fx.net));
}

TEST_CASE("a truncated model file is rejected") {
    TrainedFixture fx;
    const std::string text = serialize_model(fx.net);
    const auto path = temp_file("aqf_model_truncated.json");
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
    }
    CHECK(thrown_code([&] { load_model(path.string()); }) == "CorruptFile");
}

TEST_CASE("an unknown format version is rejected") {
    TrainedFixture fx;
    std::string text = serialize_model(fx.net);
    const auto pos = text.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 18, "\"format_version\":9");
    CHECK(thrown_code([&] { deserialize_model(text); }) == "VersionMismatch");
}

TEST_CASE("structural damage is reported as corruption") {
    TrainedFixture fx;
    std::string text = serialize_model(fx.net);
    // drop the scaler section entirely
    nlohmann::json j = nlohmann::json::parse(text);
    j.erase("scaler");
    CHECK(thrown_code([&] { deserialize_model(j.dump()); }) == "CorruptFile");

    // wrong weight shape
    nlohmann::json j2 = nlohmann::json::parse(text);
    j2["weights"]["layer2"]["w"].erase(0);
    CHECK(thrown_code([&] { deserialize_model(j2.dump()); }) == "CorruptFile");

    CHECK(thrown_code([] { load_model("/nonexistent/path/model.json"); }) == "CorruptFile");
}
