#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aqf/aqi.hpp"
#include "aqf/errors.hpp"
#include "aqf/forecast.hpp"
#include "aqf/json_io.hpp"
#include "aqf/metrics.hpp"
#include "aqf/persistence.hpp"
#include "aqf/pipeline.hpp"
#include "aqf/stats.hpp"
#include "aqf/synth.hpp"
#include "aqf/timeseries.hpp"
#include "aqf/training.hpp"

namespace aqf::cli {

struct RunConfig {
    std::string data;
    std::string model;
    std::string out = ".";
    std::string table;  // optional breakpoint-table JSON
    int lookback = 24;
    std::vector<std::string> features = {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"};
    double train_fraction = 0.8;
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 42;
    double adf_threshold = 0.05;
    std::string aqi_mode = "trailing24h";
    int steps = 24;
    bool shuffle = false;
    bool log_timing = false;
    bool scaled = false;
    // synth knobs
    std::size_t rows = 5000;
    std::string start = "2018-05-01 00:00:00";
    double base = 70.0;
    double amplitude = 30.0;
    double day_boost = 12.0;
    double noise = 2.5;
    double pm_ratio = 0.4;
};

namespace detail {

inline void require_field(const std::string& value, const char* flag) {
    if (value.empty())
        throw_usage("BadConfig", std::string(flag) + " is required (flag or config file)");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("CorruptFile", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("CorruptFile", "cannot open '" + path + "' for writing");
    out << content;
}

inline ObservationFrame load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("CorruptFile", "cannot open data file '" + path + "'");
    return parse_csv(in);
}

inline BreakpointTable load_table(const RunConfig& cfg) {
    if (cfg.table.empty()) return BreakpointTable::epa_default();
    return breakpoint_table_from_json(read_file(cfg.table));
}

// Config-file values fill the struct first; flags given on the command line
// then override them during parsing.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw_usage("BadConfig", std::string("config file is not valid JSON: ") + e.what());
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("data", cfg.data);
    get("model", cfg.model);
    get("out", cfg.out);
    get("table", cfg.table);
    get("lookback", cfg.lookback);
    get("features", cfg.features);
    get("train_fraction", cfg.train_fraction);
    get("epochs", cfg.epochs);
    get("batch_size", cfg.batch_size);
    get("seed", cfg.seed);
    get("adf_threshold", cfg.adf_threshold);
    get("aqi_mode", cfg.aqi_mode);
    get("steps", cfg.steps);
    get("shuffle", cfg.shuffle);
    get("log_timing", cfg.log_timing);
    get("scaled", cfg.scaled);
    get("rows", cfg.rows);
    get("start", cfg.start);
}

inline std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
    return std::filesystem::path(cfg.out) / name;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline void cmd_validate(const RunConfig& cfg, std::ostream& out) {
    detail::require_field(cfg.data, "--data");
    const ObservationFrame parsed = detail::load_frame(cfg.data);
    const CleanResult cleaned = clean(parsed);
    const RatioResult with_ratio = add_ratio_column(cleaned.frame);
    nlohmann::json report{
        {"rows_parsed", parsed.size()},
        {"rows_kept", cleaned.frame.size()},
        {"dropped",
         {{"missing", cleaned.report.missing},
          {"out_of_range", cleaned.report.out_of_range},
          {"duplicate", cleaned.report.duplicate}}},
        {"pm10_zero_rows", with_ratio.pm10_zero_dropped},
        {"start", format_timestamp(cleaned.frame.records.front().timestamp)},
        {"end", format_timestamp(cleaned.frame.records.back().timestamp)},
        {"columns", cleaned.frame.columns()}};
    out << report.dump(2) << '\n';
}

inline void cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    detail::require_field(cfg.data, "--data");
    const ObservationFrame parsed = detail::load_frame(cfg.data);
    const CleanResult cleaned = clean(parsed);
    const RatioResult with_ratio = add_ratio_column(cleaned.frame);
    const AnalysisReport report = analyze_frame(with_ratio.frame, cfg.adf_threshold);

    detail::write_file(detail::out_path(cfg, "analysis.json").string(),
                       analysis_to_json(report).dump(2) + "\n");
    detail::write_file(detail::out_path(cfg, "correlation.csv").string(),
                       correlation_csv(report.correlation));
    detail::write_file(detail::out_path(cfg, "adf.csv").string(), adf_csv(report.adf));
    detail::write_file(detail::out_path(cfg, "groups.csv").string(), groups_csv(report));
    out << "analysis written to " << cfg.out << " (analysis.json, correlation.csv, adf.csv, groups.csv)\n";
}

inline void cmd_train(const RunConfig& cfg, std::ostream& out) {
    detail::require_field(cfg.data, "--data");
    detail::require_field(cfg.model, "--model");
    const ObservationFrame parsed = detail::load_frame(cfg.data);
    const CleanResult cleaned = clean(parsed);
    const PreparedData data =
        prepare_datasets(cleaned.frame, cfg.features, cfg.lookback, cfg.train_fraction);

    NetworkConfig net_cfg;
    net_cfg.features = cfg.features;
    net_cfg.lookback = cfg.lookback;
    net_cfg.seed = cfg.seed;
    BiLstmNetwork net = build_network(net_cfg, data.scaler);

    TrainingConfig train_cfg;
    train_cfg.epochs = cfg.epochs;
    train_cfg.batch_size = cfg.batch_size;
    train_cfg.seed = cfg.seed;
    train_cfg.shuffle = cfg.shuffle;

    out << "training on " << data.train.size() << " windows (" << data.test.size()
        << " held out), lookback " << cfg.lookback << ", batch " << cfg.batch_size << "\n";
    const TrainingLog log = train(net, data.train, train_cfg, &out);

    save_model(net, cfg.model);
    detail::write_file(detail::out_path(cfg, "training_log.csv").string(),
                       training_log_csv(log, cfg.log_timing));
    out << "model written to " << cfg.model << "\n";
}

inline void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    detail::require_field(cfg.data, "--data");
    detail::require_field(cfg.model, "--model");
    const BiLstmNetwork net = load_model(cfg.model);
    const ObservationFrame parsed = detail::load_frame(cfg.data);
    const CleanResult cleaned = clean(parsed);
    const auto [train_frame, test_frame] = chrono_split(cleaned.frame, cfg.train_fraction);
    const EvalOutput eval = evaluate_model(net, test_frame, cfg.scaled);
    const std::string text = metrics_to_json(eval.report).dump(2) + "\n";
    detail::write_file(detail::out_path(cfg, "metrics.json").string(), text);
    out << text;
}

inline void cmd_forecast(const RunConfig& cfg, std::ostream& out) {
    detail::require_field(cfg.data, "--data");
    detail::require_field(cfg.model, "--model");
    const BiLstmNetwork net = load_model(cfg.model);
    const ObservationFrame parsed = detail::load_frame(cfg.data);
    const CleanResult cleaned = clean(parsed);
    const BreakpointTable table = detail::load_table(cfg);
    const AqiMode mode = aqi_mode_from_name(cfg.aqi_mode);
    const auto steps = predict(net, cleaned.frame, cfg.steps, table, mode);
    detail::write_file(detail::out_path(cfg, "forecast.csv").string(), forecast_csv(steps));
    out << "aqi_mode: " << aqi_mode_name(mode) << "\n"
        << cfg.steps << "-step forecast written to " << detail::out_path(cfg, "forecast.csv").string()
        << "\n";
}

inline void cmd_aqi(const RunConfig& cfg, double pm25, double pm10, std::ostream& out) {
    const BreakpointTable table = detail::load_table(cfg);
    const AqiResult res = composite_aqi(table, pm25, pm10);
    out << aqi_result_to_json(res).dump(2) << '\n';
}

inline void cmd_synth(const RunConfig& cfg, std::ostream& out) {
    SynthSpec spec;
    spec.rows = cfg.rows;
    spec.seed = cfg.seed;
    const auto ts = parse_timestamp(cfg.start);
    if (!ts) throw_usage("BadSpec", "start must be formatted as YYYY-MM-DD HH:MM:SS");
    spec.start_timestamp = *ts;
    spec.pm10_base = cfg.base;
    spec.diurnal_amplitude = cfg.amplitude;
    spec.day_boost = cfg.day_boost;
    spec.noise_scale = cfg.noise;
    spec.pm_ratio = cfg.pm_ratio;
    const ObservationFrame frame = synth_generate(spec);
    const auto path = detail::out_path(cfg, "synth.csv").string();
    detail::write_file(path, to_csv(frame));
    out << frame.size() << " rows written to " << path << "\n";
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    RunConfig cfg;

    // The config file (JSON mirroring the flag names) loads first so that
    // explicit flags win.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            try {
                detail::apply_config_file(cfg, args[i + 1]);
            } catch (const Error& e) {
                err << "error: " << e.what() << '\n';
                return static_cast<int>(e.kind());
            }
            break;
        }
    }

    CLI::App app{"air quality forecasting toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    double pm25_in = 0.0, pm10_in = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--seed", cfg.seed, "deterministic seed");
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and clean a dataset, report drops");
    validate->add_option("--data", cfg.data, "input CSV");
    add_common(validate);

    CLI::App* analyze = app.add_subcommand("analyze", "correlation, stationarity, grouped means");
    analyze->add_option("--data", cfg.data, "input CSV");
    analyze->add_option("--adf-threshold", cfg.adf_threshold, "significance threshold");
    add_common(analyze);

    CLI::App* train = app.add_subcommand("train", "train the forecaster");
    train->add_option("--data", cfg.data, "input CSV");
    train->add_option("--model", cfg.model, "output model file");
    train->add_option("--lookback", cfg.lookback, "window length in hours");
    train->add_option("--features", cfg.features, "input feature columns")->delimiter(',');
    train->add_option("--train-fraction", cfg.train_fraction, "chronological train share");
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--batch-size", cfg.batch_size, "mini-batch size");
    train->add_flag("--shuffle", cfg.shuffle, "shuffle windows each epoch (seeded)");
    train->add_flag("--log-timing", cfg.log_timing, "add wall-clock seconds to the log CSV");
    add_common(train);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a model on the held-out slice");
    evaluate->add_option("--data", cfg.data, "input CSV");
    evaluate->add_option("--model", cfg.model, "model file");
    evaluate->add_option("--train-fraction", cfg.train_fraction, "chronological train share");
    evaluate->add_flag("--scaled", cfg.scaled, "report metrics in scaled units");
    add_common(evaluate);

    CLI::App* forecast = app.add_subcommand("forecast", "roll the model forward");
    forecast->add_option("--data", cfg.data, "input CSV");
    forecast->add_option("--model", cfg.model, "model file");
    forecast->add_option("--steps", cfg.steps, "hours to forecast");
    forecast->add_option("--aqi-mode", cfg.aqi_mode, "instant or trailing24h");
    forecast->add_option("--table", cfg.table, "breakpoint table JSON");
    add_common(forecast);

    CLI::App* aqi = app.add_subcommand("aqi", "AQI of a single (pm25, pm10) pair");
    aqi->add_option("--pm25", pm25_in, "PM2.5 concentration, ug/m3")->required();
    aqi->add_option("--pm10", pm10_in, "PM10 concentration, ug/m3")->required();
    aqi->add_option("--table", cfg.table, "breakpoint table JSON");
    add_common(aqi);

    CLI::App* synth = app.add_subcommand("synth", "deterministic synthetic dataset");
    synth->add_option("--rows", cfg.rows, "row count (>= 100)");
    synth->add_option("--start", cfg.start, "first timestamp");
    synth->add_option("--base", cfg.base, "pm10 base level");
    synth->add_option("--amplitude", cfg.amplitude, "diurnal amplitude");
    synth->add_option("--day-boost", cfg.day_boost, "daytime pm10 boost");
    synth->add_option("--noise", cfg.noise, "noise scale");
    synth->add_option("--pm-ratio", cfg.pm_ratio, "target pm25/pm10 ratio");
    add_common(synth);

    try {
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        if (validate->parsed()) cmd_validate(cfg, out);
        else if (analyze->parsed()) cmd_analyze(cfg, out);
        else if (train->parsed()) cmd_train(cfg, out);
        else if (evaluate->parsed()) cmd_evaluate(cfg, out);
        else if (forecast->parsed()) cmd_forecast(cfg, out);
        else if (aqi->parsed()) cmd_aqi(cfg, pm25_in, pm10_in, out);
        else if (synth->parsed()) cmd_synth(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace aqf::cli
