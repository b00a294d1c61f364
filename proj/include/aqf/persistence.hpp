#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqf/errors.hpp"
#include "aqf/network.hpp"
#include "aqf/numfmt.hpp"

namespace aqf {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

// The writer is hand-rolled so the key order is fixed and every number is
// emitted with 17 significant digits; the file bytes then depend only on the
// model, which makes repeated training runs byte-comparable.
class ModelWriter {
public:
    explicit ModelWriter(std::ostream& out) : out_(out) {}

    void matrix(const Eigen::MatrixXd& m) {
        out_ << '[';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i) out_ << ',';
            out_ << '[';
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j) out_ << ',';
                out_ << format_double17(m(i, j));
            }
            out_ << ']';
        }
        out_ << ']';
    }

    void flat(const Eigen::MatrixXd& m) {
        out_ << '[';
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double17(m(i));
        }
        out_ << ']';
    }

    void strings(const std::vector<std::string>& v) {
        out_ << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out_ << ',';
            out_ << '"' << v[i] << '"';
        }
        out_ << ']';
    }

    void doubles(const Eigen::VectorXd& v) {
        out_ << '[';
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double17(v[i]);
        }
        out_ << ']';
    }

    void cell(const LstmCellParams& c) {
        out_ << "{\"w_x\":";
        matrix(c.w_x);
        out_ << ",\"w_h\":";
        matrix(c.w_h);
        out_ << ",\"b\":";
        flat(c.b);
        out_ << '}';
    }

    std::ostream& out_;
};

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                        Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw_data("CorruptFile", "weight matrix has the wrong row count");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw_data("CorruptFile", "weight matrix has the wrong column count");
        for (Eigen::Index jj = 0; jj < cols; ++jj)
            m(i, jj) = row[static_cast<std::size_t>(jj)].get<double>();
    }
    return m;
}

inline Eigen::MatrixXd flat_from_json(const nlohmann::json& j, Eigen::Index n) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw_data("CorruptFile", "bias vector has the wrong length");
    Eigen::MatrixXd m(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) m(i, 0) = j[static_cast<std::size_t>(i)].get<double>();
    return m;
}

inline LstmCellParams cell_from_json(const nlohmann::json& j, int input, int hidden) {
    LstmCellParams c;
    c.w_x = matrix_from_json(j.at("w_x"), 4 * hidden, input);
    c.w_h = matrix_from_json(j.at("w_h"), 4 * hidden, hidden);
    c.b = flat_from_json(j.at("b"), 4 * hidden);
    return c;
}

}  // namespace detail

inline std::string serialize_model(const BiLstmNetwork& net) {
    std::ostringstream out;
    detail::ModelWriter w(out);
    out << "{\"format_version\":" << kModelFormatVersion << ",";
    out << "\"architecture\":{\"lookback\":" << net.lookback << ",\"features\":";
    w.strings(net.features);
    out << ",\"layers\":["
        << "{\"kind\":\"bilstm\",\"hidden\":" << net.layer1.hidden << ",\"activation\":\""
        << activation_name(net.layer1.activation) << "\"},"
        << "{\"kind\":\"bilstm\",\"hidden\":" << net.layer2.hidden << ",\"activation\":\""
        << activation_name(net.layer2.activation) << "\"},"
        << "{\"kind\":\"dense\",\"hidden\":" << net.dense1.outputs() << ",\"activation\":\""
        << activation_name(net.dense1.activation) << "\"},"
        << "{\"kind\":\"dense\",\"hidden\":" << net.dense2.outputs() << ",\"activation\":\""
        << activation_name(net.dense2.activation) << "\"}]},";
    out << "\"scaler\":{\"columns\":";
    w.strings(net.scaler.columns);
    out << ",\"mins\":";
    w.doubles(net.scaler.mins);
    out << ",\"maxs\":";
    w.doubles(net.scaler.maxs);
    out << "},\"seed\":" << net.seed << ",";
    out << "\"weights\":{\"layer0\":{\"forward\":";
    w.cell(net.layer1.forward_cell);
    out << ",\"backward\":";
    w.cell(net.layer1.backward_cell);
    out << "},\"layer1\":{\"forward\":";
    w.cell(net.layer2.forward_cell);
    out << ",\"backward\":";
    w.cell(net.layer2.backward_cell);
    out << "},\"layer2\":{\"w\":";
    w.matrix(net.dense1.w);
    out << ",\"b\":";
    w.flat(net.dense1.b);
    out << "},\"layer3\":{\"w\":";
    w.matrix(net.dense2.w);
    out << ",\"b\":";
    w.flat(net.dense2.b);
    out << "}}}";
    out << '\n';
    return out.str();
}

inline void save_model(const BiLstmNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("CorruptFile", "cannot open '" + path + "' for writing");
    out << serialize_model(net);
    if (!out) throw_data("CorruptFile", "failed writing '" + path + "'");
}

inline BiLstmNetwork deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_data("CorruptFile", std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("format_version") || !j["format_version"].is_number_integer())
            throw_data("CorruptFile", "model file lacks a format_version");
        const int version = j["format_version"].get<int>();
        if (version != kModelFormatVersion)
            throw_data("VersionMismatch",
                       "model format " + std::to_string(version) + " is not supported");

        const auto& arch = j.at("architecture");
        const auto& layers = arch.at("layers");
        if (!layers.is_array() || layers.size() != 4)
            throw_data("CorruptFile", "expected a 4-layer architecture");

        BiLstmNetwork net;
        net.lookback = arch.at("lookback").get<int>();
        net.features = arch.at("features").get<std::vector<std::string>>();
        net.seed = j.at("seed").get<std::uint64_t>();

        const auto& scaler = j.at("scaler");
        net.scaler.columns = scaler.at("columns").get<std::vector<std::string>>();
        const auto mins = scaler.at("mins").get<std::vector<double>>();
        const auto maxs = scaler.at("maxs").get<std::vector<double>>();
        if (mins.size() != net.scaler.columns.size() || maxs.size() != net.scaler.columns.size())
            throw_data("CorruptFile", "scaler arrays disagree with the column list");
        net.scaler.mins = Eigen::Map<const Eigen::VectorXd>(mins.data(),
                                                            static_cast<Eigen::Index>(mins.size()));
        net.scaler.maxs = Eigen::Map<const Eigen::VectorXd>(maxs.data(),
                                                            static_cast<Eigen::Index>(maxs.size()));

        const int f = static_cast<int>(net.features.size());
        const int h1 = layers[0].at("hidden").get<int>();
        const int h2 = layers[1].at("hidden").get<int>();
        const int dh = layers[2].at("hidden").get<int>();
        const int outputs = layers[3].at("hidden").get<int>();
        net.layer1.hidden = h1;
        net.layer1.activation = activation_from_name(layers[0].at("activation").get<std::string>());
        net.layer2.hidden = h2;
        net.layer2.activation = activation_from_name(layers[1].at("activation").get<std::string>());

        const auto& weights = j.at("weights");
        const auto& l0 = weights.at("layer0");
        net.layer1.forward_cell = detail::cell_from_json(l0.at("forward"), f, h1);
        net.layer1.backward_cell = detail::cell_from_json(l0.at("backward"), f, h1);
        const auto& l1 = weights.at("layer1");
        net.layer2.forward_cell = detail::cell_from_json(l1.at("forward"), 2 * h1, h2);
        net.layer2.backward_cell = detail::cell_from_json(l1.at("backward"), 2 * h1, h2);
        net.dense1.activation = activation_from_name(layers[2].at("activation").get<std::string>());
        net.dense1.w = detail::matrix_from_json(weights.at("layer2").at("w"), dh, 2 * h2);
        net.dense1.b = detail::flat_from_json(weights.at("layer2").at("b"), dh);
        net.dense2.activation = activation_from_name(layers[3].at("activation").get<std::string>());
        net.dense2.w = detail::matrix_from_json(weights.at("layer3").at("w"), outputs, dh);
        net.dense2.b = detail::flat_from_json(weights.at("layer3").at("b"), outputs);
        return net;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw_data("CorruptFile", std::string("model file structure is invalid: ") + e.what());
    }
}

inline BiLstmNetwork load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("CorruptFile", "cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace aqf
