#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/lstm.hpp"
#include "aqf/preprocess.hpp"
#include "aqf/rng.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Dense layers
// ---------------------------------------------------------------------------

struct DenseLayer {
    Eigen::MatrixXd w;  // out x in
    Eigen::MatrixXd b;  // out x 1
    Activation activation = Activation::Identity;

    int outputs() const { return static_cast<int>(w.rows()); }
    int inputs() const { return static_cast<int>(w.cols()); }
};

struct DenseGrads {
    Eigen::MatrixXd w;
    Eigen::MatrixXd b;

    void match(const DenseLayer& l) {
        w.setZero(l.w.rows(), l.w.cols());
        b.setZero(l.b.rows(), l.b.cols());
    }
};

inline Eigen::VectorXd dense_forward(const DenseLayer& l, const Eigen::VectorXd& in) {
    if (in.size() != l.w.cols()) throw_data("ShapeMismatch", "dense input width mismatch");
    Eigen::VectorXd z = l.w * in + l.b;
    return act::apply(l.activation, z.array()).matrix();
}

// d_out is dL/d(activated output); returns dL/d(input).
inline Eigen::VectorXd dense_backward(const DenseLayer& l, const Eigen::VectorXd& in,
                                      const Eigen::VectorXd& out, const Eigen::VectorXd& d_out,
                                      DenseGrads& grads) {
    const Eigen::VectorXd dz =
        (d_out.array() * act::grad_from_output(l.activation, out.array())).matrix();
    grads.w.noalias() += dz * in.transpose();
    grads.b += dz;
    return l.w.transpose() * dz;
}

// ---------------------------------------------------------------------------
// The forecaster: two bidirectional LSTM layers, a dense hidden layer, and a
// 2-unit sigmoid output (one per pollutant). The scaler travels with the
// weights so a loaded model predicts in original units.
// ---------------------------------------------------------------------------

struct BiLstmNetwork {
    BiLstmLayer layer1;
    BiLstmLayer layer2;
    DenseLayer dense1;
    DenseLayer dense2;
    ScalerParams scaler;
    std::vector<std::string> features;
    int lookback = 24;
    std::uint64_t seed = 0;

    int feature_count() const { return static_cast<int>(features.size()); }
};

struct NetworkConfig {
    std::vector<std::string> features = {"wd", "ws", "temp", "rh", "rfall", "pm25", "pm10"};
    int lookback = 24;
    int hidden1 = 20;
    Activation act1 = Activation::Relu;
    int hidden2 = 10;
    Activation act2 = Activation::Tanh;
    int dense_hidden = 1024;
    Activation dense_act = Activation::Relu;
    int outputs = 2;
    std::uint64_t seed = 42;
};

// Applies `fn(tensor, id)` to every parameter matrix in a fixed order; the
// same order drives initialization, Adam state, and serialization.
template <class Net, class Fn>
void for_each_param(Net& net, Fn&& fn) {
    fn(net.layer1.forward_cell.w_x, "layer0.forward.w_x");
    fn(net.layer1.forward_cell.w_h, "layer0.forward.w_h");
    fn(net.layer1.forward_cell.b, "layer0.forward.b");
    fn(net.layer1.backward_cell.w_x, "layer0.backward.w_x");
    fn(net.layer1.backward_cell.w_h, "layer0.backward.w_h");
    fn(net.layer1.backward_cell.b, "layer0.backward.b");
    fn(net.layer2.forward_cell.w_x, "layer1.forward.w_x");
    fn(net.layer2.forward_cell.w_h, "layer1.forward.w_h");
    fn(net.layer2.forward_cell.b, "layer1.forward.b");
    fn(net.layer2.backward_cell.w_x, "layer1.backward.w_x");
    fn(net.layer2.backward_cell.w_h, "layer1.backward.w_h");
    fn(net.layer2.backward_cell.b, "layer1.backward.b");
    fn(net.dense1.w, "layer2.w");
    fn(net.dense1.b, "layer2.b");
    fn(net.dense2.w, "layer3.w");
    fn(net.dense2.b, "layer3.b");
}

struct NetworkGrads {
    BiLstmGrads l1, l2;
    DenseGrads d1, d2;

    void match(const BiLstmNetwork& net) {
        l1.match(net.layer1);
        l2.match(net.layer2);
        d1.match(net.dense1);
        d2.match(net.dense2);
    }

    template <class Fn>
    void for_each(Fn&& fn) {
        fn(l1.fwd.w_x); fn(l1.fwd.w_h); fn(l1.fwd.b);
        fn(l1.bwd.w_x); fn(l1.bwd.w_h); fn(l1.bwd.b);
        fn(l2.fwd.w_x); fn(l2.fwd.w_h); fn(l2.fwd.b);
        fn(l2.bwd.w_x); fn(l2.bwd.w_h); fn(l2.bwd.b);
        fn(d1.w); fn(d1.b);
        fn(d2.w); fn(d2.b);
    }

    void set_zero() {
        for_each([](Eigen::MatrixXd& m) { m.setZero(); });
    }
};

namespace detail {

inline void glorot_fill(Eigen::MatrixXd& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
}

inline LstmCellParams init_cell(int input, int hidden, Rng& rng) {
    LstmCellParams p;
    p.w_x.resize(4 * hidden, input);
    p.w_h.resize(4 * hidden, hidden);
    glorot_fill(p.w_x, rng);
    glorot_fill(p.w_h, rng);
    p.b.setZero(4 * hidden, 1);
    p.b.block(hidden, 0, hidden, 1).setOnes();  // forget-gate bias starts at 1
    return p;
}

inline DenseLayer init_dense(int input, int output, Activation a, Rng& rng) {
    DenseLayer l;
    l.w.resize(output, input);
    glorot_fill(l.w, rng);
    l.b.setZero(output, 1);
    l.activation = a;
    return l;
}

}  // namespace detail

inline BiLstmNetwork build_network(const NetworkConfig& cfg, ScalerParams scaler) {
    if (cfg.lookback < 1) throw_usage("BadConfig", "lookback must be >= 1");
    if (cfg.features.empty()) throw_usage("BadConfig", "feature list is empty");
    BiLstmNetwork net;
    net.scaler = std::move(scaler);
    net.features = cfg.features;
    net.lookback = cfg.lookback;
    net.seed = cfg.seed;

    Rng rng(cfg.seed);
    const int f = static_cast<int>(cfg.features.size());
    net.layer1.hidden = cfg.hidden1;
    net.layer1.activation = cfg.act1;
    net.layer1.forward_cell = detail::init_cell(f, cfg.hidden1, rng);
    net.layer1.backward_cell = detail::init_cell(f, cfg.hidden1, rng);
    net.layer2.hidden = cfg.hidden2;
    net.layer2.activation = cfg.act2;
    net.layer2.forward_cell = detail::init_cell(2 * cfg.hidden1, cfg.hidden2, rng);
    net.layer2.backward_cell = detail::init_cell(2 * cfg.hidden1, cfg.hidden2, rng);
    net.dense1 = detail::init_dense(2 * cfg.hidden2, cfg.dense_hidden, cfg.dense_act, rng);
    net.dense2 = detail::init_dense(cfg.dense_hidden, cfg.outputs, Activation::Sigmoid, rng);
    return net;
}

// Scratch space for one forward/backward pass; reusable across samples.
struct ForwardCaches {
    BiLstmCache l1, l2;
    Eigen::MatrixXd seq1, seq2;  // layer outputs, 2H x T in time order
    Eigen::VectorXd head_in;     // seq2 at the final step
    Eigen::VectorXd a1;          // dense hidden activations
    Eigen::VectorXd out;         // network output in (0, 1)^2
};

// window: F x L, column t = scaled feature vector at step t.
inline Eigen::Vector2d network_forward(const BiLstmNetwork& net, const Eigen::MatrixXd& window,
                                       ForwardCaches& caches) {
    if (window.rows() != net.feature_count() || window.cols() != net.lookback)
        throw_data("ShapeMismatch", "window must be features x lookback");
    bilstm_forward(net.layer1, window, caches.l1, caches.seq1);
    bilstm_forward(net.layer2, caches.seq1, caches.l2, caches.seq2);
    caches.head_in = caches.seq2.col(caches.seq2.cols() - 1);
    caches.a1 = dense_forward(net.dense1, caches.head_in);
    caches.out = dense_forward(net.dense2, caches.a1);
    return caches.out;
}

// d_out is dL/d(network output); gradients accumulate into `grads`. The caches
// must come from a forward pass of this same network.
inline void network_backward(const BiLstmNetwork& net, const ForwardCaches& caches,
                             const Eigen::Vector2d& d_out, NetworkGrads& grads) {
    if (caches.seq1.rows() != 2 * net.layer1.hidden || caches.seq1.cols() != net.lookback ||
        caches.seq2.rows() != 2 * net.layer2.hidden || caches.seq2.cols() != net.lookback ||
        caches.head_in.size() != net.dense1.inputs() || caches.a1.size() != net.dense1.outputs() ||
        caches.out.size() != net.dense2.outputs())
        throw_data("StaleCache", "caches do not match this network's forward pass");
    const Eigen::VectorXd d_a1 =
        dense_backward(net.dense2, caches.a1, caches.out, d_out, grads.d2);
    const Eigen::VectorXd d_head =
        dense_backward(net.dense1, caches.head_in, caches.a1, d_a1, grads.d1);

    Eigen::MatrixXd d_seq2 = Eigen::MatrixXd::Zero(caches.seq2.rows(), caches.seq2.cols());
    d_seq2.col(d_seq2.cols() - 1) = d_head;

    Eigen::MatrixXd d_seq1;
    bilstm_backward(net.layer2, caches.l2, d_seq2, grads.l2, d_seq1);
    Eigen::MatrixXd d_window;
    bilstm_backward(net.layer1, caches.l1, d_seq1, grads.l1, d_window);
}

}  // namespace aqf
