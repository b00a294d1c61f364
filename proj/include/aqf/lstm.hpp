#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <string_view>

#include "aqf/errors.hpp"

namespace aqf {

// ---------------------------------------------------------------------------
// Activations. The per-layer activation replaces the candidate and cell-output
// nonlinearity of the LSTM cell; gate sigmoids are never replaced.
// ---------------------------------------------------------------------------

enum class Activation { Relu, Tanh, Sigmoid, Identity };

inline std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

inline Activation activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "identity") return Activation::Identity;
    throw_data("CorruptFile", "unknown activation '" + std::string(name) + "'");
}

namespace act {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <class Derived>
auto apply(Activation a, const Eigen::ArrayBase<Derived>& x) {
    using Arr = Eigen::ArrayXd;
    switch (a) {
        case Activation::Relu: return Arr(x.max(0.0));
        case Activation::Tanh: return Arr(x.tanh());
        case Activation::Sigmoid: return Arr(1.0 / (1.0 + (-x).exp()));
        case Activation::Identity: return Arr(x);
    }
    return Arr(x);
}

// Derivative expressed through the activated value; valid for every
// activation supported here (relu's subgradient at 0 is taken as 0).
template <class Derived>
auto grad_from_output(Activation a, const Eigen::ArrayBase<Derived>& y) {
    using Arr = Eigen::ArrayXd;
    switch (a) {
        case Activation::Relu: return Arr((y > 0.0).template cast<double>());
        case Activation::Tanh: return Arr(1.0 - y.square());
        case Activation::Sigmoid: return Arr(y * (1.0 - y));
        case Activation::Identity: return Arr(Arr::Ones(y.size()));
    }
    return Arr(Arr::Ones(y.size()));
}

}  // namespace act

// ---------------------------------------------------------------------------
// LSTM cell. The stacked weight layout is [input | forget | candidate |
// output] along the rows of w_x (4H x F), w_h (4H x H) and b (4H x 1).
// ---------------------------------------------------------------------------

struct LstmCellParams {
    Eigen::MatrixXd w_x;
    Eigen::MatrixXd w_h;
    Eigen::MatrixXd b;

    int hidden() const { return static_cast<int>(w_h.cols()); }
    int input_size() const { return static_cast<int>(w_x.cols()); }
};

struct LstmCellGrads {
    Eigen::MatrixXd w_x;
    Eigen::MatrixXd w_h;
    Eigen::MatrixXd b;

    void match(const LstmCellParams& p) {
        w_x.setZero(p.w_x.rows(), p.w_x.cols());
        w_h.setZero(p.w_h.rows(), p.w_h.cols());
        b.setZero(p.b.rows(), p.b.cols());
    }
};

// One step of the gated recurrence:
//   z = w_x x_t + w_h h_prev + b,  split into [zi zf zg zo]
//   i = s(zi), f = s(zf), g = act(zg), o = s(zo)
//   c_t = f . c_prev + i . g,      h_t = o . act(c_t)
inline void lstm_cell_forward(const LstmCellParams& p, Activation a, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                              Eigen::VectorXd& h_out, Eigen::VectorXd& c_out) {
    const int h = p.hidden();
    if (x.size() != p.w_x.cols() || h_prev.size() != h || c_prev.size() != h)
        throw_data("ShapeMismatch", "cell input shapes do not match the parameters");
    Eigen::VectorXd z = p.w_x * x + p.w_h * h_prev + p.b;
    if (!z.allFinite()) throw_numeric("NonFiniteValue", "cell pre-activations are not finite");
    const auto zi = z.segment(0, h).array();
    const auto zf = z.segment(h, h).array();
    const auto zg = z.segment(2 * h, h).array();
    const auto zo = z.segment(3 * h, h).array();
    const Eigen::ArrayXd gi = act::apply(Activation::Sigmoid, zi);
    const Eigen::ArrayXd gf = act::apply(Activation::Sigmoid, zf);
    const Eigen::ArrayXd gg = act::apply(a, zg);
    const Eigen::ArrayXd go = act::apply(Activation::Sigmoid, zo);
    c_out = (gf * c_prev.array() + gi * gg).matrix();
    h_out = (go * act::apply(a, c_out.array())).matrix();
}

// Per-scan cache, one column per step in scan order. Reused across samples to
// keep the training loop free of per-step allocations.
struct LstmScanCache {
    Eigen::MatrixXd x;       // F x T inputs
    Eigen::MatrixXd h, c;    // H x T states after each step
    Eigen::MatrixXd gi, gf, gg, go;
    Eigen::MatrixXd act_c;   // act(c_t)
    int steps = 0;

    void resize(int f, int hidden, int t) {
        x.resize(f, t);
        for (auto* m : {&h, &c, &gi, &gf, &gg, &go, &act_c}) m->resize(hidden, t);
        steps = t;
    }
};

// Scans the cell over cache.x (already laid out in scan order) from a zero
// initial state, filling the cache.
inline void lstm_scan_forward(const LstmCellParams& p, Activation a, LstmScanCache& cache) {
    const int h = p.hidden();
    const int t_steps = cache.steps;
    Eigen::VectorXd z(4 * h);
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
    for (int t = 0; t < t_steps; ++t) {
        z.noalias() = p.w_x * cache.x.col(t);
        z.noalias() += p.w_h * h_prev;
        z += p.b;
        cache.gi.col(t) = act::apply(Activation::Sigmoid, z.segment(0, h).array()).matrix();
        cache.gf.col(t) = act::apply(Activation::Sigmoid, z.segment(h, h).array()).matrix();
        cache.gg.col(t) = act::apply(a, z.segment(2 * h, h).array()).matrix();
        cache.go.col(t) = act::apply(Activation::Sigmoid, z.segment(3 * h, h).array()).matrix();
        cache.c.col(t) = cache.gf.col(t).cwiseProduct(c_prev) +
                         cache.gi.col(t).cwiseProduct(cache.gg.col(t));
        cache.act_c.col(t) = act::apply(a, cache.c.col(t).array()).matrix();
        cache.h.col(t) = cache.go.col(t).cwiseProduct(cache.act_c.col(t));
        h_prev = cache.h.col(t);
        c_prev = cache.c.col(t);
    }
}

// Backpropagation through time over one scan. d_h carries dL/dh_t per step in
// scan order; parameter gradients accumulate into `grads`, input gradients
// into d_x (same layout as cache.x).
inline void lstm_scan_backward(const LstmCellParams& p, Activation a, const LstmScanCache& cache,
                               const Eigen::MatrixXd& d_h, LstmCellGrads& grads,
                               Eigen::MatrixXd& d_x) {
    const int h = p.hidden();
    const int t_steps = cache.steps;
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dz(4 * h);
    for (int t = t_steps - 1; t >= 0; --t) {
        const Eigen::ArrayXd gi = cache.gi.col(t).array();
        const Eigen::ArrayXd gf = cache.gf.col(t).array();
        const Eigen::ArrayXd gg = cache.gg.col(t).array();
        const Eigen::ArrayXd go = cache.go.col(t).array();
        const Eigen::ArrayXd dh = d_h.col(t).array() + dh_next.array();

        // h_t = o . act(c_t)
        const Eigen::ArrayXd d_act_c = dh * go;
        Eigen::ArrayXd dc = dc_next.array() +
                            d_act_c * act::grad_from_output(a, cache.act_c.col(t).array());
        const Eigen::ArrayXd dzo = dh * cache.act_c.col(t).array() * go * (1.0 - go);

        // c_t = f . c_prev + i . g
        Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(h);
        if (t > 0) c_prev = cache.c.col(t - 1).array();
        const Eigen::ArrayXd dzi = dc * gg * gi * (1.0 - gi);
        const Eigen::ArrayXd dzf = dc * c_prev * gf * (1.0 - gf);
        const Eigen::ArrayXd dzg = dc * gi * act::grad_from_output(a, gg);

        dz.segment(0, h) = dzi.matrix();
        dz.segment(h, h) = dzf.matrix();
        dz.segment(2 * h, h) = dzg.matrix();
        dz.segment(3 * h, h) = dzo.matrix();

        grads.w_x.noalias() += dz * cache.x.col(t).transpose();
        if (t > 0) grads.w_h.noalias() += dz * cache.h.col(t - 1).transpose();
        grads.b += dz;

        d_x.col(t).noalias() += p.w_x.transpose() * dz;
        dh_next.noalias() = p.w_h.transpose() * dz;
        dc_next = (dc * gf).matrix();
    }
}

// ---------------------------------------------------------------------------
// Bidirectional layer: one cell scans forward, a twin scans the reversed
// sequence; the output at step t concatenates the two states at t.
// ---------------------------------------------------------------------------

struct BiLstmLayer {
    LstmCellParams forward_cell;
    LstmCellParams backward_cell;
    Activation activation = Activation::Tanh;
    int hidden = 0;
};

struct BiLstmCache {
    LstmScanCache fwd, bwd;
};

struct BiLstmGrads {
    LstmCellGrads fwd, bwd;

    void match(const BiLstmLayer& l) {
        fwd.match(l.forward_cell);
        bwd.match(l.backward_cell);
    }
};

// inputs: F x T in time order; outputs: 2H x T in time order (forward state on
// top of backward state).
inline void bilstm_forward(const BiLstmLayer& layer, const Eigen::MatrixXd& inputs,
                           BiLstmCache& cache, Eigen::MatrixXd& outputs) {
    const int t_steps = static_cast<int>(inputs.cols());
    if (t_steps < 1) throw_data("EmptySequence", "need at least one time step");
    if (inputs.rows() != layer.forward_cell.w_x.cols())
        throw_data("ShapeMismatch", "input width does not match the layer");
    const int f = static_cast<int>(inputs.rows());
    const int h = layer.hidden;
    cache.fwd.resize(f, h, t_steps);
    cache.bwd.resize(f, h, t_steps);
    cache.fwd.x = inputs;
    for (int t = 0; t < t_steps; ++t) cache.bwd.x.col(t) = inputs.col(t_steps - 1 - t);
    lstm_scan_forward(layer.forward_cell, layer.activation, cache.fwd);
    lstm_scan_forward(layer.backward_cell, layer.activation, cache.bwd);
    outputs.resize(2 * h, t_steps);
    outputs.topRows(h) = cache.fwd.h;
    for (int t = 0; t < t_steps; ++t)
        outputs.bottomRows(h).col(t) = cache.bwd.h.col(t_steps - 1 - t);
}

inline void bilstm_backward(const BiLstmLayer& layer, const BiLstmCache& cache,
                            const Eigen::MatrixXd& d_out, BiLstmGrads& grads,
                            Eigen::MatrixXd& d_inputs) {
    const int t_steps = cache.fwd.steps;
    const int h = layer.hidden;
    const int f = static_cast<int>(cache.fwd.x.rows());

    Eigen::MatrixXd d_x_fwd = Eigen::MatrixXd::Zero(f, t_steps);
    Eigen::MatrixXd d_x_bwd = Eigen::MatrixXd::Zero(f, t_steps);
    Eigen::MatrixXd d_h_bwd(h, t_steps);
    for (int t = 0; t < t_steps; ++t)
        d_h_bwd.col(t) = d_out.bottomRows(h).col(t_steps - 1 - t);

    lstm_scan_backward(layer.forward_cell, layer.activation, cache.fwd, d_out.topRows(h),
                       grads.fwd, d_x_fwd);
    lstm_scan_backward(layer.backward_cell, layer.activation, cache.bwd, d_h_bwd, grads.bwd,
                       d_x_bwd);

    d_inputs = d_x_fwd;
    for (int t = 0; t < t_steps; ++t) d_inputs.col(t) += d_x_bwd.col(t_steps - 1 - t);
}

}  // namespace aqf
