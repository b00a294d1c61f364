#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/network.hpp"

namespace aqf {

// Adam with the standard bias correction:
//   m <- b1 m + (1-b1) g        v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * m-hat / (sqrt(v-hat) + eps)
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long long t = 0;
    std::vector<Eigen::MatrixXd> m, v;

    void reset(BiLstmNetwork& net) {
        m.clear();
        v.clear();
        t = 0;
        for_each_param(net, [&](const Eigen::MatrixXd& p, const char*) {
            m.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
            v.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
        });
    }

    void step(BiLstmNetwork& net, NetworkGrads& grads) {
        if (m.empty()) reset(net);
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        std::size_t i = 0;
        std::vector<Eigen::MatrixXd*> gs;
        grads.for_each([&](Eigen::MatrixXd& g) { gs.push_back(&g); });
        for_each_param(net, [&](Eigen::MatrixXd& p, const char*) {
            const Eigen::MatrixXd& g = *gs[i];
            if (g.rows() != p.rows() || g.cols() != p.cols())
                throw_data("ShapeMismatch", "gradient/parameter shape mismatch");
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g.cwiseProduct(g);
            const Eigen::ArrayXXd m_hat = m[i].array() / bc1;
            const Eigen::ArrayXXd v_hat = v[i].array() / bc2;
            p.array() -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            ++i;
        });
    }
};

// Scales all gradients so their global L2 norm does not exceed `max_norm`.
// Returns true when clipping fired.
inline bool clip_by_global_norm(NetworkGrads& grads, double max_norm) {
    double sq = 0.0;
    grads.for_each([&](Eigen::MatrixXd& g) { sq += g.squaredNorm(); });
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return false;
    const double scale = max_norm / norm;
    grads.for_each([&](Eigen::MatrixXd& g) { g *= scale; });
    return true;
}

}  // namespace aqf
