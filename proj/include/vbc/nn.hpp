#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace vbc {

// Single-layer LSTM. Gate rows are stacked [input; forget; candidate;
// output], each block hidden_dim tall.
struct LstmParams {
    Eigen::MatrixXd wx; // 4H x D
    Eigen::MatrixXd wh; // 4H x H
    Eigen::VectorXd b;  // 4H

    int hidden() const { return static_cast<int>(wh.cols()); }
    int input() const { return static_cast<int>(wx.cols()); }
    void init(int input_dim, int hidden_dim, std::mt19937_64& rng, double scale = 0.1);
};

struct LstmCache {
    Eigen::MatrixXd x;  // D x T (normalized inputs)
    Eigen::MatrixXd ig, fg, gg, og; // H x T gate activations
    Eigen::MatrixXd c, tc, h;       // H x T cell, tanh(cell), hidden
};

// Returns hidden states H x T. Cache is required for backward.
Eigen::MatrixXd lstm_forward(const LstmParams& p, const Eigen::MatrixXd& x, LstmCache* cache);

struct LstmGrads {
    Eigen::MatrixXd wx, wh;
    Eigen::VectorXd b;
    void init_like(const LstmParams& p);
};

// Accumulates parameter gradients from dh (gradient w.r.t. every hidden
// state, H x T).
void lstm_backward(const LstmParams& p, const LstmCache& cache, const Eigen::MatrixXd& dh,
                   LstmGrads& grads);

// Two-layer perceptron with tanh hidden and softmax output.
struct MlpParams {
    Eigen::MatrixXd w1; // hidden x in
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2; // out x hidden
    Eigen::VectorXd b2;

    int input() const { return static_cast<int>(w1.cols()); }
    int output() const { return static_cast<int>(w2.rows()); }
    void init(int input_dim, int hidden_dim, int output_dim, std::mt19937_64& rng,
              double scale = 0.1);
};

struct MlpCache {
    Eigen::VectorXd x, u, ud, prob;
    Eigen::VectorXd mask; // empty = no dropout
};

// Softmax probabilities. hidden_mask (inverted-dropout scale factors) may be
// null for inference.
Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& x, MlpCache* cache,
                            const Eigen::VectorXd* hidden_mask = nullptr);

struct MlpGrads {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;
    void init_like(const MlpParams& p);
};

// dlogits is the gradient w.r.t. pre-softmax logits. dx, when non-null,
// receives the gradient w.r.t. the input.
void mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::VectorXd& dlogits,
                  MlpGrads& grads, Eigen::VectorXd* dx);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Gradient w.r.t. logits given the gradient w.r.t. softmax outputs.
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& prob, const Eigen::VectorXd& dprob);

// Inverted-dropout mask: entries are 0 or 1/keep. keep == 1 yields all-ones.
Eigen::VectorXd dropout_mask(int size, double keep, std::mt19937_64& rng);

// KL(p || q) with a 1e-12 floor inside the logs; 0*log0 = 0.
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Eigen::VectorXd m, v;
    long t = 0;

    void init(int n);
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);
};

} // namespace vbc
