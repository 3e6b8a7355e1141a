#include "vbc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace vbc {

namespace {
Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}
} // namespace

void LstmParams::init(int input_dim, int hidden_dim, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    wx = Eigen::MatrixXd::NullaryExpr(4 * hidden_dim, input_dim, [&]() { return dist(rng); });
    wh = Eigen::MatrixXd::NullaryExpr(4 * hidden_dim, hidden_dim, [&]() { return dist(rng); });
    b = Eigen::VectorXd::Zero(4 * hidden_dim);
    // Forget-gate bias at 1 keeps early memory open.
    b.segment(hidden_dim, hidden_dim).setOnes();
}

Eigen::MatrixXd lstm_forward(const LstmParams& p, const Eigen::MatrixXd& x, LstmCache* cache) {
    const int hid = p.hidden();
    const int T = static_cast<int>(x.cols());
    if (x.rows() != p.wx.cols()) throw std::invalid_argument("lstm_forward: input width mismatch");

    Eigen::MatrixXd ig(hid, T), fg(hid, T), gg(hid, T), og(hid, T), c(hid, T), tc(hid, T),
        h(hid, T);
    Eigen::VectorXd hprev = Eigen::VectorXd::Zero(hid);
    Eigen::VectorXd cprev = Eigen::VectorXd::Zero(hid);

    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd a = p.wx * x.col(t) + p.wh * hprev + p.b;
        ig.col(t) = sigmoid(a.segment(0, hid));
        fg.col(t) = sigmoid(a.segment(hid, hid));
        gg.col(t) = a.segment(2 * hid, hid).array().tanh().matrix();
        og.col(t) = sigmoid(a.segment(3 * hid, hid));
        c.col(t) = fg.col(t).cwiseProduct(cprev) + ig.col(t).cwiseProduct(gg.col(t));
        tc.col(t) = c.col(t).array().tanh().matrix();
        h.col(t) = og.col(t).cwiseProduct(tc.col(t));
        hprev = h.col(t);
        cprev = c.col(t);
    }
    if (cache) {
        cache->x = x;
        cache->ig = std::move(ig);
        cache->fg = std::move(fg);
        cache->gg = std::move(gg);
        cache->og = std::move(og);
        cache->c = std::move(c);
        cache->tc = std::move(tc);
        cache->h = h;
    }
    return h;
}

void LstmGrads::init_like(const LstmParams& p) {
    wx = Eigen::MatrixXd::Zero(p.wx.rows(), p.wx.cols());
    wh = Eigen::MatrixXd::Zero(p.wh.rows(), p.wh.cols());
    b = Eigen::VectorXd::Zero(p.b.size());
}

void lstm_backward(const LstmParams& p, const LstmCache& cache, const Eigen::MatrixXd& dh,
                   LstmGrads& grads) {
    const int hid = p.hidden();
    const int T = static_cast<int>(cache.x.cols());

    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hid);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hid);
    Eigen::VectorXd da(4 * hid);

    for (int t = T - 1; t >= 0; --t) {
        const Eigen::VectorXd dht = dh.col(t) + dh_next;
        const auto& i = cache.ig.col(t);
        const auto& f = cache.fg.col(t);
        const auto& g = cache.gg.col(t);
        const auto& o = cache.og.col(t);
        const auto& tc = cache.tc.col(t);

        const Eigen::VectorXd dO = dht.cwiseProduct(tc);
        Eigen::VectorXd dc =
            dht.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;

        const Eigen::VectorXd cprev =
            (t > 0) ? cache.c.col(t - 1) : Eigen::VectorXd::Zero(hid).eval();
        const Eigen::VectorXd dF = dc.cwiseProduct(cprev);
        const Eigen::VectorXd dI = dc.cwiseProduct(g);
        const Eigen::VectorXd dG = dc.cwiseProduct(i);

        da.segment(0, hid) = dI.cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
        da.segment(hid, hid) = dF.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
        da.segment(2 * hid, hid) = dG.cwiseProduct((1.0 - g.array().square()).matrix());
        da.segment(3 * hid, hid) = dO.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

        grads.wx += da * cache.x.col(t).transpose();
        if (t > 0) grads.wh += da * cache.h.col(t - 1).transpose();
        grads.b += da;

        dh_next = p.wh.transpose() * da;
        dc_next = dc.cwiseProduct(f);
    }
}

void MlpParams::init(int input_dim, int hidden_dim, int output_dim, std::mt19937_64& rng,
                     double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    w1 = Eigen::MatrixXd::NullaryExpr(hidden_dim, input_dim, [&]() { return dist(rng); });
    b1 = Eigen::VectorXd::Zero(hidden_dim);
    w2 = Eigen::MatrixXd::NullaryExpr(output_dim, hidden_dim, [&]() { return dist(rng); });
    b2 = Eigen::VectorXd::Zero(output_dim);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double mx = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

Eigen::VectorXd softmax_backward(const Eigen::VectorXd& prob, const Eigen::VectorXd& dprob) {
    const double dot = prob.dot(dprob);
    return prob.cwiseProduct(dprob - Eigen::VectorXd::Constant(prob.size(), dot));
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& x, MlpCache* cache,
                            const Eigen::VectorXd* hidden_mask) {
    if (x.size() != p.w1.cols()) throw std::invalid_argument("mlp_forward: input width mismatch");
    Eigen::VectorXd u = ((p.w1 * x + p.b1).array().tanh()).matrix();
    Eigen::VectorXd ud = hidden_mask ? u.cwiseProduct(*hidden_mask).eval() : u;
    Eigen::VectorXd prob = softmax(p.w2 * ud + p.b2);
    if (cache) {
        cache->x = x;
        cache->u = std::move(u);
        cache->ud = std::move(ud);
        cache->prob = prob;
        cache->mask = hidden_mask ? *hidden_mask : Eigen::VectorXd();
    }
    return prob;
}

void MlpGrads::init_like(const MlpParams& p) {
    w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
    b1 = Eigen::VectorXd::Zero(p.b1.size());
    w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
    b2 = Eigen::VectorXd::Zero(p.b2.size());
}

void mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::VectorXd& dlogits,
                  MlpGrads& grads, Eigen::VectorXd* dx) {
    grads.w2 += dlogits * cache.ud.transpose();
    grads.b2 += dlogits;
    Eigen::VectorXd dud = p.w2.transpose() * dlogits;
    if (cache.mask.size() > 0) dud = dud.cwiseProduct(cache.mask);
    const Eigen::VectorXd da1 =
        dud.cwiseProduct((1.0 - cache.u.array().square()).matrix());
    grads.w1 += da1 * cache.x.transpose();
    grads.b1 += da1;
    if (dx) *dx = p.w1.transpose() * da1;
}

Eigen::VectorXd dropout_mask(int size, double keep, std::mt19937_64& rng) {
    if (keep >= 1.0) return Eigen::VectorXd::Ones(size);
    if (keep <= 0.0) throw std::invalid_argument("dropout_mask: keep must be in (0, 1]");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd m(size);
    for (int i = 0; i < size; ++i) m(i) = (u(rng) < keep) ? 1.0 / keep : 0.0;
    return m;
}

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    constexpr double eps = 1e-12;
    double kl = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        kl += p(i) * (std::log(std::max(p(i), eps)) - std::log(std::max(q(i), eps)));
    }
    return kl;
}

void AdamState::init(int n) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
    t = 0;
}

void AdamState::step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (m.size() != params.size()) init(static_cast<int>(params.size()));
    ++t;
    m = beta1 * m + (1.0 - beta1) * grads;
    v = beta2 * v + (1.0 - beta2) * grads.cwiseProduct(grads);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const Eigen::VectorXd mhat = m / bc1;
    const Eigen::VectorXd vhat = v / bc2;
    params -= lr * mhat.cwiseQuotient((vhat.cwiseSqrt().array() + eps).matrix());
}

} // namespace vbc
