#include "vbc/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "vbc/errors.hpp"

namespace vbc {

using json = nlohmann::ordered_json;

namespace {
constexpr double kEps = 1e-12;

double safe_log(double v) { return std::log(std::max(v, kEps)); }
} // namespace

void ModelGrads::init_like(const ClusterModel& m) {
    lstm.init_like(m.lstm);
    assigner.init_like(m.assigner);
    predictor.init_like(m.predictor);
    centroids = Eigen::MatrixXd::Zero(m.centroids.rows(), m.centroids.cols());
}

Eigen::MatrixXd encode(const ClusterModel& model, const FeaturizedSequence& seq) {
    if (seq.steps.empty()) throw DataError("encode: empty sequence");
    const int dim = static_cast<int>(seq.steps.front().features.size());
    if (dim != model.enc.input_dim)
        throw DataError("encode: feature width " + std::to_string(dim) +
                        " does not match model input_dim " +
                        std::to_string(model.enc.input_dim));
    Eigen::MatrixXd x(dim, seq.steps.size());
    for (std::size_t t = 0; t < seq.steps.size(); ++t)
        x.col(static_cast<int>(t)) = model.norm.apply(seq.steps[t].features);
    return lstm_forward(model.lstm, x, nullptr);
}

Eigen::VectorXd assign(const ClusterModel& model, const Eigen::VectorXd& z) {
    return mlp_forward(model.assigner, z, nullptr);
}

int hard_cluster(const Eigen::VectorXd& probs) {
    int best = 0;
    for (int i = 1; i < probs.size(); ++i)
        if (probs(i) > probs(best)) best = i;
    return best;
}

LossBreakdown run_batch(const ClusterModel& model,
                        const std::vector<const FeaturizedSequence*>& batch,
                        const LossOptions& opt, ModelGrads* grads, std::mt19937_64* rng) {
    if (batch.empty()) throw DataError("run_batch: empty batch");
    const int hid = model.enc.hidden_dim;
    const int k = model.k;
    const int n_labels = model.label_count();
    const double keep = model.enc.dropout_keep;
    const bool use_dropout = rng != nullptr && keep < 1.0;

    std::size_t total_steps = 0;
    for (const FeaturizedSequence* s : batch) total_steps += s->steps.size();
    if (total_steps == 0) throw DataError("run_batch: no steps in batch");

    const double w_traj = 1.0 / static_cast<double>(batch.size());
    const double w_step = 1.0 / static_cast<double>(total_steps);
    const double w_kl = opt.kl_weight * w_step;

    // Centroid predictions are step-independent; evaluate once per batch.
    std::vector<MlpCache> cen_cache(static_cast<std::size_t>(k));
    std::vector<Eigen::VectorXd> cen_mask(static_cast<std::size_t>(k));
    Eigen::MatrixXd r(n_labels, k);
    for (int c = 0; c < k; ++c) {
        if (use_dropout) cen_mask[c] = dropout_mask(kMlpHidden, keep, *rng);
        r.col(c) = mlp_forward(model.predictor, model.centroids.row(c).transpose(), &cen_cache[c],
                               use_dropout ? &cen_mask[c] : nullptr);
    }
    std::vector<Eigen::VectorXd> cen_dlogits(static_cast<std::size_t>(k),
                                             Eigen::VectorXd::Zero(n_labels));

    double l1 = 0.0, l2 = 0.0, kl = 0.0;

    for (const FeaturizedSequence* seq : batch) {
        const int T = static_cast<int>(seq->steps.size());
        const int dim = static_cast<int>(seq->steps.front().features.size());
        if (dim != model.enc.input_dim) throw DataError("run_batch: feature width mismatch");

        Eigen::MatrixXd x(dim, T);
        for (int t = 0; t < T; ++t) x.col(t) = model.norm.apply(seq->steps[t].features);

        LstmCache lc;
        Eigen::MatrixXd h = lstm_forward(model.lstm, x, grads ? &lc : nullptr);

        Eigen::MatrixXd out_mask;
        if (use_dropout) {
            out_mask.resize(hid, T);
            for (int t = 0; t < T; ++t) out_mask.col(t) = dropout_mask(hid, keep, *rng);
            h = h.cwiseProduct(out_mask);
        }

        Eigen::MatrixXd dhd;
        if (grads) dhd = Eigen::MatrixXd::Zero(hid, T);

        for (int t = 0; t < T; ++t) {
            const int y = seq->labels[static_cast<std::size_t>(t)];
            if (y < 0 || y >= n_labels) throw DataError("run_batch: label index out of range");

            Eigen::VectorXd amask, pmask;
            if (use_dropout) {
                amask = dropout_mask(kMlpHidden, keep, *rng);
                pmask = dropout_mask(kMlpHidden, keep, *rng);
            }
            MlpCache qc, pc;
            const Eigen::VectorXd q =
                mlp_forward(model.assigner, h.col(t), &qc, use_dropout ? &amask : nullptr);
            const Eigen::VectorXd p =
                mlp_forward(model.predictor, h.col(t), &pc, use_dropout ? &pmask : nullptr);
            const Eigen::VectorXd ybar = r * q;

            l1 += w_traj * (-safe_log(p(y)));

            Eigen::VectorXd cvec(k);
            for (int c = 0; c < k; ++c) cvec(c) = -safe_log(r(y, c));
            if (opt.enable_l2) l2 += w_traj * q.dot(cvec);

            kl += w_step * kl_divergence(p, ybar);

            if (!grads) continue;

            // Predictor head at z: L1 plus the KL path through y-hat.
            Eigen::VectorXd dlogits_p = w_traj * p;
            dlogits_p(y) -= w_traj;
            Eigen::VectorXd dkl_dybar = Eigen::VectorXd::Zero(n_labels);
            if (opt.kl_weight > 0.0) {
                for (int i = 0; i < n_labels; ++i) dkl_dybar(i) = -p(i) / std::max(ybar(i), kEps);
                if (opt.kl_to_predictor) {
                    Eigen::VectorXd dkl_dp(n_labels);
                    for (int i = 0; i < n_labels; ++i)
                        dkl_dp(i) = safe_log(p(i)) - safe_log(ybar(i)) + 1.0;
                    dlogits_p += w_kl * softmax_backward(p, dkl_dp);
                }
            }

            // Assigner head: L2 weighting plus the KL path through y-bar.
            Eigen::VectorXd dlogits_q = Eigen::VectorXd::Zero(k);
            if (opt.enable_l2) dlogits_q += w_traj * softmax_backward(q, cvec);
            if (opt.kl_weight > 0.0 && opt.kl_to_assigner)
                dlogits_q += w_kl * softmax_backward(q, r.transpose() * dkl_dybar);

            // Centroid head: L2 cross-entropy plus the KL path, gathered per
            // cluster and backpropagated once per batch.
            for (int c = 0; c < k; ++c) {
                if (opt.enable_l2) {
                    Eigen::VectorXd d = w_traj * q(c) * r.col(c);
                    d(y) -= w_traj * q(c);
                    cen_dlogits[static_cast<std::size_t>(c)] += d;
                }
                if (opt.kl_weight > 0.0 && opt.kl_to_predictor)
                    cen_dlogits[static_cast<std::size_t>(c)] +=
                        softmax_backward(r.col(c), (w_kl * q(c)) * dkl_dybar);
            }

            Eigen::VectorXd dz_a, dz_p;
            mlp_backward(model.assigner, qc, dlogits_q, grads->assigner, &dz_a);
            mlp_backward(model.predictor, pc, dlogits_p, grads->predictor, &dz_p);
            dhd.col(t) = dz_a + dz_p;
        }

        if (grads) {
            if (use_dropout) dhd = dhd.cwiseProduct(out_mask);
            lstm_backward(model.lstm, lc, dhd, grads->lstm);
        }
    }

    if (grads) {
        for (int c = 0; c < k; ++c) {
            Eigen::VectorXd de;
            mlp_backward(model.predictor, cen_cache[static_cast<std::size_t>(c)],
                         cen_dlogits[static_cast<std::size_t>(c)], grads->predictor, &de);
            grads->centroids.row(c) += de.transpose();
        }
    }

    LossBreakdown out;
    out.l1 = l1;
    out.l2 = l2;
    out.kl = kl;
    out.total = l1 + l2 + opt.kl_weight * kl;
    return out;
}

LossBreakdown compute_losses(const ClusterModel& model,
                             const std::vector<FeaturizedSequence>& batch, double kl_weight) {
    std::vector<const FeaturizedSequence*> ptrs;
    ptrs.reserve(batch.size());
    for (const FeaturizedSequence& s : batch) ptrs.push_back(&s);
    LossOptions opt;
    opt.kl_weight = kl_weight;
    return run_batch(model, ptrs, opt, nullptr, nullptr);
}

namespace {

template <typename Fn>
void for_each_tensor(ClusterModel& m, Fn&& fn) {
    fn(m.lstm.wx);
    fn(m.lstm.wh);
    fn(m.lstm.b);
    fn(m.assigner.w1);
    fn(m.assigner.b1);
    fn(m.assigner.w2);
    fn(m.assigner.b2);
    fn(m.predictor.w1);
    fn(m.predictor.b1);
    fn(m.predictor.w2);
    fn(m.predictor.b2);
    fn(m.centroids);
}

template <typename Fn>
void for_each_tensor(const ClusterModel& m, Fn&& fn) {
    fn(m.lstm.wx);
    fn(m.lstm.wh);
    fn(m.lstm.b);
    fn(m.assigner.w1);
    fn(m.assigner.b1);
    fn(m.assigner.w2);
    fn(m.assigner.b2);
    fn(m.predictor.w1);
    fn(m.predictor.b1);
    fn(m.predictor.w2);
    fn(m.predictor.b2);
    fn(m.centroids);
}

template <typename Fn>
void for_each_grad(const ModelGrads& g, Fn&& fn) {
    fn(g.lstm.wx);
    fn(g.lstm.wh);
    fn(g.lstm.b);
    fn(g.assigner.w1);
    fn(g.assigner.b1);
    fn(g.assigner.w2);
    fn(g.assigner.b2);
    fn(g.predictor.w1);
    fn(g.predictor.b1);
    fn(g.predictor.w2);
    fn(g.predictor.b2);
    fn(g.centroids);
}

} // namespace

long param_count(const ClusterModel& model) {
    long n = 0;
    for_each_tensor(model, [&](const auto& t) { n += static_cast<long>(t.size()); });
    return n;
}

Eigen::VectorXd flatten_params(const ClusterModel& model) {
    Eigen::VectorXd flat(param_count(model));
    long off = 0;
    for_each_tensor(model, [&](const auto& t) {
        flat.segment(off, t.size()) = Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
        off += t.size();
    });
    return flat;
}

void unflatten_params(const Eigen::VectorXd& flat, ClusterModel& model) {
    if (flat.size() != param_count(model))
        throw std::invalid_argument("unflatten_params: size mismatch");
    long off = 0;
    for_each_tensor(model, [&](auto& t) {
        Eigen::Map<Eigen::VectorXd>(t.data(), t.size()) = flat.segment(off, t.size());
        off += t.size();
    });
}

Eigen::VectorXd flatten_grads(const ModelGrads& grads) {
    long n = 0;
    for_each_grad(grads, [&](const auto& t) { n += static_cast<long>(t.size()); });
    Eigen::VectorXd flat(n);
    long off = 0;
    for_each_grad(grads, [&](const auto& t) {
        flat.segment(off, t.size()) = Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
        off += t.size();
    });
    return flat;
}

namespace {

struct KMeansRun {
    Eigen::MatrixXd centers;
    std::vector<int> labels;
    double inertia = 0.0;
};

KMeansRun kmeans_once(const Eigen::MatrixXd& rows, int k, std::uint64_t seed, int max_iters) {
    const long n = rows.rows();
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(k, rows.cols());

    // k-means++ seeding.
    std::uniform_int_distribution<long> first(0, n - 1);
    centers.row(0) = rows.row(first(rng));
    Eigen::VectorXd dist2 = (rows.rowwise() - centers.row(0)).rowwise().squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        if (total <= 0.0)
            throw DataError("kmeans: fewer than K distinct points; choose a smaller K");
        double target = unit(rng) * total;
        long pick = n - 1;
        for (long i = 0; i < n; ++i) {
            target -= dist2(i);
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.row(c) = rows.row(pick);
        dist2 = dist2.cwiseMin((rows.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (long i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (rows.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
        std::vector<long> counts(static_cast<std::size_t>(k), 0);
        for (long i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                centers.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }

    KMeansRun run;
    run.inertia = 0.0;
    for (long i = 0; i < n; ++i)
        run.inertia += (rows.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    run.centers = std::move(centers);
    run.labels = std::move(labels);
    return run;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed, int max_iters) {
    const long n = rows.rows();
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (n < k) throw DataError("kmeans: fewer points than clusters; choose a smaller K");

    // Restarted k-means++: keep the lowest-inertia run. Restart count trades
    // determinism-friendly robustness against init luck.
    constexpr int kRestarts = 8;
    KMeansRun best;
    bool have = false;
    for (int r = 0; r < kRestarts; ++r) {
        KMeansRun run = kmeans_once(rows, k, seed + 7919ull * static_cast<std::uint64_t>(r),
                                    max_iters);
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }
    return {std::move(best.centers), std::move(best.labels)};
}

namespace {

std::vector<LossBreakdown> run_epochs(ClusterModel& model,
                                      const std::vector<FeaturizedSequence>& data, int epochs,
                                      const LossOptions& opt, const TrainConfig& cfg,
                                      std::mt19937_64& order_rng, std::mt19937_64& dropout_rng,
                                      AdamState& adam, const char* phase) {
    std::vector<LossBreakdown> history;
    if (epochs <= 0 || data.empty()) return history;

    const std::size_t n = data.size();
    const std::size_t batch_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(cfg.batch_size));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), order_rng);
        LossBreakdown epoch_loss;
        std::size_t seen = 0;

        for (std::size_t at = 0; at < n; at += batch_size) {
            std::vector<const FeaturizedSequence*> batch;
            for (std::size_t i = at; i < std::min(n, at + batch_size); ++i)
                batch.push_back(&data[order[i]]);

            ModelGrads grads;
            grads.init_like(model);
            const LossBreakdown loss = run_batch(model, batch, opt, &grads,
                                                 model.enc.dropout_keep < 1.0 ? &dropout_rng
                                                                              : nullptr);
            if (!std::isfinite(loss.total))
                throw NumericError(std::string(phase) + ": non-finite loss at epoch " +
                                   std::to_string(epoch) + " (l1=" + std::to_string(loss.l1) +
                                   ", l2=" + std::to_string(loss.l2) +
                                   ", kl=" + std::to_string(loss.kl) + ")");

            Eigen::VectorXd flat = flatten_params(model);
            adam.step(flat, flatten_grads(grads));
            unflatten_params(flat, model);

            const double w = static_cast<double>(batch.size());
            epoch_loss.l1 += loss.l1 * w;
            epoch_loss.l2 += loss.l2 * w;
            epoch_loss.kl += loss.kl * w;
            epoch_loss.total += loss.total * w;
            seen += batch.size();
        }
        epoch_loss.l1 /= static_cast<double>(seen);
        epoch_loss.l2 /= static_cast<double>(seen);
        epoch_loss.kl /= static_cast<double>(seen);
        epoch_loss.total /= static_cast<double>(seen);
        history.push_back(epoch_loss);
    }
    return history;
}

} // namespace

ClusterModel init_model(const std::vector<FeaturizedSequence>& data, const FeatureSchema& schema,
                        const EncoderConfig& enc, int k, const TrainConfig& cfg) {
    if (k < 1) throw std::invalid_argument("init_model: k must be >= 1");
    if (data.empty()) throw DataError("init_model: empty dataset");

    ClusterModel model;
    model.enc = enc;
    if (model.enc.input_dim == 0) model.enc.input_dim = schema.dim();
    model.schema = schema;
    model.k = k;

    std::mt19937_64 init_rng(enc.seed);
    model.lstm.init(model.enc.input_dim, model.enc.hidden_dim, init_rng);
    model.assigner.init(model.enc.hidden_dim, kMlpHidden, k, init_rng);
    model.predictor.init(model.enc.hidden_dim, kMlpHidden,
                         static_cast<int>(schema.label_names.size()), init_rng);
    model.centroids = Eigen::MatrixXd::Zero(k, model.enc.hidden_dim);
    model.norm = Normalizer::fit(data);

    // Phase A: encoder + predictor on per-step cross-entropy only.
    std::mt19937_64 order_rng(cfg.seed + 1);
    std::mt19937_64 dropout_rng(cfg.seed + 2);
    AdamState adam;
    adam.lr = cfg.learning_rate;
    adam.beta1 = cfg.beta1;
    adam.beta2 = cfg.beta2;
    LossOptions pre_opt;
    pre_opt.kl_weight = 0.0;
    pre_opt.enable_l2 = false;
    run_epochs(model, data, cfg.pretrain_epochs, pre_opt, cfg, order_rng, dropout_rng, adam,
               "pretrain");

    // Phase B: centroids from k-means++ over the pretrained latents.
    std::size_t total_steps = 0;
    for (const FeaturizedSequence& s : data) total_steps += s.steps.size();
    Eigen::MatrixXd latents(total_steps, model.enc.hidden_dim);
    long row = 0;
    for (const FeaturizedSequence& s : data) {
        const Eigen::MatrixXd z = encode(model, s);
        for (int t = 0; t < z.cols(); ++t) latents.row(row++) = z.col(t).transpose();
    }
    KMeansResult km = kmeans(latents, k, cfg.seed);
    model.centroids = km.centers;

    // Brief supervised fit of the assigner to the k-means partition.
    {
        std::mt19937_64 fit_rng(cfg.seed + 3);
        AdamState fit_adam;
        fit_adam.lr = cfg.learning_rate;
        const long n_assigner = model.assigner.w1.size() + model.assigner.b1.size() +
                                model.assigner.w2.size() + model.assigner.b2.size();
        fit_adam.init(static_cast<int>(n_assigner));

        std::vector<long> idx(latents.rows());
        std::iota(idx.begin(), idx.end(), 0);
        const std::size_t batch = 256;
        for (int epoch = 0; epoch < cfg.assigner_init_epochs; ++epoch) {
            std::shuffle(idx.begin(), idx.end(), fit_rng);
            for (std::size_t at = 0; at < idx.size(); at += batch) {
                MlpGrads g;
                g.init_like(model.assigner);
                const std::size_t hi = std::min(idx.size(), at + batch);
                for (std::size_t i = at; i < hi; ++i) {
                    MlpCache cache;
                    const Eigen::VectorXd q =
                        mlp_forward(model.assigner, latents.row(idx[i]).transpose(), &cache);
                    Eigen::VectorXd dlogits = q;
                    dlogits(km.labels[static_cast<std::size_t>(idx[i])]) -= 1.0;
                    dlogits /= static_cast<double>(hi - at);
                    mlp_backward(model.assigner, cache, dlogits, g, nullptr);
                }
                Eigen::VectorXd flat(n_assigner);
                long off = 0;
                auto push = [&](const auto& t) {
                    flat.segment(off, t.size()) =
                        Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
                    off += t.size();
                };
                push(model.assigner.w1);
                push(model.assigner.b1);
                push(model.assigner.w2);
                push(model.assigner.b2);

                Eigen::VectorXd gflat(n_assigner);
                off = 0;
                auto pushg = [&](const auto& t) {
                    gflat.segment(off, t.size()) =
                        Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
                    off += t.size();
                };
                pushg(g.w1);
                pushg(g.b1);
                pushg(g.w2);
                pushg(g.b2);

                fit_adam.step(flat, gflat);
                off = 0;
                auto pop = [&](auto& t) {
                    Eigen::Map<Eigen::VectorXd>(t.data(), t.size()) = flat.segment(off, t.size());
                    off += t.size();
                };
                pop(model.assigner.w1);
                pop(model.assigner.b1);
                pop(model.assigner.w2);
                pop(model.assigner.b2);
            }
        }
    }
    return model;
}

TrainResult train(ClusterModel& model, const std::vector<FeaturizedSequence>& data,
                  const TrainConfig& cfg) {
    std::mt19937_64 order_rng(cfg.seed + 11);
    std::mt19937_64 dropout_rng(cfg.seed + 12);
    AdamState adam;
    adam.lr = cfg.learning_rate;
    adam.beta1 = cfg.beta1;
    adam.beta2 = cfg.beta2;

    LossOptions opt;
    opt.kl_weight = cfg.kl_weight;
    opt.enable_l2 = true;
    opt.kl_to_assigner = cfg.kl_to_assigner;
    opt.kl_to_predictor = cfg.kl_to_predictor;

    TrainResult result;
    result.history =
        run_epochs(model, data, cfg.epochs, opt, cfg, order_rng, dropout_rng, adam, "train");
    return result;
}

TrainedModel train_with_restarts(const std::vector<FeaturizedSequence>& data,
                                 const FeatureSchema& schema, const EncoderConfig& enc, int k,
                                 const TrainConfig& cfg) {
    const int n = std::max(1, cfg.restarts);
    TrainedModel best;
    double best_loss = 0.0;
    bool have = false;
    for (int r = 0; r < n; ++r) {
        EncoderConfig enc_r = enc;
        TrainConfig cfg_r = cfg;
        const std::uint64_t bump = 1000003ull * static_cast<std::uint64_t>(r);
        enc_r.seed = enc.seed + bump;
        cfg_r.seed = cfg.seed + bump;

        TrainedModel run;
        run.restart = r;
        run.model = init_model(data, schema, enc_r, k, cfg_r);
        run.result = train(run.model, data, cfg_r);
        const double final_loss =
            run.result.history.empty() ? compute_losses(run.model, data, cfg.kl_weight).total
                                       : run.result.history.back().total;
        if (!have || final_loss < best_loss) {
            best = std::move(run);
            best_loss = final_loss;
            have = true;
        }
    }
    return best;
}

EvolutionTrace trace(const ClusterModel& model, const FeaturizedSequence& seq) {
    EvolutionTrace out;
    out.mmsi = seq.mmsi;
    const Eigen::MatrixXd z = encode(model, seq);

    Eigen::MatrixXd r(model.label_count(), model.k);
    for (int c = 0; c < model.k; ++c)
        r.col(c) = mlp_forward(model.predictor, model.centroids.row(c).transpose(), nullptr);

    out.steps.reserve(seq.steps.size());
    for (int t = 0; t < z.cols(); ++t) {
        TraceStep step;
        step.relative_time = seq.steps[static_cast<std::size_t>(t)].relative_time;
        step.assign_probs = mlp_forward(model.assigner, z.col(t), nullptr);
        step.cluster = hard_cluster(step.assign_probs);
        step.predicted = mlp_forward(model.predictor, z.col(t), nullptr);
        step.centroid_predicted = r * step.assign_probs;
        out.steps.push_back(std::move(step));
    }
    return out;
}

std::vector<int> majority_clusters(const ClusterModel& model,
                                   const std::vector<FeaturizedSequence>& data) {
    std::vector<int> out;
    out.reserve(data.size());
    for (const FeaturizedSequence& s : data) {
        const EvolutionTrace tr = trace(model, s);
        std::vector<long> counts(static_cast<std::size_t>(model.k), 0);
        for (const TraceStep& st : tr.steps) ++counts[static_cast<std::size_t>(st.cluster)];
        int best = 0;
        for (int c = 1; c < model.k; ++c)
            if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)])
                best = c;
        out.push_back(best);
    }
    return out;
}

namespace {

json tensor_json(const Eigen::MatrixXd& m) {
    json t;
    t["shape"] = json::array({m.rows(), m.cols()});
    json data = json::array();
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) data.push_back(m(i, j)); // row-major
    t["data"] = std::move(data);
    return t;
}

json tensor_json(const Eigen::VectorXd& v) {
    json t;
    t["shape"] = json::array({v.size()});
    json data = json::array();
    for (long i = 0; i < v.size(); ++i) data.push_back(v(i));
    t["data"] = std::move(data);
    return t;
}

Eigen::MatrixXd matrix_from_json(const json& t) {
    const auto& shape = t.at("shape");
    if (shape.size() != 2) throw DataError("checkpoint: expected rank-2 tensor");
    Eigen::MatrixXd m(shape.at(0).get<long>(), shape.at(1).get<long>());
    const auto& data = t.at("data");
    if (static_cast<long>(data.size()) != m.size())
        throw DataError("checkpoint: tensor data does not match shape");
    long idx = 0;
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) m(i, j) = data.at(idx++).get<double>();
    return m;
}

Eigen::VectorXd vector_from_json(const json& t) {
    const auto& shape = t.at("shape");
    if (shape.size() != 1) throw DataError("checkpoint: expected rank-1 tensor");
    Eigen::VectorXd v(shape.at(0).get<long>());
    const auto& data = t.at("data");
    if (static_cast<long>(data.size()) != v.size())
        throw DataError("checkpoint: tensor data does not match shape");
    for (long i = 0; i < v.size(); ++i) v(i) = data.at(i).get<double>();
    return v;
}

} // namespace

void save_checkpoint(std::ostream& out, const ClusterModel& model) {
    json j;
    j["format_version"] = 1;
    j["level"] = model.schema.level;
    j["label_names"] = model.schema.label_names;
    j["encoder"] = {{"input_dim", model.enc.input_dim},
                    {"hidden_dim", model.enc.hidden_dim},
                    {"dropout_keep", model.enc.dropout_keep},
                    {"seed", model.enc.seed}};
    j["k"] = model.k;
    j["normalization"] = {{"mean", tensor_json(model.norm.mean)},
                          {"std", tensor_json(model.norm.std)}};
    json w;
    w["lstm_wx"] = tensor_json(model.lstm.wx);
    w["lstm_wh"] = tensor_json(model.lstm.wh);
    w["lstm_b"] = tensor_json(model.lstm.b);
    w["assigner_w1"] = tensor_json(model.assigner.w1);
    w["assigner_b1"] = tensor_json(model.assigner.b1);
    w["assigner_w2"] = tensor_json(model.assigner.w2);
    w["assigner_b2"] = tensor_json(model.assigner.b2);
    w["predictor_w1"] = tensor_json(model.predictor.w1);
    w["predictor_b1"] = tensor_json(model.predictor.b1);
    w["predictor_w2"] = tensor_json(model.predictor.w2);
    w["predictor_b2"] = tensor_json(model.predictor.b2);
    w["centroids"] = tensor_json(model.centroids);
    j["weights"] = std::move(w);
    out << j.dump() << "\n";
}

ClusterModel load_checkpoint(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: parse failure: ") + e.what());
    }
    if (j.value("format_version", 0) != 1)
        throw DataError("checkpoint: unsupported format_version");

    ClusterModel m;
    m.schema.level = j.at("level").get<std::string>();
    m.schema.label_names = j.at("label_names").get<std::vector<std::string>>();
    const json& e = j.at("encoder");
    m.enc.input_dim = e.at("input_dim").get<int>();
    m.enc.hidden_dim = e.at("hidden_dim").get<int>();
    m.enc.dropout_keep = e.at("dropout_keep").get<double>();
    m.enc.seed = e.at("seed").get<std::uint64_t>();
    m.k = j.at("k").get<int>();
    m.norm.mean = vector_from_json(j.at("normalization").at("mean"));
    m.norm.std = vector_from_json(j.at("normalization").at("std"));
    const json& w = j.at("weights");
    m.lstm.wx = matrix_from_json(w.at("lstm_wx"));
    m.lstm.wh = matrix_from_json(w.at("lstm_wh"));
    m.lstm.b = vector_from_json(w.at("lstm_b"));
    m.assigner.w1 = matrix_from_json(w.at("assigner_w1"));
    m.assigner.b1 = vector_from_json(w.at("assigner_b1"));
    m.assigner.w2 = matrix_from_json(w.at("assigner_w2"));
    m.assigner.b2 = vector_from_json(w.at("assigner_b2"));
    m.predictor.w1 = matrix_from_json(w.at("predictor_w1"));
    m.predictor.b1 = vector_from_json(w.at("predictor_b1"));
    m.predictor.w2 = matrix_from_json(w.at("predictor_w2"));
    m.predictor.b2 = vector_from_json(w.at("predictor_b2"));
    m.centroids = matrix_from_json(w.at("centroids"));

    if (m.lstm.wx.cols() != m.enc.input_dim || m.lstm.wh.cols() != m.enc.hidden_dim ||
        m.centroids.rows() != m.k || m.centroids.cols() != m.enc.hidden_dim)
        throw DataError("checkpoint: inconsistent tensor shapes");
    return m;
}

std::vector<SweepRow> sweep_k(const std::vector<FeaturizedSequence>& data,
                              const FeatureSchema& schema, const EncoderConfig& enc,
                              const std::vector<int>& ks, const TrainConfig& cfg,
                              const std::vector<int>& truth) {
    if (truth.size() != data.size())
        throw DataError("sweep_k: truth length does not match dataset");
    std::vector<SweepRow> rows;
    for (int k : ks) {
        SweepRow row;
        row.k = k;
        try {
            const TrainedModel trained = train_with_restarts(data, schema, enc, k, cfg);
            const std::vector<int> clusters = majority_clusters(trained.model, data);
            row.purity = purity(clusters, truth);
            row.nmi = nmi(clusters, truth);
            row.ari = ari(clusters, truth);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace vbc
