#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "vbc/errors.hpp"
#include "vbc/metrics.hpp"
#include "vbc/model.hpp"

using namespace vbc;

namespace {

ClusterModel micro_model(int in_dim, int hidden, int k, int n_labels, std::uint64_t seed,
                         double weight_scale = 0.4) {
    ClusterModel m;
    m.enc.input_dim = in_dim;
    m.enc.hidden_dim = hidden;
    m.enc.dropout_keep = 1.0;
    m.enc.seed = seed;
    m.schema.level = "subtraj";
    for (int i = 0; i < n_labels; ++i) m.schema.label_names.push_back("l" + std::to_string(i));
    std::mt19937_64 rng(seed);
    m.lstm.init(in_dim, hidden, rng, weight_scale);
    m.assigner.init(hidden, kMlpHidden, k, rng, weight_scale);
    m.predictor.init(hidden, kMlpHidden, n_labels, rng, weight_scale);
    m.k = k;
    std::normal_distribution<double> dist(0.0, weight_scale);
    m.centroids = Eigen::MatrixXd::NullaryExpr(k, hidden, [&]() { return dist(rng); });
    m.norm.mean = Eigen::VectorXd::Zero(in_dim);
    m.norm.std = Eigen::VectorXd::Ones(in_dim);
    return m;
}

std::vector<FeaturizedSequence> micro_batch(int n_seq, int n_steps, int in_dim, int n_labels,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::uniform_int_distribution<int> lab(0, n_labels - 1);
    std::vector<FeaturizedSequence> out;
    for (int s = 0; s < n_seq; ++s) {
        FeaturizedSequence f;
        f.mmsi = "m" + std::to_string(s);
        for (int t = 0; t < n_steps; ++t) {
            FeatureStep step;
            step.relative_time = 10.0 * t;
            step.features = Eigen::VectorXd::NullaryExpr(in_dim, [&]() { return dist(rng); });
            f.steps.push_back(std::move(step));
            f.labels.push_back(lab(rng));
        }
        out.push_back(std::move(f));
    }
    return out;
}

// Two clearly separated step-pattern populations for training smoke tests:
// slow "dweller" vs fast "mover" sequences.
std::vector<FeaturizedSequence> planted_two_type_data(int per_type, int steps,
                                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<FeaturizedSequence> out;
    for (int type = 0; type < 2; ++type) {
        for (int v = 0; v < per_type; ++v) {
            FeaturizedSequence f;
            f.mmsi = "t" + std::to_string(type) + "v" + std::to_string(v);
            f.vessel_type = type == 0 ? VesselType::tanker : VesselType::passenger;
            for (int t = 0; t < steps; ++t) {
                Eigen::VectorXd x(4);
                const double phase = (type == 0) ? 1.0 : -1.0;
                x << 10.0 * t, phase * (1.0 + noise(rng)), noise(rng),
                    phase * std::sin(0.3 * t);
                FeatureStep step;
                step.relative_time = 10.0 * t;
                step.features = x;
                f.steps.push_back(std::move(step));
                f.labels.push_back(type);
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

} // namespace

TEST_CASE("assign: zero-weight assigner gives uniform probabilities and cluster 0") {
    ClusterModel m = micro_model(4, 6, 3, 5, 1);
    m.assigner.w1.setZero();
    m.assigner.b1.setZero();
    m.assigner.w2.setZero();
    m.assigner.b2.setZero();
    Eigen::VectorXd z = Eigen::VectorXd::Random(6);
    const Eigen::VectorXd probs = assign(m, z);
    for (int i = 0; i < 3; ++i) CHECK(probs(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(hard_cluster(probs) == 0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> d(0.0, 1.0);
    ClusterModel m2 = micro_model(4, 6, 4, 5, 2);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd zz = Eigen::VectorXd::NullaryExpr(6, [&]() { return d(rng); });
        CHECK(assign(m2, zz).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("loss_L1: uniform predictor scores ln(n_labels) per step") {
    ClusterModel m = micro_model(4, 6, 2, 10, 3);
    m.predictor.w2.setZero();
    m.predictor.b2.setZero();
    const auto batch = micro_batch(1, 6, 4, 10, 4);
    const LossBreakdown l = compute_losses(m, batch, 1.0);
    CHECK(l.l1 / 6.0 == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("loss_L1: predictor pinned to the one-hot truth scores 0") {
    ClusterModel m = micro_model(4, 6, 2, 3, 5);
    auto batch = micro_batch(1, 6, 4, 3, 6);
    for (auto& y : batch[0].labels) y = 2;
    m.predictor.w2.setZero();
    m.predictor.b2.setZero();
    m.predictor.b2(2) = 1000.0;
    const LossBreakdown l = compute_losses(m, batch, 0.0);
    CHECK(l.l1 == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("losses match literal double-sum evaluations on random micro-instances") {
    for (int k : {2, 3}) {
        const int in_dim = 5, hidden = 8, n_labels = 4;
        ClusterModel m = micro_model(in_dim, hidden, k, n_labels, 10 + k);
        const auto batch = micro_batch(2, 6, in_dim, n_labels, 20 + k);
        const LossBreakdown got = compute_losses(m, batch, 1.0);

        Eigen::MatrixXd r(n_labels, k);
        for (int c = 0; c < k; ++c)
            r.col(c) = mlp_forward(m.predictor, m.centroids.row(c).transpose(), nullptr);

        auto flog = [](double v) { return std::log(std::max(v, 1e-12)); };
        double l1 = 0, l2 = 0, klsum = 0;
        std::size_t steps = 0;
        for (const FeaturizedSequence& seq : batch) {
            const Eigen::MatrixXd z = encode(m, seq);
            for (int t = 0; t < z.cols(); ++t) {
                const int y = seq.labels[t];
                const Eigen::VectorXd q = mlp_forward(m.assigner, z.col(t), nullptr);
                const Eigen::VectorXd p = mlp_forward(m.predictor, z.col(t), nullptr);
                for (int c = 0; c < k; ++c) {
                    l1 += (-flog(p(y))) * q(c);        // Sum_k l(y, g(z_j)) f_k(z_j)
                    l2 += (-flog(r(y, c))) * q(c);     // Sum_k l(y, g(e_k)) f_k(z_j)
                }
                const Eigen::VectorXd ybar = r * q;
                for (int i = 0; i < n_labels; ++i)
                    if (p(i) > 0) klsum += p(i) * (flog(p(i)) - flog(ybar(i)));
                ++steps;
            }
        }
        l1 /= batch.size();
        l2 /= batch.size();
        klsum /= static_cast<double>(steps);

        CAPTURE(k);
        CHECK(got.l1 == doctest::Approx(l1).epsilon(1e-12));
        CHECK(got.l2 == doctest::Approx(l2).epsilon(1e-12));
        CHECK(got.kl == doctest::Approx(klsum).epsilon(1e-12));
        CHECK(got.total == doctest::Approx(l1 + l2 + klsum).epsilon(1e-12));
    }
}

TEST_CASE("loss_L2 collapses to the single-centroid cross-entropy at K=1") {
    const int in_dim = 4, n_labels = 3;
    ClusterModel m = micro_model(in_dim, 6, 1, n_labels, 7);
    const auto batch = micro_batch(2, 5, in_dim, n_labels, 8);
    const LossBreakdown l = compute_losses(m, batch, 0.0);

    const Eigen::VectorXd r = mlp_forward(m.predictor, m.centroids.row(0).transpose(), nullptr);
    double want = 0.0;
    for (const FeaturizedSequence& seq : batch)
        for (int y : seq.labels) want += -std::log(std::max(r(y), 1e-12));
    want /= batch.size();
    CHECK(l.l2 == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("loss_L2 is zero for a one-hot assigner pointing at a perfect centroid") {
    ClusterModel m = micro_model(4, 6, 2, 3, 9);
    auto batch = micro_batch(1, 4, 4, 3, 9);
    for (auto& y : batch[0].labels) y = 1;
    m.assigner.w2.setZero();
    m.assigner.b2.setZero();
    m.assigner.b2(0) = 1000.0; // f one-hot at cluster 0
    m.predictor.w2.setZero();
    m.predictor.b2.setZero();
    m.predictor.b2(1) = 1000.0; // g one-hot at the truth, for any input
    const LossBreakdown l = compute_losses(m, batch, 0.0);
    CHECK(l.l2 == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("KL term vanishes when predictions equal the centroid mixture") {
    // With a constant predictor, y-hat == g(e_k) == y-bar for every step.
    ClusterModel m = micro_model(4, 6, 3, 4, 11);
    m.predictor.w2.setZero();
    m.predictor.b2 << 0.3, -0.2, 0.8, 0.0;
    const auto batch = micro_batch(2, 5, 4, 4, 12);
    const LossBreakdown l = compute_losses(m, batch, 1.0);
    CHECK(l.kl == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(l.kl >= -1e-15); // p == q exactly: rounding may land a hair below 0
}

TEST_CASE("composed loss gradient matches central finite differences") {
    const int in_dim = 5, hidden = 8, k = 2, n_labels = 3;
    ClusterModel model = micro_model(in_dim, hidden, k, n_labels, 13);
    const auto data = micro_batch(2, 6, in_dim, n_labels, 14);
    std::vector<const FeaturizedSequence*> batch;
    for (const auto& s : data) batch.push_back(&s);

    LossOptions opt;
    opt.kl_weight = 1.0;
    ModelGrads grads;
    grads.init_like(model);
    run_batch(model, batch, opt, &grads, nullptr);
    const Eigen::VectorXd analytic = flatten_grads(grads);

    Eigen::VectorXd theta = flatten_params(model);
    REQUIRE(analytic.size() == theta.size());
    const double h = 1e-5;
    double worst = 0.0;
    for (long i = 0; i < theta.size(); ++i) {
        const double saved = theta(i);
        theta(i) = saved + h;
        unflatten_params(theta, model);
        const double up = run_batch(model, batch, opt, nullptr, nullptr).total;
        theta(i) = saved - h;
        unflatten_params(theta, model);
        const double down = run_batch(model, batch, opt, nullptr, nullptr).total;
        theta(i) = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel =
            std::abs(fd - analytic(i)) / std::max({std::abs(fd), std::abs(analytic(i)), 1e-6});
        worst = std::max(worst, rel);
    }
    unflatten_params(theta, model);
    CHECK(worst < 1e-4);
}

TEST_CASE("losses are invariant under cluster index permutation") {
    const int k = 3;
    ClusterModel m = micro_model(4, 6, k, 5, 15);
    const auto batch = micro_batch(2, 6, 4, 5, 16);
    const LossBreakdown base = compute_losses(m, batch, 1.0);

    // Swap clusters 0 and 2: centroid rows plus assigner output units.
    ClusterModel p = m;
    p.centroids.row(0) = m.centroids.row(2);
    p.centroids.row(2) = m.centroids.row(0);
    p.assigner.w2.row(0) = m.assigner.w2.row(2);
    p.assigner.w2.row(2) = m.assigner.w2.row(0);
    std::swap(p.assigner.b2(0), p.assigner.b2(2));

    const LossBreakdown perm = compute_losses(p, batch, 1.0);
    CHECK(perm.l1 == doctest::Approx(base.l1).epsilon(1e-12));
    CHECK(perm.l2 == doctest::Approx(base.l2).epsilon(1e-12));
    CHECK(perm.kl == doctest::Approx(base.kl).epsilon(1e-12));
}

TEST_CASE("kmeans recovers planted separable blobs with ARI 1") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 0.1);
    Eigen::MatrixXd rows(120, 2);
    std::vector<int> truth(120);
    const double cx[3] = {0.0, 10.0, 0.0};
    const double cy[3] = {0.0, 0.0, 10.0};
    for (int i = 0; i < 120; ++i) {
        const int b = i % 3;
        rows(i, 0) = cx[b] + noise(rng);
        rows(i, 1) = cy[b] + noise(rng);
        truth[i] = b;
    }
    const KMeansResult km = kmeans(rows, 3, 5);
    CHECK(ari(km.labels, truth) == doctest::Approx(1.0));

    // Centers are finite and inside the data bounding box.
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 2; ++d) {
            CHECK(std::isfinite(km.centers(c, d)));
            CHECK(km.centers(c, d) >= rows.col(d).minCoeff() - 1e-9);
            CHECK(km.centers(c, d) <= rows.col(d).maxCoeff() + 1e-9);
        }

    const KMeansResult again = kmeans(rows, 3, 5);
    CHECK(again.centers == km.centers);
    CHECK(again.labels == km.labels);
}

TEST_CASE("kmeans rejects fewer distinct points than clusters") {
    Eigen::MatrixXd rows(4, 3);
    rows.setOnes();
    CHECK_THROWS_AS(kmeans(rows, 2, 1), DataError);
    CHECK_THROWS_AS(kmeans(rows, 5, 1), DataError);
}

TEST_CASE("init_model is seed-deterministic and centroids sit among the latents") {
    const auto data = planted_two_type_data(3, 20, 21);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.pretrain_epochs = 2;
    cfg.seed = 5;
    EncoderConfig enc;
    enc.input_dim = 4;
    enc.hidden_dim = 8;
    enc.seed = 5;
    FeatureSchema schema;
    schema.level = "subtraj";
    schema.label_names = {"a", "b"};

    const ClusterModel m1 = init_model(data, schema, enc, 2, cfg);
    const ClusterModel m2 = init_model(data, schema, enc, 2, cfg);
    CHECK(flatten_params(m1) == flatten_params(m2));

    // Latent bounding box contains every centroid coordinate.
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(8, 1e30);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(8, -1e30);
    for (const auto& seq : data) {
        const Eigen::MatrixXd z = encode(m1, seq);
        for (int t = 0; t < z.cols(); ++t) {
            lo = lo.cwiseMin(z.col(t));
            hi = hi.cwiseMax(z.col(t));
        }
    }
    for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 8; ++d) {
            CHECK(m1.centroids(c, d) >= lo(d) - 1e-9);
            CHECK(m1.centroids(c, d) <= hi(d) + 1e-9);
        }
}

TEST_CASE("init_model rejects K above the number of distinct latent states") {
    // Three identical one-step sequences collapse to one latent point.
    std::vector<FeaturizedSequence> data;
    for (int i = 0; i < 3; ++i) {
        FeaturizedSequence f;
        f.mmsi = "s" + std::to_string(i);
        FeatureStep step;
        step.relative_time = 0;
        step.features = Eigen::VectorXd::Ones(4);
        f.steps.push_back(step);
        f.labels.push_back(0);
        data.push_back(std::move(f));
    }
    FeatureSchema schema;
    schema.level = "subtraj";
    schema.label_names = {"a", "b"};
    EncoderConfig enc;
    enc.input_dim = 4;
    enc.hidden_dim = 6;
    TrainConfig cfg;
    cfg.pretrain_epochs = 1;
    CHECK_THROWS_AS(init_model(data, schema, enc, 2, cfg), DataError);
}

TEST_CASE("training separates a planted two-type fleet and reduces the loss") {
    const auto data = planted_two_type_data(4, 24, 31);
    FeatureSchema schema;
    schema.level = "subtraj";
    schema.label_names = {"a", "b"};
    EncoderConfig enc;
    enc.input_dim = 4;
    enc.hidden_dim = 8;
    enc.seed = 3;
    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.pretrain_epochs = 6;
    cfg.seed = 3;
    cfg.batch_size = 4;

    ClusterModel model = init_model(data, schema, enc, 2, cfg);
    const TrainResult result = train(model, data, cfg);
    REQUIRE(result.history.size() == 12);
    CHECK(result.history.back().total < result.history.front().total);

    const std::vector<int> clusters = majority_clusters(model, data);
    std::vector<int> truth;
    for (std::size_t i = 0; i < data.size(); ++i) truth.push_back(i < 4 ? 0 : 1);
    CHECK(purity(clusters, truth) >= 0.9);
}

TEST_CASE("alpha=0 with K=1 trains as a pure sequence-labeling fit") {
    const auto data = planted_two_type_data(2, 16, 41);
    FeatureSchema schema;
    schema.level = "subtraj";
    schema.label_names = {"a", "b"};
    EncoderConfig enc;
    enc.input_dim = 4;
    enc.hidden_dim = 6;
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.pretrain_epochs = 2;
    cfg.kl_weight = 0.0;

    ClusterModel model = init_model(data, schema, enc, 1, cfg);
    const TrainResult result = train(model, data, cfg);
    REQUIRE(result.history.size() == 6);
    CHECK(result.history.back().total == doctest::Approx(result.history.back().l1 +
                                                         result.history.back().l2));
    CHECK(result.history.back().l1 < result.history.front().l1 + 1e-9);
}

TEST_CASE("trace has one entry per step and is deterministic and stateless") {
    ClusterModel m = micro_model(4, 6, 3, 5, 51);
    const auto data = micro_batch(2, 9, 4, 5, 52);
    const EvolutionTrace a = trace(m, data[0]);
    REQUIRE(a.steps.size() == 9);
    const EvolutionTrace other = trace(m, data[1]); // interleave another sequence
    const EvolutionTrace b = trace(m, data[0]);
    REQUIRE(other.steps.size() == 9);
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
        CHECK(a.steps[t].cluster == b.steps[t].cluster);
        CHECK(a.steps[t].assign_probs == b.steps[t].assign_probs);
        CHECK(a.steps[t].predicted == b.steps[t].predicted);
        CHECK(a.steps[t].centroid_predicted == b.steps[t].centroid_predicted);
        CHECK(a.steps[t].assign_probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.steps[t].predicted.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.steps[t].centroid_predicted.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    ClusterModel m = micro_model(5, 7, 3, 4, 61);
    std::ostringstream out;
    save_checkpoint(out, m);
    std::istringstream in(out.str());
    const ClusterModel back = load_checkpoint(in);
    CHECK(flatten_params(back) == flatten_params(m));
    CHECK(back.schema.level == m.schema.level);
    CHECK(back.schema.label_names == m.schema.label_names);
    CHECK(back.k == m.k);
    CHECK(back.norm.mean == m.norm.mean);
    CHECK(back.norm.std == m.norm.std);

    std::ostringstream out2;
    save_checkpoint(out2, back);
    CHECK(out.str() == out2.str());
}

TEST_CASE("dropout training is deterministic given the seed") {
    ClusterModel m = micro_model(4, 6, 2, 3, 71);
    m.enc.dropout_keep = 0.6;
    const auto data = micro_batch(2, 8, 4, 3, 72);
    std::vector<const FeaturizedSequence*> batch;
    for (const auto& s : data) batch.push_back(&s);
    LossOptions opt;

    std::mt19937_64 rng1(9), rng2(9);
    ModelGrads g1, g2;
    g1.init_like(m);
    g2.init_like(m);
    const LossBreakdown a = run_batch(m, batch, opt, &g1, &rng1);
    const LossBreakdown b = run_batch(m, batch, opt, &g2, &rng2);
    CHECK(a.total == b.total);
    CHECK(flatten_grads(g1) == flatten_grads(g2));
}
