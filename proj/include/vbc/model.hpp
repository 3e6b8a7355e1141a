#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vbc/features.hpp"
#include "vbc/metrics.hpp"
#include "vbc/nn.hpp"

namespace vbc {

inline constexpr int kMlpHidden = 50;

struct EncoderConfig {
    int input_dim = 0;
    int hidden_dim = 150;
    double dropout_keep = 1.0; // inverted-dropout keep probability, (0, 1]
    std::uint64_t seed = 7;
};

struct TrainConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 40;
    int batch_size = 8;
    double kl_weight = 1.0; // alpha
    std::uint64_t seed = 7;
    int pretrain_epochs = 10;     // encoder+predictor warm-up
    int assigner_init_epochs = 3; // supervised fit to the k-means partition
    // Full init+train restarts with derived seeds; the lowest final loss
    // wins. 1 = single run.
    int restarts = 1;
    // Escape hatches: stop the KL term's gradient into either head.
    bool kl_to_assigner = true;
    bool kl_to_predictor = true;
};

// Encoder + assigner f + predictor g + centroid table E.
struct ClusterModel {
    EncoderConfig enc;
    FeatureSchema schema;
    Normalizer norm;
    LstmParams lstm;
    MlpParams assigner;  // hidden -> 50 -> k
    MlpParams predictor; // hidden -> 50 -> |labels|
    Eigen::MatrixXd centroids; // k x hidden
    int k = 0;

    int label_count() const { return static_cast<int>(schema.label_names.size()); }
};

struct LossBreakdown {
    double l1 = 0.0;
    double l2 = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

struct ModelGrads {
    LstmGrads lstm;
    MlpGrads assigner, predictor;
    Eigen::MatrixXd centroids;
    void init_like(const ClusterModel& m);
};

// Latent states (hidden x steps), inference mode: normalization applied, no
// dropout.
Eigen::MatrixXd encode(const ClusterModel& model, const FeaturizedSequence& seq);

// Assignment probabilities for one latent state.
Eigen::VectorXd assign(const ClusterModel& model, const Eigen::VectorXd& z);
// Argmax with ties broken toward the smallest index.
int hard_cluster(const Eigen::VectorXd& probs);

struct LossOptions {
    double kl_weight = 1.0;
    bool enable_l2 = true;
    bool kl_to_assigner = true;
    bool kl_to_predictor = true;
};

// Mean-over-trajectories L1 and L2, mean-over-steps KL, and their weighted
// total. When grads is non-null the full backward pass runs; when rng is
// non-null and dropout_keep < 1, training-mode dropout is applied.
LossBreakdown run_batch(const ClusterModel& model,
                        const std::vector<const FeaturizedSequence*>& batch,
                        const LossOptions& opt, ModelGrads* grads, std::mt19937_64* rng);

LossBreakdown compute_losses(const ClusterModel& model,
                             const std::vector<FeaturizedSequence>& batch, double kl_weight);

// Parameter/gradient flattening, fixed order; used by the optimizer and by
// finite-difference checks.
Eigen::VectorXd flatten_params(const ClusterModel& model);
void unflatten_params(const Eigen::VectorXd& flat, ClusterModel& model);
Eigen::VectorXd flatten_grads(const ModelGrads& grads);
long param_count(const ClusterModel& model);

// Seeded k-means++ with Lloyd iterations; ties toward the smallest index.
// Throws DataError when the rows contain fewer than k distinct points.
struct KMeansResult {
    Eigen::MatrixXd centers; // k x dim
    std::vector<int> labels;
};
KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed, int max_iters = 100);

// Phase A: pretrain encoder+predictor on per-step cross-entropy. Phase B:
// centroids from k-means++ over the pretrained latents, assigner fit to the
// k-means partition.
ClusterModel init_model(const std::vector<FeaturizedSequence>& data, const FeatureSchema& schema,
                        const EncoderConfig& enc, int k, const TrainConfig& cfg);

struct TrainResult {
    std::vector<LossBreakdown> history; // one entry per epoch
};

// Joint optimization of L1 + L2 + alpha*KL over encoder, heads, and
// centroids. Throws NumericError on a non-finite loss.
TrainResult train(ClusterModel& model, const std::vector<FeaturizedSequence>& data,
                  const TrainConfig& cfg);

// init_model + train, cfg.restarts times with derived seeds; returns the run
// with the lowest final total loss.
struct TrainedModel {
    ClusterModel model;
    TrainResult result;
    int restart = 0; // which derived seed won
};
TrainedModel train_with_restarts(const std::vector<FeaturizedSequence>& data,
                                 const FeatureSchema& schema, const EncoderConfig& enc, int k,
                                 const TrainConfig& cfg);

struct TraceStep {
    double relative_time = 0.0;
    int cluster = 0;
    Eigen::VectorXd assign_probs;      // over k
    Eigen::VectorXd predicted;         // y-hat, over labels
    Eigen::VectorXd centroid_predicted; // y-bar, over labels
};

struct EvolutionTrace {
    std::string mmsi;
    std::vector<TraceStep> steps;
};

EvolutionTrace trace(const ClusterModel& model, const FeaturizedSequence& seq);

// Majority-vote hard cluster per sequence.
std::vector<int> majority_clusters(const ClusterModel& model,
                                   const std::vector<FeaturizedSequence>& data);

// Versioned JSON checkpoint: config, normalization statistics, weight
// tensors row-major with shapes.
void save_checkpoint(std::ostream& out, const ClusterModel& model);
ClusterModel load_checkpoint(std::istream& in);

// Trains one model per K with fixed seeds and scores trajectory-level
// majority clusters against truth. Per-K failures are reported in the row,
// not thrown.
std::vector<SweepRow> sweep_k(const std::vector<FeaturizedSequence>& data,
                              const FeatureSchema& schema, const EncoderConfig& enc,
                              const std::vector<int>& ks, const TrainConfig& cfg,
                              const std::vector<int>& truth);

} // namespace vbc
