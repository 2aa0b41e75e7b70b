#pragma once

#include "mibci/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace mibci {

// Hidden widths of one network setting. ae_nodes is palindromic with the code
// width in the middle ([40,20,40]: encoder in->40->20, decoder 20->40->in);
// clf_nodes are the classifier widths after the code and end in 1.
struct NetworkLayout {
  std::vector<int> ae_nodes;
  std::vector<int> clf_nodes;

  bool operator==(const NetworkLayout&) const = default;
};

// The five architectures searched in cross-validation.
std::vector<NetworkLayout> standard_settings();

struct NetworkConfig {
  int input_dim{0};
  std::vector<int> ae_nodes;
  std::vector<int> clf_nodes;

  int code_dim() const { return ae_nodes[ae_nodes.size() / 2]; }
  bool operator==(const NetworkConfig&) const = default;
};

// Throws ConfigError: non-palindromic or even-length ae_nodes, non-positive
// widths, clf_nodes not ending in 1, or code width >= input_dim.
void validate_network(const NetworkConfig& config);
NetworkConfig make_network_config(const NetworkLayout& layout, int input_dim);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

// Encoder (W_e), decoder (W_d) and classifier (W_c) stacks. Also used to hold
// gradients, which share the shapes.
struct SaeParams {
  NetworkConfig config;
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;
  std::vector<DenseLayer> classifier;

  std::size_t parameter_count() const;
  SaeParams zeros_like() const;
};

struct TrainConfig {
  double alpha{1.0};   // classification loss weight
  double beta{1.0};    // reconstruction loss weight
  double l1{1e-4};
  double l2{1e-4};
  double lr{0.01};
  int batch{32};
  int joint_epochs{50};
  int clf_epochs{150};
  std::uint64_t seed{0};

  int total_epochs() const { return joint_epochs + clf_epochs; }
};
void validate_train_config(const TrainConfig& cfg);

// Which parameters a loss or gradient covers. Classifier drops the reconstruction
// term and all encoder/decoder regularization (frozen autoencoder).
enum class ParamScope { All, Classifier };

struct LossBreakdown {
  double total{0.0};
  double classification{0.0};   // mean BCE
  double reconstruction{0.0};   // mean of ||x_hat - x||^2 / |x|
  double regularization{0.0};   // l1 sum|w| + l2 sum w^2 over weights in scope
};

inline constexpr double kProbabilityClamp = 1e-12;

// Glorot-uniform weights, zero biases; deterministic per seed.
SaeParams init_params(const NetworkConfig& config, std::uint64_t seed);

// x is a standardized input of length input_dim. Hidden and code layers use tanh,
// the decoder output is linear, the classifier output sigmoid.
Eigen::VectorXd encode(const SaeParams& params, const Eigen::VectorXd& x);
Eigen::VectorXd decode(const SaeParams& params, const Eigen::VectorXd& code);
double classify(const SaeParams& params, const Eigen::VectorXd& code);

// Q = (1/N) sum_i [alpha BCE(P(x_i), y_i) + beta ||x_hat_i - x_i||^2 / |x_i|] + l1 sum|w| + l2 sum w^2.
// Rows of x are samples. Throws ConfigError for an empty batch.
LossBreakdown composite_loss(const SaeParams& params, const Eigen::MatrixXd& x,
                             std::span<const Label> labels, const TrainConfig& cfg,
                             ParamScope scope = ParamScope::All);

// Exact gradient of composite_loss. Parameters outside the scope get zeros.
// The L1 subgradient at w = 0 is 0; clamped probabilities pass no gradient.
SaeParams gradients(const SaeParams& params, const Eigen::MatrixXd& x, std::span<const Label> labels,
                    const TrainConfig& cfg, ParamScope scope = ParamScope::All);

struct StandardizerStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population std; 0 replaced by 1

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};
StandardizerStats fit_standardizer(const Eigen::MatrixXd& rows);

struct TrainLogEntry {
  int epoch{0};   // 1-based
  int phase{1};   // 1 joint, 2 classifier only
  double q{0.0};
  double q_c{0.0};
  double q_r{0.0};
  double reg{0.0};
};

struct TrainResult {
  SaeParams params;
  StandardizerStats stats;
  std::vector<TrainLogEntry> log;
};

// Called with the phase number (1 or 2) and the parameters when that phase ends.
using TrainObserver = std::function<void(int, const SaeParams&)>;

// Mini-batch SGD on standardized features. Phase 1 updates everything with the
// full composite gradient; phase 2 updates the classifier only on the alpha term
// plus classifier regularization while the autoencoder stays frozen. Logged
// losses are per-epoch means of the full composite over the mini-batches.
// Throws ConfigError for a single-class training set.
TrainResult train(const Eigen::MatrixXd& features, std::span<const Label> labels,
                  const NetworkConfig& net, const TrainConfig& cfg,
                  const TrainObserver& observer = {});

double predict_probability(const SaeParams& params, const StandardizerStats& stats,
                           const Eigen::VectorXd& raw_features);
// Right iff P >= 0.5.
Label predict(const SaeParams& params, const StandardizerStats& stats,
              const Eigen::VectorXd& raw_features);
std::vector<Label> predict_rows(const SaeParams& params, const StandardizerStats& stats,
                                const Eigen::MatrixXd& raw_features);

// Versioned binary checkpoint: "SAE1" | u32 version | config | stats | layers.
void save_checkpoint(const std::filesystem::path& path, const SaeParams& params,
                     const StandardizerStats& stats);
std::pair<SaeParams, StandardizerStats> load_checkpoint(const std::filesystem::path& path);

// CSV with header epoch,phase,Q,Q_c,Q_r,reg.
void write_training_log(const std::filesystem::path& path, std::span<const TrainLogEntry> log);

}  // namespace mibci
