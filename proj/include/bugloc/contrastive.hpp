#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bugloc/error.hpp"
#include "bugloc/vector.hpp"

namespace bugloc {

/// Dense row-major matrix; just enough for batch-sized kernels.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class PairLabel : std::uint8_t { kNone, kPositive, kNegative };

/// Labels over an N x N similarity matrix. A row with exactly one positive is
/// an anchor row and contributes a loss term; rows without labels only serve
/// as candidates. The diagonal is always kNone.
class PairLabels {
 public:
  explicit PairLabels(std::size_t n) : n_(n), labels_(n * n, PairLabel::kNone) {}

  void set(std::size_t row, std::size_t col, PairLabel label);
  PairLabel at(std::size_t row, std::size_t col) const { return labels_[row * n_ + col]; }
  std::size_t size() const noexcept { return n_; }

  /// Anchor rows with their positive column. Throws if a labelled row does
  /// not hold exactly one positive.
  std::vector<std::pair<std::size_t, std::size_t>> anchors() const;

 private:
  std::size_t n_;
  std::vector<PairLabel> labels_;
};

/// Pool layout [anchors..., candidates...]: anchor i is positive with
/// candidate positive_of[i] and negative with every other pool member.
struct Batch {
  std::vector<Embedding> embeddings;
  PairLabels labels{0};
};

Batch make_batch(const std::vector<Embedding>& anchors, const std::vector<Embedding>& candidates,
                 const std::vector<std::size_t>& positive_of);

struct LossParams {
  double tau = 0.07;
  double alpha = 2.0;
  double beta = 2.0;
};

/// Throws Error(kUsage) unless tau > 0 and alpha, beta >= 1.
void validate(const LossParams& params);

/// S[i][k] = <z_i, z_k>. Rejects embeddings whose norm is off 1 by more than
/// `norm_tolerance`.
Matrix similarity_matrix(const std::vector<Embedding>& embeddings, double norm_tolerance = 1e-9);

struct AnchorLoss {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  double loss = 0.0;
};

struct NtXentResult {
  std::vector<AnchorLoss> per_anchor;
  double mean = 0.0;
};

/// L_ij = -log(exp(S_ij / tau) / sum_{k != i} exp(S_ik / tau)), evaluated
/// with the row maximum subtracted.
NtXentResult ntxent_loss(const Matrix& similarities, const PairLabels& labels, double tau);

/// Median of the similarities of all labelled pairs (mean of the two central
/// values for an even count).
double labelled_median(const Matrix& similarities, const PairLabels& labels);

struct MaskMatrix {
  Matrix multipliers;
  double median = 0.0;
  std::size_t hard_negatives = 0;
  std::size_t hard_positives = 0;
};

/// alpha for negatives strictly above the median, beta for positives strictly
/// below it, 1 everywhere else (diagonal and unlabelled cells included).
MaskMatrix hard_mask(const Matrix& similarities, const PairLabels& labels, double alpha,
                     double beta);

struct LossReport {
  double loss = 0.0;  // mean over anchors
  std::vector<AnchorLoss> per_anchor;
  MaskMatrix mask;
  Matrix grad_similarities;           // dLoss/dS, mask held fixed
  std::vector<Embedding> grad_inputs;  // dLoss/d(input embeddings), when requested
};

/// Mask-weighted NT-Xent:
///   L_ij = -log(M_ij exp(S_ij / tau) / sum_{k != i} M_ik exp(S_ik / tau)).
/// The positive's own term stays in the denominator. Only dLoss/dS is filled.
LossReport hard_ntxent_loss(const Matrix& similarities, const PairLabels& labels,
                            const LossParams& params);

/// Normalizes `raw` internally, evaluates hard_ntxent_loss and back-propagates
/// to the raw (pre-normalization) vectors. The mask is piecewise constant and
/// treated as fixed.
LossReport hard_ntxent_with_gradient(const std::vector<Embedding>& raw, const PairLabels& labels,
                                     const LossParams& params);

// ---------------------------------------------------------------------------
// Toy trainable embedder

struct SyntheticPair {
  std::string report;
  std::string file;
  std::size_t label = 0;  // planted class
};

struct SyntheticDataset {
  std::vector<SyntheticPair> train;
  std::vector<SyntheticPair> held_out;
  std::size_t classes = 0;
};

struct SyntheticSpec {
  std::size_t classes = 32;
  std::size_t train_pairs_per_class = 8;
  std::size_t held_out_pairs_per_class = 4;
  std::size_t class_vocabulary = 6;    // planted tokens per class
  std::size_t shared_vocabulary = 400;
  std::size_t planted_per_text = 4;
  std::size_t noise_per_text = 12;
  std::uint64_t seed = 7;
};

/// Reports and files of one class share planted tokens drawn from a private
/// vocabulary; everything else is noise from a shared pool.
SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec);

struct TrainConfig {
  std::size_t epochs = 15;
  std::size_t batch_size = 16;
  double learning_rate = 0.5;
  double lr_decay = 0.1;  // lr_e = lr / (1 + lr_decay * e)
  LossParams loss{};
  std::size_t feature_dim = kDefaultDimension;
  std::size_t embed_dim = 64;
  double init_scale = 1.0;
  std::uint64_t seed = 42;
};

/// Linear map over reference features followed by L2 normalization.
class LinearEmbedder final : public EmbeddingProvider {
 public:
  LinearEmbedder(Matrix weights);

  std::string name() const override { return "linear-toy"; }
  std::size_t dimension() const override { return weights_.rows(); }
  bool deterministic() const override { return true; }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

  /// W x, unnormalized.
  Embedding project(const Embedding& features) const;

  Matrix& weights() noexcept { return weights_; }
  const Matrix& weights() const noexcept { return weights_; }

 private:
  Matrix weights_;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double median_pos_sim = 0.0;  // held-out
  double median_neg_sim = 0.0;  // held-out
  double learning_rate = 0.0;
};

struct TrainResult {
  LinearEmbedder model;
  std::vector<EpochStats> history;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t step, const std::string& message)
      : Error(ErrorKind::kData, message), epoch_(epoch), step_(step) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

struct Separation {
  double median_pos = 0.0;
  double median_neg = 0.0;
  double gap() const noexcept { return median_pos - median_neg; }
};

/// Median report-file similarity over matching pairs versus over pairs of
/// different classes.
Separation measure_separation(EmbeddingProvider& model, const std::vector<SyntheticPair>& pairs);

/// Minibatch gradient descent on hard_ntxent_loss. Batches are a fixed
/// partition of the shuffled training pairs (at most one pair per class per
/// batch); only their visiting order changes per epoch, so the per-epoch loss
/// is a function of the weights alone.
TrainResult train_toy_embedder(const SyntheticDataset& dataset, const TrainConfig& config);

}  // namespace bugloc
