#include "bugloc/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace bugloc {

void PairLabels::set(std::size_t row, std::size_t col, PairLabel label) {
  if (row >= n_ || col >= n_) throw usage_error("pair label index out of range");
  if (row == col && label != PairLabel::kNone) throw usage_error("diagonal pairs cannot be labelled");
  labels_[row * n_ + col] = label;
}

std::vector<std::pair<std::size_t, std::size_t>> PairLabels::anchors() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i) {
    std::size_t positives = 0, labelled = 0, pos = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      const PairLabel l = at(i, k);
      if (l == PairLabel::kNone) continue;
      ++labelled;
      if (l == PairLabel::kPositive) {
        ++positives;
        pos = k;
      }
    }
    if (labelled == 0) continue;
    if (positives != 1) {
      throw usage_error("row " + std::to_string(i) + " has " + std::to_string(positives) +
                        " positives; anchors need exactly one");
    }
    out.emplace_back(i, pos);
  }
  return out;
}

Batch make_batch(const std::vector<Embedding>& anchors, const std::vector<Embedding>& candidates,
                 const std::vector<std::size_t>& positive_of) {
  if (positive_of.size() != anchors.size()) throw usage_error("one positive per anchor required");
  Batch batch;
  batch.embeddings = anchors;
  batch.embeddings.insert(batch.embeddings.end(), candidates.begin(), candidates.end());
  const std::size_t n = batch.embeddings.size();
  batch.labels = PairLabels(n);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (positive_of[i] >= candidates.size()) throw usage_error("positive index out of range");
    const std::size_t pos = anchors.size() + positive_of[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      batch.labels.set(i, k, k == pos ? PairLabel::kPositive : PairLabel::kNegative);
    }
  }
  return batch;
}

void validate(const LossParams& params) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) throw usage_error("tau must be > 0");
  if (!(params.alpha >= 1.0) || !std::isfinite(params.alpha)) throw usage_error("alpha must be >= 1");
  if (!(params.beta >= 1.0) || !std::isfinite(params.beta)) throw usage_error("beta must be >= 1");
}

Matrix similarity_matrix(const std::vector<Embedding>& embeddings, double norm_tolerance) {
  const std::size_t n = embeddings.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (embeddings[i].size() != embeddings.front().size())
      throw usage_error("embeddings differ in dimension");
    if (std::abs(l2_norm(embeddings[i]) - 1.0) > norm_tolerance)
      throw usage_error("embedding " + std::to_string(i) + " is not unit-norm");
  }
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = dot(embeddings[i], embeddings[i]);
    for (std::size_t k = i + 1; k < n; ++k) {
      s(i, k) = s(k, i) = dot(embeddings[i], embeddings[k]);
    }
  }
  return s;
}

NtXentResult ntxent_loss(const Matrix& s, const PairLabels& labels, double tau) {
  if (!(tau > 0.0)) throw usage_error("tau must be > 0");
  const std::size_t n = s.rows();
  NtXentResult out;
  for (const auto& [i, j] : labels.anchors()) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) row_max = std::max(row_max, s(i, k) / tau);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) denom += std::exp(s(i, k) / tau - row_max);
    }
    const double loss = std::log(denom) - (s(i, j) / tau - row_max);
    out.per_anchor.push_back({i, j, loss});
    out.mean += loss;
  }
  if (!out.per_anchor.empty()) out.mean /= static_cast<double>(out.per_anchor.size());
  return out;
}

double labelled_median(const Matrix& s, const PairLabels& labels) {
  std::vector<double> values;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t k = 0; k < s.cols(); ++k) {
      if (labels.at(i, k) != PairLabel::kNone) values.push_back(s(i, k));
    }
  }
  if (values.empty()) throw usage_error("no labelled pairs to take a median over");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

MaskMatrix hard_mask(const Matrix& s, const PairLabels& labels, double alpha, double beta) {
  MaskMatrix mask;
  mask.multipliers = Matrix(s.rows(), s.cols(), 1.0);
  mask.median = labelled_median(s, labels);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t k = 0; k < s.cols(); ++k) {
      const PairLabel l = labels.at(i, k);
      if (l == PairLabel::kNegative && s(i, k) > mask.median) {
        mask.multipliers(i, k) = alpha;
        ++mask.hard_negatives;
      } else if (l == PairLabel::kPositive && s(i, k) < mask.median) {
        mask.multipliers(i, k) = beta;
        ++mask.hard_positives;
      }
    }
  }
  return mask;
}

LossReport hard_ntxent_loss(const Matrix& s, const PairLabels& labels, const LossParams& params) {
  validate(params);
  const std::size_t n = s.rows();
  LossReport report;
  report.mask = hard_mask(s, labels, params.alpha, params.beta);
  report.grad_similarities = Matrix(n, n);
  const Matrix& m = report.mask.multipliers;
  const double tau = params.tau;

  const auto anchors = labels.anchors();
  const double scale = anchors.empty() ? 0.0 : 1.0 / static_cast<double>(anchors.size());
  std::vector<double> weights(n);
  for (const auto& [i, j] : anchors) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) row_max = std::max(row_max, s(i, k) / tau);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      weights[k] = k == i ? 0.0 : m(i, k) * std::exp(s(i, k) / tau - row_max);
      denom += weights[k];
    }
    const double loss = std::log(denom) - std::log(m(i, j)) - (s(i, j) / tau - row_max);
    report.per_anchor.push_back({i, j, loss});
    report.loss += loss;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double indicator = k == j ? 1.0 : 0.0;
      report.grad_similarities(i, k) += scale * (weights[k] / denom - indicator) / tau;
    }
  }
  report.loss *= scale;
  return report;
}

LossReport hard_ntxent_with_gradient(const std::vector<Embedding>& raw, const PairLabels& labels,
                                     const LossParams& params) {
  const std::size_t n = raw.size();
  if (labels.size() != n) throw usage_error("label matrix does not match the batch size");
  std::vector<Embedding> unit(raw);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = l2_norm(raw[i]);
    normalize(unit[i]);
  }
  LossReport report = hard_ntxent_loss(similarity_matrix(unit, 1e-9), labels, params);

  const Matrix& g = report.grad_similarities;
  const std::size_t d = n ? raw.front().size() : 0;
  report.grad_inputs.assign(n, Embedding(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    // dL/dz_i = sum_k (G_ik + G_ki) z_k
    Embedding gz(d, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double w = g(i, k) + g(k, i);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) gz[c] += w * unit[k][c];
    }
    // Back through z = x / |x|: (g - z <z, g>) / |x|.
    const double radial = dot(unit[i], gz);
    for (std::size_t c = 0; c < d; ++c) {
      report.grad_inputs[i][c] = (gz[c] - unit[i][c] * radial) / norms[i];
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw usage_error("synthetic dataset needs at least two classes");
  if (spec.planted_per_text > spec.class_vocabulary)
    throw usage_error("planted_per_text exceeds class_vocabulary");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> noise_pick(0, spec.shared_vocabulary - 1);

  // Letters-only words tokenize to themselves, so texts share nothing beyond
  // the words actually drawn.
  const auto word = [](char prefix, std::size_t n) {
    std::string w(1, prefix);
    do {
      w += static_cast<char>('a' + n % 26);
      n /= 26;
    } while (n > 0);
    return w;
  };
  const auto make_text = [&](std::size_t cls, std::string_view lead) {
    std::vector<std::size_t> vocab(spec.class_vocabulary);
    std::iota(vocab.begin(), vocab.end(), 0);
    std::shuffle(vocab.begin(), vocab.end(), rng);
    std::vector<std::string> words;
    for (std::size_t t = 0; t < spec.planted_per_text; ++t)
      words.push_back(word('q', cls * spec.class_vocabulary + vocab[t]));
    for (std::size_t t = 0; t < spec.noise_per_text; ++t)
      words.push_back(word('z', noise_pick(rng)));
    std::shuffle(words.begin(), words.end(), rng);
    std::string text(lead);
    for (const auto& w : words) text += " " + w;
    return text;
  };

  SyntheticDataset ds;
  ds.classes = spec.classes;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t p = 0; p < spec.train_pairs_per_class + spec.held_out_pairs_per_class; ++p) {
      SyntheticPair pair{make_text(c, "report"), make_text(c, "file"), c};
      (p < spec.train_pairs_per_class ? ds.train : ds.held_out).push_back(std::move(pair));
    }
  }
  return ds;
}

LinearEmbedder::LinearEmbedder(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) throw usage_error("empty embedder weights");
}

Embedding LinearEmbedder::project(const Embedding& features) const {
  if (features.size() != weights_.cols()) throw usage_error("feature dimension mismatch");
  Embedding y(weights_.rows(), 0.0);
  for (std::size_t r = 0; r < weights_.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < weights_.cols(); ++c) acc += weights_(r, c) * features[c];
    y[r] = acc;
  }
  return y;
}

std::vector<Embedding> LinearEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Embedding y = project(reference_embed(t, weights_.cols()));
    if (l2_norm(y) == 0.0) {
      std::fill(y.begin(), y.end(), 0.0);
      y[0] = 1.0;
    } else {
      normalize(y);
    }
    out.push_back(std::move(y));
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Fixed partition of the training pairs into batches holding at most one pair
// per class.
std::vector<std::vector<std::size_t>> partition_batches(const std::vector<SyntheticPair>& pairs,
                                                        std::size_t batch_size,
                                                        std::mt19937_64& rng) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t idx : order) {
    bool placed = false;
    for (auto& b : batches) {
      if (b.size() >= batch_size) continue;
      const bool clash = std::any_of(b.begin(), b.end(), [&](std::size_t o) {
        return pairs[o].label == pairs[idx].label;
      });
      if (!clash) {
        b.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) batches.push_back({idx});
  }
  // A batch with one pair has no negatives worth learning from.
  std::erase_if(batches, [](const auto& b) { return b.size() < 2; });
  return batches;
}

}  // namespace

Separation measure_separation(EmbeddingProvider& model, const std::vector<SyntheticPair>& pairs) {
  std::vector<std::string> reports, files;
  for (const auto& p : pairs) {
    reports.push_back(p.report);
    files.push_back(p.file);
  }
  const auto r = model.embed(reports);
  const auto f = model.embed(files);
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (k == i) {
        pos.push_back(dot(r[i], f[k]));
      } else if (pairs[k].label != pairs[i].label) {
        neg.push_back(dot(r[i], f[k]));
      }
    }
  }
  return {median_of(std::move(pos)), median_of(std::move(neg))};
}

TrainResult train_toy_embedder(const SyntheticDataset& dataset, const TrainConfig& config) {
  validate(config.loss);
  if (config.batch_size < 2) throw usage_error("batch size must be >= 2");
  if (config.learning_rate < 0.0) throw usage_error("learning rate must be >= 0");
  {
    std::vector<std::size_t> labels;
    for (const auto& p : dataset.train) labels.push_back(p.label);
    std::sort(labels.begin(), labels.end());
    if (std::unique(labels.begin(), labels.end()) - labels.begin() < 2)
      throw usage_error("training data needs at least two classes");
  }

  std::mt19937_64 rng(config.seed);
  Matrix w(config.embed_dim, config.feature_dim);
  std::normal_distribution<double> init(0.0, config.init_scale / std::sqrt(static_cast<double>(config.feature_dim)));
  for (double& x : w.data()) x = init(rng);
  TrainResult result{LinearEmbedder(std::move(w)), {}};
  Matrix& weights = result.model.weights();

  std::vector<Embedding> report_features, file_features;
  for (const auto& p : dataset.train) {
    report_features.push_back(reference_embed(p.report, config.feature_dim));
    file_features.push_back(reference_embed(p.file, config.feature_dim));
  }
  const auto batches = partition_batches(dataset.train, config.batch_size, rng);
  if (batches.empty()) throw usage_error("training data too small for a single batch");
  const std::vector<SyntheticPair>& probe = dataset.held_out.empty() ? dataset.train : dataset.held_out;

  std::vector<std::size_t> visit(batches.size());
  std::iota(visit.begin(), visit.end(), 0);
  std::vector<double> batch_loss(batches.size());
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + config.lr_decay * static_cast<double>(epoch - 1));
    std::shuffle(visit.begin(), visit.end(), rng);
    for (std::size_t b : visit) {
      ++step;
      const auto& members = batches[b];
      const std::size_t m = members.size();
      std::vector<Embedding> pool;
      std::vector<const Embedding*> inputs;
      for (std::size_t idx : members) inputs.push_back(&report_features[idx]);
      for (std::size_t idx : members) inputs.push_back(&file_features[idx]);
      for (const Embedding* f : inputs) pool.push_back(result.model.project(*f));

      PairLabels labels(2 * m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < 2 * m; ++k) {
          if (k != i) labels.set(i, k, k == m + i ? PairLabel::kPositive : PairLabel::kNegative);
        }
      }
      for (const auto& y : pool) {
        if (!(l2_norm(y) > 0.0) || !std::isfinite(l2_norm(y)))
          throw TrainingDiverged(epoch, step, "degenerate projection at step " + std::to_string(step));
      }
      const LossReport rep = hard_ntxent_with_gradient(pool, labels, config.loss);
      if (!std::isfinite(rep.loss))
        throw TrainingDiverged(epoch, step, "non-finite loss at step " + std::to_string(step));
      batch_loss[b] = rep.loss;
      if (lr == 0.0) continue;
      for (std::size_t p = 0; p < pool.size(); ++p) {
        const Embedding& g = rep.grad_inputs[p];
        const Embedding& f = *inputs[p];
        for (std::size_t r = 0; r < weights.rows(); ++r) {
          if (g[r] == 0.0) continue;
          const double scaled = lr * g[r];
          for (std::size_t c = 0; c < weights.cols(); ++c) weights(r, c) -= scaled * f[c];
        }
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    for (double l : batch_loss) stats.loss += l;
    stats.loss /= static_cast<double>(batch_loss.size());
    const Separation sep = measure_separation(result.model, probe);
    stats.median_pos_sim = sep.median_pos;
    stats.median_neg_sim = sep.median_neg;
    result.history.push_back(stats);
  }
  return result;
}

}  // namespace bugloc
