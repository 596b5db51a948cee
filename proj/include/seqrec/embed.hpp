#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/error.hpp"
#include "seqrec/subseq.hpp"
#include "seqrec/vocab.hpp"

namespace seqrec::embed {

enum class TrainMode : std::uint8_t { SkipGram = 0, Cbow = 1 };

TrainMode parse_mode(std::string_view name);
std::string mode_name(TrainMode mode);

struct Hyperparameters {
  TrainMode mode = TrainMode::SkipGram;
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 1;
  subseq::GramRange grams{1, 5, true};
  std::uint32_t bucket_count = 2'000'000;
  std::uint64_t min_count = 1;
  bool subsample = false;
  double subsample_threshold = 1e-4;
  // 1 = deterministic. More threads train lock-free over sentence shards.
  int threads = 1;

  void validate() const;
};

using Vector = std::vector<double>;

// Input matrix holds one row per vocabulary token followed by one row per
// hash bucket; the context matrix holds one row per vocabulary token.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // Rows are initialized uniformly in [-0.5/dim, 0.5/dim]; context rows are zero.
  EmbeddingModel(Vocabulary vocab, Hyperparameters hp);

  int dim() const { return hp_.dim; }
  const Vocabulary& vocab() const { return vocab_; }
  const Hyperparameters& hyperparameters() const { return hp_; }
  std::size_t input_row_count() const { return vocab_.size() + hp_.bucket_count; }

  std::span<float> input_row(std::size_t row);
  std::span<const float> input_row(std::size_t row) const;
  std::span<float> context_row(std::size_t row);
  std::span<const float> context_row(std::size_t row) const;
  std::span<float> input_matrix() { return input_; }
  std::span<const float> input_matrix() const { return input_; }
  std::span<float> context_matrix() { return context_; }
  std::span<const float> context_matrix() const { return context_; }

  // Input rows contributing to an item list: its token row when in the
  // vocabulary, then one bucket row per gram (duplicates kept).
  std::vector<std::size_t> rows_for(std::span<const corpus::ItemId> items) const;

  // Mean of the contributing rows. Unseen tokens use bucket rows only.
  Vector compose(const subseq::SeqToken& token) const;
  Vector compose(std::span<const corpus::ItemId> items) const;

  bool all_finite() const;

 private:
  Vocabulary vocab_;
  Hyperparameters hp_;
  std::vector<float> input_;
  std::vector<float> context_;
};

// Cosine of the angle between a and b; 0 when either norm is below 1e-12.
double similarity(std::span<const double> a, std::span<const double> b);

// -log(sigmoid(x)), stable for large |x|.
template <std::floating_point T>
T softplus_neg(T x) {
  return x >= T(0) ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

template <std::floating_point T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Negative-sampling loss for one hidden vector. `outputs` stacks
// (1 + negatives) rows of length hidden.size(); row 0 is the observed target,
// the rest are negatives:
//   L = -log s(h.u0) - sum_j log s(-h.uj)
template <std::floating_point T>
T negative_sampling_loss(std::span<const T> hidden, std::span<const T> outputs) {
  const std::size_t dim = hidden.size();
  const std::size_t rows = outputs.size() / dim;
  T loss = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    T score = 0;
    for (std::size_t k = 0; k < dim; ++k) score += hidden[k] * outputs[r * dim + k];
    loss += softplus_neg(r == 0 ? score : -score);
  }
  return loss;
}

// Loss plus gradients with respect to the hidden vector and every output row.
template <std::floating_point T>
T negative_sampling_gradient(std::span<const T> hidden, std::span<const T> outputs,
                             std::span<T> hidden_grad, std::span<T> output_grad) {
  const std::size_t dim = hidden.size();
  const std::size_t rows = outputs.size() / dim;
  std::fill(hidden_grad.begin(), hidden_grad.end(), T(0));
  T loss = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto u = outputs.subspan(r * dim, dim);
    T score = 0;
    for (std::size_t k = 0; k < dim; ++k) score += hidden[k] * u[k];
    const T label = r == 0 ? T(1) : T(0);
    loss += softplus_neg(r == 0 ? score : -score);
    const T coeff = sigmoid(score) - label;
    for (std::size_t k = 0; k < dim; ++k) {
      hidden_grad[k] += coeff * u[k];
      output_grad[r * dim + k] = coeff * hidden[k];
    }
  }
  return loss;
}

struct TrainStats {
  std::vector<double> epoch_mean_loss;
  std::uint64_t updates = 0;
};

// Negative-sampling training over per-user sentences. In skip-gram mode each
// (center, context) pair inside the window is one update; in CBOW mode each
// center with a non-empty window is one update. The learning rate decays
// linearly from hp.lr to hp.lr * 1e-4 over all updates.
EmbeddingModel train(const TrainingCorpus& corpus, const Vocabulary& vocab,
                     const Hyperparameters& hp, TrainStats* stats = nullptr);

}  // namespace seqrec::embed
