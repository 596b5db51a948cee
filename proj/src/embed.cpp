#include "seqrec/embed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "seqrec/random.hpp"

namespace seqrec::embed {

TrainMode parse_mode(std::string_view name) {
  if (name == "sg" || name == "skipgram") return TrainMode::SkipGram;
  if (name == "cbow") return TrainMode::Cbow;
  throw Error("unknown training mode '" + std::string(name) + "'");
}

std::string mode_name(TrainMode mode) { return mode == TrainMode::SkipGram ? "sg" : "cbow"; }

void Hyperparameters::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid hyperparameter: ") + what);
  };
  require(dim >= 1, "dim >= 1");
  require(window >= 1, "window >= 1");
  require(negatives >= 1, "negatives >= 1");
  require(epochs >= 1, "epochs >= 1");
  require(lr > 0.0 && std::isfinite(lr), "lr > 0");
  require(grams.min_n >= 1 && grams.max_n >= grams.min_n, "1 <= min_n <= max_n");
  require(bucket_count >= 1, "bucket_count >= 1");
  require(min_count >= 1, "min_count >= 1");
  require(threads >= 1, "threads >= 1");
  require(subsample_threshold > 0.0, "subsample_threshold > 0");
}

EmbeddingModel::EmbeddingModel(Vocabulary vocab, Hyperparameters hp)
    : vocab_(std::move(vocab)), hp_(hp) {
  hp_.validate();
  const auto dim = static_cast<std::size_t>(hp_.dim);
  input_.resize(input_row_count() * dim);
  context_.assign(vocab_.size() * dim, 0.0f);
  Rng rng(hp_.seed);
  const double bound = 0.5 / hp_.dim;
  for (auto& value : input_) value = static_cast<float>(rng.uniform(-bound, bound));
}

std::span<float> EmbeddingModel::input_row(std::size_t row) {
  return std::span<float>(input_).subspan(row * hp_.dim, hp_.dim);
}
std::span<const float> EmbeddingModel::input_row(std::size_t row) const {
  return std::span<const float>(input_).subspan(row * hp_.dim, hp_.dim);
}
std::span<float> EmbeddingModel::context_row(std::size_t row) {
  return std::span<float>(context_).subspan(row * hp_.dim, hp_.dim);
}
std::span<const float> EmbeddingModel::context_row(std::size_t row) const {
  return std::span<const float>(context_).subspan(row * hp_.dim, hp_.dim);
}

std::vector<std::size_t> EmbeddingModel::rows_for(std::span<const corpus::ItemId> items) const {
  std::vector<std::size_t> rows;
  if (const auto index = vocab_.find(subseq::join_items(items))) rows.push_back(*index);
  for (const auto bucket : subseq::gram_buckets(items, hp_.grams, hp_.bucket_count)) {
    rows.push_back(vocab_.size() + bucket);
  }
  return rows;
}

Vector EmbeddingModel::compose(std::span<const corpus::ItemId> items) const {
  const auto rows = rows_for(items);
  if (rows.empty()) throw Error("token has no vocabulary entry and no n-grams to compose from");
  Vector out(hp_.dim, 0.0);
  for (const auto row : rows) {
    const auto values = input_row(row);
    for (int k = 0; k < hp_.dim; ++k) out[k] += values[k];
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (auto& v : out) v *= scale;
  return out;
}

Vector EmbeddingModel::compose(const subseq::SeqToken& token) const {
  return compose(std::span<const corpus::ItemId>(token.items));
}

bool EmbeddingModel::all_finite() const {
  auto finite = [](float v) { return std::isfinite(v); };
  return std::all_of(input_.begin(), input_.end(), finite) &&
         std::all_of(context_.begin(), context_.end(), finite);
}

double similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("similarity: dimension mismatch " + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

namespace {

constexpr double kFinalLrFraction = 1e-4;

struct Schedule {
  double initial_lr;
  std::uint64_t total_updates;

  double at(std::uint64_t done) const {
    const double progress =
        std::min(1.0, static_cast<double>(done) / static_cast<double>(std::max<std::uint64_t>(1, total_updates)));
    return initial_lr * (1.0 - progress * (1.0 - kFinalLrFraction));
  }
};

std::uint64_t updates_per_epoch(const std::vector<std::vector<std::uint32_t>>& sentences,
                                const Hyperparameters& hp) {
  std::uint64_t total = 0;
  const auto window = static_cast<std::size_t>(hp.window);
  for (const auto& sentence : sentences) {
    const auto n = sentence.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = i >= window ? i - window : 0;
      const auto hi = std::min(n - 1, i + window);
      const auto context = hi - lo;  // excludes the center itself
      if (hp.mode == TrainMode::SkipGram) {
        total += context;
      } else if (context > 0) {
        total += 1;
      }
    }
  }
  return total;
}

// One training thread. All row reads and writes go straight to the shared
// model; with several workers that is the usual lock-free (Hogwild) scheme.
class Worker {
 public:
  Worker(EmbeddingModel& model, const std::vector<std::vector<std::size_t>>& token_rows,
         const Hyperparameters& hp, Rng rng)
      : model_(model),
        token_rows_(token_rows),
        hp_(hp),
        dim_(static_cast<std::size_t>(hp.dim)),
        rng_(std::move(rng)),
        hidden_(dim_),
        hidden_grad_(dim_),
        outputs_(dim_ * (1 + hp.negatives)),
        output_grad_(dim_ * (1 + hp.negatives)) {
    output_rows_.reserve(1 + hp.negatives);
  }

  std::vector<std::uint32_t> subsample(const std::vector<std::uint32_t>& sentence) {
    const auto& vocab = model_.vocab();
    const double threshold = hp_.subsample_threshold * static_cast<double>(vocab.total_count());
    std::vector<std::uint32_t> kept;
    for (const auto token : sentence) {
      const auto count = static_cast<double>(vocab.count(token));
      const double keep = (std::sqrt(count / threshold) + 1.0) * threshold / count;
      if (keep >= 1.0 || rng_.uniform() < keep) kept.push_back(token);
    }
    return kept;
  }

  // Returns the summed loss over the sentence's updates.
  double run_sentence(const std::vector<std::uint32_t>& sentence, const Schedule& schedule,
                      std::atomic<std::uint64_t>& done, std::uint64_t& local_updates, int epoch,
                      std::size_t sentence_no) {
    double total = 0.0;
    const auto n = sentence.size();
    const auto window = static_cast<std::size_t>(hp_.window);
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = i >= window ? i - window : 0;
      const auto hi = std::min(n - 1, i + window);
      if (hp_.mode == TrainMode::SkipGram) {
        const auto& rows = token_rows_[sentence[i]];
        mean_rows(rows, 1.0, true);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const double lr = schedule.at(done.fetch_add(1, std::memory_order_relaxed));
          const double loss = update(sentence[j], lr);
          check(loss, epoch, sentence_no, i);
          total += loss;
          ++local_updates;
          // Every contributing row takes the full -lr * dL/dh step, so the mean does too.
          for (const auto row : rows) apply_input(row, lr);
          for (std::size_t k = 0; k < dim_; ++k) hidden_[k] -= lr * hidden_grad_[k];
        }
      } else {
        if (hi == lo) continue;
        const double tokens = static_cast<double>(hi - lo);
        std::fill(hidden_.begin(), hidden_.end(), 0.0);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j != i) mean_rows(token_rows_[sentence[j]], 1.0 / tokens, false);
        }
        const double lr = schedule.at(done.fetch_add(1, std::memory_order_relaxed));
        const double loss = update(sentence[i], lr);
        check(loss, epoch, sentence_no, i);
        total += loss;
        ++local_updates;
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const auto& rows = token_rows_[sentence[j]];
          for (const auto row : rows) apply_input(row, lr);
        }
      }
    }
    return total;
  }

 private:
  // hidden (+)= weight * mean(rows); `reset` clears it first.
  void mean_rows(const std::vector<std::size_t>& rows, double weight, bool reset) {
    if (reset) std::fill(hidden_.begin(), hidden_.end(), 0.0);
    const double scale = weight / static_cast<double>(rows.size());
    for (const auto row : rows) {
      const auto values = model_.input_row(row);
      for (std::size_t k = 0; k < dim_; ++k) hidden_[k] += scale * values[k];
    }
  }

  // Gradient step on the context rows for one target; leaves dL/dh in hidden_grad_.
  double update(std::uint32_t target, double lr) {
    output_rows_.clear();
    output_rows_.push_back(target);
    for (int d = 0; d < hp_.negatives; ++d) {
      const auto negative = model_.vocab().sample_negative(rng_);
      if (negative != target) output_rows_.push_back(negative);
    }
    const auto rows = output_rows_.size();
    for (std::size_t r = 0; r < rows; ++r) {
      const auto values = model_.context_row(output_rows_[r]);
      std::copy(values.begin(), values.end(), outputs_.begin() + r * dim_);
    }
    const double loss = negative_sampling_gradient<double>(
        hidden_, std::span<const double>(outputs_).first(rows * dim_), hidden_grad_,
        std::span<double>(output_grad_).first(rows * dim_));
    for (std::size_t r = 0; r < rows; ++r) {
      auto values = model_.context_row(output_rows_[r]);
      for (std::size_t k = 0; k < dim_; ++k) {
        values[k] = static_cast<float>(values[k] - lr * output_grad_[r * dim_ + k]);
      }
    }
    return loss;
  }

  void apply_input(std::size_t row, double step) {
    auto values = model_.input_row(row);
    for (std::size_t k = 0; k < dim_; ++k) {
      values[k] = static_cast<float>(values[k] - step * hidden_grad_[k]);
    }
  }

  static void check(double loss, int epoch, std::size_t sentence, std::size_t position) {
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at epoch " << epoch + 1 << ", sentence " << sentence
          << ", position " << position;
      throw Error(msg.str());
    }
  }

  EmbeddingModel& model_;
  const std::vector<std::vector<std::size_t>>& token_rows_;
  const Hyperparameters& hp_;
  std::size_t dim_;
  Rng rng_;
  std::vector<double> hidden_;
  std::vector<double> hidden_grad_;
  std::vector<double> outputs_;
  std::vector<double> output_grad_;
  std::vector<std::uint32_t> output_rows_;
};

}  // namespace

EmbeddingModel train(const TrainingCorpus& corpus, const Vocabulary& vocab,
                     const Hyperparameters& hp, TrainStats* stats) {
  hp.validate();
  if (vocab.size() == 0) throw Error("cannot train with an empty vocabulary");
  EmbeddingModel model(vocab, hp);

  // Tokens below min_count are dropped from sentences.
  std::vector<std::vector<std::uint32_t>> sentences;
  for (const auto& sentence : corpus.sentences) {
    std::vector<std::uint32_t> ids;
    for (const auto& token : sentence) {
      if (const auto index = vocab.find(token.text)) ids.push_back(*index);
    }
    if (!ids.empty()) sentences.push_back(std::move(ids));
  }

  std::vector<std::vector<std::size_t>> token_rows(vocab.size());
  for (std::uint32_t t = 0; t < vocab.size(); ++t) {
    token_rows[t] = model.rows_for(vocab.token(t).items);
  }

  const Schedule schedule{hp.lr, updates_per_epoch(sentences, hp) * static_cast<std::uint64_t>(hp.epochs)};
  std::atomic<std::uint64_t> done{0};
  Rng root(hp.seed ^ 0xA5A5A5A5DEADBEEFULL);
  const auto threads = static_cast<std::size_t>(std::max(1, hp.threads));
  std::vector<Worker> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) workers.emplace_back(model, token_rows, hp, root.fork(t));

  TrainStats local;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::vector<double> losses(threads, 0.0);
    std::vector<std::uint64_t> counts(threads, 0);
    auto shard = [&](std::size_t t) {
      for (std::size_t s = t; s < sentences.size(); s += threads) {
        if (hp.subsample) {
          losses[t] += workers[t].run_sentence(workers[t].subsample(sentences[s]), schedule, done,
                                               counts[t], epoch, s);
        } else {
          losses[t] += workers[t].run_sentence(sentences[s], schedule, done, counts[t], epoch, s);
        }
      }
    };
    if (threads == 1) {
      shard(0);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            shard(t);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    double loss = 0.0;
    std::uint64_t count = 0;
    for (std::size_t t = 0; t < threads; ++t) {
      loss += losses[t];
      count += counts[t];
    }
    local.updates += count;
    local.epoch_mean_loss.push_back(count == 0 ? 0.0 : loss / static_cast<double>(count));
  }

  if (!model.all_finite()) throw Error("training produced non-finite vectors");
  if (stats != nullptr) *stats = std::move(local);
  return model;
}

}  // namespace seqrec::embed
