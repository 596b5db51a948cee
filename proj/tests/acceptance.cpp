// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "seqrec/error.hpp"
#include "seqrec/harness.hpp"
#include "seqrec/recindex.hpp"
#include "seqrec/rouge.hpp"
#include "seqrec/synthetic.hpp"

using namespace seqrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit_seconds, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && seconds >= limit_seconds) {
    out.pass = false;
    out.detail += " (over the " + std::to_string(limit_seconds) + " s limit)";
  }
  if (!out.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(),
              seconds);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

rouge::Items letters(std::string_view text) {
  rouge::Items out;
  for (char c : text) out.emplace_back(1, c);
  return out;
}

Outcome rouge_worked_example() {
  const rouge::EvalInstance inst{{letters("ABCDE")}, letters("ABCXYZ")};
  const auto r2 = rouge::rouge_n(inst, 2);
  const auto rl = rouge::rouge_l(inst);
  const auto lcs = rouge::lcs_length(inst.references[0], inst.system);
  const bool ok = lcs == 3 && r2.precision == 0.40 && r2.recall == 0.50 &&
                  std::abs(r2.f_measure - 0.44) <= 0.005 && rl.precision == 0.50 &&
                  rl.recall == 0.60 && std::abs(rl.f_measure - 0.54) <= 0.005;
  return {ok, fmt("ROUGE-2 P=%.4f R=%.4f F=%.4f; ROUGE-L P=%.4f R=%.4f F=%.4f; LCS=%zu", r2.precision,
                  r2.recall, r2.f_measure, rl.precision, rl.recall, rl.f_measure, lcs)};
}

// Every sequence of length <= 8 over {0,1,2}; the brute force looks for the
// longest subsequence of b that is also a subsequence of a.
Outcome lcs_exhaustive() {
  constexpr std::size_t kMaxLen = 8;
  std::vector<std::vector<std::uint8_t>> all{{}};
  for (std::size_t begin = 0; begin < all.size(); ++begin) {
    if (all[begin].size() == kMaxLen) break;
    for (std::uint8_t c = 0; c < 3; ++c) {
      auto next = all[begin];
      next.push_back(c);
      all.push_back(std::move(next));
    }
  }
  const std::size_t count = all.size();
  std::vector<std::size_t> offset(kMaxLen + 2, 0);
  for (std::size_t len = 1, width = 1; len <= kMaxLen + 1; ++len, width *= 3) offset[len] = offset[len - 1] + width;
  auto id_of = [&](const std::vector<std::uint8_t>& s) {
    std::size_t value = 0;
    for (auto c : s) value = value * 3 + c;
    return offset[s.size()] + value;
  };

  const std::size_t words = (count + 63) / 64;
  std::vector<std::uint64_t> contains(count * words, 0);
  std::vector<std::vector<std::uint32_t>> subs(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = all[i];
    std::vector<std::uint32_t> ids;
    for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
      std::vector<std::uint8_t> sub;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (mask & (1u << k)) sub.push_back(s[k]);
      }
      ids.push_back(static_cast<std::uint32_t>(id_of(sub)));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) contains[i * words + id / 64] |= std::uint64_t{1} << (id % 64);
    // Ids grow with length, so longest candidates come first after reversing.
    std::reverse(ids.begin(), ids.end());
    subs[i] = std::move(ids);
  }
  std::vector<std::uint8_t> length_of(count);
  for (std::size_t i = 0; i < count; ++i) length_of[i] = static_cast<std::uint8_t>(all[i].size());

  // The brute force is symmetric, so it runs once per unordered pair; the DP
  // is checked in both argument orders.
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < count; ++a) {
    const std::uint64_t* bits = &contains[a * words];
    const std::span<const std::uint8_t> sa(all[a]);
    for (std::size_t b = a; b < count; ++b) {
      std::size_t brute = 0;
      for (auto id : subs[b]) {
        if (bits[id / 64] >> (id % 64) & 1u) {
          brute = length_of[id];
          break;
        }
      }
      const std::span<const std::uint8_t> sb(all[b]);
      const auto forward = rouge::lcs_length<std::uint8_t>(sa, sb);
      const auto backward = rouge::lcs_length<std::uint8_t>(sb, sa);
      if (forward != brute || backward != brute) {
        return {false, fmt("mismatch at pair (%zu, %zu): dp=%zu/%zu brute=%zu", a, b, forward,
                           backward, brute)};
      }
      pairs += a == b ? 1 : 2;
    }
  }
  return {true, fmt("%zu sequences, %zu ordered pairs, all equal", count, pairs)};
}

Outcome gradient_check() {
  Rng rng(2718);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto dim = 1 + rng.below(8);
    const auto rows = 1 + rng.below(6);
    const auto negatives = 1 + rng.below(5);
    worst = std::max(worst, testing::gradient_check(rng, dim, rows, negatives, 1e-5));
  }
  return {worst < 1e-4, fmt("100 instances, max relative error %.3e (limit 1e-4)", worst)};
}

struct Fixture {
  synthetic::Options options;
  synthetic::Dataset data;
  corpus::EvalSplit split;
  harness::EvalConfig config;
};

Fixture make_fixture() {
  Fixture f;
  f.options.users = 600;
  f.options.topics = 24;
  f.options.cold_start_fraction = 0.5;
  f.options.seed = 7;
  f.data = synthetic::generate(f.options);
  f.config.embedding.dim = 32;
  f.config.embedding.bucket_count = 100000;
  f.config.embedding.epochs = 100;
  f.config.embedding.lr = 0.05;
  f.config.embedding.seed = 1;
  f.split = corpus::make_split(corpus::build_sequences(f.data.events, f.config.gap_seconds),
                               f.config.boundary);
  return f;
}

embed::EmbeddingModel train_on_a(const Fixture& f) {
  const auto training = embed::make_corpus(f.split.part_a);
  return embed::train(training, embed::Vocabulary::build(training, f.config.embedding.min_count),
                      f.config.embedding);
}

Outcome oov_composition(const embed::EmbeddingModel& model) {
  // Item pairs never seen together as a whole sequence.
  const std::vector<std::vector<std::string>> unseen = {
      {"t000_i001", "t005_i007", "t011_i002"}, {"h000_i003", "t020_i015"}, {"t003_i004"},
      {"t001_i000", "t001_i001", "t001_i002", "t001_i003", "t001_i004", "t001_i005", "t001_i006"}};
  double worst = 0.0;
  for (const auto& items : unseen) {
    if (model.vocab().find(subseq::join_items(items))) return {false, "probe token is in the vocabulary"};
    const auto buckets = subseq::gram_buckets(items, model.hyperparameters().grams,
                                              model.hyperparameters().bucket_count);
    const auto composed = model.compose(items);
    for (int k = 0; k < model.dim(); ++k) {
      long double sum = 0.0L;
      long double magnitude = 0.0L;
      for (auto b : buckets) {
        const long double v = model.input_row(model.vocab().size() + b)[k];
        sum += v;
        magnitude += std::abs(v);
      }
      const long double mean = sum / static_cast<long double>(buckets.size());
      const long double bound = std::numeric_limits<double>::epsilon() * magnitude;
      const double err = static_cast<double>(std::abs(composed[k] - mean));
      if (err > bound) {
        return {false, fmt("component %d differs by %.3e (bound %.3e)", k, err, static_cast<double>(bound))};
      }
      worst = std::max(worst, err);
    }
  }
  return {true, fmt("%zu unseen tokens, max |compose - mean| = %.3e", unseen.size(), worst)};
}

Outcome topk_exactness() {
  Rng rng(1234);
  embed::Hyperparameters hp;
  hp.dim = 4;
  hp.grams = {1, 1, false};
  hp.bucket_count = 1000;
  std::size_t ties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto model = std::make_shared<embed::EmbeddingModel>(
        embed::Vocabulary::from_entries({subseq::serialize(std::vector<std::string>{"v"})}, {1}, 1), hp);
    const std::vector<std::string> query{"q" + std::to_string(trial)};
    auto row = model->input_row(model->rows_for(query).front());
    for (auto& v : row) v = static_cast<float>(rng.uniform(-1.0, 1.0));

    const auto size = 1 + rng.below(1000);
    std::vector<recindex::Candidate> entries;
    for (std::uint64_t i = 0; i < size; ++i) {
      embed::Vector v(4);
      for (auto& x : v) x = static_cast<double>(rng.below(3)) - 1.0;
      entries.push_back({subseq::serialize(std::vector<std::string>{"c" + std::to_string(i)}), v, "u"});
    }
    if (trial % 4 == 0) entries.push_back({subseq::serialize(query), embed::Vector(4, 1.0), "u"});
    const auto k = 1 + rng.below(25);
    const recindex::CandidateIndex index(model, entries, {});
    const auto got = recindex::recommend(index, query, k);

    const auto q = model->compose(query);
    std::vector<recindex::Recommendation> all;
    for (const auto& e : entries) {
      if (e.token.text != subseq::join_items(query)) all.push_back({e.token, embed::similarity(q, e.vector)});
    }
    std::sort(all.begin(), all.end(), recindex::ranks_before);
    for (std::size_t i = 1; i < all.size(); ++i) ties += all[i].score == all[i - 1].score;
    all.resize(std::min<std::size_t>(k, all.size()));
    if (got.ranked.size() != all.size()) return {false, fmt("trial %d: length %zu vs %zu", trial, got.ranked.size(), all.size())};
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (got.ranked[i].token.text != all[i].token.text || got.ranked[i].score != all[i].score) {
        return {false, fmt("trial %d: rank %zu differs", trial, i)};
      }
    }
  }
  return {ties > 0, fmt("100 random indexes match the full-scan oracle; %zu tied neighbours seen", ties)};
}

Outcome cold_start(const Fixture& f, harness::RunReport& one, harness::RunReport& two) {
  auto config = f.config;
  config.type = harness::ConfigType::I;
  one = harness::run(config, f.split);
  config.type = harness::ConfigType::II;
  two = harness::run(config, f.split);
  const double ratio = one.rouge1.recall > 0 ? two.rouge1.recall / one.rouge1.recall : 0.0;
  const bool shape = f.data.user_topic.size() >= 500 && f.options.topics >= 20 &&
                     !f.data.cold_start_users.empty();
  return {shape && two.rouge1.recall >= 1.2 * one.rouge1.recall,
          fmt("%zu users, %zu cold-start; ROUGE-1 recall I=%.4f II=%.4f ratio %.3f (need >= 1.2)",
              f.data.user_topic.size(), f.data.cold_start_users.size(), one.rouge1.recall,
              two.rouge1.recall, ratio)};
}

Outcome clustering(const Fixture& f, const embed::EmbeddingModel& model) {
  const auto& vocab = model.vocab();
  std::vector<embed::Vector> vectors;
  std::vector<std::size_t> topic;
  const std::size_t topics = f.options.topics;  // hub items carry this index
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    std::size_t t = topics;
    for (const auto& item : vocab.token(i).items) {
      const auto it = f.data.item_topic.find(item);
      if (it != f.data.item_topic.end() && it->second < topics) {
        t = it->second;
        break;
      }
    }
    if (t == topics) continue;  // hub items only
    vectors.push_back(model.compose(vocab.token(i)));
    topic.push_back(t);
  }
  double intra = 0.0, inter = 0.0;
  std::size_t ni = 0, no = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const double s = embed::similarity(vectors[i], vectors[j]);
      if (topic[i] == topic[j]) {
        intra += s;
        ++ni;
      } else {
        inter += s;
        ++no;
      }
    }
  }
  intra /= static_cast<double>(ni);
  inter /= static_cast<double>(no);
  return {intra - inter >= 0.1, fmt("%zu part-A tokens; intra-topic %.4f inter-topic %.4f margin %.4f (need >= 0.1)",
                                    vectors.size(), intra, inter, intra - inter)};
}

Outcome determinism(const Fixture& f) {
  auto csv = [&](harness::ConfigType type) {
    auto config = f.config;
    config.type = type;
    std::ostringstream out;
    harness::write_report_csv(out, {harness::run(config, f.split)});
    return out.str();
  };
  const auto a = csv(harness::ConfigType::III);
  const auto b = csv(harness::ConfigType::III);
  return {a == b && !a.empty(), fmt("two Type III runs, %zu CSV bytes each, %s", a.size(),
                                    a == b ? "identical" : "different")};
}

Outcome leakage(const Fixture& f) {
  auto config = f.config;
  config.type = harness::ConfigType::II;
  config.embedding.epochs = 1;
  const auto held = harness::held_out_keys(f.split, config);
  auto pool = harness::candidate_pool(f.split, config);
  const auto training = embed::make_corpus(f.split.part_a);
  auto model = std::make_shared<const embed::EmbeddingModel>(
      embed::Vocabulary::build(training, 1), config.embedding);
  recindex::build_index(model, pool, config.train_parts(), held);  // clean pool builds
  pool.push_back(f.split.part_c.front().sequences.front());
  try {
    recindex::build_index(model, pool, config.train_parts(), held);
  } catch (const LeakageError& e) {
    return {true, std::string("clean pool accepted; injected part-C sequence rejected: ") + e.what()};
  }
  return {false, "injected test sequence was indexed"};
}

}  // namespace

int main() {
  report(1, "ROUGE worked example", 1.0, rouge_worked_example);
  report(2, "LCS exhaustive oracle", 30.0, lcs_exhaustive);
  report(3, "gradient check", 10.0, gradient_check);

  const auto fixture = make_fixture();
  const auto model = train_on_a(fixture);
  report(4, "OOV composition", 0.0, [&] { return oov_composition(model); });
  report(5, "top-k exactness", 0.0, topk_exactness);
  harness::RunReport one, two;
  report(6, "cold-start lift", 300.0, [&] { return cold_start(fixture, one, two); });
  report(7, "semantic clustering", 0.0, [&] { return clustering(fixture, model); });
  report(8, "determinism", 0.0, [&] { return determinism(fixture); });
  report(9, "leakage guard", 0.0, [&] { return leakage(fixture); });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
