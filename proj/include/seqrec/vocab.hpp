#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/random.hpp"
#include "seqrec/subseq.hpp"

namespace seqrec::embed {

// One sentence per user: that user's sequence tokens in seq_index order.
struct TrainingCorpus {
  std::vector<std::vector<subseq::SeqToken>> sentences;

  std::size_t token_count() const;
};

TrainingCorpus make_corpus(const std::vector<corpus::UserProfile>& profiles);

class Vocabulary {
 public:
  // Power applied to token counts for the negative-sampling distribution.
  static constexpr double kSamplingPower = 0.75;

  Vocabulary() = default;

  // Tokens are indexed by descending count, ties by token text.
  static Vocabulary build(const TrainingCorpus& corpus, std::uint64_t min_count);
  static Vocabulary from_entries(std::vector<subseq::SeqToken> tokens,
                                 std::vector<std::uint64_t> counts, std::uint64_t min_count);

  std::size_t size() const { return tokens_.size(); }
  std::uint64_t min_count() const { return min_count_; }
  std::uint64_t total_count() const { return total_count_; }

  std::optional<std::uint32_t> find(std::string_view text) const;
  const subseq::SeqToken& token(std::uint32_t index) const { return tokens_[index]; }
  std::uint64_t count(std::uint32_t index) const { return counts_[index]; }

  // Normalized count^0.75 probability of drawing `index` as a negative.
  double negative_probability(std::uint32_t index) const;
  std::uint32_t sample_negative(Rng& rng) const;

 private:
  void index_tokens();

  std::vector<subseq::SeqToken> tokens_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> cumulative_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t min_count_ = 1;
  std::uint64_t total_count_ = 0;
};

}  // namespace seqrec::embed
