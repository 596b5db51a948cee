#include "seqrec/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "seqrec/error.hpp"

namespace seqrec::embed {

std::size_t TrainingCorpus::token_count() const {
  std::size_t total = 0;
  for (const auto& sentence : sentences) total += sentence.size();
  return total;
}

TrainingCorpus make_corpus(const std::vector<corpus::UserProfile>& profiles) {
  TrainingCorpus out;
  out.sentences.reserve(profiles.size());
  for (const auto& profile : profiles) {
    std::vector<const corpus::Sequence*> ordered;
    for (const auto& seq : profile.sequences) ordered.push_back(&seq);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->seq_index < b->seq_index; });
    std::vector<subseq::SeqToken> sentence;
    for (const auto* seq : ordered) sentence.push_back(subseq::serialize(*seq));
    if (!sentence.empty()) out.sentences.push_back(std::move(sentence));
  }
  return out;
}

Vocabulary Vocabulary::build(const TrainingCorpus& corpus, std::uint64_t min_count) {
  if (corpus.sentences.empty()) throw Error("cannot build a vocabulary from an empty corpus");

  std::map<std::string, std::pair<const subseq::SeqToken*, std::uint64_t>> counts;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence) {
      auto& slot = counts[token.text];
      if (slot.first == nullptr) slot.first = &token;
      ++slot.second;
    }
  }
  std::vector<subseq::SeqToken> tokens;
  std::vector<std::uint64_t> freqs;
  for (const auto& [text, entry] : counts) {
    tokens.push_back(*entry.first);
    freqs.push_back(entry.second);
  }
  const auto distinct = tokens.size();
  auto vocab = from_entries(std::move(tokens), std::move(freqs), min_count);
  if (vocab.size() == 0) {
    throw Error("all " + std::to_string(distinct) + " distinct tokens fall below min_count=" +
                std::to_string(min_count));
  }
  return vocab;
}

Vocabulary Vocabulary::from_entries(std::vector<subseq::SeqToken> tokens,
                                    std::vector<std::uint64_t> counts, std::uint64_t min_count) {
  if (tokens.size() != counts.size()) throw Error("token and count lists differ in length");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (counts[i] >= min_count) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return tokens[a].text < tokens[b].text;
  });

  Vocabulary vocab;
  vocab.min_count_ = min_count;
  for (const auto i : order) {
    vocab.tokens_.push_back(std::move(tokens[i]));
    vocab.counts_.push_back(counts[i]);
  }
  vocab.index_tokens();
  return vocab;
}

void Vocabulary::index_tokens() {
  index_.clear();
  cumulative_.clear();
  total_count_ = 0;
  double running = 0.0;
  for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i].text, i);
    total_count_ += counts_[i];
    running += std::pow(static_cast<double>(counts_[i]), kSamplingPower);
    cumulative_.push_back(running);
  }
  for (auto& c : cumulative_) c /= running;
  if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view text) const {
  const auto it = index_.find(std::string(text));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::negative_probability(std::uint32_t index) const {
  return index == 0 ? cumulative_[0] : cumulative_[index] - cumulative_[index - 1];
}

std::uint32_t Vocabulary::sample_negative(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<std::uint32_t>(std::min(index, cumulative_.size() - 1));
}

}  // namespace seqrec::embed
