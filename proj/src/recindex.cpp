#include "seqrec/recindex.hpp"

#include <algorithm>
#include <unordered_set>

#include "seqrec/error.hpp"

namespace seqrec::recindex {

SequenceKey key_of(const corpus::Sequence& seq) { return {seq.user_id, seq.seq_index}; }

CandidateIndex::CandidateIndex(std::shared_ptr<const embed::EmbeddingModel> model,
                               std::vector<Candidate> entries,
                               std::vector<corpus::Part> built_from)
    : model_(std::move(model)), entries_(std::move(entries)), built_from_(std::move(built_from)) {
  if (!model_) throw Error("candidate index needs a model");
}

CandidateIndex build_index(std::shared_ptr<const embed::EmbeddingModel> model,
                           const std::vector<corpus::Sequence>& candidates,
                           std::vector<corpus::Part> built_from,
                           const std::set<SequenceKey>& held_out) {
  if (!model) throw Error("candidate index needs a model");
  std::vector<Candidate> entries;
  std::unordered_set<std::string> seen;
  for (const auto& seq : candidates) {
    if (held_out.contains(key_of(seq))) {
      throw LeakageError("held-out sequence " + seq.user_id + "#" +
                         std::to_string(seq.seq_index) + " offered to the candidate index");
    }
    auto token = subseq::serialize(seq);
    if (!seen.insert(token.text).second) continue;
    auto vector = model->compose(token);
    entries.push_back({std::move(token), std::move(vector), seq.user_id});
  }
  return CandidateIndex(std::move(model), std::move(entries), std::move(built_from));
}

bool ranks_before(const Recommendation& a, const Recommendation& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.token.text < b.token.text;
}

RecommendationList recommend(const CandidateIndex& index,
                             std::span<const corpus::ItemId> observed, std::size_t k) {
  if (k == 0) throw Error("recommend: k must be at least 1");
  RecommendationList out;
  out.query = subseq::serialize(observed);
  if (index.empty()) {
    out.empty_index = true;
    return out;
  }
  const auto query = index.model().compose(out.query);

  struct Scored {
    double score;
    const Candidate* entry;
  };
  std::vector<Scored> scored;
  scored.reserve(index.size());
  for (const auto& entry : index.entries()) {
    if (entry.token.text == out.query.text) continue;
    scored.push_back({embed::similarity(query, entry.vector), &entry});
  }
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const Scored& a, const Scored& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.entry->token.text < b.entry->token.text;
                    });
  out.ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.ranked.push_back({scored[i].entry->token, scored[i].score});
  return out;
}

BatchResult recommend_batch(const CandidateIndex& index,
                            const std::vector<corpus::UserSequences>& observed, std::size_t k) {
  BatchResult result;
  for (const auto& group : observed) {
    if (group.sequences.empty()) {
      ++result.omitted_users;
      continue;
    }
    std::vector<const corpus::Sequence*> ordered;
    for (const auto& seq : group.sequences) ordered.push_back(&seq);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->seq_index < b->seq_index; });
    auto& lists = result.by_user[group.user_id];
    for (const auto* seq : ordered) lists.emplace_back(seq->seq_index, recommend(index, seq->items, k));
  }
  return result;
}

}  // namespace seqrec::recindex
