#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/embed.hpp"
#include "seqrec/subseq.hpp"

namespace seqrec::recindex {

// Identifies one sequence of one user across split parts.
struct SequenceKey {
  corpus::UserId user_id;
  std::size_t seq_index = 0;

  auto operator<=>(const SequenceKey&) const = default;
};

SequenceKey key_of(const corpus::Sequence& seq);

struct Candidate {
  subseq::SeqToken token;
  embed::Vector vector;
  corpus::UserId owner;
};

class CandidateIndex {
 public:
  CandidateIndex(std::shared_ptr<const embed::EmbeddingModel> model,
                 std::vector<Candidate> entries, std::vector<corpus::Part> built_from);

  const embed::EmbeddingModel& model() const { return *model_; }
  const std::vector<Candidate>& entries() const { return entries_; }
  const std::vector<corpus::Part>& built_from() const { return built_from_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::shared_ptr<const embed::EmbeddingModel> model_;
  std::vector<Candidate> entries_;
  std::vector<corpus::Part> built_from_;
};

// Composes every candidate; repeated token text keeps the first occurrence.
// Throws LeakageError when a candidate's key is in `held_out`.
CandidateIndex build_index(std::shared_ptr<const embed::EmbeddingModel> model,
                           const std::vector<corpus::Sequence>& candidates,
                           std::vector<corpus::Part> built_from = {},
                           const std::set<SequenceKey>& held_out = {});

struct Recommendation {
  subseq::SeqToken token;
  double score = 0.0;
};

struct RecommendationList {
  subseq::SeqToken query;
  std::vector<Recommendation> ranked;  // score desc, then token text asc
  bool empty_index = false;
};

// Ranking order used everywhere: higher score first, ties by token text.
bool ranks_before(const Recommendation& a, const Recommendation& b);

// Full scan over the index; the query's own token is never returned.
RecommendationList recommend(const CandidateIndex& index,
                             std::span<const corpus::ItemId> observed, std::size_t k);

struct BatchResult {
  // user -> (observed seq_index, list), in seq_index order
  std::map<corpus::UserId, std::vector<std::pair<std::size_t, RecommendationList>>> by_user;
  std::size_t omitted_users = 0;
};

BatchResult recommend_batch(const CandidateIndex& index,
                            const std::vector<corpus::UserSequences>& observed, std::size_t k);

}  // namespace seqrec::recindex
