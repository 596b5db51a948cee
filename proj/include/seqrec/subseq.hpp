#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqrec/corpus.hpp"

// Token layer: a whole sequence becomes one token, and its contiguous item
// n-grams play the role of character n-grams.
namespace seqrec::subseq {

inline constexpr char kSeparator = '\x1F';
// Boundary pseudo-items. Ids containing these bytes are rejected at ingestion.
inline constexpr std::string_view kBos = "\x02";
inline constexpr std::string_view kEos = "\x03";

struct SeqToken {
  std::string text;
  std::vector<corpus::ItemId> items;

  bool operator==(const SeqToken&) const = default;
};

struct SubseqGram {
  std::vector<std::string> items;  // may start with kBos / end with kEos

  std::size_t n() const { return items.size(); }
  std::string key() const;  // items joined by kSeparator
  bool operator==(const SubseqGram&) const = default;
};

struct GramRange {
  int min_n = 1;
  int max_n = 5;
  bool with_boundaries = true;
};

std::string join_items(std::span<const corpus::ItemId> items);

SeqToken serialize(std::span<const corpus::ItemId> items);
SeqToken serialize(const corpus::Sequence& seq);
std::vector<corpus::ItemId> deserialize(std::string_view text);

// Position-major, then increasing n. Duplicates kept.
std::vector<SubseqGram> extract_ngrams(std::span<const corpus::ItemId> items, int min_n,
                                       int max_n, bool with_boundaries);
inline std::vector<SubseqGram> extract_ngrams(std::span<const corpus::ItemId> items,
                                              const GramRange& range) {
  return extract_ngrams(items, range.min_n, range.max_n, range.with_boundaries);
}

std::uint32_t fnv1a32(std::string_view bytes);

std::uint32_t gram_bucket(const SubseqGram& gram, std::uint32_t bucket_count);

// Bucket ids of every gram, in extraction order.
std::vector<std::uint32_t> gram_buckets(std::span<const corpus::ItemId> items,
                                        const GramRange& range, std::uint32_t bucket_count);

// Debug rendering: items space-joined, boundaries shown as <s> and </s>.
std::string render_gram(const SubseqGram& gram);

}  // namespace seqrec::subseq
