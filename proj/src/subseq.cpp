#include "seqrec/subseq.hpp"

#include <algorithm>

#include "seqrec/error.hpp"

namespace seqrec::subseq {

std::string join_items(std::span<const corpus::ItemId> items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out.push_back(kSeparator);
    out += items[i];
  }
  return out;
}

std::string SubseqGram::key() const { return join_items(items); }

SeqToken serialize(std::span<const corpus::ItemId> items) {
  if (items.empty()) throw Error("cannot serialize an empty sequence");
  return {join_items(items), {items.begin(), items.end()}};
}

SeqToken serialize(const corpus::Sequence& seq) { return serialize(seq.items); }

std::vector<corpus::ItemId> deserialize(std::string_view text) {
  std::vector<corpus::ItemId> items;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(kSeparator, start);
    if (pos == std::string_view::npos) {
      items.emplace_back(text.substr(start));
      return items;
    }
    items.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<SubseqGram> extract_ngrams(std::span<const corpus::ItemId> items, int min_n,
                                       int max_n, bool with_boundaries) {
  if (min_n < 1 || max_n < min_n) throw Error("n-gram range requires 1 <= min_n <= max_n");

  std::vector<std::string_view> padded;
  padded.reserve(items.size() + 2);
  if (with_boundaries) padded.push_back(kBos);
  for (const auto& item : items) padded.push_back(item);
  if (with_boundaries) padded.push_back(kEos);

  const auto length = static_cast<int>(padded.size());
  std::vector<SubseqGram> grams;
  for (int start = 0; start < length; ++start) {
    for (int n = min_n; n <= max_n && start + n <= length; ++n) {
      SubseqGram gram;
      gram.items.assign(padded.begin() + start, padded.begin() + start + n);
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

std::uint32_t fnv1a32(std::string_view bytes) {
  std::uint32_t hash = 2166136261u;
  for (const char c : bytes) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 16777619u;
  }
  return hash;
}

std::uint32_t gram_bucket(const SubseqGram& gram, std::uint32_t bucket_count) {
  if (bucket_count == 0) throw Error("bucket_count must be at least 1");
  return fnv1a32(gram.key()) % bucket_count;
}

std::vector<std::uint32_t> gram_buckets(std::span<const corpus::ItemId> items,
                                        const GramRange& range, std::uint32_t bucket_count) {
  const auto grams = extract_ngrams(items, range);
  std::vector<std::uint32_t> buckets;
  buckets.reserve(grams.size());
  for (const auto& gram : grams) buckets.push_back(gram_bucket(gram, bucket_count));
  return buckets;
}

std::string render_gram(const SubseqGram& gram) {
  std::string out;
  for (std::size_t i = 0; i < gram.items.size(); ++i) {
    if (i > 0) out.push_back(' ');
    const auto& item = gram.items[i];
    if (item == kBos) {
      out += "<s>";
    } else if (item == kEos) {
      out += "</s>";
    } else {
      out += item;
    }
  }
  return out;
}

}  // namespace seqrec::subseq
