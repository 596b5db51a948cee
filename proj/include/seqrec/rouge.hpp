#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/recindex.hpp"

// ROUGE-N / ROUGE-L over item sequences, plus order-blind and exact-match
// baselines.
namespace seqrec::rouge {

using Items = std::vector<corpus::ItemId>;

enum class MetricKind { RougeN, RougeL, Reluctant, Strict };

struct Metric {
  MetricKind kind = MetricKind::RougeN;
  int n = 1;  // only meaningful for RougeN

  static Metric rouge_n(int n) { return {MetricKind::RougeN, n}; }
  static Metric rouge_l() { return {MetricKind::RougeL, 0}; }
  static Metric reluctant() { return {MetricKind::Reluctant, 0}; }
  static Metric strict() { return {MetricKind::Strict, 0}; }

  // "rouge1", "rouge2", ..., "rougeL", "reluctant", "strict"
  std::string name() const;
  static Metric parse(std::string_view text);

  auto operator<=>(const Metric&) const = default;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  Metric metric;
  // Multi-reference precision exceeded 1 before clamping.
  bool clamped = false;
};

// 2PR / (P + R), or 0 when P + R == 0.
double harmonic_f(double precision, double recall);

// LCS-based F-measure with beta = P / R:
//   F = (1 + beta^2) P R / (R + beta^2 P)
double lcs_f(double precision, double recall);

struct EvalInstance {
  std::vector<Items> references;
  Items system;
};

RougeScore rouge_n(const EvalInstance& inst, int n);

// Longest common subsequence length; O(|a||b|) time, O(min(|a|,|b|)) memory.
template <typename T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Short inputs keep the DP row on the stack.
  std::array<std::size_t, 65> inline_row;
  std::vector<std::size_t> heap_row;
  std::size_t* row = inline_row.data();
  if (b.size() >= inline_row.size()) {
    heap_row.resize(b.size() + 1);
    row = heap_row.data();
  }
  std::fill(row, row + b.size() + 1, std::size_t{0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diagonal = 0;
    std::size_t left = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t above = row[j + 1];
      left = a[i] == b[j] ? diagonal + 1 : std::max(above, left);
      row[j + 1] = left;
      diagonal = above;
    }
  }
  return row[b.size()];
}

inline std::size_t lcs_length(const Items& a, const Items& b) {
  return lcs_length<corpus::ItemId>(a, b);
}

RougeScore rouge_l(const EvalInstance& inst);

struct Baselines {
  RougeScore reluctant;
  RougeScore strict;
};

Baselines baseline_scores(const EvalInstance& inst);

RougeScore score(const EvalInstance& inst, const Metric& metric);

struct ListScore {
  std::map<Metric, RougeScore> by_metric;
  bool empty = false;
  std::size_t clamp_events = 0;
};

// Scores every recommended sequence against all references and keeps, per
// metric, the elementwise maximum of precision, recall and F.
ListScore score_list(const std::vector<Items>& references, const std::vector<Items>& recommended,
                     const std::vector<Metric>& metrics);
ListScore score_list(const std::vector<Items>& references,
                     const recindex::RecommendationList& recommended,
                     const std::vector<Metric>& metrics);

}  // namespace seqrec::rouge
