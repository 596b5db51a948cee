#include "seqrec/rouge.hpp"

#include <charconv>
#include <set>

#include "seqrec/error.hpp"

namespace seqrec::rouge {

namespace {

using GramCounts = std::map<std::vector<std::string_view>, std::size_t>;

GramCounts count_grams(const Items& items, int n) {
  GramCounts counts;
  const auto size = static_cast<std::size_t>(n);
  if (items.size() < size) return counts;
  for (std::size_t i = 0; i + size <= items.size(); ++i) {
    std::vector<std::string_view> gram(items.begin() + i, items.begin() + i + size);
    ++counts[std::move(gram)];
  }
  return counts;
}

std::size_t total(const GramCounts& counts) {
  std::size_t sum = 0;
  for (const auto& [gram, c] : counts) sum += c;
  return sum;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string Metric::name() const {
  switch (kind) {
    case MetricKind::RougeN: return "rouge" + std::to_string(n);
    case MetricKind::RougeL: return "rougeL";
    case MetricKind::Reluctant: return "reluctant";
    case MetricKind::Strict: return "strict";
  }
  return "?";
}

Metric Metric::parse(std::string_view text) {
  if (text == "rougeL" || text == "rouge-l" || text == "rouge_l") return rouge_l();
  if (text == "reluctant") return reluctant();
  if (text == "strict") return strict();
  for (std::string_view prefix : {"rouge-", "rouge_", "rouge"}) {
    if (text.starts_with(prefix)) {
      const auto digits = text.substr(prefix.size());
      int n = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && n >= 1) return rouge_n(n);
      break;
    }
  }
  throw Error("unknown metric '" + std::string(text) + "'");
}

double harmonic_f(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

double lcs_f(double precision, double recall) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  const double beta2 = (precision / recall) * (precision / recall);
  return (1.0 + beta2) * precision * recall / (recall + beta2 * precision);
}

RougeScore rouge_n(const EvalInstance& inst, int n) {
  if (n < 1) throw Error("rouge_n: n must be at least 1");
  const auto system = count_grams(inst.system, n);
  std::size_t matched = 0;
  std::size_t reference_grams = 0;
  for (const auto& reference : inst.references) {
    const auto ref = count_grams(reference, n);
    reference_grams += total(ref);
    for (const auto& [gram, count] : ref) {
      const auto it = system.find(gram);
      if (it != system.end()) matched += std::min(count, it->second);
    }
  }
  RougeScore out;
  out.metric = Metric::rouge_n(n);
  out.recall = ratio(matched, reference_grams);
  out.precision = ratio(matched, total(system));
  if (out.precision > 1.0) {
    out.precision = 1.0;
    out.clamped = true;
  }
  out.f_measure = harmonic_f(out.precision, out.recall);
  return out;
}

RougeScore rouge_l(const EvalInstance& inst) {
  std::size_t lcs_sum = 0;
  std::size_t reference_length = 0;
  for (const auto& reference : inst.references) {
    lcs_sum += lcs_length(reference, inst.system);
    reference_length += reference.size();
  }
  RougeScore out;
  out.metric = Metric::rouge_l();
  out.recall = ratio(lcs_sum, reference_length);
  out.precision = ratio(lcs_sum, inst.system.size());
  // Several references can each match the same system items.
  if (out.precision > 1.0) {
    out.precision = 1.0;
    out.clamped = true;
  }
  out.f_measure = lcs_f(out.precision, out.recall);
  return out;
}

Baselines baseline_scores(const EvalInstance& inst) {
  const std::set<std::string_view> system(inst.system.begin(), inst.system.end());
  std::set<std::string_view> reference;
  bool exact = false;
  for (const auto& ref : inst.references) {
    reference.insert(ref.begin(), ref.end());
    exact = exact || ref == inst.system;
  }
  std::size_t shared = 0;
  for (const auto& item : system) shared += reference.count(item);

  Baselines out;
  out.reluctant.metric = Metric::reluctant();
  out.reluctant.precision = ratio(shared, system.size());
  out.reluctant.recall = ratio(shared, reference.size());
  out.reluctant.f_measure = harmonic_f(out.reluctant.precision, out.reluctant.recall);

  const double hit = exact ? 1.0 : 0.0;
  out.strict.metric = Metric::strict();
  out.strict.precision = out.strict.recall = out.strict.f_measure = hit;
  return out;
}

RougeScore score(const EvalInstance& inst, const Metric& metric) {
  switch (metric.kind) {
    case MetricKind::RougeN: return rouge_n(inst, metric.n);
    case MetricKind::RougeL: return rouge_l(inst);
    case MetricKind::Reluctant: return baseline_scores(inst).reluctant;
    case MetricKind::Strict: return baseline_scores(inst).strict;
  }
  throw Error("unknown metric kind");
}

ListScore score_list(const std::vector<Items>& references, const std::vector<Items>& recommended,
                     const std::vector<Metric>& metrics) {
  if (references.empty()) throw Error("score_list: no reference sequences");
  ListScore out;
  for (const auto& metric : metrics) out.by_metric[metric].metric = metric;
  out.empty = recommended.empty();
  for (const auto& system : recommended) {
    const EvalInstance inst{references, system};
    for (const auto& metric : metrics) {
      const auto s = score(inst, metric);
      auto& best = out.by_metric[metric];
      best.precision = std::max(best.precision, s.precision);
      best.recall = std::max(best.recall, s.recall);
      best.f_measure = std::max(best.f_measure, s.f_measure);
      if (s.clamped) {
        best.clamped = true;
        ++out.clamp_events;
      }
    }
  }
  return out;
}

ListScore score_list(const std::vector<Items>& references,
                     const recindex::RecommendationList& recommended,
                     const std::vector<Metric>& metrics) {
  std::vector<Items> systems;
  systems.reserve(recommended.ranked.size());
  for (const auto& rec : recommended.ranked) systems.push_back(rec.token.items);
  return score_list(references, systems, metrics);
}

}  // namespace seqrec::rouge
