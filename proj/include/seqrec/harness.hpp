#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "seqrec/config.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/recindex.hpp"
#include "seqrec/rouge.hpp"

namespace seqrec::harness {

struct MetricSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct RunReport {
  ConfigType config_type = ConfigType::I;
  MetricSummary rouge1;
  MetricSummary rouge_l;
  std::size_t users_evaluated = 0;
  std::size_t cold_start_users = 0;
  std::size_t empty_recommendations = 0;
  std::size_t clamp_events = 0;
  // Cold-start users whose first test sequence is too short to yield a query.
  std::size_t unservable_users = 0;
  std::size_t candidate_count = 0;
  EvalConfig config;
  double wall_seconds = 0.0;  // not part of the CSV
  bool failed = false;
  std::string error;
};

// One query and the references it is scored against.
struct UserQuery {
  corpus::UserId user_id;
  std::vector<corpus::ItemId> query;  // empty when no query could be formed
  std::size_t query_seq_index = 0;
  bool cold_start = false;
  std::vector<rouge::Items> references;
};

// Candidate sequences drawn from the config's training parts. A sequence
// stored in both B and D is kept out of the training side whenever D is tested.
std::vector<corpus::Sequence> candidate_pool(const corpus::EvalSplit& split, const EvalConfig& config);

// Keys of every sequence in the config's test parts.
std::set<recindex::SequenceKey> held_out_keys(const corpus::EvalSplit& split, const EvalConfig& config);

// Per-user queries for every user holding test sequences, ordered by user id.
std::vector<UserQuery> build_queries(const corpus::EvalSplit& split, const EvalConfig& config);

// Trains on part A, indexes the training parts, queries and scores each user.
RunReport run(const EvalConfig& config, const corpus::EvalSplit& split);

// Sweep axes.
enum class SweepAxis { MaxN, Dim, Mode };
SweepAxis parse_axis(std::string_view text);
std::string axis_name(SweepAxis axis);

struct SweepEntry {
  std::string value;
  RunReport report;
};

// One run per value. A value that fails validation yields a failed report.
std::vector<SweepEntry> sweep(const EvalConfig& base, const corpus::EvalSplit& split,
                              SweepAxis axis, const std::vector<std::string>& values);

struct ConfigDelta {
  ConfigType from = ConfigType::I;
  ConfigType to = ConfigType::I;
  double rouge1_precision = 0.0;
  double rouge1_recall = 0.0;
  double rouge_l_precision = 0.0;
  double rouge_l_recall = 0.0;
  // (to - from) / from on ROUGE-1 recall; 0 when from is 0.
  double rouge1_recall_relative = 0.0;
  // I -> II, the cold-start comparison.
  bool highlight = false;

  bool operator==(const ConfigDelta&) const = default;
};

// Deltas for every ordered pair (i < j) of reports, `to` minus `from`.
std::vector<ConfigDelta> compare_configs(const std::vector<RunReport>& reports);

// CSV output. Fixed column order, shortest round-trip number formatting.
void write_report_csv(std::ostream& out, const std::vector<RunReport>& reports);
std::vector<RunReport> read_report_csv(std::istream& in);
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepEntry>& entries);
void write_delta_csv(std::ostream& out, const std::vector<ConfigDelta>& deltas);
std::vector<ConfigDelta> read_delta_csv(std::istream& in);

}  // namespace seqrec::harness
