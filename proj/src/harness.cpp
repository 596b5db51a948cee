#include "seqrec/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "seqrec/embed.hpp"
#include "seqrec/error.hpp"
#include "seqrec/vocab.hpp"

namespace seqrec::harness {

using corpus::Part;
using corpus::Sequence;

namespace {

template <typename Fn>
void for_each_in_part(const corpus::EvalSplit& split, Part part, Fn&& fn) {
  if (part == Part::A) {
    for (const auto& profile : split.part_a) {
      for (const auto& seq : profile.sequences) fn(seq);
    }
    return;
  }
  for (const auto& group : split.part(part)) {
    for (const auto& seq : group.sequences) fn(seq);
  }
}

void validate(const EvalConfig& config) {
  config.embedding.validate();
  if (config.k < 1) throw Error("k must be at least 1");
  if (!(config.boundary > 0.0 && config.boundary < 1.0)) throw Error("boundary must lie in (0, 1)");
  if (!(config.cold_start_prefix > 0.0 && config.cold_start_prefix < 1.0)) {
    throw Error("cold_start_prefix must lie in (0, 1)");
  }
  if (config.gap_seconds <= 0) throw Error("gap_seconds must be positive");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("bad number '" + text + "' in CSV");
  }
  return value;
}

std::size_t to_size(const std::string& text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("bad count '" + text + "' in CSV");
  }
  return value;
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

const std::vector<std::string> kReportColumns = {
    "config",          "rouge1_precision", "rouge1_recall",   "rouge1_f",
    "rougeL_precision", "rougeL_recall",    "rougeL_f",        "users_evaluated",
    "cold_start_users", "unservable_users", "empty_recommendations", "clamp_events",
    "candidates",      "status",           "error"};

}  // namespace

std::vector<Sequence> candidate_pool(const corpus::EvalSplit& split, const EvalConfig& config) {
  const auto held = held_out_keys(split, config);
  std::vector<Sequence> pool;
  for (const auto part : config.train_parts()) {
    for_each_in_part(split, part, [&](const Sequence& seq) {
      if (split.shared_bd_users.contains(seq.user_id) && held.contains(recindex::key_of(seq))) {
        return;
      }
      pool.push_back(seq);
    });
  }
  return pool;
}

std::set<recindex::SequenceKey> held_out_keys(const corpus::EvalSplit& split,
                                              const EvalConfig& config) {
  std::set<recindex::SequenceKey> keys;
  for (const auto part : config.test_parts()) {
    for_each_in_part(split, part, [&](const Sequence& seq) { keys.insert(recindex::key_of(seq)); });
  }
  return keys;
}

std::vector<UserQuery> build_queries(const corpus::EvalSplit& split, const EvalConfig& config) {
  std::map<corpus::UserId, std::map<std::size_t, const Sequence*>> tests;
  for (const auto part : config.test_parts()) {
    for_each_in_part(split, part, [&](const Sequence& seq) {
      tests[seq.user_id].emplace(seq.seq_index, &seq);
    });
  }
  const auto pool = candidate_pool(split, config);
  std::map<corpus::UserId, const Sequence*> latest;
  for (const auto& seq : pool) {
    auto& slot = latest[seq.user_id];
    if (slot == nullptr || seq.start_time > slot->start_time ||
        (seq.start_time == slot->start_time && seq.seq_index > slot->seq_index)) {
      slot = &seq;
    }
  }

  std::vector<UserQuery> out;
  for (const auto& [user, by_index] : tests) {
    UserQuery q;
    q.user_id = user;
    for (const auto& [index, seq] : by_index) q.references.push_back(seq->items);
    const auto it = latest.find(user);
    if (it != latest.end()) {
      q.query = it->second->items;
      q.query_seq_index = it->second->seq_index;
    } else {
      // Cold start: query with a prefix of the first test sequence and score
      // only what follows it.
      q.cold_start = true;
      const auto& first = *by_index.begin()->second;
      q.query_seq_index = first.seq_index;
      const auto prefix = static_cast<std::size_t>(
          static_cast<double>(first.items.size()) * config.cold_start_prefix);
      if (prefix > 0) {
        q.query.assign(first.items.begin(), first.items.begin() + static_cast<std::ptrdiff_t>(prefix));
        q.references.front().erase(q.references.front().begin(),
                                   q.references.front().begin() + static_cast<std::ptrdiff_t>(prefix));
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

RunReport run(const EvalConfig& config, const corpus::EvalSplit& split) {
  const auto started = std::chrono::steady_clock::now();
  validate(config);
  if (split.part_a.empty()) throw Error("part A is empty; nothing to train embeddings on");
  const auto held = held_out_keys(split, config);
  if (held.empty()) throw Error("configuration " + config_name(config.type) + " has no test sequences");

  RunReport report;
  report.config_type = config.type;
  report.config = config;

  const auto training = embed::make_corpus(split.part_a);
  const auto vocab = embed::Vocabulary::build(training, config.embedding.min_count);
  auto model = std::make_shared<const embed::EmbeddingModel>(
      embed::train(training, vocab, config.embedding));

  const auto pool = candidate_pool(split, config);
  const auto index = recindex::build_index(model, pool, config.train_parts(), held);
  report.candidate_count = index.size();

  const std::vector<rouge::Metric> metrics = {rouge::Metric::rouge_n(1), rouge::Metric::rouge_l()};
  MetricSummary r1;
  MetricSummary rl;
  std::size_t denominator = 0;
  auto accumulate = [&](const rouge::ListScore& score) {
    const auto& a = score.by_metric.at(metrics[0]);
    const auto& b = score.by_metric.at(metrics[1]);
    r1.precision += a.precision;
    r1.recall += a.recall;
    r1.f_measure += a.f_measure;
    rl.precision += b.precision;
    rl.recall += b.recall;
    rl.f_measure += b.f_measure;
    report.clamp_events += score.clamp_events;
    ++denominator;
  };

  for (const auto& query : build_queries(split, config)) {
    ++report.users_evaluated;
    if (query.cold_start) ++report.cold_start_users;
    recindex::RecommendationList list;
    if (query.query.empty()) {
      ++report.unservable_users;
    } else {
      list = recindex::recommend(index, query.query, config.k);
    }
    if (list.ranked.empty()) ++report.empty_recommendations;

    if (config.averaging == Averaging::Macro) {
      accumulate(rouge::score_list(query.references, list, metrics));
    } else {
      for (const auto& reference : query.references) {
        if (reference.empty()) continue;
        accumulate(rouge::score_list({reference}, list, metrics));
      }
    }
  }

  if (denominator > 0) {
    const double scale = 1.0 / static_cast<double>(denominator);
    for (auto* summary : {&r1, &rl}) {
      summary->precision *= scale;
      summary->recall *= scale;
      summary->f_measure *= scale;
    }
  }
  report.rouge1 = r1;
  report.rouge_l = rl;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "max_n") return SweepAxis::MaxN;
  if (text == "dim" || text == "size") return SweepAxis::Dim;
  if (text == "mode" || text == "sg") return SweepAxis::Mode;
  throw Error("unknown sweep axis '" + std::string(text) + "'");
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::MaxN: return "max_n";
    case SweepAxis::Dim: return "dim";
    case SweepAxis::Mode: return "mode";
  }
  return "?";
}

std::vector<SweepEntry> sweep(const EvalConfig& base, const corpus::EvalSplit& split,
                              SweepAxis axis, const std::vector<std::string>& values) {
  if (values.empty()) throw Error("sweep needs at least one value");
  std::vector<SweepEntry> out;
  for (const auto& value : values) {
    SweepEntry entry{value, {}};
    entry.report.config_type = base.type;
    entry.report.config = base;
    try {
      EvalConfig config = base;
      apply_setting(config, axis_name(axis), value);
      entry.report.config = config;
      entry.report = run(config, split);
    } catch (const LeakageError&) {
      throw;
    } catch (const Error& e) {
      entry.report.failed = true;
      entry.report.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<ConfigDelta> compare_configs(const std::vector<RunReport>& reports) {
  if (reports.size() < 2) throw Error("comparison needs at least two reports");
  std::vector<ConfigDelta> deltas;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = i + 1; j < reports.size(); ++j) {
      const auto& a = reports[i];
      const auto& b = reports[j];
      ConfigDelta d;
      d.from = a.config_type;
      d.to = b.config_type;
      d.rouge1_precision = b.rouge1.precision - a.rouge1.precision;
      d.rouge1_recall = b.rouge1.recall - a.rouge1.recall;
      d.rouge_l_precision = b.rouge_l.precision - a.rouge_l.precision;
      d.rouge_l_recall = b.rouge_l.recall - a.rouge_l.recall;
      d.rouge1_recall_relative = a.rouge1.recall > 0.0 ? d.rouge1_recall / a.rouge1.recall : 0.0;
      d.highlight = a.config_type == ConfigType::I && b.config_type == ConfigType::II;
      deltas.push_back(d);
    }
  }
  return deltas;
}

void write_report_csv(std::ostream& out, const std::vector<RunReport>& reports) {
  const auto echo_keys = config_entries(EvalConfig{});
  for (std::size_t c = 0; c < kReportColumns.size(); ++c) out << (c ? "," : "") << kReportColumns[c];
  for (const auto& [key, value] : echo_keys) {
    if (key != "config") out << ',' << key;
  }
  out << '\n';
  for (const auto& r : reports) {
    out << config_name(r.config_type) << ',' << format_double(r.rouge1.precision) << ','
        << format_double(r.rouge1.recall) << ',' << format_double(r.rouge1.f_measure) << ','
        << format_double(r.rouge_l.precision) << ',' << format_double(r.rouge_l.recall) << ','
        << format_double(r.rouge_l.f_measure) << ',' << r.users_evaluated << ','
        << r.cold_start_users << ',' << r.unservable_users << ',' << r.empty_recommendations
        << ',' << r.clamp_events << ',' << r.candidate_count << ','
        << (r.failed ? "failed" : "ok") << ',' << csv_safe(r.error);
    for (const auto& [key, value] : config_entries(r.config)) {
      if (key != "config") out << ',' << value;
    }
    out << '\n';
  }
}

std::vector<RunReport> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty report CSV");
  const auto header = split_csv(line);
  if (header.size() < kReportColumns.size() ||
      !std::equal(kReportColumns.begin(), kReportColumns.end(), header.begin())) {
    throw Error("unrecognized report CSV header");
  }
  std::vector<RunReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error("report CSV row has the wrong column count");
    RunReport r;
    r.config_type = parse_config_type(cells[0]);
    r.rouge1 = {to_double(cells[1]), to_double(cells[2]), to_double(cells[3])};
    r.rouge_l = {to_double(cells[4]), to_double(cells[5]), to_double(cells[6])};
    r.users_evaluated = to_size(cells[7]);
    r.cold_start_users = to_size(cells[8]);
    r.unservable_users = to_size(cells[9]);
    r.empty_recommendations = to_size(cells[10]);
    r.clamp_events = to_size(cells[11]);
    r.candidate_count = to_size(cells[12]);
    r.failed = cells[13] == "failed";
    r.error = cells[14];
    r.config.type = r.config_type;
    for (std::size_t c = kReportColumns.size(); c < header.size(); ++c) {
      apply_setting(r.config, header[c], cells[c]);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepEntry>& entries) {
  out << "axis,value,status,rouge1_precision,rouge1_recall,rougeL_precision,rougeL_recall,"
         "users_evaluated,error\n";
  for (const auto& e : entries) {
    const auto& r = e.report;
    out << axis_name(axis) << ',' << e.value << ',' << (r.failed ? "failed" : "ok") << ','
        << format_double(r.rouge1.precision) << ',' << format_double(r.rouge1.recall) << ','
        << format_double(r.rouge_l.precision) << ',' << format_double(r.rouge_l.recall) << ','
        << r.users_evaluated << ',' << csv_safe(r.error) << '\n';
  }
}

void write_delta_csv(std::ostream& out, const std::vector<ConfigDelta>& deltas) {
  out << "from,to,delta_rouge1_precision,delta_rouge1_recall,delta_rougeL_precision,"
         "delta_rougeL_recall,rouge1_recall_relative,highlight\n";
  for (const auto& d : deltas) {
    out << config_name(d.from) << ',' << config_name(d.to) << ','
        << format_double(d.rouge1_precision) << ',' << format_double(d.rouge1_recall) << ','
        << format_double(d.rouge_l_precision) << ',' << format_double(d.rouge_l_recall) << ','
        << format_double(d.rouge1_recall_relative) << ',' << (d.highlight ? "cold_start" : "")
        << '\n';
  }
}

std::vector<ConfigDelta> read_delta_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty delta CSV");
  std::vector<ConfigDelta> deltas;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8) throw Error("delta CSV row has the wrong column count");
    ConfigDelta d;
    d.from = parse_config_type(cells[0]);
    d.to = parse_config_type(cells[1]);
    d.rouge1_precision = to_double(cells[2]);
    d.rouge1_recall = to_double(cells[3]);
    d.rouge_l_precision = to_double(cells[4]);
    d.rouge_l_recall = to_double(cells[5]);
    d.rouge1_recall_relative = to_double(cells[6]);
    d.highlight = cells[7] == "cold_start";
    deltas.push_back(d);
  }
  return deltas;
}

}  // namespace seqrec::harness
