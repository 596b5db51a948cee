// seqrec: sequence embeddings, list-of-sequences recommendation and ROUGE
// evaluation from the command line.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqrec/config.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/embed.hpp"
#include "seqrec/error.hpp"
#include "seqrec/harness.hpp"
#include "seqrec/model_io.hpp"
#include "seqrec/recindex.hpp"
#include "seqrec/rouge.hpp"
#include "seqrec/subseq.hpp"
#include "seqrec/synthetic.hpp"

namespace {

using namespace seqrec;
using json = nlohmann::json;

// Writes to a file, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Registers a `--<key>` flag for every config key plus --config FILE.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app, bool seed_required = false) {
    app->add_option("--config-file", file, "flat key=value configuration file");
    for (const auto& [key, value] : harness::config_entries(harness::EvalConfig{})) {
      auto* opt = app->add_option("--" + key, overrides[key], "override '" + key + "'");
      if (key == "seed" && seed_required) opt->required();
    }
  }

  harness::EvalConfig resolve(const CLI::App* app) const {
    harness::EvalConfig config;
    if (!file.empty()) harness::load_config(file, config);
    for (const auto& [key, value] : overrides) {
      if (app->count("--" + key) > 0) harness::apply_setting(config, key, value);
    }
    return config;
  }
};

struct LogFlags {
  std::string input;
  std::string format = "tsv_events";

  void attach(CLI::App* app, bool required) {
    auto* opt = app->add_option("--input", input, "interaction log (TSV)");
    if (required) opt->required();
    app->add_option("--format", format, "tsv_events | tsv_sessions");
  }

  std::vector<corpus::UserProfile> profiles(std::int64_t gap_seconds) const {
    const auto parsed = corpus::parse_log(input, corpus::parse_log_format(format));
    std::cerr << "read " << parsed.interactions.size() << " interactions, skipped "
              << parsed.skipped_rows << " malformed rows\n";
    return corpus::build_sequences(parsed.interactions, gap_seconds);
  }
};

corpus::EvalSplit load_split(const std::string& split_dir, const LogFlags& log,
                             const harness::EvalConfig& config) {
  if (!split_dir.empty()) return corpus::read_split(split_dir);
  if (log.input.empty()) throw Error("pass --split DIR or --input LOG");
  return corpus::make_split(log.profiles(config.gap_seconds), config.boundary);
}

json items_json(const std::vector<corpus::ItemId>& items) { return json(items); }

void print_summary(const harness::RunReport& report) {
  std::cerr << "config " << harness::config_name(report.config_type) << ": ROUGE-1 P/R "
            << report.rouge1.precision << " / " << report.rouge1.recall << ", ROUGE-L P/R "
            << report.rouge_l.precision << " / " << report.rouge_l.recall << " over "
            << report.users_evaluated << " users (" << report.cold_start_users
            << " cold start) in " << report.wall_seconds << " s\n";
  if (report.clamp_events > 0) {
    std::cerr << "warning: " << report.clamp_events
              << " ROUGE precision values exceeded 1 and were clamped\n";
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence embeddings, list-of-sequences recommendation and ROUGE evaluation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse a log and write per-user sequences");
  LogFlags ingest_log;
  std::int64_t ingest_gap = 28800;
  std::string ingest_out;
  ingest_log.attach(ingest, true);
  ingest->add_option("--gap_seconds", ingest_gap, "time gap that starts a new sequence");
  ingest->add_option("--output", ingest_out, "sequence TSV (default stdout)");

  // split
  auto* split_cmd = app.add_subcommand("split", "build the A/B/C/D evaluation split");
  LogFlags split_log;
  ConfigFlags split_flags;
  std::string split_out;
  split_log.attach(split_cmd, true);
  split_flags.attach(split_cmd);
  split_cmd->add_option("--out", split_out, "output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train embeddings on part A (or a whole log)");
  LogFlags train_log;
  ConfigFlags train_flags;
  std::string train_split;
  std::string model_out;
  std::string export_path;
  train_log.attach(train_cmd, false);
  train_flags.attach(train_cmd);
  train_cmd->add_option("--split", train_split, "split directory; trains on A.tsv");
  train_cmd->add_option("--model", model_out, "model file to write")->required();
  train_cmd->add_option("--export", export_path, "also write token vectors as JSON lines");

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "top-k sequence lists per user as JSON lines");
  LogFlags rec_log;
  ConfigFlags rec_flags;
  std::string rec_model;
  std::string rec_split;
  std::string rec_out;
  rec_log.attach(rec_cmd, false);
  rec_flags.attach(rec_cmd);
  rec_cmd->add_option("--model", rec_model, "model file")->required();
  rec_cmd->add_option("--split", rec_split, "split directory");
  rec_cmd->add_option("--output", rec_out, "JSON-lines output (default stdout)");

  // score
  auto* score_cmd = app.add_subcommand("score", "ROUGE scores of recommendations vs references");
  std::string score_recs;
  std::string score_refs;
  std::string score_per_user;
  std::string score_summary;
  std::string score_metrics = "rouge1,rougeL";
  score_cmd->add_option("--recs", score_recs, "recommend JSON-lines")->required();
  score_cmd->add_option("--references", score_refs, "reference sequence TSV")->required();
  score_cmd->add_option("--per-user", score_per_user, "per-user CSV output");
  score_cmd->add_option("--summary", score_summary, "summary CSV (default stdout)");
  score_cmd->add_option("--metrics", score_metrics, "comma list, e.g. rouge1,rouge2,rougeL,reluctant,strict");

  // run
  auto* run_cmd = app.add_subcommand("run", "train, recommend and score one configuration");
  LogFlags run_log;
  ConfigFlags run_flags;
  std::string run_split;
  std::string run_out;
  run_log.attach(run_cmd, false);
  run_flags.attach(run_cmd, true);
  run_cmd->add_option("--split", run_split, "split directory");
  run_cmd->add_option("--output", run_out, "report CSV (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "one run per value of max_n, dim or mode");
  LogFlags sweep_log;
  ConfigFlags sweep_flags;
  std::string sweep_split;
  std::string sweep_axis;
  std::string sweep_values;
  std::string sweep_out;
  sweep_log.attach(sweep_cmd, false);
  sweep_flags.attach(sweep_cmd, true);
  sweep_cmd->add_option("--split", sweep_split, "split directory");
  sweep_cmd->add_option("--axis", sweep_axis, "max_n | dim | mode")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep_cmd->add_option("--output", sweep_out, "sweep CSV (default stdout)");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "deltas between run reports");
  std::vector<std::string> compare_inputs;
  std::string compare_out;
  compare_cmd->add_option("reports", compare_inputs, "report CSV files")->required();
  compare_cmd->add_option("--output", compare_out, "delta CSV (default stdout)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic topic-structured log");
  synthetic::Options synth_options;
  std::string synth_out;
  synth_cmd->add_option("--users", synth_options.users);
  synth_cmd->add_option("--topics", synth_options.topics);
  synth_cmd->add_option("--cold-start-fraction", synth_options.cold_start_fraction);
  synth_cmd->add_option("--seed", synth_options.seed);
  synth_cmd->add_option("--output", synth_out, "log TSV (default stdout)");

  // grams
  auto* grams_cmd = app.add_subcommand("grams", "dump the item n-grams of one sequence");
  std::vector<std::string> gram_items;
  subseq::GramRange gram_range;
  bool no_boundaries = false;
  grams_cmd->add_option("items", gram_items, "item ids")->required();
  grams_cmd->add_option("--min_n", gram_range.min_n);
  grams_cmd->add_option("--max_n", gram_range.max_n);
  grams_cmd->add_flag("--no-boundaries", no_boundaries);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto profiles = ingest_log.profiles(ingest_gap);
      Output out(ingest_out);
      std::vector<corpus::UserSequences> groups;
      std::size_t sequences = 0;
      for (const auto& p : profiles) {
        groups.push_back({p.user_id, p.sequences});
        sequences += p.sequences.size();
      }
      corpus::write_part(out.stream(), corpus::Part::A, groups);
      std::cerr << profiles.size() << " users, " << sequences << " sequences\n";
    } else if (*split_cmd) {
      const auto config = split_flags.resolve(split_cmd);
      const auto split = corpus::make_split(split_log.profiles(config.gap_seconds), config.boundary);
      corpus::write_split(split_out, split);
      std::cerr << "A " << split.sequence_count(corpus::Part::A) << ", B "
                << split.sequence_count(corpus::Part::B) << ", C "
                << split.sequence_count(corpus::Part::C) << ", D "
                << split.sequence_count(corpus::Part::D) << " sequences; "
                << split.shared_bd_users.size() << " users share one sequence between B and D\n";
    } else if (*train_cmd) {
      const auto config = train_flags.resolve(train_cmd);
      std::vector<corpus::UserProfile> profiles;
      if (!train_split.empty()) {
        profiles = corpus::read_split(train_split).part_a;
      } else if (!train_log.input.empty()) {
        profiles = train_log.profiles(config.gap_seconds);
      } else {
        throw Error("pass --split DIR or --input LOG");
      }
      const auto training = embed::make_corpus(profiles);
      const auto vocab = embed::Vocabulary::build(training, config.embedding.min_count);
      embed::TrainStats stats;
      const auto model = embed::train(training, vocab, config.embedding, &stats);
      embed::save_model(model_out, model);
      std::cerr << "vocabulary " << vocab.size() << " tokens, " << stats.updates << " updates";
      if (!stats.epoch_mean_loss.empty()) {
        std::cerr << ", final epoch loss " << stats.epoch_mean_loss.back();
      }
      std::cerr << '\n';
      if (!export_path.empty()) {
        Output out(export_path);
        embed::export_jsonl(out.stream(), model);
      }
    } else if (*rec_cmd) {
      const auto config = rec_flags.resolve(rec_cmd);
      const auto split = load_split(rec_split, rec_log, config);
      auto model = std::make_shared<const embed::EmbeddingModel>(embed::load_model(rec_model));
      const auto index = recindex::build_index(model, harness::candidate_pool(split, config),
                                               config.train_parts(),
                                               harness::held_out_keys(split, config));
      Output out(rec_out);
      for (const auto& query : harness::build_queries(split, config)) {
        json row;
        row["user"] = query.user_id;
        row["seq_index"] = query.query_seq_index;
        row["recommendations"] = json::array();
        if (!query.query.empty()) {
          for (const auto& rec : recindex::recommend(index, query.query, config.k).ranked) {
            row["recommendations"].push_back({{"items", items_json(rec.token.items)},
                                              {"score", rec.score}});
          }
        }
        out.stream() << row.dump() << '\n';
      }
    } else if (*score_cmd) {
      std::vector<rouge::Metric> metrics;
      for (const auto& name : split_list(score_metrics)) metrics.push_back(rouge::Metric::parse(name));
      if (metrics.empty()) throw Error("no metrics requested");

      std::map<corpus::UserId, std::vector<rouge::Items>> references;
      for (auto& group : corpus::read_sequences(score_refs)) {
        for (auto& seq : group.sequences) references[group.user_id].push_back(std::move(seq.items));
      }
      std::map<corpus::UserId, std::vector<std::pair<std::size_t, std::vector<rouge::Items>>>> recs;
      std::ifstream in(score_recs);
      if (!in) throw Error("cannot read " + score_recs);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = json::parse(line);
        std::vector<rouge::Items> systems;
        for (const auto& rec : row.at("recommendations")) {
          systems.push_back(rec.at("items").get<rouge::Items>());
        }
        recs[row.at("user").get<std::string>()].emplace_back(row.at("seq_index").get<std::size_t>(),
                                                              std::move(systems));
      }

      std::unique_ptr<Output> per_user;
      if (!score_per_user.empty()) {
        per_user = std::make_unique<Output>(score_per_user);
        per_user->stream() << "user,seq_index";
        for (const auto& m : metrics) {
          per_user->stream() << ',' << m.name() << "_precision," << m.name() << "_recall,"
                             << m.name() << "_f";
        }
        per_user->stream() << '\n';
      }
      std::map<rouge::Metric, harness::MetricSummary> totals;
      std::size_t users = 0;
      std::size_t missing = 0;
      std::size_t clamps = 0;
      for (const auto& [user, refs] : references) {
        ++users;
        const auto it = recs.find(user);
        std::vector<std::pair<std::size_t, std::vector<rouge::Items>>> lists;
        if (it == recs.end()) {
          ++missing;
          lists.emplace_back(0, std::vector<rouge::Items>{});
        } else {
          lists = it->second;
        }
        std::map<rouge::Metric, harness::MetricSummary> user_mean;
        for (const auto& [seq_index, systems] : lists) {
          const auto scored = rouge::score_list(refs, systems, metrics);
          clamps += scored.clamp_events;
          if (per_user) per_user->stream() << user << ',' << seq_index;
          for (const auto& m : metrics) {
            const auto& s = scored.by_metric.at(m);
            if (per_user) {
              per_user->stream() << ',' << harness::format_double(s.precision) << ','
                                 << harness::format_double(s.recall) << ','
                                 << harness::format_double(s.f_measure);
            }
            const double w = 1.0 / static_cast<double>(lists.size());
            user_mean[m].precision += w * s.precision;
            user_mean[m].recall += w * s.recall;
            user_mean[m].f_measure += w * s.f_measure;
          }
          if (per_user) per_user->stream() << '\n';
        }
        for (const auto& [m, s] : user_mean) {
          totals[m].precision += s.precision;
          totals[m].recall += s.recall;
          totals[m].f_measure += s.f_measure;
        }
      }
      Output summary(score_summary);
      summary.stream() << "users";
      for (const auto& m : metrics) summary.stream() << ',' << m.name() << "_precision," << m.name() << "_recall";
      summary.stream() << '\n' << users;
      for (const auto& m : metrics) {
        const double scale = users ? 1.0 / static_cast<double>(users) : 0.0;
        summary.stream() << ',' << harness::format_double(totals[m].precision * scale) << ','
                         << harness::format_double(totals[m].recall * scale);
      }
      summary.stream() << '\n';
      if (missing > 0) std::cerr << missing << " users had no recommendations (scored 0)\n";
      if (clamps > 0) std::cerr << "warning: " << clamps << " ROUGE precision values clamped to 1\n";
    } else if (*run_cmd) {
      const auto config = run_flags.resolve(run_cmd);
      const auto split = load_split(run_split, run_log, config);
      const auto report = harness::run(config, split);
      print_summary(report);
      Output out(run_out);
      harness::write_report_csv(out.stream(), {report});
    } else if (*sweep_cmd) {
      const auto config = sweep_flags.resolve(sweep_cmd);
      const auto split = load_split(sweep_split, sweep_log, config);
      const auto axis = harness::parse_axis(sweep_axis);
      const auto entries = harness::sweep(config, split, axis, split_list(sweep_values));
      for (const auto& e : entries) {
        if (e.report.failed) {
          std::cerr << harness::axis_name(axis) << '=' << e.value << " failed: " << e.report.error << '\n';
        } else {
          print_summary(e.report);
        }
      }
      Output out(sweep_out);
      harness::write_sweep_csv(out.stream(), axis, entries);
    } else if (*compare_cmd) {
      std::vector<harness::RunReport> reports;
      for (const auto& path : compare_inputs) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read " + path);
        for (auto& r : harness::read_report_csv(in)) reports.push_back(std::move(r));
      }
      Output out(compare_out);
      harness::write_delta_csv(out.stream(), harness::compare_configs(reports));
    } else if (*synth_cmd) {
      const auto data = synthetic::generate(synth_options);
      Output out(synth_out);
      out.stream() << "# user_id\titem_id\ttimestamp\n";
      for (const auto& e : data.events) {
        out.stream() << e.user_id << '\t' << e.item_id << '\t' << e.timestamp << '\n';
      }
    } else if (*grams_cmd) {
      gram_range.with_boundaries = !no_boundaries;
      for (const auto& gram : subseq::extract_ngrams(gram_items, gram_range)) {
        std::cout << subseq::render_gram(gram) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
