#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/embed.hpp"

namespace seqrec::harness {

// The five train/test part assignments.
enum class ConfigType { I, II, III, IV, V };

std::string config_name(ConfigType type);
ConfigType parse_config_type(std::string_view text);

std::vector<corpus::Part> train_parts(ConfigType type);
std::vector<corpus::Part> test_parts(ConfigType type);

enum class Averaging { Macro, Micro };

struct EvalConfig {
  ConfigType type = ConfigType::I;
  embed::Hyperparameters embedding;
  std::size_t k = 10;
  // Neighbor count; recorded only, the full-scan recommender does not use it.
  std::size_t neighbors = 10;
  std::int64_t gap_seconds = 28800;
  double boundary = 0.5;
  // Share of the first test sequence used as a cold-start query.
  double cold_start_prefix = 0.5;
  Averaging averaging = Averaging::Macro;

  std::vector<corpus::Part> train_parts() const { return harness::train_parts(type); }
  std::vector<corpus::Part> test_parts() const { return harness::test_parts(type); }
};

// Applies one `key=value` setting; unknown keys and bad values throw.
void apply_setting(EvalConfig& config, std::string_view key, std::string_view value);

// Flat `key = value` text; '#' starts a comment.
void load_config(std::istream& in, EvalConfig& config);
void load_config(const std::filesystem::path& path, EvalConfig& config);

// Every setting as (key, value) in a fixed order; feeding these back through
// apply_setting reproduces the config.
std::vector<std::pair<std::string, std::string>> config_entries(const EvalConfig& config);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace seqrec::harness
