#include "seqrec/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "seqrec/error.hpp"

namespace seqrec::harness {

using corpus::Part;

std::string config_name(ConfigType type) {
  switch (type) {
    case ConfigType::I: return "I";
    case ConfigType::II: return "II";
    case ConfigType::III: return "III";
    case ConfigType::IV: return "IV";
    case ConfigType::V: return "V";
  }
  return "?";
}

ConfigType parse_config_type(std::string_view text) {
  if (text == "I" || text == "1") return ConfigType::I;
  if (text == "II" || text == "2") return ConfigType::II;
  if (text == "III" || text == "3") return ConfigType::III;
  if (text == "IV" || text == "4") return ConfigType::IV;
  if (text == "V" || text == "5") return ConfigType::V;
  throw Error("unknown configuration type '" + std::string(text) + "'");
}

std::vector<Part> train_parts(ConfigType type) {
  switch (type) {
    case ConfigType::I: return {Part::A};
    case ConfigType::II: return {Part::A, Part::B};
    case ConfigType::III: return {Part::A, Part::B, Part::C};
    case ConfigType::IV: return {Part::B};
    case ConfigType::V: return {Part::B, Part::C};
  }
  return {};
}

std::vector<Part> test_parts(ConfigType type) {
  switch (type) {
    case ConfigType::I: return {Part::B, Part::C, Part::D};
    case ConfigType::II: return {Part::C, Part::D};
    case ConfigType::III: return {Part::D};
    case ConfigType::IV: return {Part::C, Part::D};
    case ConfigType::V: return {Part::D};
  }
  return {};
}

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw Error("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw Error("bad boolean '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buffer, ptr);
}

void apply_setting(EvalConfig& config, std::string_view key, std::string_view value) {
  auto& hp = config.embedding;
  if (key == "config") {
    config.type = parse_config_type(value);
  } else if (key == "mode" || key == "sg") {
    if (key == "sg") {
      hp.mode = parse_bool(key, value) ? embed::TrainMode::SkipGram : embed::TrainMode::Cbow;
    } else {
      hp.mode = embed::parse_mode(value);
    }
  } else if (key == "min_n") {
    hp.grams.min_n = parse_number<int>(key, value);
  } else if (key == "max_n") {
    hp.grams.max_n = parse_number<int>(key, value);
  } else if (key == "boundaries") {
    hp.grams.with_boundaries = parse_bool(key, value);
  } else if (key == "dim" || key == "size") {
    hp.dim = parse_number<int>(key, value);
  } else if (key == "window") {
    hp.window = parse_number<int>(key, value);
  } else if (key == "negatives") {
    hp.negatives = parse_number<int>(key, value);
  } else if (key == "epochs") {
    hp.epochs = parse_number<int>(key, value);
  } else if (key == "lr") {
    hp.lr = parse_number<double>(key, value);
  } else if (key == "seed") {
    hp.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "buckets" || key == "bucket_count") {
    hp.bucket_count = parse_number<std::uint32_t>(key, value);
  } else if (key == "min_count") {
    hp.min_count = parse_number<std::uint64_t>(key, value);
  } else if (key == "subsample") {
    hp.subsample = parse_bool(key, value);
  } else if (key == "subsample_threshold") {
    hp.subsample_threshold = parse_number<double>(key, value);
  } else if (key == "threads") {
    hp.threads = parse_number<int>(key, value);
  } else if (key == "k") {
    config.k = parse_number<std::size_t>(key, value);
  } else if (key == "neighbors" || key == "N") {
    config.neighbors = parse_number<std::size_t>(key, value);
  } else if (key == "gap_seconds") {
    config.gap_seconds = parse_number<std::int64_t>(key, value);
  } else if (key == "boundary") {
    config.boundary = parse_number<double>(key, value);
  } else if (key == "cold_start_prefix") {
    config.cold_start_prefix = parse_number<double>(key, value);
  } else if (key == "averaging") {
    if (value == "macro") {
      config.averaging = Averaging::Macro;
    } else if (value == "micro") {
      config.averaging = Averaging::Micro;
    } else {
      throw Error("averaging must be macro or micro");
    }
  } else {
    throw Error("unknown setting '" + std::string(key) + "'");
  }
}

void load_config(std::istream& in, EvalConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(config, trim(std::string_view(text).substr(0, eq)),
                  trim(std::string_view(text).substr(eq + 1)));
  }
}

void load_config(const std::filesystem::path& path, EvalConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path.string());
  load_config(in, config);
}

std::vector<std::pair<std::string, std::string>> config_entries(const EvalConfig& config) {
  const auto& hp = config.embedding;
  return {
      {"config", config_name(config.type)},
      {"mode", embed::mode_name(hp.mode)},
      {"min_n", std::to_string(hp.grams.min_n)},
      {"max_n", std::to_string(hp.grams.max_n)},
      {"boundaries", hp.grams.with_boundaries ? "true" : "false"},
      {"dim", std::to_string(hp.dim)},
      {"window", std::to_string(hp.window)},
      {"negatives", std::to_string(hp.negatives)},
      {"epochs", std::to_string(hp.epochs)},
      {"lr", format_double(hp.lr)},
      {"seed", std::to_string(hp.seed)},
      {"buckets", std::to_string(hp.bucket_count)},
      {"min_count", std::to_string(hp.min_count)},
      {"subsample", hp.subsample ? "true" : "false"},
      {"subsample_threshold", format_double(hp.subsample_threshold)},
      {"threads", std::to_string(hp.threads)},
      {"k", std::to_string(config.k)},
      {"neighbors", std::to_string(config.neighbors)},
      {"gap_seconds", std::to_string(config.gap_seconds)},
      {"boundary", format_double(config.boundary)},
      {"cold_start_prefix", format_double(config.cold_start_prefix)},
      {"averaging", config.averaging == Averaging::Macro ? "macro" : "micro"},
  };
}

}  // namespace seqrec::harness
