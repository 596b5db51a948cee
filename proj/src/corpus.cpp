#include "seqrec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "seqrec/error.hpp"

namespace seqrec::corpus {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

}  // namespace

char part_letter(Part part) {
  switch (part) {
    case Part::A: return 'A';
    case Part::B: return 'B';
    case Part::C: return 'C';
    case Part::D: return 'D';
  }
  return '?';
}

Part parse_part(std::string_view text) {
  if (text == "A") return Part::A;
  if (text == "B") return Part::B;
  if (text == "C") return Part::C;
  if (text == "D") return Part::D;
  throw Error("unknown split part '" + std::string(text) + "'");
}

const std::vector<UserSequences>& EvalSplit::part(Part p) const {
  switch (p) {
    case Part::B: return part_b;
    case Part::C: return part_c;
    case Part::D: return part_d;
    case Part::A: break;
  }
  throw Error("part A is stored as user profiles");
}

std::size_t EvalSplit::sequence_count(Part p) const {
  std::size_t total = 0;
  if (p == Part::A) {
    for (const auto& profile : part_a) total += profile.sequences.size();
    return total;
  }
  for (const auto& group : part(p)) total += group.sequences.size();
  return total;
}

LogFormat parse_log_format(std::string_view name) {
  if (name == "tsv_events" || name == "events") return LogFormat::TsvEvents;
  if (name == "tsv_sessions" || name == "sessions") return LogFormat::TsvSessions;
  throw Error("unknown log format '" + std::string(name) + "'");
}

bool is_valid_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    return c == '\x1F' || c == '\x02' || c == '\x03' || c == '\t' || c == '\n' || c == '\r';
  });
}

ParseResult parse_log(std::istream& in, LogFormat format) {
  ParseResult result;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = strip_cr(raw);
    if (is_skippable(line)) continue;
    const auto fields = split_tabs(line);
    const bool needs_session = format == LogFormat::TsvSessions;
    if (fields.size() < 3 || fields.size() > 4 || (needs_session && fields.size() != 4)) {
      ++result.skipped_rows;
      continue;
    }
    const auto timestamp = parse_int<Timestamp>(fields[2]);
    if (!is_valid_id(fields[0]) || !is_valid_id(fields[1]) || !timestamp || *timestamp < 0) {
      ++result.skipped_rows;
      continue;
    }
    Interaction event{std::string(fields[0]), std::string(fields[1]), *timestamp, std::nullopt};
    if (needs_session) {
      if (fields[3].empty()) {
        ++result.skipped_rows;
        continue;
      }
      event.session_id = std::string(fields[3]);
    }
    result.interactions.push_back(std::move(event));
  }
  return result;
}

ParseResult parse_log(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read interaction log " + path.string());
  return parse_log(in, format);
}

std::vector<UserProfile> build_sequences(const std::vector<Interaction>& events,
                                         std::int64_t gap_seconds) {
  if (gap_seconds <= 0) throw Error("gap_seconds must be positive");

  std::map<UserId, std::vector<const Interaction*>> by_user;
  for (const auto& event : events) by_user[event.user_id].push_back(&event);

  std::vector<UserProfile> profiles;
  profiles.reserve(by_user.size());
  for (auto& [user, history] : by_user) {
    // Ties keep input order.
    std::stable_sort(history.begin(), history.end(),
                     [](const Interaction* a, const Interaction* b) {
                       return a->timestamp < b->timestamp;
                     });
    UserProfile profile{user, {}};
    const Interaction* previous = nullptr;
    for (const Interaction* event : history) {
      bool fresh = previous == nullptr;
      if (!fresh) {
        if (event->session_id && previous->session_id) {
          fresh = *event->session_id != *previous->session_id;
        } else {
          fresh = event->timestamp - previous->timestamp > gap_seconds;
        }
      }
      if (fresh) {
        Sequence seq;
        seq.user_id = user;
        seq.start_time = event->timestamp;
        seq.seq_index = profile.sequences.size();
        profile.sequences.push_back(std::move(seq));
      }
      auto& current = profile.sequences.back();
      current.items.push_back(event->item_id);
      current.timestamps.push_back(event->timestamp);
      previous = event;
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

EvalSplit make_split(const std::vector<UserProfile>& profiles, double boundary) {
  if (!(boundary > 0.0 && boundary < 1.0)) throw Error("split boundary must lie in (0, 1)");
  if (profiles.empty()) throw Error("cannot split an empty profile list");

  Timestamp first = 0;
  Timestamp last = 0;
  bool seen = false;
  for (const auto& profile : profiles) {
    for (const auto& seq : profile.sequences) {
      first = seen ? std::min(first, seq.start_time) : seq.start_time;
      last = seen ? std::max(last, seq.start_time) : seq.start_time;
      seen = true;
    }
  }
  const auto span = static_cast<long double>(last - first);
  auto in_first_part = [&](Timestamp t) {
    if (span == 0) return true;
    return static_cast<long double>(t - first) / span < boundary;
  };

  std::vector<const UserProfile*> ordered;
  for (const auto& profile : profiles) ordered.push_back(&profile);
  std::sort(ordered.begin(), ordered.end(),
            [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });

  EvalSplit split;
  for (const UserProfile* profile : ordered) {
    UserProfile early{profile->user_id, {}};
    std::vector<Sequence> late;
    for (const auto& seq : profile->sequences) {
      (in_first_part(seq.start_time) ? early.sequences : late).push_back(seq);
    }
    if (!early.sequences.empty()) split.part_a.push_back(std::move(early));
    if (late.empty()) continue;

    split.part_b.push_back({profile->user_id, {late.front()}});
    split.part_d.push_back({profile->user_id, {late.back()}});
    if (late.size() == 1) {
      split.shared_bd_users.insert(profile->user_id);
    } else if (late.size() > 2) {
      split.part_c.push_back(
          {profile->user_id, std::vector<Sequence>(late.begin() + 1, late.end() - 1)});
    }
  }
  return split;
}

void write_part(std::ostream& out, Part part, const std::vector<UserSequences>& groups) {
  out << "# user_id\titem_id\ttimestamp\tseq_index\tpart\n";
  for (const auto& group : groups) {
    for (const auto& seq : group.sequences) {
      for (std::size_t i = 0; i < seq.items.size(); ++i) {
        out << group.user_id << '\t' << seq.items[i] << '\t' << seq.timestamps[i] << '\t'
            << seq.seq_index << '\t' << part_letter(part) << '\n';
      }
    }
  }
}

void write_split(const std::filesystem::path& dir, const EvalSplit& split) {
  std::filesystem::create_directories(dir);
  auto emit = [&](Part part, const std::vector<UserSequences>& groups) {
    const auto path = dir / (std::string(1, part_letter(part)) + ".tsv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write split file " + path.string());
    write_part(out, part, groups);
  };
  std::vector<UserSequences> part_a;
  for (const auto& profile : split.part_a) part_a.push_back({profile.user_id, profile.sequences});
  emit(Part::A, part_a);
  emit(Part::B, split.part_b);
  emit(Part::C, split.part_c);
  emit(Part::D, split.part_d);
}

std::vector<UserSequences> read_sequences(std::istream& in) {
  std::map<UserId, std::map<std::size_t, Sequence>> grouped;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (is_skippable(line)) continue;
    const auto fields = split_tabs(line);
    const auto timestamp = fields.size() >= 4 ? parse_int<Timestamp>(fields[2]) : std::nullopt;
    const auto index = fields.size() >= 4 ? parse_int<std::size_t>(fields[3]) : std::nullopt;
    if (fields.size() > 5 || !timestamp || !index || !is_valid_id(fields[0]) ||
        !is_valid_id(fields[1])) {
      throw Error("malformed sequence row at line " + std::to_string(line_no));
    }
    auto& seq = grouped[std::string(fields[0])][*index];
    if (seq.items.empty()) {
      seq.user_id = std::string(fields[0]);
      seq.seq_index = *index;
      seq.start_time = *timestamp;
    }
    seq.items.emplace_back(fields[1]);
    seq.timestamps.push_back(*timestamp);
  }
  std::vector<UserSequences> out;
  for (auto& [user, by_index] : grouped) {
    UserSequences group{user, {}};
    for (auto& [index, seq] : by_index) group.sequences.push_back(std::move(seq));
    out.push_back(std::move(group));
  }
  return out;
}

std::vector<UserSequences> read_sequences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read sequence file " + path.string());
  return read_sequences(in);
}

EvalSplit read_split(const std::filesystem::path& dir) {
  auto load = [&](char letter) {
    return read_sequences(dir / (std::string(1, letter) + ".tsv"));
  };
  EvalSplit split;
  for (auto& group : load('A')) split.part_a.push_back({group.user_id, std::move(group.sequences)});
  split.part_b = load('B');
  split.part_c = load('C');
  split.part_d = load('D');

  std::map<UserId, std::size_t> first_late;
  for (const auto& group : split.part_b) first_late[group.user_id] = group.sequences.front().seq_index;
  for (const auto& group : split.part_d) {
    auto it = first_late.find(group.user_id);
    if (it != first_late.end() && it->second == group.sequences.front().seq_index) {
      split.shared_bd_users.insert(group.user_id);
    }
  }
  return split;
}

}  // namespace seqrec::corpus
