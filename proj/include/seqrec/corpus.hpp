#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace seqrec::corpus {

using ItemId = std::string;
using UserId = std::string;
using Timestamp = std::int64_t;

// One user/item/timestamp event.
struct Interaction {
  UserId user_id;
  ItemId item_id;
  Timestamp timestamp = 0;
  std::optional<std::string> session_id;

  bool operator==(const Interaction&) const = default;
};

// An ordered run of items from one user (a trip, a playlist, a session).
// `timestamps` is parallel to `items`.
struct Sequence {
  std::vector<ItemId> items;
  std::vector<Timestamp> timestamps;
  UserId user_id;
  Timestamp start_time = 0;
  std::size_t seq_index = 0;

  bool operator==(const Sequence&) const = default;
};

struct UserProfile {
  UserId user_id;
  std::vector<Sequence> sequences;  // ordered by start_time
};

enum class Part { A, B, C, D };

char part_letter(Part part);
Part parse_part(std::string_view text);

// Sequences of one user inside one split part.
struct UserSequences {
  UserId user_id;
  std::vector<Sequence> sequences;
};

// A = everything in the first time fraction. For each user active in the
// remainder: B = first sequence, D = last, C = those in between.
struct EvalSplit {
  std::vector<UserProfile> part_a;
  std::vector<UserSequences> part_b;
  std::vector<UserSequences> part_c;
  std::vector<UserSequences> part_d;
  // Users whose second half holds a single sequence, stored in both B and D.
  std::set<UserId> shared_bd_users;

  const std::vector<UserSequences>& part(Part p) const;
  std::size_t sequence_count(Part p) const;
};

enum class LogFormat { TsvEvents, TsvSessions };

LogFormat parse_log_format(std::string_view name);

struct ParseResult {
  std::vector<Interaction> interactions;
  std::size_t skipped_rows = 0;
};

// Item and user ids may not contain these; they are reserved by the token layer.
bool is_valid_id(std::string_view id);

// Reads `user_id \t item_id \t timestamp [\t session_id]` rows. Lines starting
// with '#' and blank lines are ignored; malformed rows are skipped and counted.
// TsvEvents ignores a session column, TsvSessions requires it.
ParseResult parse_log(const std::filesystem::path& path, LogFormat format);
ParseResult parse_log(std::istream& in, LogFormat format);

// Groups events into per-user sequences. Users come out sorted by id.
std::vector<UserProfile> build_sequences(const std::vector<Interaction>& events,
                                         std::int64_t gap_seconds);

EvalSplit make_split(const std::vector<UserProfile>& profiles, double boundary);

// Split files: one row per item, `user_id item_id timestamp seq_index part`.
void write_part(std::ostream& out, Part part, const std::vector<UserSequences>& groups);
void write_split(const std::filesystem::path& dir, const EvalSplit& split);
EvalSplit read_split(const std::filesystem::path& dir);

// Reads a sequence TSV (`user_id item_id timestamp seq_index [part]`) into
// per-user sequences ordered by seq_index.
std::vector<UserSequences> read_sequences(std::istream& in);
std::vector<UserSequences> read_sequences(const std::filesystem::path& path);

}  // namespace seqrec::corpus
