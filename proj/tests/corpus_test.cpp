#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqrec/corpus.hpp"
#include "seqrec/error.hpp"
#include "seqrec/random.hpp"

using namespace seqrec;
using namespace seqrec::corpus;

namespace {

Sequence seq_at(const std::string& user, std::size_t index, Timestamp t,
                std::vector<ItemId> items = {"x"}) {
  Sequence s;
  s.user_id = user;
  s.seq_index = index;
  s.start_time = t;
  s.items = std::move(items);
  s.timestamps.assign(s.items.size(), t);
  return s;
}

std::size_t slot_count(const EvalSplit& split) {
  std::size_t n = 0;
  for (const auto& p : split.part_a) n += p.sequences.size();
  for (auto part : {Part::B, Part::C, Part::D}) n += split.sequence_count(part);
  return n;
}

}  // namespace

TEST(ParseLog, ReadsWellFormedRows) {
  std::istringstream in("u1\ti1\t100\nu1\ti2\t200\n");
  const auto r = parse_log(in, LogFormat::TsvEvents);
  ASSERT_EQ(r.interactions.size(), 2u);
  EXPECT_EQ(r.skipped_rows, 0u);
  EXPECT_EQ(r.interactions[1].item_id, "i2");
  EXPECT_EQ(r.interactions[1].timestamp, 200);
}

TEST(ParseLog, SkipsEmptyItem) {
  std::istringstream in("u1\t\t100\nu1\ti2\t200\n");
  const auto r = parse_log(in, LogFormat::TsvEvents);
  EXPECT_EQ(r.interactions.size(), 1u);
  EXPECT_EQ(r.skipped_rows, 1u);
}

TEST(ParseLog, SkipsCommentsBlanksAndJunk) {
  std::istringstream in("# header\n\nu1\ti1\tabc\nu1\ti1\t-5\nu1\ti1\nu1\ti\x1F" "2\t3\nu2\ti3\t7\r\n");
  const auto r = parse_log(in, LogFormat::TsvEvents);
  ASSERT_EQ(r.interactions.size(), 1u);
  EXPECT_EQ(r.interactions[0].user_id, "u2");
  EXPECT_EQ(r.skipped_rows, 4u);
}

TEST(ParseLog, SessionFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "seqrec_sessions_fixture.tsv";
  {
    std::ofstream out(path);
    out << "u1\ttrackA\t10\ts8\nu1\ttrackB\t20\ts9\nu2\ttrackC\t30\ts9\n";
  }
  const auto r = parse_log(path, LogFormat::TsvSessions);
  std::filesystem::remove(path);
  ASSERT_EQ(r.interactions.size(), 3u);
  EXPECT_EQ(r.interactions[1].session_id, std::optional<std::string>("s9"));
  EXPECT_EQ(r.skipped_rows, 0u);
}

TEST(ParseLog, SessionFormatRequiresSessionColumn) {
  std::istringstream in("u1\ti1\t10\nu1\ti2\t20\ts1\n");
  const auto r = parse_log(in, LogFormat::TsvSessions);
  EXPECT_EQ(r.interactions.size(), 1u);
  EXPECT_EQ(r.skipped_rows, 1u);
}

TEST(ParseLog, MissingFileThrows) {
  EXPECT_THROW(parse_log(std::filesystem::path("/nonexistent/log.tsv"), LogFormat::TsvEvents), Error);
}

TEST(BuildSequences, GapRule) {
  const std::vector<Interaction> events = {
      {"u1", "a", 0, {}}, {"u1", "b", 100, {}}, {"u1", "c", 50000, {}}};
  const auto profiles = build_sequences(events, 28800);
  ASSERT_EQ(profiles.size(), 1u);
  ASSERT_EQ(profiles[0].sequences.size(), 2u);
  EXPECT_EQ(profiles[0].sequences[0].items, (std::vector<ItemId>{"a", "b"}));
  EXPECT_EQ(profiles[0].sequences[1].items, (std::vector<ItemId>{"c"}));
  EXPECT_EQ(profiles[0].sequences[1].seq_index, 1u);
  EXPECT_EQ(profiles[0].sequences[1].start_time, 50000);
}

TEST(BuildSequences, SharedSessionOverridesGap) {
  const std::vector<Interaction> events = {
      {"u1", "a", 0, "s"}, {"u1", "b", 100000, "s"}, {"u1", "c", 900000, "s"}};
  const auto profiles = build_sequences(events, 60);
  ASSERT_EQ(profiles[0].sequences.size(), 1u);
  EXPECT_EQ(profiles[0].sequences[0].items.size(), 3u);
}

TEST(BuildSequences, SessionChangeSplits) {
  const std::vector<Interaction> events = {{"u1", "a", 0, "s1"}, {"u1", "b", 1, "s2"}};
  EXPECT_EQ(build_sequences(events, 28800)[0].sequences.size(), 2u);
}

TEST(BuildSequences, SingleEventAndEmpty) {
  EXPECT_TRUE(build_sequences({}, 10).empty());
  const auto p = build_sequences({{"u", "i", 5, {}}}, 10);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].sequences[0].items.size(), 1u);
  EXPECT_THROW(build_sequences({}, 0), Error);
}

TEST(BuildSequences, TimestampOrderWithStableTies) {
  const std::vector<Interaction> events = {
      {"u", "late", 30, {}}, {"u", "tie1", 10, {}}, {"u", "first", 5, {}}, {"u", "tie2", 10, {}},
      {"u", "dup", 40, {}},  {"u", "dup", 41, {}}};
  const auto p = build_sequences(events, 1000);
  EXPECT_EQ(p[0].sequences[0].items,
            (std::vector<ItemId>{"first", "tie1", "tie2", "late", "dup", "dup"}));
}

TEST(MakeSplit, FourSecondHalfSequences) {
  UserProfile p{"u", {seq_at("u", 0, 0), seq_at("u", 1, 60), seq_at("u", 2, 70), seq_at("u", 3, 80),
                      seq_at("u", 4, 100)}};
  const auto split = make_split({p}, 0.5);
  ASSERT_EQ(split.part_a.size(), 1u);
  EXPECT_EQ(split.part_a[0].sequences.size(), 1u);
  ASSERT_EQ(split.part_b.size(), 1u);
  EXPECT_EQ(split.part_b[0].sequences[0].seq_index, 1u);
  ASSERT_EQ(split.part_c.size(), 1u);
  EXPECT_EQ(split.part_c[0].sequences.size(), 2u);
  EXPECT_EQ(split.part_c[0].sequences[0].seq_index, 2u);
  EXPECT_EQ(split.part_c[0].sequences[1].seq_index, 3u);
  EXPECT_EQ(split.part_d[0].sequences[0].seq_index, 4u);
  EXPECT_TRUE(split.shared_bd_users.empty());
}

TEST(MakeSplit, SingleSecondHalfSequenceIsSharedAndFlagged) {
  UserProfile p{"u", {seq_at("u", 0, 0), seq_at("u", 1, 100)}};
  const auto split = make_split({p}, 0.5);
  ASSERT_EQ(split.part_b.size(), 1u);
  ASSERT_EQ(split.part_d.size(), 1u);
  EXPECT_EQ(split.part_b[0].sequences[0], split.part_d[0].sequences[0]);
  EXPECT_TRUE(split.part_c.empty());
  EXPECT_TRUE(split.shared_bd_users.contains("u"));
}

TEST(MakeSplit, RelativeTimes) {
  UserProfile p{"u", {seq_at("u", 0, 0), seq_at("u", 1, 10), seq_at("u", 2, 40), seq_at("u", 3, 60),
                      seq_at("u", 4, 90), seq_at("u", 5, 100)}};
  // relative times 0, 0.1, 0.4, 0.6, 0.9, 1.0
  const auto split = make_split({p}, 0.5);
  EXPECT_EQ(split.part_a[0].sequences.size(), 3u);
  EXPECT_EQ(split.part_b[0].sequences[0].seq_index, 3u);
}

TEST(MakeSplit, EarlyOnlyUserHasNoLatePart) {
  UserProfile early{"e", {seq_at("e", 0, 0)}};
  UserProfile late{"l", {seq_at("l", 0, 100)}};
  const auto split = make_split({early, late}, 0.5);
  EXPECT_EQ(split.part_b.size(), 1u);
  EXPECT_EQ(split.part_b[0].user_id, "l");
}

TEST(MakeSplit, RejectsBadInput) {
  UserProfile p{"u", {seq_at("u", 0, 0)}};
  EXPECT_THROW(make_split({p}, 0.0), Error);
  EXPECT_THROW(make_split({p}, 1.0), Error);
  EXPECT_THROW(make_split({}, 0.5), Error);
}

TEST(MakeSplit, PartitionProperty) {
  Rng rng(11);
  std::vector<Interaction> events;
  for (int u = 0; u < 40; ++u) {
    const auto n = 1 + rng.below(30);
    for (std::uint64_t i = 0; i < n; ++i) {
      events.push_back({"u" + std::to_string(u), "i" + std::to_string(rng.below(20)),
                        static_cast<Timestamp>(rng.below(1'000'000)), {}});
    }
  }
  const auto profiles = build_sequences(events, 20000);
  std::size_t input = 0;
  for (const auto& p : profiles) input += p.sequences.size();
  for (double boundary : {0.2, 0.5, 0.8}) {
    const auto split = make_split(profiles, boundary);
    EXPECT_EQ(slot_count(split), input + split.shared_bd_users.size());
    EXPECT_EQ(split.part_b.size(), split.part_d.size());
    for (const auto& g : split.part_b) EXPECT_EQ(g.sequences.size(), 1u);
    for (const auto& g : split.part_d) EXPECT_EQ(g.sequences.size(), 1u);
  }
}

TEST(MakeSplit, SplitFilesRoundTripAndAreStable) {
  Rng rng(5);
  std::vector<Interaction> events;
  for (int k = 0; k < 400; ++k) {
    events.push_back({"u" + std::to_string(rng.below(15)), "i" + std::to_string(rng.below(30)),
                      static_cast<Timestamp>(rng.below(2'000'000)), {}});
  }
  const auto split = make_split(build_sequences(events, 30000), 0.5);
  const auto base = std::filesystem::temp_directory_path() / "seqrec_split_test";
  std::filesystem::remove_all(base);
  write_split(base / "one", split);
  write_split(base / "two", split);
  for (const char* name : {"A.tsv", "B.tsv", "C.tsv", "D.tsv"}) {
    std::ifstream a(base / "one" / name), b(base / "two" / name);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << name;
  }
  const auto back = read_split(base / "one");
  std::filesystem::remove_all(base);
  for (auto part : {Part::B, Part::C, Part::D}) {
    EXPECT_EQ(back.sequence_count(part), split.sequence_count(part));
  }
  EXPECT_EQ(back.shared_bd_users, split.shared_bd_users);
  ASSERT_EQ(back.part_a.size(), split.part_a.size());
  for (std::size_t i = 0; i < back.part_a.size(); ++i) {
    EXPECT_EQ(back.part_a[i].sequences, split.part_a[i].sequences);
  }
}
