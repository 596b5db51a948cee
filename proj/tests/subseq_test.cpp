#include <gtest/gtest.h>

#include <unordered_set>

#include "seqrec/error.hpp"
#include "seqrec/random.hpp"
#include "seqrec/subseq.hpp"

using namespace seqrec;
using namespace seqrec::subseq;
using Items = std::vector<corpus::ItemId>;

namespace {

std::vector<Items> as_lists(const std::vector<SubseqGram>& grams) {
  std::vector<Items> out;
  for (const auto& g : grams) out.push_back(g.items);
  return out;
}

Items random_items(Rng& rng, std::size_t max_len, std::size_t alphabet) {
  Items items(1 + rng.below(max_len));
  for (auto& item : items) item = "L" + std::to_string(rng.below(alphabet));
  return items;
}

const std::string B(kBos);
const std::string E(kEos);

}  // namespace

TEST(Serialize, JoinsWithUnitSeparator) {
  EXPECT_EQ(serialize(Items{"Loc12", "Loc23"}).text, "Loc12\x1FLoc23");
  EXPECT_EQ(serialize(Items{"Loc6"}).text, "Loc6");
  EXPECT_THROW(serialize(Items{}), Error);
}

TEST(Serialize, RoundTripsRandomSequences) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto items = random_items(rng, 12, 50);
    const auto token = serialize(items);
    EXPECT_EQ(deserialize(token.text), items);
    EXPECT_EQ(token.items, items);
  }
}

TEST(Serialize, DistinctListsGiveDistinctText) {
  EXPECT_NE(serialize(Items{"ab", "c"}).text, serialize(Items{"a", "bc"}).text);
  EXPECT_NE(serialize(Items{"a", "b"}).text, serialize(Items{"b", "a"}).text);
}

TEST(ExtractNgrams, BigramSweep) {
  const Items items{"L1", "L2", "L3"};
  EXPECT_EQ(as_lists(extract_ngrams(items, 2, 2, false)),
            (std::vector<Items>{{"L1", "L2"}, {"L2", "L3"}}));
}

TEST(ExtractNgrams, BoundariesPadBothEnds) {
  const Items items{"L1", "L2"};
  const auto grams = extract_ngrams(items, 1, 3, true);
  const std::vector<Items> expected = {{B}, {B, "L1"}, {B, "L1", "L2"}, {"L1"}, {"L1", "L2"},
                                       {"L1", "L2", E}, {"L2"}, {"L2", E}, {E}};
  EXPECT_EQ(as_lists(grams), expected);
}

TEST(ExtractNgrams, CountMatchesClosedForm) {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto items = random_items(rng, 15, 6);
    const int min_n = 1 + static_cast<int>(rng.below(4));
    const int max_n = min_n + static_cast<int>(rng.below(6));
    const bool bounds = rng.below(2) == 1;
    const auto m = static_cast<int>(items.size()) + (bounds ? 2 : 0);
    std::size_t expected = 0;
    for (int n = min_n; n <= std::min(max_n, m); ++n) expected += static_cast<std::size_t>(m - n + 1);
    EXPECT_EQ(extract_ngrams(items, min_n, max_n, bounds).size(), expected);
  }
}

TEST(ExtractNgrams, GramsAreContiguousSlicesOfPaddedSource) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto items = random_items(rng, 10, 4);
    Items padded{B};
    padded.insert(padded.end(), items.begin(), items.end());
    padded.push_back(E);
    for (const auto& g : extract_ngrams(items, 1, 5, true)) {
      EXPECT_NE(std::search(padded.begin(), padded.end(), g.items.begin(), g.items.end()),
                padded.end());
    }
  }
}

TEST(ExtractNgrams, SupersequenceKeepsInteriorGrams) {
  const Items inner{"a", "b", "c"};
  const Items outer{"x", "a", "b", "c", "y"};
  const auto big = as_lists(extract_ngrams(outer, 1, 3, false));
  for (const auto& g : as_lists(extract_ngrams(inner, 1, 3, false))) {
    EXPECT_NE(std::find(big.begin(), big.end(), g), big.end());
  }
}

TEST(ExtractNgrams, OrderSensitive) {
  EXPECT_NE(as_lists(extract_ngrams(Items{"A", "B"}, 2, 2, false)),
            as_lists(extract_ngrams(Items{"B", "A"}, 2, 2, false)));
}

TEST(ExtractNgrams, DuplicatesKept) {
  EXPECT_EQ(extract_ngrams(Items{"a", "a", "a"}, 1, 1, false).size(), 3u);
}

TEST(ExtractNgrams, InvalidRangeThrows) {
  EXPECT_THROW(extract_ngrams(Items{"a"}, 0, 2, false), Error);
  EXPECT_THROW(extract_ngrams(Items{"a"}, 3, 2, false), Error);
}

TEST(GramBucket, KnownHashValues) {
  EXPECT_EQ(fnv1a32(""), 2166136261u);
  EXPECT_EQ(fnv1a32("a"), 0xe40c292cu);
  EXPECT_EQ(fnv1a32("foobar"), 0xbf9cf968u);
}

TEST(GramBucket, DeterministicAndSingleBucket) {
  const SubseqGram g{{"L1", "L2"}};
  EXPECT_EQ(gram_bucket(g, 1000), gram_bucket(g, 1000));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(gram_bucket(SubseqGram{random_items(rng, 5, 100)}, 1), 0u);
  }
  EXPECT_THROW(gram_bucket(g, 0), Error);
}

TEST(GramBucket, CollisionRateIsLow) {
  Rng rng(77);
  std::unordered_set<std::string> keys;
  while (keys.size() < 100000) keys.insert(SubseqGram{random_items(rng, 5, 100000)}.key());
  std::unordered_set<std::uint32_t> buckets;
  for (const auto& key : keys) buckets.insert(fnv1a32(key) % 2'000'000u);
  const double rate = 1.0 - static_cast<double>(buckets.size()) / static_cast<double>(keys.size());
  EXPECT_LT(rate, 0.05);
}

TEST(GramBucket, BucketsFollowExtractionOrder) {
  const Items items{"a", "b", "c"};
  const GramRange range{1, 2, true};
  const auto grams = extract_ngrams(items, range);
  const auto buckets = gram_buckets(items, range, 97);
  ASSERT_EQ(grams.size(), buckets.size());
  for (std::size_t i = 0; i < grams.size(); ++i) EXPECT_EQ(buckets[i], gram_bucket(grams[i], 97));
}

TEST(RenderGram, ShowsBoundaries) {
  EXPECT_EQ(render_gram(SubseqGram{{B, "a", E}}), "<s> a </s>");
}
