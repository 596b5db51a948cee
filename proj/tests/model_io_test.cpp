#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "seqrec/error.hpp"
#include "seqrec/model_io.hpp"

using namespace seqrec;
using namespace seqrec::embed;

namespace {

EmbeddingModel trained_model() {
  TrainingCorpus c;
  for (int s = 0; s < 10; ++s) {
    c.sentences.push_back({subseq::serialize(std::vector<std::string>{"a", "b"}),
                           subseq::serialize(std::vector<std::string>{"b", "c", "d"}),
                           subseq::serialize(std::vector<std::string>{"e"})});
  }
  Hyperparameters hp;
  hp.dim = 6;
  hp.bucket_count = 300;
  hp.grams = {2, 4, false};
  hp.mode = TrainMode::Cbow;
  hp.seed = 42;
  hp.lr = 0.05;
  hp.epochs = 3;
  hp.min_count = 2;
  return train(c, Vocabulary::build(c, hp.min_count), hp);
}

}  // namespace

TEST(ModelIo, RoundTrip) {
  const auto model = trained_model();
  std::stringstream buffer;
  save_model(buffer, model);
  const auto back = load_model(buffer);
  const auto& a = model.hyperparameters();
  const auto& b = back.hyperparameters();
  EXPECT_EQ(a.dim, b.dim);
  EXPECT_EQ(a.grams.min_n, b.grams.min_n);
  EXPECT_EQ(a.grams.max_n, b.grams.max_n);
  EXPECT_EQ(a.grams.with_boundaries, b.grams.with_boundaries);
  EXPECT_EQ(a.bucket_count, b.bucket_count);
  EXPECT_EQ(a.mode, b.mode);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.lr, b.lr);
  EXPECT_EQ(a.min_count, b.min_count);
  ASSERT_EQ(model.vocab().size(), back.vocab().size());
  for (std::uint32_t i = 0; i < model.vocab().size(); ++i) {
    EXPECT_EQ(model.vocab().token(i), back.vocab().token(i));
    EXPECT_EQ(model.vocab().count(i), back.vocab().count(i));
  }
  EXPECT_TRUE(std::ranges::equal(model.input_matrix(), back.input_matrix()));
  EXPECT_TRUE(std::ranges::equal(model.context_matrix(), back.context_matrix()));
  const std::vector<std::string> unseen{"c", "a", "b"};
  EXPECT_EQ(model.compose(unseen), back.compose(unseen));
}

TEST(ModelIo, RejectsBadInput) {
  std::stringstream junk("NOPE0000");
  EXPECT_THROW(load_model(junk), Error);
  std::stringstream buffer;
  save_model(buffer, trained_model());
  const auto bytes = buffer.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_model(truncated), Error);
  EXPECT_THROW(load_model(std::filesystem::path("/nonexistent/model.bin")), Error);
}

TEST(ModelIo, JsonLinesExport) {
  const auto model = trained_model();
  std::stringstream out;
  export_jsonl(out, model);
  std::string line;
  std::uint32_t row = 0;
  while (std::getline(out, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto& token = model.vocab().token(row);
    EXPECT_EQ(j.at("items").get<std::vector<std::string>>(), token.items);
    EXPECT_EQ(j.at("count").get<std::uint64_t>(), model.vocab().count(row));
    EXPECT_EQ(j.at("vector").get<std::vector<double>>(), model.compose(token));
    ++row;
  }
  EXPECT_EQ(row, model.vocab().size());
}
