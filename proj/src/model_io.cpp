#include "seqrec/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace seqrec::embed {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'Q', 'F', 'T'};

template <typename UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("model file truncated");
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) value |= static_cast<UInt>(bytes[i]) << (8 * i);
  return value;
}

void put_floats(std::ostream& out, std::span<const float> values) {
  for (const float v : values) put_le(out, std::bit_cast<std::uint32_t>(v));
}

void get_floats(std::istream& in, std::span<float> values) {
  for (auto& v : values) v = std::bit_cast<float>(get_le<std::uint32_t>(in));
}

}  // namespace

void save_model(std::ostream& out, const EmbeddingModel& model) {
  const auto& hp = model.hyperparameters();
  const auto& vocab = model.vocab();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kModelVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.grams.min_n));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.grams.max_n));
  put_le<std::uint32_t>(out, hp.bucket_count);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(hp.mode));
  put_le<std::uint64_t>(out, hp.seed);
  put_le<std::uint8_t>(out, hp.grams.with_boundaries ? 1 : 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.window));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.negatives));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hp.epochs));
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(hp.lr));
  put_le<std::uint64_t>(out, hp.min_count);

  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.size()));
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    const auto& text = vocab.token(i).text;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_le<std::uint64_t>(out, vocab.count(i));
  }
  put_floats(out, model.input_matrix());
  put_floats(out, model.context_matrix());
  if (!out) throw Error("failed writing model");
}

void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  save_model(out, model);
}

EmbeddingModel load_model(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("not a model file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw Error("unsupported model version " + std::to_string(version));
  }
  Hyperparameters hp;
  hp.dim = static_cast<int>(get_le<std::uint32_t>(in));
  hp.grams.min_n = static_cast<int>(get_le<std::uint32_t>(in));
  hp.grams.max_n = static_cast<int>(get_le<std::uint32_t>(in));
  hp.bucket_count = get_le<std::uint32_t>(in);
  const auto mode = get_le<std::uint8_t>(in);
  if (mode > 1) throw Error("model file has unknown training mode");
  hp.mode = static_cast<TrainMode>(mode);
  hp.seed = get_le<std::uint64_t>(in);
  hp.grams.with_boundaries = get_le<std::uint8_t>(in) != 0;
  hp.window = static_cast<int>(get_le<std::uint32_t>(in));
  hp.negatives = static_cast<int>(get_le<std::uint32_t>(in));
  hp.epochs = static_cast<int>(get_le<std::uint32_t>(in));
  hp.lr = std::bit_cast<double>(get_le<std::uint64_t>(in));
  hp.min_count = get_le<std::uint64_t>(in);
  hp.validate();

  const auto size = get_le<std::uint32_t>(in);
  std::vector<subseq::SeqToken> tokens;
  std::vector<std::uint64_t> counts;
  tokens.reserve(size);
  counts.reserve(size);
  for (std::uint32_t i = 0; i < size; ++i) {
    const auto length = get_le<std::uint32_t>(in);
    std::string text(length, '\0');
    in.read(text.data(), length);
    if (!in) throw Error("model file truncated in vocabulary");
    tokens.push_back({text, subseq::deserialize(text)});
    counts.push_back(get_le<std::uint64_t>(in));
  }
  auto vocab = Vocabulary::from_entries(std::move(tokens), std::move(counts), hp.min_count);
  if (vocab.size() != size) throw Error("model vocabulary violates its min_count");
  // Stored order is the vocabulary's canonical order, so indices line up.
  EmbeddingModel model(std::move(vocab), hp);
  get_floats(in, model.input_matrix());
  get_floats(in, model.context_matrix());
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read model file " + path.string());
  return load_model(in);
}

void export_jsonl(std::ostream& out, const EmbeddingModel& model) {
  const auto& vocab = model.vocab();
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    nlohmann::json row;
    row["items"] = vocab.token(i).items;
    row["count"] = vocab.count(i);
    row["vector"] = model.compose(vocab.token(i));
    out << row.dump() << '\n';
  }
}

}  // namespace seqrec::embed
