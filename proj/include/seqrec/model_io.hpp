#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "seqrec/embed.hpp"

namespace seqrec::embed {

// Binary layout, all integers and floats little-endian:
//   magic "SQFT", u32 version,
//   u32 dim, u32 min_n, u32 max_n, u32 bucket_count, u8 mode, u64 seed,
//   u8 with_boundaries, u32 window, u32 negatives, u32 epochs, f64 lr, u64 min_count,
//   u32 vocab size, then per token: u32 byte length, token text, u64 count,
//   f32 input matrix ((V + buckets) x dim), f32 context matrix (V x dim).
inline constexpr std::uint32_t kModelVersion = 1;

void save_model(std::ostream& out, const EmbeddingModel& model);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
EmbeddingModel load_model(std::istream& in);
EmbeddingModel load_model(const std::filesystem::path& path);

// One JSON object per vocabulary token: {"items": [...], "count": n, "vector": [...]}
// where vector is the composed representation.
void export_jsonl(std::ostream& out, const EmbeddingModel& model);

}  // namespace seqrec::embed
