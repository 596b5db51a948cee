#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqrec/corpus.hpp"

namespace seqrec::synthetic {

// Topic-structured interaction logs for demos and property checks.
//
// Every topic has a handful of popular routes through its items (plus a few
// globally popular hub items). Each user follows one route of one topic and
// every session is a contiguous stretch of it with the odd detour. Cold-start users are
// active in the second half of the time line only.
struct Options {
  std::size_t users = 600;
  std::size_t topics = 24;
  std::size_t items_per_topic = 16;
  std::size_t hub_items = 12;
  // Share of route slots taken by hub items.
  double hub_share = 0.3;
  std::size_t routes_per_topic = 4;
  std::size_t route_length = 9;
  std::size_t min_sessions = 3;
  std::size_t max_sessions = 7;
  std::size_t min_session_length = 3;
  std::size_t max_session_length = 6;
  double cold_start_fraction = 0.5;
  // Chance that one session item is swapped for a random topic item.
  double detour_probability = 0.2;
  std::int64_t horizon_seconds = 400 * 86400;
  std::uint64_t seed = 7;
};

struct Dataset {
  std::vector<corpus::Interaction> events;
  std::map<corpus::ItemId, std::size_t> item_topic;
  std::map<corpus::UserId, std::size_t> user_topic;
  std::vector<corpus::UserId> cold_start_users;
};

Dataset generate(const Options& options);

}  // namespace seqrec::synthetic
