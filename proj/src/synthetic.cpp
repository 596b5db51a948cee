#include "seqrec/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "seqrec/error.hpp"
#include "seqrec/random.hpp"

namespace seqrec::synthetic {

namespace {

std::string make_id(char prefix, std::size_t a, const char* middle, std::size_t b) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%c%03zu%s%03zu", prefix, a, middle, b);
  return buffer;
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[rng.below(i)]);
  }
}

}  // namespace

Dataset generate(const Options& options) {
  if (options.topics == 0 || options.items_per_topic < options.route_length ||
      options.min_session_length < 1 || options.max_session_length < options.min_session_length ||
      options.max_session_length > options.route_length || options.min_sessions < 1 ||
      options.max_sessions < options.min_sessions || options.routes_per_topic == 0) {
    throw Error("inconsistent synthetic corpus options");
  }
  constexpr std::int64_t kDay = 86400;
  const std::int64_t days = options.horizon_seconds / kDay;
  const std::int64_t half = days / 2;
  if (half < static_cast<std::int64_t>(options.max_sessions)) {
    throw Error("synthetic horizon too short for the session count");
  }

  Rng rng(options.seed);
  Dataset data;
  std::vector<std::vector<std::string>> topic_items(options.topics);
  std::vector<std::string> hubs;
  for (std::size_t j = 0; j < options.hub_items; ++j) {
    hubs.push_back(make_id('h', 0, "_i", j));
    data.item_topic[hubs.back()] = options.topics;
  }
  for (std::size_t t = 0; t < options.topics; ++t) {
    for (std::size_t j = 0; j < options.items_per_topic; ++j) {
      topic_items[t].push_back(make_id('t', t, "_i", j));
      data.item_topic[topic_items[t].back()] = t;
    }
  }

  std::vector<std::vector<std::vector<std::string>>> routes(options.topics);
  for (std::size_t t = 0; t < options.topics; ++t) {
    for (std::size_t r = 0; r < options.routes_per_topic; ++r) {
      auto pool = topic_items[t];
      shuffle(pool, rng);
      pool.resize(options.route_length);
      for (auto& slot : pool) {
        if (!hubs.empty() && rng.uniform() < options.hub_share) slot = hubs[rng.below(hubs.size())];
      }
      routes[t].push_back(std::move(pool));
    }
  }

  for (std::size_t u = 0; u < options.users; ++u) {
    const auto user = make_id('u', u / 1000, "_", u % 1000);
    const std::size_t topic = u % options.topics;
    const bool cold = rng.uniform() < options.cold_start_fraction;
    data.user_topic[user] = topic;
    if (cold) data.cold_start_users.push_back(user);

    const auto& route = routes[topic][rng.below(routes[topic].size())];

    const auto sessions =
        options.min_sessions + rng.below(options.max_sessions - options.min_sessions + 1);
    const std::int64_t first_day = cold ? half : 0;
    std::set<std::int64_t> chosen;
    while (chosen.size() < sessions) {
      chosen.insert(first_day + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(days - first_day))));
    }

    for (const auto day : chosen) {
      const auto length = options.min_session_length +
                          rng.below(options.max_session_length - options.min_session_length + 1);
      const auto start = rng.below(route.size() - length + 1);
      std::vector<std::string> items(route.begin() + static_cast<std::ptrdiff_t>(start),
                                     route.begin() + static_cast<std::ptrdiff_t>(start + length));
      if (rng.uniform() < options.detour_probability) {
        const auto& source = topic_items[topic];
        items[rng.below(items.size())] = source[rng.below(source.size())];
      }
      std::int64_t t = day * kDay + 9 * 3600 + static_cast<std::int64_t>(rng.below(3600));
      for (auto& item : items) {
        data.events.push_back({user, std::move(item), t, std::nullopt});
        t += 600 + static_cast<std::int64_t>(rng.below(1200));
      }
    }
  }
  return data;
}

}  // namespace seqrec::synthetic
