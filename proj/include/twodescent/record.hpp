// Serialized descent results and the append-only result cache.
//
// A ResultRecord is the full outcome of one rank_interval run. JSON keeps
// curve-derived integers as decimal strings; the cache is one JSON record per
// line, keyed by (a, b, config), last entry winning.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "twodescent/rankbound.hpp"

namespace twodescent::record {

using intmath::Int;

struct ResultRecord {
  Int a = 0;
  Int b = 0;
  rankbound::DescentConfig config;
  rankbound::RankInterval interval;
  std::string timestamp_utc;  // empty outside the cache

  bool operator==(const ResultRecord&) const = default;
};

ResultRecord make_record(const descent::Curve& c, const rankbound::DescentConfig& cfg,
                         rankbound::RankInterval interval);

nlohmann::ordered_json to_json(const ResultRecord& r, bool with_timestamp);
ResultRecord from_json(const nlohmann::json& j);

std::string utc_now();

/// Solved triples of both images in class order, as "b1:N:M:e" joined by ';'.
std::string witness_string(const rankbound::RankInterval& r);

/// Solved triple on the given torsor, or one carried over from a solved
/// factorization differing by a square factor. Satisfies descent::solves.
std::optional<descent::PrimitiveTriple> witness_for(const rankbound::RankInterval& r,
                                                    const descent::TorsorProblem& t);

class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  std::optional<ResultRecord> lookup(const descent::Curve& c, const rankbound::DescentConfig& cfg);

  /// Appends under an exclusive advisory lock and stamps the record.
  void store(ResultRecord r);

  /// Cached record when present, otherwise computes and stores one.
  /// `hit` reports which happened.
  ResultRecord fetch(const descent::Curve& c, const rankbound::DescentConfig& cfg, bool* hit = nullptr);

 private:
  using Key = std::tuple<Int, Int, Int, Int, std::vector<Int>>;
  static Key key_of(Int a, Int b, const rankbound::DescentConfig& cfg);
  void load();

  std::filesystem::path path_;
  std::map<Key, ResultRecord> entries_;
  bool loaded_ = false;
};

}  // namespace twodescent::record
