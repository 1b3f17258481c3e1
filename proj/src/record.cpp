#include "twodescent/record.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twodescent::record {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using rankbound::Basis;
using rankbound::ClassEvidence;
using rankbound::DescentImage;
using rankbound::Side;

std::string str(Int v) { return std::to_string(v); }

Int num(const json& j) {
  const auto s = j.get<std::string>();
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("record: malformed integer '" + s + "'");
  return v;
}

ordered_json int_list(const std::vector<Int>& v) {
  ordered_json out = ordered_json::array();
  for (Int x : v) out.push_back(str(x));
  return out;
}

std::vector<Int> int_list(const json& j) {
  std::vector<Int> out;
  for (const auto& x : j) out.push_back(num(x));
  return out;
}

Basis basis_from(const std::string& s) {
  for (Basis b : {Basis::Identity, Basis::TwoTorsion, Basis::Solved, Basis::Generated,
                  Basis::Obstructed, Basis::ClosureExcluded, Basis::Undetermined})
    if (rankbound::to_string(b) == s) return b;
  throw std::invalid_argument("record: unknown basis '" + s + "'");
}

ordered_json verdict_json(const rankbound::FactorizationEvidence& f) {
  ordered_json j;
  j["b1"] = str(f.torsor.b1);
  j["a"] = str(f.torsor.a);
  j["b2"] = str(f.torsor.b2);
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, descent::ObstructedAt>) {
          j["kind"] = "obstructed";
          j["modulus"] = str(v.modulus);
        } else if constexpr (std::is_same_v<V, descent::Solved>) {
          j["kind"] = "solved";
          j["N"] = str(v.triple.N);
          j["M"] = str(v.triple.M);
          j["e"] = str(v.triple.e);
        } else {
          j["kind"] = "unresolved";
          j["bound"] = v.search_bound;
        }
      },
      f.verdict);
  return j;
}

rankbound::FactorizationEvidence verdict_from(const json& j) {
  rankbound::FactorizationEvidence f;
  f.torsor = {num(j.at("b1")), num(j.at("a")), num(j.at("b2"))};
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "obstructed")
    f.verdict = descent::ObstructedAt{num(j.at("modulus"))};
  else if (kind == "solved")
    f.verdict = descent::Solved{{num(j.at("N")), num(j.at("M")), num(j.at("e"))}};
  else if (kind == "unresolved")
    f.verdict = descent::Unresolved{j.at("bound").get<Int>()};
  else
    throw std::invalid_argument("record: unknown verdict kind '" + kind + "'");
  return f;
}

ordered_json image_json(const DescentImage& img) {
  ordered_json j;
  j["coefficient"] = str(img.coefficient);
  j["middle"] = str(img.middle);
  j["confirmed"] = int_list(img.confirmed);
  j["possible"] = int_list(img.possible);
  ordered_json ev = ordered_json::array();
  for (const auto& [cls, e] : img.evidence) {
    ordered_json c;
    c["class"] = str(cls);
    c["basis"] = std::string(rankbound::to_string(e.basis));
    if (e.via)
      c["via"] = ordered_json::array({str(e.via->first), str(e.via->second)});
    else
      c["via"] = nullptr;
    c["verdicts"] = ordered_json::array();
    for (const auto& f : e.factorizations) c["verdicts"].push_back(verdict_json(f));
    ev.push_back(std::move(c));
  }
  j["evidence"] = std::move(ev);
  return j;
}

DescentImage image_from(const json& j, Side side) {
  DescentImage img;
  img.side = side;
  img.coefficient = num(j.at("coefficient"));
  img.middle = num(j.at("middle"));
  img.confirmed = int_list(j.at("confirmed"));
  img.possible = int_list(j.at("possible"));
  for (const auto& c : j.at("evidence")) {
    ClassEvidence e;
    e.cls = num(c.at("class"));
    e.basis = basis_from(c.at("basis").get<std::string>());
    if (!c.at("via").is_null()) e.via = std::make_pair(num(c.at("via").at(0)), num(c.at("via").at(1)));
    for (const auto& v : c.at("verdicts")) e.factorizations.push_back(verdict_from(v));
    img.evidence[e.cls] = std::move(e);
  }
  return img;
}

}  // namespace

ResultRecord make_record(const descent::Curve& c, const rankbound::DescentConfig& cfg,
                         rankbound::RankInterval interval) {
  return ResultRecord{c.a(), c.b(), cfg, std::move(interval), {}};
}

ordered_json to_json(const ResultRecord& r, bool with_timestamp) {
  ordered_json j;
  j["curve"] = {{"a", str(r.a)}, {"b", str(r.b)}};
  j["config"] = {{"searchBound", r.config.search_bound},
                 {"smallPrimeBound", r.config.small_prime_bound},
                 {"extraModuli", r.config.extra_moduli}};
  j["interval"] = {{"lower", r.interval.lower}, {"upper", r.interval.upper}};
  j["images"] = {{"alpha", image_json(r.interval.image_e)},
                 {"alphaBar", image_json(r.interval.image_ebar)}};
  if (with_timestamp) j["timestampUtc"] = r.timestamp_utc;
  return j;
}

ResultRecord from_json(const json& j) {
  ResultRecord r;
  r.a = num(j.at("curve").at("a"));
  r.b = num(j.at("curve").at("b"));
  const auto& cfg = j.at("config");
  r.config.search_bound = cfg.at("searchBound").get<Int>();
  r.config.small_prime_bound = cfg.at("smallPrimeBound").get<Int>();
  r.config.extra_moduli = cfg.at("extraModuli").get<std::vector<Int>>();
  r.interval.lower = j.at("interval").at("lower").get<int>();
  r.interval.upper = j.at("interval").at("upper").get<int>();
  r.interval.image_e = image_from(j.at("images").at("alpha"), Side::Alpha);
  r.interval.image_ebar = image_from(j.at("images").at("alphaBar"), Side::AlphaBar);
  if (j.contains("timestampUtc")) r.timestamp_utc = j.at("timestampUtc").get<std::string>();
  return r;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string witness_string(const rankbound::RankInterval& r) {
  std::string out;
  for (const DescentImage* img : {&r.image_e, &r.image_ebar}) {
    for (const auto& [cls, ev] : img->evidence) {
      for (const auto& f : ev.factorizations) {
        if (const auto* s = std::get_if<descent::Solved>(&f.verdict)) {
          if (!out.empty()) out += ';';
          out += str(f.torsor.b1) + ':' + str(s->triple.N) + ':' + str(s->triple.M) + ':' +
                 str(s->triple.e);
        }
      }
    }
  }
  return out;
}

std::optional<descent::PrimitiveTriple> witness_for(const rankbound::RankInterval& r,
                                                    const descent::TorsorProblem& t) {
  for (const DescentImage* img : {&r.image_e, &r.image_ebar})
    for (const auto& [cls, ev] : img->evidence)
      for (const auto& f : ev.factorizations)
        if (f.torsor == t)
          if (const auto* s = std::get_if<descent::Solved>(&f.verdict)) return s->triple;

  // Carry a solution over from a sibling factorization that differs by a
  // square: (N, M, e) on (b1 / s^2, a, b2 s^2) gives (sN, M, se) on t, and
  // (N, M, e) on (b1 s^2, a, b2 / s^2) gives (sN, sM, e). Same rational point.
  for (const DescentImage* img : {&r.image_e, &r.image_ebar})
    for (const auto& [cls, ev] : img->evidence)
      for (const auto& f : ev.factorizations) {
        const auto* s = std::get_if<descent::Solved>(&f.verdict);
        if (!s || f.torsor.a != t.a || f.torsor.b1 * f.torsor.b2 != t.b1 * t.b2) continue;
        const auto& u = f.torsor;
        const auto& x = s->triple;
        if (u.b1 != 0 && t.b1 % u.b1 == 0) {
          if (auto root = intmath::square_root(t.b1 / u.b1); root && *root > 1)
            return descent::PrimitiveTriple{static_cast<Int>(*root) * x.N, x.M, static_cast<Int>(*root) * x.e};
        }
        if (t.b2 != 0 && u.b2 % t.b2 == 0 && t.b1 != 0 && u.b1 % t.b1 == 0) {
          if (auto root = intmath::square_root(u.b1 / t.b1); root && *root > 1)
            return descent::PrimitiveTriple{static_cast<Int>(*root) * x.N, static_cast<Int>(*root) * x.M, x.e};
        }
      }
  return std::nullopt;
}

ResultCache::ResultCache(std::filesystem::path path) : path_(std::move(path)) {}

ResultCache::Key ResultCache::key_of(Int a, Int b, const rankbound::DescentConfig& cfg) {
  return {a, b, cfg.search_bound, cfg.small_prime_bound, cfg.extra_moduli};
}

void ResultCache::load() {
  if (loaded_) return;
  loaded_ = true;
  const int fd = ::open(path_.c_str(), O_RDONLY);
  if (fd < 0) return;
  ::flock(fd, LOCK_SH);
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto r = from_json(json::parse(line));
      entries_[key_of(r.a, r.b, r.config)] = std::move(r);
    } catch (const std::exception&) {
      // A torn or foreign line; later entries still count.
    }
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

std::optional<ResultRecord> ResultCache::lookup(const descent::Curve& c,
                                                const rankbound::DescentConfig& cfg) {
  load();
  auto it = entries_.find(key_of(c.a(), c.b(), cfg));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResultCache::store(ResultRecord r) {
  load();
  r.timestamp_utc = utc_now();
  const std::string line = to_json(r, true).dump() + "\n";
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw std::runtime_error("cache: cannot open " + path_.string());
  ::flock(fd, LOCK_EX);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      ::flock(fd, LOCK_UN);
      ::close(fd);
      throw std::runtime_error("cache: write failed for " + path_.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
  entries_[key_of(r.a, r.b, r.config)] = std::move(r);
}

ResultRecord ResultCache::fetch(const descent::Curve& c, const rankbound::DescentConfig& cfg, bool* hit) {
  if (auto r = lookup(c, cfg)) {
    if (hit) *hit = true;
    return *r;
  }
  if (hit) *hit = false;
  store(make_record(c, cfg, rankbound::rank_interval(c, cfg)));
  return *lookup(c, cfg);
}

}  // namespace twodescent::record
