#include "twodescent/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "twodescent/families.hpp"
#include "twodescent/record.hpp"

namespace twodescent::cli {

namespace {

using families::VerifyReport;
using intmath::Int;
using nlohmann::ordered_json;
using rankbound::DescentConfig;
using rankbound::DescentImage;
using rankbound::RankInterval;

constexpr const char* kCsvHeader = "p,a,b,rank_lower,rank_upper,status,witnesses";

struct CurveFlags {
  Int a = 0;
  std::optional<Int> b;
  std::optional<Int> p;
};

struct CommonFlags {
  DescentConfig cfg;
  std::string format = "text";
  std::string cache;
};

void add_curve_flags(CLI::App* cmd, CurveFlags& f) {
  cmd->add_option("--a", f.a, "coefficient of x^2");
  auto* b = cmd->add_option("--b", f.b, "coefficient of x (nonzero)");
  auto* p = cmd->add_option("--p", f.p, "prime p, selects y^2 = x^3 - 5p x");
  b->excludes(p);
  p->excludes(b);
}

void add_common_flags(CLI::App* cmd, CommonFlags& f, std::vector<std::string> formats) {
  cmd->add_option("--search-bound", f.cfg.search_bound, "box bound for the torsor search")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--small-prime-bound", f.cfg.small_prime_bound,
                  "odd primes up to this bound join every modulus schedule");
  cmd->add_option("--extra-moduli", f.cfg.extra_moduli, "additional moduli for the local sieve");
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember(formats));
  cmd->add_option("--cache", f.cache, "append-only result cache")->envname("DESCENT_CACHE");
}

descent::Curve resolve_curve(const CurveFlags& f) {
  if (f.p) {
    if (!intmath::is_prime(*f.p)) throw std::invalid_argument("--p " + std::to_string(*f.p) + " is not prime");
    return descent::make_curve(0, intmath::checked_mul(-5, *f.p));
  }
  if (!f.b) throw std::invalid_argument("one of --b or --p is required");
  return descent::make_curve(f.a, *f.b);
}

// Computes or loads intervals; only the cache is touched serially.
class Runner {
 public:
  Runner(const CommonFlags& flags, std::ostream& err) : cfg_(flags.cfg), err_(err) {
    if (!flags.cache.empty()) cache_ = std::make_unique<record::ResultCache>(flags.cache);
  }

  record::ResultRecord one(const descent::Curve& c) {
    if (!cache_) return record::make_record(c, cfg_, rankbound::rank_interval(c, cfg_));
    bool hit = false;
    auto r = cache_->fetch(c, cfg_, &hit);
    if (hit) err_ << "cache hit: a=" << c.a() << " b=" << c.b() << "\n";
    return r;
  }

  std::vector<record::ResultRecord> many(const std::vector<descent::Curve>& curves) {
    std::vector<std::optional<record::ResultRecord>> found(curves.size());
    if (cache_) {
      for (std::size_t i = 0; i < curves.size(); ++i) {
        found[i] = cache_->lookup(curves[i], cfg_);
        if (found[i]) err_ << "cache hit: a=" << curves[i].a() << " b=" << curves[i].b() << "\n";
      }
    }
    std::vector<std::exception_ptr> failures(curves.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (found[i]) continue;
      try {
        found[i] = record::make_record(curves[i], cfg_, rankbound::rank_interval(curves[i], cfg_));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
    std::vector<record::ResultRecord> out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (cache_ && !cache_->lookup(curves[i], cfg_)) cache_->store(*found[i]);
      out.push_back(std::move(*found[i]));
    }
    return out;
  }

 private:
  DescentConfig cfg_;
  std::ostream& err_;
  std::unique_ptr<record::ResultCache> cache_;
};

std::string interval_text(int lower, int upper) {
  return "[" + std::to_string(lower) + "," + std::to_string(upper) + "]";
}

std::string class_list(const std::vector<Int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "}";
}

std::string curve_text(const descent::Curve& c) {
  std::ostringstream os;
  os << "y^2 = x^3";
  if (c.a() != 0) os << (c.a() < 0 ? " - " : " + ") << (c.a() < 0 ? -c.a() : c.a()) << "x^2";
  os << (c.b() < 0 ? " - " : " + ") << (c.b() < 0 ? -c.b() : c.b()) << "x";
  return os.str();
}

std::string verdict_text(const descent::SolvabilityVerdict& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using V = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<V, descent::ObstructedAt>)
          return "obstructed mod " + std::to_string(x.modulus);
        else if constexpr (std::is_same_v<V, descent::Solved>)
          return "solved (N,M,e) = (" + std::to_string(x.triple.N) + "," + std::to_string(x.triple.M) +
                 "," + std::to_string(x.triple.e) + ")";
        else
          return "unresolved up to " + std::to_string(x.search_bound);
      },
      v);
}

std::string torsor_text(const descent::TorsorProblem& t) {
  std::ostringstream os;
  os << "N^2 = " << t.b1 << " M^4";
  auto term = [&](Int c, const char* mono) {
    if (c != 0) os << (c < 0 ? " - " : " + ") << (c < 0 ? -c : c) << mono;
  };
  term(t.a, " M^2 e^2");
  term(t.b2, " e^4");
  return os.str();
}

void print_image(std::ostream& out, const DescentImage& img) {
  out << rankbound::to_string(img.side) << " image (coefficient " << img.coefficient
      << "): confirmed " << class_list(img.confirmed) << " possible " << class_list(img.possible)
      << "\n";
  for (const auto& [cls, ev] : img.evidence) {
    out << "  class " << cls << ": " << rankbound::to_string(ev.basis);
    if (ev.via) out << " via " << ev.via->first << " * " << ev.via->second;
    out << "\n";
    for (const auto& f : ev.factorizations)
      out << "    " << torsor_text(f.torsor) << ": " << verdict_text(f.verdict) << "\n";
  }
}

void print_rank_text(std::ostream& out, const descent::Curve& c, const record::ResultRecord& r) {
  out << "curve: " << curve_text(c) << "\n";
  out << "config: searchBound=" << r.config.search_bound
      << " smallPrimeBound=" << r.config.small_prime_bound << "\n";
  out << "rank interval " << interval_text(r.interval.lower, r.interval.upper) << "\n";
  print_image(out, r.interval.image_e);
  print_image(out, r.interval.image_ebar);
}

std::string claim_text(const families::RankClaim& c) {
  if (c.kind == families::ClaimKind::None) return "None";
  return std::string(families::to_string(c.kind)) + "(" + std::to_string(c.value) + ")";
}

std::string csv_row(const VerifyReport& v) {
  std::ostringstream os;
  os << v.p << ",0," << -5 * v.p << "," << v.interval.lower << "," << v.interval.upper << ","
     << families::to_string(v.status) << "," << record::witness_string(v.interval);
  return os.str();
}

ordered_json report_json(const VerifyReport& v, const record::ResultRecord& r) {
  ordered_json j;
  j["p"] = std::to_string(v.p);
  j["family"] = std::string(families::to_string(v.family.tag));
  j["k"] = v.family.k ? ordered_json(std::to_string(*v.family.k)) : ordered_json(nullptr);
  j["root"] = v.family.root ? ordered_json(std::to_string(*v.family.root)) : ordered_json(nullptr);
  j["prediction"] = {{"overQ", claim_text(v.prediction.over_q)},
                     {"overQi", claim_text(v.prediction.over_qi)}};
  j["status"] = std::string(families::to_string(v.status));
  j["conjectureSupport"] = v.conjecture_support;
  j["record"] = record::to_json(r, false);
  return j;
}

std::string text_row(const VerifyReport& v) {
  std::ostringstream os;
  os << "p=" << v.p << " family=" << families::to_string(v.family.tag)
     << " prediction=" << claim_text(v.prediction.over_q)
     << " interval=" << interval_text(v.interval.lower, v.interval.upper) << " status="
     << families::to_string(v.status);
  if (v.conjecture_support) os << " conjecture-support";
  return os.str();
}

int cmd_rank(const CurveFlags& cf, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const auto c = resolve_curve(cf);
  Runner runner(flags, err);
  const auto r = runner.one(c);
  if (flags.format == "json")
    out << record::to_json(r, false).dump(2) << "\n";
  else
    print_rank_text(out, c, r);
  return kExitOk;
}

int cmd_twist(const CurveFlags& cf, Int m, const CommonFlags& flags, std::ostream& out,
              std::ostream& err) {
  const auto c = resolve_curve(cf);
  if (m == 1) throw std::invalid_argument("--m 1 does not define a quadratic field");
  const auto tw = rankbound::twist(c, m);
  Runner runner(flags, err);
  const auto base = runner.one(c);
  const auto twisted = tw == c ? base : runner.one(tw);
  const int lower = base.interval.lower + twisted.interval.lower;
  const int upper = base.interval.upper + twisted.interval.upper;
  if (flags.format == "json") {
    ordered_json j;
    j["m"] = std::to_string(m);
    j["base"] = record::to_json(base, false);
    j["twisted"] = record::to_json(twisted, false);
    j["interval"] = {{"lower", lower}, {"upper", upper}};
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "curve: " << curve_text(c) << "\n";
  out << "twist by " << m << ": " << curve_text(tw) << "\n";
  out << "rank interval over Q " << interval_text(base.interval.lower, base.interval.upper) << "\n";
  out << "twist rank interval over Q "
      << interval_text(twisted.interval.lower, twisted.interval.upper) << "\n";
  out << "rank interval over Q(sqrt(" << m << ")) " << interval_text(lower, upper) << "\n";
  return kExitOk;
}

std::vector<VerifyReport> verify_all(const std::vector<Int>& primes,
                                     const std::vector<record::ResultRecord>& records) {
  std::vector<VerifyReport> out;
  for (std::size_t i = 0; i < primes.size(); ++i)
    out.push_back(families::verify_with(primes[i], records[i].interval));
  return out;
}

std::vector<descent::Curve> family_curves(const std::vector<Int>& primes) {
  std::vector<descent::Curve> out;
  for (Int p : primes) out.push_back(families::family_curve(p));
  return out;
}

int cmd_table(int id, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const auto primes64 = table_primes(id);
  const std::vector<Int> primes(primes64.begin(), primes64.end());
  Runner runner(flags, err);
  const auto records = runner.many(family_curves(primes));
  const auto reports = verify_all(primes, records);
  bool inconsistent = false;
  for (const auto& v : reports) inconsistent |= v.status == families::Status::Inconsistent;

  if (flags.format == "csv") {
    out << kCsvHeader << "\n";
    for (const auto& v : reports) out << csv_row(v) << "\n";
  } else if (flags.format == "json") {
    ordered_json j = ordered_json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) j.push_back(report_json(reports[i], records[i]));
    out << j.dump(2) << "\n";
  } else {
    out << "table " << id << "\n";
    for (const auto& v : reports) {
      out << "p=" << v.p;
      if (v.family.k) out << " k=" << *v.family.k;
      if (id == 2) {
        const auto& img = v.interval.image_ebar;
        const Int twice_p = intmath::squarefree_class(2 * v.p);
        const bool has = std::binary_search(img.confirmed.begin(), img.confirmed.end(), twice_p);
        out << " alphaBar-confirmed=" << img.confirmed.size() << (has ? " contains-2p" : "");
      }
      if (id == 3) {
        auto w = record::witness_for(v.interval, {20, 0, v.p});
        out << " N=" << (w ? std::to_string(w->N) : std::string("-"));
      }
      if (id == 4) {
        out << " lower=" << v.interval.lower << " upper=" << v.interval.upper << " conjecture";
      }
      out << " interval=" << interval_text(v.interval.lower, v.interval.upper)
          << " prediction=" << claim_text(v.prediction.over_q) << " status="
          << families::to_string(v.status) << "\n";
    }
  }
  return inconsistent ? kExitInconsistent : kExitOk;
}

int cmd_scan(const families::ScanSpec& spec, Int limit, const CommonFlags& flags, std::ostream& out,
             std::ostream& err) {
  if (limit < 1) throw std::invalid_argument("--limit must be positive");
  const auto entries = families::scan(spec, limit);
  if (entries.empty()) return kExitOk;

  Runner runner(flags, err);
  std::size_t counts[4] = {0, 0, 0, 0};
  if (flags.format == "csv") out << kCsvHeader << "\n";
  constexpr std::size_t kChunk = 32;
  for (std::size_t start = 0; start < entries.size(); start += kChunk) {
    const std::size_t end = std::min(entries.size(), start + kChunk);
    std::vector<Int> primes;
    for (std::size_t i = start; i < end; ++i) primes.push_back(entries[i].p);
    const auto records = runner.many(family_curves(primes));
    const auto reports = verify_all(primes, records);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& v = reports[i];
      ++counts[static_cast<int>(v.status)];
      if (flags.format == "csv")
        out << csv_row(v) << "\n";
      else if (flags.format == "json")
        out << report_json(v, records[i]).dump() << "\n";
      else
        out << text_row(v) << "\n";
    }
    out.flush();
  }
  std::ostream& summary = flags.format == "text" ? out : err;
  summary << "summary: " << entries.size() << " primes, " << counts[0] << " CONSISTENT, "
          << counts[1] << " INCONSISTENT, " << counts[2] << " UNCONFIRMED, " << counts[3]
          << " NO_PREDICTION\n";
  return counts[1] > 0 ? kExitInconsistent : kExitOk;
}

}  // namespace

std::vector<long long> table_primes(int id) {
  switch (id) {
    case 1: return {7, 47, 23, 103};
    case 2: return {3, 67, 283, 643, 5827};
    case 3: return {11, 131, 19, 379};
    case 4: return {31, 191, 271, 431};
    default: throw std::invalid_argument("unknown table id " + std::to_string(id) + " (expected 1-4)");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"2-descent rank bounds for y^2 = x^3 + a x^2 + b x", "descent2"};
  app.require_subcommand(1);

  CurveFlags rank_curve, twist_curve;
  CommonFlags rank_flags, twist_flags, table_flags, scan_flags;
  int table_id = 0;
  Int twist_m = -1;
  std::string scan_family;
  std::optional<Int> scan_mod40, scan_mod80;
  Int scan_limit = 1000;

  auto* rank = app.add_subcommand("rank", "rank interval of one curve");
  add_curve_flags(rank, rank_curve);
  add_common_flags(rank, rank_flags, {"text", "json"});

  auto* table = app.add_subcommand("table", "reproduce one of the E_p tables");
  table->add_option("--id", table_id, "table number 1-4")->required();
  add_common_flags(table, table_flags, {"text", "csv", "json"});

  auto* scan = app.add_subcommand("scan", "verify family predictions over a prime range");
  auto* fam = scan->add_option("--family", scan_family, "family tag");
  auto* m40 = scan->add_option("--mod40", scan_mod40, "primes p = r mod 40");
  auto* m80 = scan->add_option("--mod80", scan_mod80, "primes p = r mod 80");
  fam->excludes(m40)->excludes(m80);
  m40->excludes(fam)->excludes(m80);
  m80->excludes(fam)->excludes(m40);
  scan->add_option("--limit", scan_limit, "largest prime to consider");
  add_common_flags(scan, scan_flags, {"text", "csv", "json"});

  auto* twist = app.add_subcommand("twist", "rank interval over Q(sqrt m) via the m-twist");
  add_curve_flags(twist, twist_curve);
  twist->add_option("--m", twist_m, "squarefree m (default -1)");
  add_common_flags(twist, twist_flags, {"text", "json"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (rank->parsed()) return cmd_rank(rank_curve, rank_flags, out, err);
    if (twist->parsed()) return cmd_twist(twist_curve, twist_m, twist_flags, out, err);
    if (table->parsed()) return cmd_table(table_id, table_flags, out, err);
    if (scan->parsed()) {
      families::ScanSpec spec;
      if (!scan_family.empty())
        spec = families::family_spec(scan_family);
      else if (scan_mod40)
        spec = families::residue_spec(40, *scan_mod40);
      else if (scan_mod80)
        spec = families::residue_spec(80, *scan_mod80);
      else
        throw std::invalid_argument("scan needs --family, --mod40 or --mod80");
      return cmd_scan(spec, scan_limit, scan_flags, out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace twodescent::cli
