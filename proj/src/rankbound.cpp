#include "twodescent/rankbound.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <set>
#include <stdexcept>
#include <string>

namespace twodescent::rankbound {

namespace {

std::atomic<std::uint64_t> g_evaluations{0};

int log2_floor(std::size_t n) { return n == 0 ? 0 : std::bit_width(n) - 1; }

struct Job {
  Int cls;
  descent::TorsorProblem torsor;
};

descent::SolvabilityVerdict decide(const descent::TorsorProblem& t, const DescentConfig& cfg) {
  const auto moduli = descent::default_moduli(t, cfg.small_prime_bound, cfg.extra_moduli);
  if (auto m = descent::local_scan(t, moduli)) return descent::ObstructedAt{*m};
  if (auto s = descent::global_search(t, cfg.search_bound)) return descent::Solved{*s};
  return descent::Unresolved{cfg.search_bound};
}

}  // namespace

std::string_view to_string(Side s) { return s == Side::Alpha ? "alpha" : "alphaBar"; }

std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::Identity: return "identity";
    case Basis::TwoTorsion: return "two-torsion";
    case Basis::Solved: return "solved";
    case Basis::Generated: return "generated";
    case Basis::Obstructed: return "obstructed";
    case Basis::ClosureExcluded: return "closure-excluded";
    case Basis::Undetermined: return "undetermined";
  }
  return "undetermined";
}

bool is_subgroup(const std::vector<Int>& classes) {
  if (!std::binary_search(classes.begin(), classes.end(), Int{1})) return false;
  for (Int x : classes)
    for (Int y : classes)
      if (!std::binary_search(classes.begin(), classes.end(), intmath::class_product(x, y)))
        return false;
  return true;
}

DescentImage descent_image(const Curve& c, Side side, const DescentConfig& cfg) {
  if (cfg.search_bound < 1) throw std::invalid_argument("descent_image: search bound must be >= 1");
  DescentImage img;
  img.side = side;
  img.coefficient = side == Side::Alpha ? c.b() : c.isogenous_coefficient();
  img.middle = side == Side::Alpha ? c.a() : intmath::checked_mul(-2, c.a());

  const auto candidates = descent::divisor_class_candidates(img.coefficient, img.middle);
  const Int torsion_class = intmath::squarefree_class(img.coefficient);
  for (Int d : candidates) img.evidence[d].cls = d;
  img.evidence[1].basis = Basis::Identity;
  if (torsion_class != 1) img.evidence[torsion_class].basis = Basis::TwoTorsion;

  std::vector<Job> jobs;
  for (Int d : candidates) {
    if (d == 1 || d == torsion_class) continue;
    for (const auto& t : descent::torsor_factorizations(img.coefficient, d, img.middle))
      jobs.push_back({d, t});
  }
  std::vector<descent::SolvabilityVerdict> verdicts(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      verdicts[i] = decide(jobs[i].torsor, cfg);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  // Merge in job order, independent of completion order.
  for (std::size_t i = 0; i < jobs.size(); ++i)
    img.evidence[jobs[i].cls].factorizations.push_back({jobs[i].torsor, verdicts[i]});

  std::set<Int> confirmed{1, torsion_class};
  std::set<Int> excluded;
  for (auto& [d, ev] : img.evidence) {
    if (ev.factorizations.empty()) continue;
    const bool solved = std::any_of(ev.factorizations.begin(), ev.factorizations.end(), [](const auto& f) {
      return std::holds_alternative<descent::Solved>(f.verdict);
    });
    const bool all_obstructed = std::all_of(ev.factorizations.begin(), ev.factorizations.end(), [](const auto& f) {
      return std::holds_alternative<descent::ObstructedAt>(f.verdict);
    });
    if (solved) {
      ev.basis = Basis::Solved;
      confirmed.insert(d);
    } else if (all_obstructed) {
      ev.basis = Basis::Obstructed;
      excluded.insert(d);
    }
  }

  // Replace confirmed by the subgroup it generates.
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<Int> current(confirmed.begin(), confirmed.end());
    for (Int x : current) {
      for (Int y : current) {
        const Int z = intmath::class_product(x, y);
        if (confirmed.insert(z).second) {
          auto& ev = img.evidence.at(z);
          if (ev.basis == Basis::Obstructed)
            throw std::logic_error("descent_image: generated class " + std::to_string(z) +
                                   " is locally obstructed");
          ev.basis = Basis::Generated;
          ev.via = std::make_pair(x, y);
          grew = true;
        }
      }
    }
  }

  // If d is not in the image and c is, d*c is not in the image either.
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<Int> current(excluded.begin(), excluded.end());
    for (Int d : current) {
      for (Int c0 : confirmed) {
        const Int z = intmath::class_product(d, c0);
        if (confirmed.count(z))
          throw std::logic_error("descent_image: confirmed class " + std::to_string(z) +
                                 " is excluded by closure");
        if (excluded.insert(z).second) {
          auto& ev = img.evidence.at(z);
          ev.basis = Basis::ClosureExcluded;
          ev.via = std::make_pair(d, c0);
          grew = true;
        }
      }
    }
  }

  img.confirmed.assign(confirmed.begin(), confirmed.end());
  for (Int d : candidates)
    if (!excluded.count(d)) img.possible.push_back(d);
  return img;
}

RankInterval rank_interval(const Curve& c, const DescentConfig& cfg) {
  ++g_evaluations;
  RankInterval r;
  r.image_e = descent_image(c, Side::Alpha, cfg);
  r.image_ebar = descent_image(c, Side::AlphaBar, cfg);
  const int confirmed_bits =
      log2_floor(r.image_e.confirmed.size()) + log2_floor(r.image_ebar.confirmed.size());
  const int possible_bits =
      log2_floor(r.image_e.possible.size()) + log2_floor(r.image_ebar.possible.size());
  r.lower = std::max(0, confirmed_bits - 2);
  r.upper = std::max(r.lower, possible_bits - 2);
  return r;
}

Curve twist(const Curve& c, Int m) {
  if (m == 0 || !intmath::is_squarefree(m))
    throw std::invalid_argument("twist: m must be a nonzero squarefree integer");
  return Curve(intmath::checked_mul(m, c.a()),
               intmath::checked_mul(intmath::checked_mul(m, m), c.b()));
}

QuadraticRank rank_over_quadratic(const Curve& c, Int m, const DescentConfig& cfg) {
  if (m == 1) throw std::invalid_argument("rank_over_quadratic: m = 1 does not give a quadratic field");
  const Curve tw = twist(c, m);
  QuadraticRank q;
  q.m = m;
  q.base = rank_interval(c, cfg);
  q.twisted = tw == c ? q.base : rank_interval(tw, cfg);
  q.lower = q.base.lower + q.twisted.lower;
  q.upper = q.base.upper + q.twisted.upper;
  return q;
}

std::uint64_t rank_interval_evaluations() { return g_evaluations.load(); }

}  // namespace twodescent::rankbound
