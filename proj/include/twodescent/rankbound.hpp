// Descent images on both sides of the 2-isogeny and the resulting rank
// interval, plus ranks over Q(sqrt m) through quadratic twists.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "twodescent/descent.hpp"

namespace twodescent::rankbound {

using descent::Curve;
using intmath::Int;

enum class Side { Alpha, AlphaBar };

std::string_view to_string(Side s);

struct DescentConfig {
  Int search_bound = 1024;
  Int small_prime_bound = 50;
  std::vector<Int> extra_moduli;

  bool operator==(const DescentConfig&) const = default;
};

struct FactorizationEvidence {
  descent::TorsorProblem torsor;
  descent::SolvabilityVerdict verdict;
  bool operator==(const FactorizationEvidence&) const = default;
};

/// Why a class sits where it does in the image.
enum class Basis {
  Identity,        // class 1, the point at infinity
  TwoTorsion,      // class of the coefficient, the point (0, 0)
  Solved,          // one of its torsors has a primitive solution
  Generated,       // product of two confirmed classes
  Obstructed,      // every torsor is locally obstructed
  ClosureExcluded, // excluded class times a confirmed class
  Undetermined,    // neither proved in nor proved out
};

std::string_view to_string(Basis b);

struct ClassEvidence {
  Int cls = 1;
  Basis basis = Basis::Undetermined;
  std::vector<FactorizationEvidence> factorizations;
  // Generated: the two confirmed factors. ClosureExcluded: (excluded, confirmed).
  std::optional<std::pair<Int, Int>> via;

  bool operator==(const ClassEvidence&) const = default;
};

struct DescentImage {
  Side side = Side::Alpha;
  Int coefficient = 1;  // b on the alpha side, a^2 - 4b on the other
  Int middle = 0;       // a on the alpha side, -2a on the other
  std::vector<Int> confirmed;  // sorted; a subgroup
  std::vector<Int> possible;   // sorted; superset of confirmed
  std::map<Int, ClassEvidence> evidence;  // one entry per candidate class

  bool operator==(const DescentImage&) const = default;
};

struct RankInterval {
  int lower = 0;
  int upper = 0;
  DescentImage image_e;
  DescentImage image_ebar;

  bool operator==(const RankInterval&) const = default;
};

DescentImage descent_image(const Curve& c, Side side, const DescentConfig& cfg = {});

/// Lower bound from the confirmed subgroups, upper bound from the possible
/// sets rounded down to powers of two:
///   2^lower = |confirmed_alpha| * |confirmed_alphabar| / 4.
RankInterval rank_interval(const Curve& c, const DescentConfig& cfg = {});

/// y^2 = x^3 + m a x^2 + m^2 b x; m squarefree and nonzero.
Curve twist(const Curve& c, Int m);

struct QuadraticRank {
  Int m = -1;
  RankInterval base;
  RankInterval twisted;
  int lower = 0;
  int upper = 0;
};

/// rank E(Q(sqrt m)) = rank E(Q) + rank E^m(Q), as an interval sum.
QuadraticRank rank_over_quadratic(const Curve& c, Int m, const DescentConfig& cfg = {});

/// Whether `classes` (sorted) is closed under class_product and contains 1.
bool is_subgroup(const std::vector<Int>& classes);

/// Number of rank_interval evaluations in this process.
std::uint64_t rank_interval_evaluations();

}  // namespace twodescent::rankbound
