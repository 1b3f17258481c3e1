// Congruence families of primes p for E_p : y^2 = x^3 - 5p x, their
// predicted ranks over Q and Q(i), and verification against descent.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twodescent/rankbound.hpp"

namespace twodescent::families {

using intmath::Int;

enum class Family {
  RankZero_7_23_mod40,
  RankOne_40k3,       // p = 40k + 3, 5k + 1 a square
  RankOne_40k27,      // p = 40k + 27, 5k + 4 a square
  AtLeastOne_40k11,   // p = 40k + 11, 160k + 49 a square
  AtLeastOne_40k19,   // p = 40k + 19, 160k + 81 a square
  Conjectured2_31_mod80,
  Unclassified,
};

std::string_view to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);

struct FamilyClass {
  Family tag = Family::Unclassified;
  Int p = 0;
  std::optional<Int> k;
  std::optional<Int> root;
  bool operator==(const FamilyClass&) const = default;
};

enum class ClaimKind { Exactly, AtLeast, Conjectured, None };

std::string_view to_string(ClaimKind k);

struct RankClaim {
  ClaimKind kind = ClaimKind::None;
  int value = 0;
  bool operator==(const RankClaim&) const = default;
};

struct Prediction {
  RankClaim over_q;
  RankClaim over_qi;
  bool operator==(const Prediction&) const = default;
};

/// The E_p curve (0, -5p).
descent::Curve family_curve(Int p);

/// First matching family in declaration order; std::invalid_argument unless
/// p is an odd prime.
FamilyClass classify_prime(Int p);

Prediction predicted_rank(const FamilyClass& f);

/// Which primes a scan walks: a set of families, or a residue class.
struct ScanSpec {
  struct Families {
    std::vector<Family> tags;
  };
  struct Residue {
    Int modulus;  // 40 or 80
    Int residue;
  };
  std::variant<Families, Residue> select;

  bool matches(Int p) const;
};

/// Parses "rank-zero", "rank-one", "rank-one-3", "rank-one-27",
/// "at-least-one", "at-least-one-11", "at-least-one-19", "conjectured-two",
/// "unclassified", or a canonical Family name.
ScanSpec family_spec(std::string_view name);
ScanSpec residue_spec(Int modulus, Int residue);

struct ScanEntry {
  Int p;
  FamilyClass family;
  Prediction prediction;
};

/// Odd primes p <= limit matching spec, increasing.
std::vector<ScanEntry> scan(const ScanSpec& spec, Int limit);

enum class Status { Consistent, Inconsistent, Unconfirmed, NoPrediction };

std::string_view to_string(Status s);

struct VerifyReport {
  Int p = 0;
  FamilyClass family;
  Prediction prediction;
  rankbound::RankInterval interval;
  Status status = Status::NoPrediction;
  // Conjectured claim whose lower bound already reaches the conjectured rank.
  bool conjecture_support = false;
};

/// Compares a prediction with a computed interval.
Status judge(const RankClaim& claim, int lower, int upper);

VerifyReport verify(Int p, const rankbound::DescentConfig& cfg = {});

/// verify for an already computed interval (e.g. a cached one).
VerifyReport verify_with(Int p, rankbound::RankInterval interval);

}  // namespace twodescent::families
