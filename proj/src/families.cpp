#include "twodescent/families.hpp"

#include <stdexcept>
#include <string>

namespace twodescent::families {

namespace {

constexpr Family kAll[] = {
    Family::RankZero_7_23_mod40, Family::RankOne_40k3,     Family::RankOne_40k27,
    Family::AtLeastOne_40k11,    Family::AtLeastOne_40k19, Family::Conjectured2_31_mod80,
    Family::Unclassified,
};

// p = 40k + offset with scale * k + shift a perfect square.
std::optional<FamilyClass> square_family(Family tag, Int p, Int offset, Int scale, Int shift) {
  if (p < offset || (p - offset) % 40 != 0) return std::nullopt;
  const Int k = (p - offset) / 40;
  auto root = intmath::square_root(scale * k + shift);
  if (!root) return std::nullopt;
  return FamilyClass{tag, p, k, *root};
}

RankClaim doubled(RankClaim c) {
  c.value *= 2;
  return c;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::RankZero_7_23_mod40: return "RankZero_7_23_mod40";
    case Family::RankOne_40k3: return "RankOne_40k3";
    case Family::RankOne_40k27: return "RankOne_40k27";
    case Family::AtLeastOne_40k11: return "AtLeastOne_40k11";
    case Family::AtLeastOne_40k19: return "AtLeastOne_40k19";
    case Family::Conjectured2_31_mod80: return "Conjectured2_31_mod80";
    case Family::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::optional<Family> family_from_string(std::string_view s) {
  for (Family f : kAll)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string_view to_string(ClaimKind k) {
  switch (k) {
    case ClaimKind::Exactly: return "Exactly";
    case ClaimKind::AtLeast: return "AtLeast";
    case ClaimKind::Conjectured: return "Conjectured";
    case ClaimKind::None: return "None";
  }
  return "None";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Consistent: return "CONSISTENT";
    case Status::Inconsistent: return "INCONSISTENT";
    case Status::Unconfirmed: return "UNCONFIRMED";
    case Status::NoPrediction: return "NO_PREDICTION";
  }
  return "NO_PREDICTION";
}

descent::Curve family_curve(Int p) { return descent::make_curve(0, intmath::checked_mul(-5, p)); }

FamilyClass classify_prime(Int p) {
  if (p < 3 || !intmath::is_prime(p))
    throw std::invalid_argument("classify_prime: " + std::to_string(p) + " is not an odd prime");
  const Int r40 = p % 40;
  if (r40 == 7 || r40 == 23) return {Family::RankZero_7_23_mod40, p, std::nullopt, std::nullopt};
  if (auto f = square_family(Family::RankOne_40k3, p, 3, 5, 1)) return *f;
  if (auto f = square_family(Family::RankOne_40k27, p, 27, 5, 4)) return *f;
  if (auto f = square_family(Family::AtLeastOne_40k11, p, 11, 160, 49)) return *f;
  if (auto f = square_family(Family::AtLeastOne_40k19, p, 19, 160, 81)) return *f;
  if (p % 80 == 31) return {Family::Conjectured2_31_mod80, p, std::nullopt, std::nullopt};
  return {Family::Unclassified, p, std::nullopt, std::nullopt};
}

Prediction predicted_rank(const FamilyClass& f) {
  RankClaim q;
  switch (f.tag) {
    case Family::RankZero_7_23_mod40: q = {ClaimKind::Exactly, 0}; break;
    case Family::RankOne_40k3:
    case Family::RankOne_40k27: q = {ClaimKind::Exactly, 1}; break;
    case Family::AtLeastOne_40k11:
    case Family::AtLeastOne_40k19: q = {ClaimKind::AtLeast, 1}; break;
    case Family::Conjectured2_31_mod80: q = {ClaimKind::Conjectured, 2}; break;
    case Family::Unclassified: q = {ClaimKind::None, 0}; break;
  }
  // Over Q(i) the -1 twist of E_p is E_p itself.
  return {q, doubled(q)};
}

bool ScanSpec::matches(Int p) const {
  if (const auto* fam = std::get_if<Families>(&select)) {
    const Family tag = classify_prime(p).tag;
    for (Family f : fam->tags)
      if (f == tag) return true;
    return false;
  }
  const auto& r = std::get<Residue>(select);
  return p % r.modulus == r.residue;
}

ScanSpec family_spec(std::string_view name) {
  using F = Family;
  std::vector<F> tags;
  if (name == "rank-zero") tags = {F::RankZero_7_23_mod40};
  else if (name == "rank-one") tags = {F::RankOne_40k3, F::RankOne_40k27};
  else if (name == "rank-one-3") tags = {F::RankOne_40k3};
  else if (name == "rank-one-27") tags = {F::RankOne_40k27};
  else if (name == "at-least-one") tags = {F::AtLeastOne_40k11, F::AtLeastOne_40k19};
  else if (name == "at-least-one-11") tags = {F::AtLeastOne_40k11};
  else if (name == "at-least-one-19") tags = {F::AtLeastOne_40k19};
  else if (name == "conjectured-two") tags = {F::Conjectured2_31_mod80};
  else if (name == "unclassified") tags = {F::Unclassified};
  else if (auto f = family_from_string(name)) tags = {*f};
  else throw std::invalid_argument("unknown family '" + std::string(name) + "'");
  return ScanSpec{ScanSpec::Families{std::move(tags)}};
}

ScanSpec residue_spec(Int modulus, Int residue) {
  if (modulus != 40 && modulus != 80) throw std::invalid_argument("residue scans use modulus 40 or 80");
  if (residue < 0 || residue >= modulus)
    throw std::invalid_argument("residue must lie in [0, " + std::to_string(modulus) + ")");
  return ScanSpec{ScanSpec::Residue{modulus, residue}};
}

std::vector<ScanEntry> scan(const ScanSpec& spec, Int limit) {
  std::vector<ScanEntry> out;
  for (Int p : intmath::primes_up_to(limit)) {
    if (p == 2 || !spec.matches(p)) continue;
    auto f = classify_prime(p);
    out.push_back({p, f, predicted_rank(f)});
  }
  return out;
}

Status judge(const RankClaim& claim, int lower, int upper) {
  switch (claim.kind) {
    case ClaimKind::Exactly:
      return lower == claim.value && upper == claim.value ? Status::Consistent : Status::Inconsistent;
    case ClaimKind::AtLeast:
      return lower >= claim.value ? Status::Consistent : Status::Inconsistent;
    case ClaimKind::Conjectured:
      if (lower >= claim.value) return Status::Consistent;
      return upper < claim.value ? Status::Inconsistent : Status::Unconfirmed;
    case ClaimKind::None:
      return Status::NoPrediction;
  }
  return Status::NoPrediction;
}

VerifyReport verify_with(Int p, rankbound::RankInterval interval) {
  VerifyReport r;
  r.p = p;
  r.family = classify_prime(p);
  r.prediction = predicted_rank(r.family);
  r.interval = std::move(interval);
  r.status = judge(r.prediction.over_q, r.interval.lower, r.interval.upper);
  r.conjecture_support = r.prediction.over_q.kind == ClaimKind::Conjectured &&
                         r.status == Status::Consistent;
  return r;
}

VerifyReport verify(Int p, const rankbound::DescentConfig& cfg) {
  classify_prime(p);
  return verify_with(p, rankbound::rank_interval(family_curve(p), cfg));
}

}  // namespace twodescent::families
