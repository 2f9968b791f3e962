#pragma once

#include <string>
#include <vector>

namespace bulb {

/// Open interval (lo, hi) of exponents p; hi may be infinite, and `closed_at_infinity` adds p = infinity itself.
struct PInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_at_infinity = false;

  bool contains(double p) const;
  std::string to_string() const;
};

/// Exponents p for which blow-up with gradient bound M is ruled out, for a given alpha.
///
/// With q = 3 / ((alpha + 1) p) (q = 0 at p = infinity) the condition is M < |1 - q|,
/// which gives p < 3 / ((alpha + 1)(1 + M)) and, when M < 1, p > 3 / ((alpha + 1)(1 - M)).
struct ExclusionRegion {
  double M = 0.0;
  double alpha = 0.0;
  std::vector<PInterval> excluded;
  /// Supremum of the excluded interval adjacent to p = 0.
  double p0 = 0.0;
  /// Range where the renormalized ratio bound has a positive exponent: p < 3 / (2 (alpha + 1)).
  PInterval contradiction;

  bool contains(double p) const;
  std::string to_string() const;
};

ExclusionRegion exclusion_region(double M, double alpha);

struct ExclusionVerdict {
  double M = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double q = 0.0;
  /// |1 - q|; blow-up is excluded when M is strictly below it.
  double threshold = 0.0;
  bool excluded = false;
  bool in_contradiction_regime = false;
  ExclusionRegion region;

  std::string to_string() const;
};

/// Throws DomainError unless M >= 0, alpha > -1 and p > 0 (infinity allowed).
ExclusionVerdict exclusion_verdict(double M, double alpha, double p);

/// Exclusion for self-similar profiles, where the similarity exponent is fixed at alpha = 3/2
/// and M is the sup norm of the profile gradient.
ExclusionVerdict self_similar_exclusion(double grad_profile_sup, double p);

}  // namespace bulb
