#include "bulb/exclusion.hpp"

#include <cmath>
#include <limits>

#include "bulb/errors.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string show(double x) { return std::isinf(x) ? "inf" : format_double(x); }

void check_m_alpha(double M, double alpha) {
  if (!(M >= 0.0) || std::isinf(M)) throw DomainError("exclusion: M must be finite and non-negative");
  if (!(alpha > -1.0) || std::isinf(alpha)) throw DomainError("exclusion: alpha must exceed -1");
}

}  // namespace

bool PInterval::contains(double p) const {
  if (std::isinf(p)) return closed_at_infinity;
  return p > lo && p < hi;
}

std::string PInterval::to_string() const {
  return "(" + show(lo) + ", " + show(hi) + (closed_at_infinity ? "]" : ")");
}

bool ExclusionRegion::contains(double p) const {
  for (const PInterval& i : excluded)
    if (i.contains(p)) return true;
  return false;
}

std::string ExclusionRegion::to_string() const {
  if (excluded.empty()) return "{}";
  std::string out;
  for (const PInterval& i : excluded) out += (out.empty() ? "" : " U ") + i.to_string();
  return out;
}

ExclusionRegion exclusion_region(double M, double alpha) {
  check_m_alpha(M, alpha);
  ExclusionRegion r;
  r.M = M;
  r.alpha = alpha;
  const double a1 = alpha + 1.0;
  r.p0 = 3.0 / (a1 * (1.0 + M));
  r.excluded.push_back({0.0, r.p0, false});
  if (M < 1.0) r.excluded.push_back({3.0 / (a1 * (1.0 - M)), kInf, true});
  r.contradiction = {0.0, 3.0 / (2.0 * a1), false};
  return r;
}

ExclusionVerdict exclusion_verdict(double M, double alpha, double p) {
  check_m_alpha(M, alpha);
  if (!(p > 0.0)) throw DomainError("exclusion: p must be positive");
  ExclusionVerdict v;
  v.M = M;
  v.alpha = alpha;
  v.p = p;
  v.q = std::isinf(p) ? 0.0 : 3.0 / ((alpha + 1.0) * p);
  v.threshold = std::abs(1.0 - v.q);
  v.excluded = M < v.threshold;
  v.in_contradiction_regime = v.q > 2.0;
  v.region = exclusion_region(M, alpha);
  return v;
}

ExclusionVerdict self_similar_exclusion(double grad_profile_sup, double p) {
  return exclusion_verdict(grad_profile_sup, 1.5, p);
}

std::string ExclusionVerdict::to_string() const {
  std::string out;
  out += "M=" + show(M) + " alpha=" + show(alpha) + " p=" + show(p) + "\n";
  out += "|1 - 3/((alpha+1)p)| = " + show(threshold) + "\n";
  out += std::string("excluded: ") + (excluded ? "yes" : "no") + "\n";
  out += "excluded p-region: " + region.to_string() + "\n";
  out += "p0 (sup of excluded p near 0): " + show(region.p0) + "\n";
  out += "ratio-bound contradiction region: " + region.contradiction.to_string() +
         (in_contradiction_regime ? " (p inside)" : " (p outside)") + "\n";
  return out;
}

}  // namespace bulb
