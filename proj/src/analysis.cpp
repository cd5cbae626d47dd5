#include "mme/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "mme/errors.hpp"

namespace mme {

ProportionEstimate wilson_interval(std::uint64_t successes,
                                   std::uint64_t trials, double z) {
  if (trials == 0) throw EmptyTallyError();
  if (successes > trials) throw DomainError("successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

  ProportionEstimate est{p, trials, centre - half, centre + half};
  // Exact boundaries, and guard the ordering against rounding.
  est.ci_low = successes == 0 ? 0.0 : std::clamp(est.ci_low, 0.0, p);
  est.ci_high = successes == trials ? 1.0 : std::clamp(est.ci_high, p, 1.0);
  return est;
}

ProportionEstimate estimate_p_same(const Tally& t) {
  return wilson_interval(t.n_same, t.n_postselected);
}

ShiftTest two_proportion_z(const Tally& before, const Tally& after,
                           double threshold) {
  ShiftTest test;
  test.p_before = estimate_p_same(before);
  test.p_after = estimate_p_same(after);
  test.threshold = threshold;

  const double n1 = static_cast<double>(before.n_postselected);
  const double n2 = static_cast<double>(after.n_postselected);
  const double pooled = static_cast<double>(before.n_same + after.n_same) / (n1 + n2);
  const double var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2);
  const double diff = test.p_before.p_hat - test.p_after.p_hat;
  if (var > 0.0) {
    test.z = diff / std::sqrt(var);
  } else {
    // Both samples all-same or all-diff: either identical or infinitely apart.
    test.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  }
  test.significant = std::abs(test.z) >= threshold;
  return test;
}

std::uint64_t required_n_per_arm(double p1, double p2, double sigma) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0)) {
    throw DomainError(fmt::format("proportions must lie in (0, 1): {}, {}", p1, p2));
  }
  if (p1 == p2) throw DomainError("p1 == p2: no sample size separates them");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be finite and non-negative");
  }
  const double d2 = (p1 - p2) * (p1 - p2);
  const double rhs = sigma * sigma * (p1 * (1.0 - p1) + p2 * (1.0 - p2));
  // d^2 n >= rhs, with a relative slack so exact rational thresholds survive
  // rounding.
  auto passes = [&](std::uint64_t n) {
    return d2 * static_cast<double>(n) >= rhs * (1.0 - 1e-12);
  };
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::ceil(rhs / d2)));
  while (n > 1 && passes(n - 1)) --n;
  while (!passes(n)) ++n;
  return n;
}

double correlator(const Tally& t) {
  if (t.n_postselected == 0) throw EmptyTallyError();
  return (static_cast<double>(t.n_same) - static_cast<double>(t.n_diff)) /
         static_cast<double>(t.n_postselected);
}

ChshResult chsh(const std::array<Tally, 4>& tallies, ChshSign sign) {
  ChshResult r;
  std::array<double, 4> e{};
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    e[i] = correlator(tallies[i]);
    var += (1.0 - e[i] * e[i]) / static_cast<double>(tallies[i].n_postselected);
  }
  r.e11 = e[0];
  r.e12 = e[1];
  r.e21 = e[2];
  r.e22 = e[3];
  const auto minus = static_cast<std::size_t>(sign);
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += i == minus ? -e[i] : e[i];
  r.s_value = std::abs(s);
  r.std_error = std::sqrt(var);
  return r;
}

HomogeneityTest homogeneity_test(std::span<const Tally> tallies) {
  if (tallies.size() < 2) throw DomainError("need at least two tallies");
  std::uint64_t same = 0;
  std::uint64_t total = 0;
  for (const Tally& t : tallies) {
    if (t.n_postselected == 0) throw EmptyTallyError();
    same += t.n_same;
    total += t.n_postselected;
  }
  const double p = static_cast<double>(same) / static_cast<double>(total);
  HomogeneityTest out;
  out.dof = tallies.size() - 1;
  if (p == 0.0 || p == 1.0) return out;  // all cells agree trivially
  for (const Tally& t : tallies) {
    const double n = static_cast<double>(t.n_postselected);
    const double dev = static_cast<double>(t.n_same) - n * p;
    out.chi_square += dev * dev / (n * p * (1.0 - p));
  }
  const boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.chi_square));
  return out;
}

double two_sided_tail(double sigma) {
  const boost::math::normal unit;
  return 2.0 * boost::math::cdf(boost::math::complement(unit, std::abs(sigma)));
}

}  // namespace mme
