#pragma once

// Estimates and decisions over coincidence tallies.

#include <array>
#include <cstdint>
#include <span>

#include "mme/montecarlo.hpp"

namespace mme {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct ProportionEstimate {
  double p_hat = 0.0;
  std::uint64_t n = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ShiftTest {
  ProportionEstimate p_before;
  ProportionEstimate p_after;
  double z = 0.0;  // positive when p_before > p_after
  double threshold = 5.0;
  bool significant = false;
};

/// Which CHSH correlator carries the minus sign.
enum class ChshSign { SubtractE11, SubtractE12, SubtractE21, SubtractE22 };

struct ChshResult {
  double e11 = 0.0;
  double e12 = 0.0;
  double e21 = 0.0;
  double e22 = 0.0;
  double s_value = 0.0;
  double std_error = 0.0;  // combined binomial standard error of s_value
};

/// Wilson score interval for `successes` out of `trials`.
ProportionEstimate wilson_interval(std::uint64_t successes,
                                   std::uint64_t trials, double z = kZ95);

/// P(a=b) from the post-selected counts. Throws EmptyTallyError.
ProportionEstimate estimate_p_same(const Tally& t);

/// Pooled two-proportion z test of p_same between two tallies.
ShiftTest two_proportion_z(const Tally& before, const Tally& after,
                           double threshold = 5.0);

/// Smallest n per arm with |p1 - p2| / sqrt((p1 q1 + p2 q2)/n) >= sigma.
std::uint64_t required_n_per_arm(double p1, double p2, double sigma);

/// Correlator E = (n_same - n_diff) / n_postselected.
double correlator(const Tally& t);

/// CHSH combination of tallies ordered (a1,b1), (a1,b2), (a2,b1), (a2,b2):
/// |E11 + E12 + E21 + E22| with the `sign` term negated.
ChshResult chsh(const std::array<Tally, 4>& tallies,
                ChshSign sign = ChshSign::SubtractE22);

/// Pearson chi-square test that all tallies share one p_same.
struct HomogeneityTest {
  double chi_square = 0.0;
  std::uint64_t dof = 0;
  double p_value = 1.0;
};

HomogeneityTest homogeneity_test(std::span<const Tally> tallies);

/// Two-sided normal tail probability for a k-sigma excursion.
double two_sided_tail(double sigma);

}  // namespace mme
