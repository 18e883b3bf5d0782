#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "econet/rng.hpp"

namespace econet {

// Power-law fit of an avalanche-size tail.
//
// Two exponents are carried explicitly: m_density is the exponent of the
// size density p(s) ~ s^-m_density; m_ccdf = m_density - 1 is the exponent of
// the complementary cumulative distribution P_c(s) ~ s^-m_ccdf.
struct TailFit {
  double m_density = 0.0;
  double m_ccdf = 0.0;
  double m_err = 0.0;  // analytic standard error, (m_density - 1) / sqrt(n_tail)
  std::uint64_t s_min = 1;
  double ks = 0.0;
  std::size_t n_tail = 0;

  friend bool operator==(const TailFit&, const TailFit&) = default;
};

inline constexpr std::size_t kMinTail = 10;
inline constexpr std::size_t kMinCutoffSample = 50;
inline constexpr std::size_t kMinBootstrap = 100;

struct CcdfPoint {
  std::uint64_t s;
  double pc;  // fraction of the sample strictly larger than s
};

// Empirical CCDF at every distinct size, ascending. Throws StatsError on an
// empty sample or a zero size.
std::vector<CcdfPoint> ccdf(std::span<const std::uint64_t> sizes);

// Continuous-approximation maximum likelihood with the discreteness shift:
//   m = 1 + n / sum ln(s_i / (s_min - 1/2)),  s_i >= s_min.
// Throws StatsError with fewer than kMinTail tail samples or a zero log-sum.
TailFit fit_exponent(std::span<const std::uint64_t> sizes, std::uint64_t s_min);

// Purely continuous MLE, 1 + n / sum ln(x_i / x_min) over x_i >= x_min.
double continuous_mle(std::span<const double> xs, double x_min);

// KS distance between the empirical tail (s >= s_min) and the shifted
// power law P(S >= s) = ((s - 1/2) / (s_min - 1/2))^-(m_density - 1),
// evaluated exactly over the integers.
double ks_distance(std::span<const std::uint64_t> sizes, std::uint64_t s_min, double m_density);

// Cutoff minimising the KS distance over the distinct observed sizes that
// leave at least kMinTail samples in the tail. Needs kMinCutoffSample samples.
// Uses sorted prefix sums and an OpenMP scan over candidates.
std::uint64_t select_cutoff(std::span<const std::uint64_t> sizes);
// Reference implementation: refits and recomputes KS from scratch for every
// candidate, sequentially. Same contract and result as select_cutoff.
std::uint64_t select_cutoff_serial(std::span<const std::uint64_t> sizes);

// select_cutoff followed by fit_exponent.
TailFit fit_tail(std::span<const std::uint64_t> sizes);

// Standard deviation of m_density over n_boot resamples with replacement,
// refitted at fit.s_min. Replica r draws from derive_seed(seed, r), so the
// result does not depend on the thread count. n_boot >= kMinBootstrap.
double bootstrap_error(std::span<const std::uint64_t> sizes, const TailFit& fit, std::size_t n_boot,
                       std::uint64_t seed);

// Goodness-of-fit p-value: the fraction of n_sims synthetic tails, drawn
// from the fitted law and refitted at the same s_min, whose KS distance is
// at least fit.ks. Small values reject the power-law hypothesis.
double ks_pvalue(const TailFit& fit, std::size_t n_sims, std::uint64_t seed);

// Least-squares slope of log P_c(s) against log s over sizes >= s_min with
// P_c(s) > 0, returned as a positive CCDF exponent.
double regression_exponent(std::span<const std::uint64_t> sizes, std::uint64_t s_min);

// Draws from the shifted continuous power law used by the estimator:
// s = round((s_min - 1/2) * (1 - u)^(-1 / (m_density - 1))).
std::uint64_t sample_power_law(Rng& rng, double m_density, std::uint64_t s_min);

}  // namespace econet
