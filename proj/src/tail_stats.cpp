#include "econet/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "econet/error.hpp"

namespace econet {

namespace {

void check_sizes(std::span<const std::uint64_t> sizes) {
  if (sizes.empty()) throw StatsError("empty size sample");
  for (auto s : sizes)
    if (s == 0) throw StatsError("avalanche sizes must be >= 1");
}

// P(S >= s) under the shifted power law.
double model_ge(double s, double shift, double m_density) {
  return std::pow((s - 0.5) / shift, -(m_density - 1.0));
}

struct Distinct {
  std::vector<std::uint64_t> value;
  std::vector<std::size_t> suffix_count;  // size value.size() + 1
  std::vector<double> suffix_log;         // size value.size() + 1
};

Distinct tabulate(std::span<const std::uint64_t> sizes) {
  std::vector<std::uint64_t> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  Distinct d;
  std::vector<std::size_t> count;
  for (auto s : sorted) {
    if (d.value.empty() || d.value.back() != s) {
      d.value.push_back(s);
      count.push_back(0);
    }
    ++count.back();
  }
  const std::size_t k = d.value.size();
  d.suffix_count.assign(k + 1, 0);
  d.suffix_log.assign(k + 1, 0.0);
  for (std::size_t j = k; j-- > 0;) {
    d.suffix_count[j] = d.suffix_count[j + 1] + count[j];
    d.suffix_log[j] = d.suffix_log[j + 1] + static_cast<double>(count[j]) * std::log(static_cast<double>(d.value[j]));
  }
  return d;
}

// KS distance of the tail starting at distinct index k; the exponent comes
// from the suffix sums. Returns +inf for candidates that cannot be fitted.
double candidate_ks(const Distinct& d, std::size_t k) {
  const std::size_t n = d.suffix_count[k];
  if (n < kMinTail || k + 1 >= d.value.size()) return std::numeric_limits<double>::infinity();
  const double shift = static_cast<double>(d.value[k]) - 0.5;
  const double nd = static_cast<double>(n);
  const double m = 1.0 + nd / (d.suffix_log[k] - nd * std::log(shift));
  double ks = 0.0;
  for (std::size_t j = k; j < d.value.size(); ++j) {
    const double v = static_cast<double>(d.value[j]);
    const double e_ge = static_cast<double>(d.suffix_count[j]) / nd;
    const double e_gt = static_cast<double>(d.suffix_count[j + 1]) / nd;
    ks = std::max({ks, std::abs(e_ge - model_ge(v, shift, m)), std::abs(e_gt - model_ge(v + 1.0, shift, m))});
  }
  return ks;
}

std::uint64_t argmin_cutoff(const Distinct& d, const std::vector<double>& ks) {
  std::size_t best = ks.size();
  for (std::size_t k = 0; k < ks.size(); ++k)
    if (std::isfinite(ks[k]) && (best == ks.size() || ks[k] < ks[best])) best = k;
  if (best == ks.size()) throw StatsError("no cutoff leaves a fittable tail");
  return d.value[best];
}

}  // namespace

std::vector<CcdfPoint> ccdf(std::span<const std::uint64_t> sizes) {
  check_sizes(sizes);
  const Distinct d = tabulate(sizes);
  const double n = static_cast<double>(sizes.size());
  std::vector<CcdfPoint> out;
  out.reserve(d.value.size());
  for (std::size_t j = 0; j < d.value.size(); ++j)
    out.push_back({d.value[j], static_cast<double>(d.suffix_count[j + 1]) / n});
  return out;
}

TailFit fit_exponent(std::span<const std::uint64_t> sizes, std::uint64_t s_min) {
  if (s_min < 1) throw StatsError("s_min must be >= 1");
  const double shift = static_cast<double>(s_min) - 0.5;
  std::size_t n = 0;
  double log_sum = 0.0;
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (auto s : sizes) {
    if (s < s_min) continue;
    ++n;
    log_sum += std::log(static_cast<double>(s) / shift);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (n < kMinTail)
    throw StatsError("insufficient tail: " + std::to_string(n) + " samples >= s_min=" + std::to_string(s_min) +
                     ", need " + std::to_string(kMinTail));
  if (lo == hi || !(log_sum > 0.0)) throw StatsError("insufficient variation in tail: all sizes equal");

  TailFit fit;
  fit.s_min = s_min;
  fit.n_tail = n;
  fit.m_density = 1.0 + static_cast<double>(n) / log_sum;
  fit.m_ccdf = fit.m_density - 1.0;
  fit.m_err = (fit.m_density - 1.0) / std::sqrt(static_cast<double>(n));
  fit.ks = ks_distance(sizes, s_min, fit.m_density);
  return fit;
}

double continuous_mle(std::span<const double> xs, double x_min) {
  std::size_t n = 0;
  double log_sum = 0.0;
  for (double x : xs) {
    if (x < x_min) continue;
    ++n;
    log_sum += std::log(x / x_min);
  }
  if (n < kMinTail || !(log_sum > 0.0)) throw StatsError("continuous_mle: insufficient tail");
  return 1.0 + static_cast<double>(n) / log_sum;
}

double ks_distance(std::span<const std::uint64_t> sizes, std::uint64_t s_min, double m_density) {
  std::vector<std::uint64_t> tail;
  for (auto s : sizes)
    if (s >= s_min) tail.push_back(s);
  if (tail.empty()) throw StatsError("ks_distance: empty tail");
  std::sort(tail.begin(), tail.end());
  const double n = static_cast<double>(tail.size());
  const double shift = static_cast<double>(s_min) - 0.5;
  double ks = 0.0;
  for (std::size_t i = 0; i < tail.size();) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    const double v = static_cast<double>(tail[i]);
    const double e_ge = (n - static_cast<double>(i)) / n;
    const double e_gt = (n - static_cast<double>(j)) / n;
    ks = std::max({ks, std::abs(e_ge - model_ge(v, shift, m_density)),
                   std::abs(e_gt - model_ge(v + 1.0, shift, m_density))});
    i = j;
  }
  return ks;
}

std::uint64_t select_cutoff(std::span<const std::uint64_t> sizes) {
  check_sizes(sizes);
  if (sizes.size() < kMinCutoffSample)
    throw StatsError("select_cutoff needs >= " + std::to_string(kMinCutoffSample) + " samples, got " +
                     std::to_string(sizes.size()));
  const Distinct d = tabulate(sizes);
  const auto k = static_cast<std::ptrdiff_t>(d.value.size());
  std::vector<double> ks(d.value.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t j = 0; j < k; ++j) ks[static_cast<std::size_t>(j)] = candidate_ks(d, static_cast<std::size_t>(j));
  return argmin_cutoff(d, ks);
}

std::uint64_t select_cutoff_serial(std::span<const std::uint64_t> sizes) {
  check_sizes(sizes);
  if (sizes.size() < kMinCutoffSample)
    throw StatsError("select_cutoff needs >= " + std::to_string(kMinCutoffSample) + " samples, got " +
                     std::to_string(sizes.size()));
  std::vector<std::uint64_t> candidates(sizes.begin(), sizes.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  bool found = false;
  double best_ks = 0.0;
  std::uint64_t best = 0;
  for (auto c : candidates) {
    TailFit fit;
    try {
      fit = fit_exponent(sizes, c);
    } catch (const StatsError&) {
      continue;
    }
    if (!found || fit.ks < best_ks) {
      found = true;
      best_ks = fit.ks;
      best = c;
    }
  }
  if (!found) throw StatsError("no cutoff leaves a fittable tail");
  return best;
}

TailFit fit_tail(std::span<const std::uint64_t> sizes) { return fit_exponent(sizes, select_cutoff(sizes)); }

double bootstrap_error(std::span<const std::uint64_t> sizes, const TailFit& fit, std::size_t n_boot,
                       std::uint64_t seed) {
  if (n_boot < kMinBootstrap)
    throw StatsError("bootstrap_error needs n_boot >= " + std::to_string(kMinBootstrap));
  check_sizes(sizes);
  const std::size_t n = sizes.size();
  std::vector<double> est(n_boot, std::numeric_limits<double>::quiet_NaN());
  const auto reps = static_cast<std::ptrdiff_t>(n_boot);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<std::uint64_t> resample(n);
    for (auto& s : resample) s = sizes[rng.below(n)];
    try {
      est[static_cast<std::size_t>(r)] = fit_exponent(resample, fit.s_min).m_density;
    } catch (const StatsError&) {
    }
  }
  double sum = 0.0;
  std::size_t valid = 0;
  for (double e : est)
    if (std::isfinite(e)) {
      sum += e;
      ++valid;
    }
  if (valid < 2) throw StatsError("bootstrap_error: fewer than two resamples had a fittable tail");
  const double mean = sum / static_cast<double>(valid);
  double ss = 0.0;
  for (double e : est)
    if (std::isfinite(e)) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / static_cast<double>(valid - 1));
}

std::uint64_t sample_power_law(Rng& rng, double m_density, std::uint64_t s_min) {
  const double shift = static_cast<double>(s_min) - 0.5;
  const double x = shift * std::pow(1.0 - rng.uniform01(), -1.0 / (m_density - 1.0));
  if (!(x < 9.0e18)) return std::numeric_limits<std::uint64_t>::max() / 2;
  return static_cast<std::uint64_t>(std::floor(x + 0.5));
}

double ks_pvalue(const TailFit& fit, std::size_t n_sims, std::uint64_t seed) {
  if (n_sims == 0) throw StatsError("ks_pvalue needs n_sims >= 1");
  std::vector<std::uint8_t> exceed(n_sims, 0);
  const auto sims = static_cast<std::ptrdiff_t>(n_sims);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < sims; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<std::uint64_t> synth(fit.n_tail);
    for (auto& s : synth) s = sample_power_law(rng, fit.m_density, fit.s_min);
    try {
      exceed[static_cast<std::size_t>(r)] = fit_exponent(synth, fit.s_min).ks >= fit.ks ? 1 : 0;
    } catch (const StatsError&) {
      exceed[static_cast<std::size_t>(r)] = 1;
    }
  }
  const auto hits = std::accumulate(exceed.begin(), exceed.end(), std::size_t{0});
  return static_cast<double>(hits) / static_cast<double>(n_sims);
}

double regression_exponent(std::span<const std::uint64_t> sizes, std::uint64_t s_min) {
  std::vector<double> xs, ys;
  for (const auto& p : ccdf(sizes)) {
    if (p.s < s_min || p.pc <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(p.s)));
    ys.push_back(std::log(p.pc));
  }
  if (xs.size() < 2) throw StatsError("regression_exponent: fewer than two CCDF points in range");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw StatsError("regression_exponent: degenerate abscissa");
  return -sxy / sxx;
}

}  // namespace econet
