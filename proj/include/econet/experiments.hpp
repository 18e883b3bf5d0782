#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "econet/dynamics.hpp"
#include "econet/measures.hpp"
#include "econet/tail_stats.hpp"

namespace econet {

struct RunConfig {
  DynamicsParams dynamics;
  MeasureParams measure;
  std::int64_t total_steps = 1'500'000;
  std::int64_t transient = 100'000;
  std::uint64_t seed = 1;
  std::uint32_t replicas = 8;
  std::int64_t audit_every = 10'000;  // 0 disables the incremental-product audit

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// One line of the avalanche log.
struct AvalancheSummary {
  std::int64_t t = 0;
  std::uint64_t size = 0;
  std::uint32_t n_agents = 0;
  std::uint32_t generations = 0;

  friend bool operator==(const AvalancheSummary&, const AvalancheSummary&) = default;
};

struct ReplicaResult {
  std::uint32_t replica = 0;
  std::uint64_t seed = 0;
  double omega_mean = 0.0;
  TimeSeries u_series;      // decimated
  TimeSeries omega_series;  // decimated
  std::vector<AvalancheSummary> avalanches;  // post-transient only
  double audit_max_rel_error = 0.0;
  std::size_t audits = 0;
  std::uint64_t edges_created = 0;
  std::uint64_t edges_severed = 0;
  std::uint64_t live_edges = 0;
};

struct RunResult {
  RunConfig config;
  double omega_mean = 0.0;  // mean over replicas of the post-transient Omega average
  std::vector<double> replica_omega;
  TimeSeries u_series;      // replica 0
  TimeSeries omega_series;  // replica 0
  std::vector<AvalancheSummary> avalanches;  // pooled in replica order
  std::optional<TailFit> fit;
  std::string fit_warning;  // set when the pooled tail could not be fitted
  double audit_max_rel_error = 0.0;
};

// Seed of one replica of the (L, c_th) cell:
//   derive_seed(master, cell_key(L, c_th), replica)
// with cell_key(L, c_th) = mix64(L) ^ bit pattern of c_th (IEEE-754 binary64).
std::uint64_t cell_key(std::uint32_t agents, double c_th) noexcept;
std::uint64_t replica_seed(const RunConfig& config, std::uint32_t replica) noexcept;

// One independent simulation: initialize, total_steps of step(), audit the
// incremental overall product every audit_every steps, keep post-transient
// avalanches (trigger time > transient) and Omega.
ReplicaResult run_replica(const RunConfig& config, std::uint32_t replica);

// Pools replica results (in replica order) and fits the avalanche tail.
RunResult pool_replicas(const RunConfig& config, std::vector<ReplicaResult> replicas);

// All replicas of one configuration; replicas run concurrently.
RunResult run(const RunConfig& config);

struct SurfaceCell {
  std::uint32_t agents = 0;
  double c_th = 0.0;
  double m_ccdf = 0.0;
  double m_err = 0.0;
  double omega_mean = 0.0;
  std::size_t n_tail = 0;
  bool ran = false;  // the runs completed, so omega_mean is valid
  bool ok = false;   // ran and the pooled tail was fittable
  std::string error;
  double m_norm = 0.0;
  double omega_norm = 0.0;
};

struct Normalization {
  bool applied = false;
  double m_min = 0.0, m_max = 0.0;
  double omega_min = 0.0, omega_max = 0.0;
};

struct SweepSurface {
  std::vector<SurfaceCell> grid;  // L-major, in the order of the input grids
  Normalization normalization;
};

// One pooled run per (L, c_th) cell. Every (cell, replica) pair is an
// independent job; jobs run concurrently and are reduced by index, so the
// surface is bit-identical to sweep_serial. Normalizes when possible.
SweepSurface sweep(std::span<const std::uint32_t> agent_values, std::span<const double> c_th_values,
                   const RunConfig& base);
// Reference: cells one after another through run().
SweepSurface sweep_serial(std::span<const std::uint32_t> agent_values, std::span<const double> c_th_values,
                          const RunConfig& base);

// Affine rescale of m_ccdf and omega_mean over the ok cells onto [0, 1].
// Throws StatsError if either quantity has fewer than two distinct values.
SweepSurface normalize_surface(SweepSurface surface);
double denormalize_m(const Normalization& n, double m_norm) noexcept;
double denormalize_omega(const Normalization& n, double omega_norm) noexcept;

struct LSearch {
  std::uint32_t agents_min = 500;
  std::uint32_t agents_max = 2000;
  double rel_tol = 0.02;
  std::uint32_t scan_radius = 2;
  std::uint32_t replicas = 0;  // 0: use the base configuration's replica count

  friend bool operator==(const LSearch&, const LSearch&) = default;
};

struct LSearchResult {
  std::uint32_t agents = 0;
  double omega = 0.0;
  bool within_tolerance = false;
  std::size_t bisection_evals = 0;
  std::vector<std::pair<std::uint32_t, double>> evaluations;  // in evaluation order
};

using OmegaOfL = std::function<double(std::uint32_t)>;

// Integer bisection for Omega(L) = target on a decreasing Omega, then a scan
// of +-scan_radius around the final bracket. Returns the smallest evaluated L
// within rel_tol of the target, otherwise whichever end of the final
// bracket has the smaller gap. An endpoint within tolerance is returned immediately. Throws
// StatsError if the target lies outside [Omega(L_max), Omega(L_min)] by more
// than the tolerance.
LSearchResult find_L_for_omega(double omega_target, const LSearch& search, const OmegaOfL& omega_of_L);
// Same, evaluating Omega(L) as the replica-averaged omega_mean of run().
LSearchResult find_L_for_omega(double c_th, double omega_target, const RunConfig& base, const LSearch& search);

struct ScenarioReport {
  double c_th_initial = 0.0;
  double c_th_final = 0.0;
  RunResult f0;       // reference state
  RunResult f_l;      // raised threshold, same L
  RunResult f_omega;  // raised threshold, L adapted to keep Omega
  LSearchResult search;
  bool ordering_ok = false;  // m(F_L) > m(F_0) and m(F_Omega) <= m(F_0) + combined error
};

// Throws ConfigError unless c_th_final >= F0's c_th.
ScenarioReport scenario_triplet(const RunConfig& f0, double c_th_final, const LSearch& search);

// Spearman rank correlation (average ranks for ties) and its exact one-sided
// permutation p-value P(rho' >= rho) under independence, for n <= 10.
double spearman_rho(std::span<const double> x, std::span<const double> y);
double spearman_pvalue_exact(std::span<const double> x, std::span<const double> y);

}  // namespace econet
