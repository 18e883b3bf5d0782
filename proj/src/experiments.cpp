#include "econet/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <string>

#include "econet/error.hpp"

namespace econet {

void RunConfig::validate() const {
  dynamics.validate();
  measure.validate();
  if (total_steps < 1) throw ConfigError("run.total_steps must be >= 1");
  if (transient < 0 || transient >= total_steps) throw ConfigError("run.transient must lie in [0, total_steps)");
  if (replicas < 1) throw ConfigError("run.replicas must be >= 1");
  if (audit_every < 0) throw ConfigError("run.audit_every must be >= 0");
}

std::uint64_t cell_key(std::uint32_t agents, double c_th) noexcept {
  return mix64(agents) ^ std::bit_cast<std::uint64_t>(c_th);
}

std::uint64_t replica_seed(const RunConfig& config, std::uint32_t replica) noexcept {
  return derive_seed(config.seed, cell_key(config.dynamics.agents, config.dynamics.c_th), replica);
}

ReplicaResult run_replica(const RunConfig& config, std::uint32_t replica) {
  config.validate();
  ReplicaResult out;
  out.replica = replica;
  out.seed = replica_seed(config, replica);

  Simulation sim(config.dynamics, out.seed);
  const auto initial_edges = sim.network().edges_created();

  TimeSeries u;
  u.t.reserve(static_cast<std::size_t>(config.total_steps));
  u.v.reserve(static_cast<std::size_t>(config.total_steps));
  for (std::int64_t k = 0; k < config.total_steps; ++k) {
    const StepRecord rec = sim.step();
    u.push(rec.time, rec.u_t);
    if (rec.avalanche) {
      out.edges_severed += rec.avalanche->size;
      if (rec.time > config.transient)
        out.avalanches.push_back({rec.time, rec.avalanche->size,
                                  static_cast<std::uint32_t>(rec.avalanche->bankrupt_agents.size()),
                                  rec.avalanche->generations});
    }
    if (config.audit_every > 0 && rec.time % config.audit_every == 0) {
      const double full = overall_product(sim.network());
      const double rel = std::abs(rec.u_t - full) / std::max(std::abs(full), 1.0);
      out.audit_max_rel_error = std::max(out.audit_max_rel_error, rel);
      ++out.audits;
    }
  }
  out.edges_created = sim.network().edges_created() - initial_edges;
  out.live_edges = sim.network().edge_count();

  const TimeSeries omega = business_level(u, config.measure, config.dynamics.agents);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < omega.size(); ++k)
    if (omega.t[k] > config.transient) {
      sum += omega.v[k];
      ++count;
    }
  if (count == 0)
    throw ConfigError("no complete Omega window after the transient; shorten measure.window or run longer");
  out.omega_mean = sum / static_cast<double>(count);
  out.u_series = decimate(u, config.measure.sample_every);
  out.omega_series = decimate(omega, config.measure.sample_every);
  return out;
}

RunResult pool_replicas(const RunConfig& config, std::vector<ReplicaResult> replicas) {
  RunResult res;
  res.config = config;
  if (replicas.empty()) throw ConfigError("pool_replicas: no replicas");
  std::vector<std::uint64_t> sizes;
  for (auto& r : replicas) {
    res.replica_omega.push_back(r.omega_mean);
    res.audit_max_rel_error = std::max(res.audit_max_rel_error, r.audit_max_rel_error);
    for (const auto& a : r.avalanches) sizes.push_back(a.size);
    res.avalanches.insert(res.avalanches.end(), r.avalanches.begin(), r.avalanches.end());
  }
  res.omega_mean = std::accumulate(res.replica_omega.begin(), res.replica_omega.end(), 0.0) /
                   static_cast<double>(res.replica_omega.size());
  res.u_series = std::move(replicas.front().u_series);
  res.omega_series = std::move(replicas.front().omega_series);
  try {
    res.fit = fit_tail(sizes);
  } catch (const StatsError& e) {
    res.fit_warning = e.what();
  }
  return res;
}

namespace {

// Runs job(i) for i in [0, n) concurrently; the first exception (by index)
// is rethrown after all jobs finish unless `capture` is given.
template <class Job>
std::vector<std::exception_ptr> run_jobs(std::size_t n, Job&& job) {
  std::vector<std::exception_ptr> errors(n);
  const auto jobs = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < jobs; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  return errors;
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

RunConfig cell_config(const RunConfig& base, std::uint32_t agents, double c_th) {
  RunConfig cfg = base;
  cfg.dynamics.agents = agents;
  cfg.dynamics.c_th = c_th;
  return cfg;
}

SurfaceCell to_cell(const RunResult& r) {
  SurfaceCell cell;
  cell.agents = r.config.dynamics.agents;
  cell.c_th = r.config.dynamics.c_th;
  cell.omega_mean = r.omega_mean;
  cell.ran = true;
  if (r.fit) {
    cell.m_ccdf = r.fit->m_ccdf;
    cell.m_err = r.fit->m_err;
    cell.n_tail = r.fit->n_tail;
    cell.ok = true;
  } else {
    cell.error = r.fit_warning;
  }
  return cell;
}

SweepSurface finish_surface(SweepSurface s) {
  try {
    return normalize_surface(s);
  } catch (const StatsError&) {
    return s;
  }
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  std::vector<ReplicaResult> reps(config.replicas);
  auto errors = run_jobs(reps.size(), [&](std::size_t r) { reps[r] = run_replica(config, static_cast<std::uint32_t>(r)); });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return pool_replicas(config, std::move(reps));
}

SweepSurface sweep(std::span<const std::uint32_t> agent_values, std::span<const double> c_th_values,
                   const RunConfig& base) {
  if (agent_values.empty() || c_th_values.empty()) throw ConfigError("sweep: empty grid");
  std::vector<RunConfig> cells;
  for (auto l : agent_values)
    for (auto c : c_th_values) cells.push_back(cell_config(base, l, c));
  const std::size_t reps = base.replicas;

  std::vector<std::vector<ReplicaResult>> results(cells.size(), std::vector<ReplicaResult>(reps));
  auto errors = run_jobs(cells.size() * reps, [&](std::size_t job) {
    const std::size_t cell = job / reps;
    const std::size_t r = job % reps;
    results[cell][r] = run_replica(cells[cell], static_cast<std::uint32_t>(r));
  });

  SweepSurface surface;
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    std::string failure;
    for (std::size_t r = 0; r < reps && failure.empty(); ++r)
      if (errors[cell * reps + r]) failure = describe(errors[cell * reps + r]);
    if (!failure.empty()) {
      SurfaceCell c;
      c.agents = cells[cell].dynamics.agents;
      c.c_th = cells[cell].dynamics.c_th;
      c.error = failure;
      surface.grid.push_back(c);
      continue;
    }
    surface.grid.push_back(to_cell(pool_replicas(cells[cell], std::move(results[cell]))));
  }
  return finish_surface(std::move(surface));
}

SweepSurface sweep_serial(std::span<const std::uint32_t> agent_values, std::span<const double> c_th_values,
                          const RunConfig& base) {
  if (agent_values.empty() || c_th_values.empty()) throw ConfigError("sweep: empty grid");
  SweepSurface surface;
  for (auto l : agent_values)
    for (auto c : c_th_values) {
      const RunConfig cfg = cell_config(base, l, c);
      try {
        std::vector<ReplicaResult> reps;
        for (std::uint32_t r = 0; r < cfg.replicas; ++r) reps.push_back(run_replica(cfg, r));
        surface.grid.push_back(to_cell(pool_replicas(cfg, std::move(reps))));
      } catch (const std::exception& e) {
        SurfaceCell cell;
        cell.agents = l;
        cell.c_th = c;
        cell.error = e.what();
        surface.grid.push_back(cell);
      }
    }
  return finish_surface(std::move(surface));
}

SweepSurface normalize_surface(SweepSurface surface) {
  std::vector<double> ms, omegas;
  for (const auto& c : surface.grid)
    if (c.ok) {
      ms.push_back(c.m_ccdf);
      omegas.push_back(c.omega_mean);
    }
  auto [m_lo, m_hi] = std::minmax_element(ms.begin(), ms.end());
  auto [o_lo, o_hi] = std::minmax_element(omegas.begin(), omegas.end());
  if (ms.empty() || *m_lo == *m_hi) throw StatsError("normalize_surface: m_ccdf is constant over the grid");
  if (*o_lo == *o_hi) throw StatsError("normalize_surface: omega_mean is constant over the grid");

  Normalization n{true, *m_lo, *m_hi, *o_lo, *o_hi};
  for (auto& c : surface.grid) {
    if (!c.ok) continue;
    c.m_norm = (c.m_ccdf - n.m_min) / (n.m_max - n.m_min);
    c.omega_norm = (c.omega_mean - n.omega_min) / (n.omega_max - n.omega_min);
  }
  surface.normalization = n;
  return surface;
}

double denormalize_m(const Normalization& n, double m_norm) noexcept {
  return n.m_min + m_norm * (n.m_max - n.m_min);
}

double denormalize_omega(const Normalization& n, double omega_norm) noexcept {
  return n.omega_min + omega_norm * (n.omega_max - n.omega_min);
}

LSearchResult find_L_for_omega(double omega_target, const LSearch& search, const OmegaOfL& omega_of_L) {
  if (search.agents_min < 2 || search.agents_min >= search.agents_max)
    throw ConfigError("search bracket must satisfy 2 <= L_min < L_max");
  if (!(search.rel_tol >= 0.0)) throw ConfigError("search.rel_tol must be >= 0");

  LSearchResult res;
  std::map<std::uint32_t, double> memo;
  auto eval = [&](std::uint32_t l) {
    if (auto it = memo.find(l); it != memo.end()) return it->second;
    const double w = omega_of_L(l);
    memo.emplace(l, w);
    res.evaluations.emplace_back(l, w);
    return w;
  };
  const double tol = search.rel_tol * std::abs(omega_target);
  auto gap = [&](double w) { return std::abs(w - omega_target); };
  auto finish = [&](std::uint32_t l) {
    res.agents = l;
    res.omega = memo.at(l);
    res.within_tolerance = gap(res.omega) <= tol;
    return res;
  };

  std::uint32_t lo = search.agents_min;
  std::uint32_t hi = search.agents_max;
  const double w_lo = eval(lo);
  if (gap(w_lo) <= tol) return finish(lo);
  const double w_hi = eval(hi);
  if (gap(w_hi) <= tol) return finish(hi);
  if (!(w_lo >= omega_target && omega_target >= w_hi))
    throw StatsError("find_L_for_omega: target " + std::to_string(omega_target) + " outside [Omega(L_max)=" +
                     std::to_string(w_hi) + ", Omega(L_min)=" + std::to_string(w_lo) + "]");

  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    ++res.bisection_evals;
    if (eval(mid) >= omega_target)
      lo = mid;
    else
      hi = mid;
  }
  const std::uint32_t scan_lo = std::max(search.agents_min, lo > search.scan_radius ? lo - search.scan_radius : 0u);
  const std::uint32_t scan_hi = std::min(search.agents_max, hi + search.scan_radius);
  for (std::uint32_t l = scan_lo; l <= scan_hi; ++l) eval(l);

  for (const auto& [l, w] : memo)  // ascending L
    if (gap(w) <= tol) return finish(l);
  return finish(gap(memo.at(lo)) <= gap(memo.at(hi)) ? lo : hi);
}

LSearchResult find_L_for_omega(double c_th, double omega_target, const RunConfig& base, const LSearch& search) {
  return find_L_for_omega(omega_target, search, [&](std::uint32_t l) {
    RunConfig cfg = cell_config(base, l, c_th);
    if (search.replicas > 0) cfg.replicas = search.replicas;
    return run(cfg).omega_mean;
  });
}

ScenarioReport scenario_triplet(const RunConfig& f0, double c_th_final, const LSearch& search) {
  if (!(c_th_final >= f0.dynamics.c_th))
    throw ConfigError("scenario: final c_th must not be below the initial c_th");
  ScenarioReport rep;
  rep.c_th_initial = f0.dynamics.c_th;
  rep.c_th_final = c_th_final;
  rep.f0 = run(f0);
  rep.f_l = run(cell_config(f0, f0.dynamics.agents, c_th_final));
  rep.search = find_L_for_omega(c_th_final, rep.f0.omega_mean, f0, search);
  rep.f_omega = run(cell_config(f0, rep.search.agents, c_th_final));
  if (rep.f0.fit && rep.f_l.fit && rep.f_omega.fit) {
    const auto& a = *rep.f0.fit;
    const auto& b = *rep.f_l.fit;
    const auto& c = *rep.f_omega.fit;
    const double combined = std::sqrt(a.m_err * a.m_err + c.m_err * c.m_err);
    rep.ordering_ok = b.m_ccdf > a.m_ccdf && c.m_ccdf <= a.m_ccdf + combined;
  }
  return rep;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw StatsError("rank correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw StatsError("spearman_rho: need two equal-length samples, n >= 2");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double spearman_pvalue_exact(std::span<const double> x, std::span<const double> y) {
  if (x.size() > 10) throw StatsError("spearman_pvalue_exact: n > 10 not supported");
  const double observed = spearman_rho(x, y);
  const auto rx = ranks(x);
  auto ry = ranks(y);
  std::sort(ry.begin(), ry.end());
  std::size_t total = 0, hits = 0;
  do {
    ++total;
    if (pearson(rx, ry) >= observed - 1e-12) ++hits;
  } while (std::next_permutation(ry.begin(), ry.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace econet
