// econet: command-line front end for runs, sweeps, scenarios and tail fits.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error,
// 4 scenario ordering check failed.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "econet/config.hpp"
#include "econet/error.hpp"
#include "econet/experiments.hpp"
#include "econet/io.hpp"

namespace fs = std::filesystem;
using namespace econet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCheck = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string input;
  bool quiet = false;
  bool verbose = false;
};

class Log {
 public:
  explicit Log(const Options& o) : level_(o.quiet ? 0 : (o.verbose ? 2 : 1)) {}
  template <class... Args>
  void info(const Args&... args) const {
    if (level_ >= 1) emit(args...);
  }
  template <class... Args>
  void debug(const Args&... args) const {
    if (level_ >= 2) emit(args...);
  }

 private:
  template <class... Args>
  void emit(const Args&... args) const {
    const auto s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::cerr << "[econet " << std::fixed;
    std::cerr.precision(1);
    std::cerr << s << "s] ";
    std::cerr.unsetf(std::ios::floatfield);
    std::cerr.precision(6);
    (std::cerr << ... << args) << '\n';
  }
  int level_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExperimentConfig effective_config(const Options& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) c.run.seed = *o.seed;
  c.validate();
  return c;
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out_dir.value_or("."));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void persist_config(const fs::path& dir, const ExperimentConfig& c) {
  open_out(dir / "config.cfg") << emit_config(c);
}

Provenance provenance(const ExperimentConfig& c) { return {config_hash(c), c.run.seed}; }

int cmd_run(const Options& o) {
  const Log log(o);
  const auto config = effective_config(o);
  const auto dir = prepare_out(o);
  const auto prov = provenance(config);
  persist_config(dir, config);
  log.info("run: L=", config.run.dynamics.agents, " c_th=", config.run.dynamics.c_th, " replicas=",
           config.run.replicas, " steps=", config.run.total_steps);

  const RunResult r = run(config.run);
  auto u_os = open_out(dir / "u_t.csv");
  write_series_csv(u_os, r.u_series, "u_t", prov);
  auto w_os = open_out(dir / "omega.csv");
  write_series_csv(w_os, r.omega_series, "omega", prov);
  auto a_os = open_out(dir / "avalanches.jsonl");
  write_avalanches_jsonl(a_os, r.avalanches, prov);
  open_out(dir / "fit.json") << fit_document(r.fit, r.fit_warning, prov).dump(2) << '\n';
  if (!r.avalanches.empty()) {
    std::vector<std::uint64_t> sizes;
    for (const auto& a : r.avalanches) sizes.push_back(a.size);
    auto c_os = open_out(dir / "ccdf.csv");
    write_ccdf_csv(c_os, ccdf(sizes), prov);
  }

  log.info("omega_mean=", r.omega_mean, " avalanches=", r.avalanches.size(),
           " audit_max_rel_error=", r.audit_max_rel_error);
  if (r.fit)
    log.info("fit: m_ccdf=", r.fit->m_ccdf, " +- ", r.fit->m_err, " s_min=", r.fit->s_min, " n_tail=", r.fit->n_tail);
  else
    log.info("warning: ", r.fit_warning);
  return 0;
}

int cmd_sweep(const Options& o) {
  const Log log(o);
  const auto config = effective_config(o);
  const auto dir = prepare_out(o);
  persist_config(dir, config);
  log.info("sweep: ", config.sweep_agents.size(), " x ", config.sweep_c_th.size(), " cells, ", config.run.replicas,
           " replicas each");
  const auto surface = sweep(config.sweep_agents, config.sweep_c_th, config.run);
  auto os = open_out(dir / "surface.csv");
  write_surface_csv(os, surface, provenance(config));
  for (const auto& c : surface.grid) {
    if (!c.ok) log.info("cell L=", c.agents, " c_th=", c.c_th, ": ", c.error);
    log.debug("cell L=", c.agents, " c_th=", c.c_th, " m_ccdf=", c.m_ccdf, " omega=", c.omega_mean);
  }
  if (!surface.normalization.applied) log.info("warning: surface not normalized (constant field)");
  return 0;
}

int cmd_scenario(const Options& o) {
  const Log log(o);
  const auto config = effective_config(o);
  const auto dir = prepare_out(o);
  persist_config(dir, config);
  log.info("scenario: F_0 L=", config.run.dynamics.agents, " c_th=", config.run.dynamics.c_th,
           " -> c_th=", config.scenario_c_th_final);
  const auto report = scenario_triplet(config.run, config.scenario_c_th_final, config.search);
  open_out(dir / "scenario.json") << scenario_document(report, provenance(config)).dump(2) << '\n';
  log.info("F_Omega at L=", report.search.agents, " (omega ", report.search.omega, "), ordering ",
           report.ordering_ok ? "holds" : "violated");
  return report.ordering_ok ? 0 : kExitCheck;
}

int cmd_fit(const Options& o) {
  const Log log(o);
  if (o.input.empty()) throw ConfigError("fit needs --input");
  std::ifstream in(o.input);
  if (!in) throw ConfigError("cannot open input " + o.input);
  const auto sizes = read_sizes(in);
  log.info("fit: ", sizes.size(), " sizes from ", o.input);
  const auto fit = fit_tail(sizes);
  std::cout << fit_json(fit).dump() << '\n';
  if (o.out_dir) {
    const auto dir = prepare_out(o);
    const Provenance prov{"none", 0};
    open_out(dir / "fit.json") << fit_document(fit, "", prov).dump(2) << '\n';
    auto c_os = open_out(dir / "ccdf.csv");
    write_ccdf_csv(c_os, ccdf(sizes), prov);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-bankruptcy economic network: simulation and avalanche statistics"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Master seed, overrides run.seed");
    sub->add_option("--out", o.out_dir, "Output directory");
    auto* q = sub->add_flag("--quiet", o.quiet, "Only errors on stderr");
    sub->add_flag("--verbose", o.verbose, "Per-cell diagnostics")->excludes(q);
  };
  auto* run_cmd = app.add_subcommand("run", "Replicated run: U_t, Omega, avalanche log and tail fit");
  auto* sweep_cmd = app.add_subcommand("sweep", "(L, c_th) grid of pooled runs -> surface.csv");
  auto* scenario_cmd = app.add_subcommand("scenario", "F_0 / F_L / F_Omega comparison -> scenario.json");
  auto* fit_cmd = app.add_subcommand("fit", "Fit a power-law tail to avalanche sizes");
  for (auto* sub : {run_cmd, sweep_cmd, scenario_cmd, fit_cmd}) common(sub);
  fit_cmd->add_option("--input", o.input, "avalanches.jsonl or CSV with a size column")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*scenario_cmd) return cmd_scenario(o);
    return cmd_fit(o);
  } catch (const ConfigError& e) {
    std::cerr << "econet: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "econet: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
