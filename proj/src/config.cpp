#include "econet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "econet/error.hpp"

namespace econet {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || end != last || first == last)
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view text, std::string_view key) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<T>(trim(text.substr(0, comma)), key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
std::string format_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_real(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto num = [&t]<class T>(std::string key, auto get) {
      t[key] = [key, get](ExperimentConfig& c, std::string_view v) { get(c) = parse_number<T>(v, key); };
    };
    num.operator()<std::uint32_t>("L", [](ExperimentConfig& c) -> auto& { return c.run.dynamics.agents; });
    num.operator()<double>("c_th", [](ExperimentConfig& c) -> auto& { return c.run.dynamics.c_th; });
    num.operator()<std::int64_t>("run.total_steps", [](ExperimentConfig& c) -> auto& { return c.run.total_steps; });
    num.operator()<std::int64_t>("run.transient", [](ExperimentConfig& c) -> auto& { return c.run.transient; });
    num.operator()<std::uint64_t>("run.seed", [](ExperimentConfig& c) -> auto& { return c.run.seed; });
    num.operator()<std::uint32_t>("run.replicas", [](ExperimentConfig& c) -> auto& { return c.run.replicas; });
    num.operator()<std::int64_t>("run.audit_every", [](ExperimentConfig& c) -> auto& { return c.run.audit_every; });
    num.operator()<double>("dynamics.smoothing", [](ExperimentConfig& c) -> auto& { return c.run.dynamics.smoothing; });
    t["dynamics.mode"] = [](ExperimentConfig& c, std::string_view v) {
      if (v == "preferential")
        c.run.dynamics.mode = GrowthMode::preferential;
      else if (v == "uniform")
        c.run.dynamics.mode = GrowthMode::uniform;
      else
        throw ConfigError("dynamics.mode must be 'preferential' or 'uniform', got '" + std::string(v) + "'");
    };
    num.operator()<std::int64_t>("measure.window", [](ExperimentConfig& c) -> auto& { return c.run.measure.window; });
    num.operator()<std::int64_t>("measure.sample_every",
                                 [](ExperimentConfig& c) -> auto& { return c.run.measure.sample_every; });
    t["sweep.L_values"] = [](ExperimentConfig& c, std::string_view v) {
      c.sweep_agents = parse_list<std::uint32_t>(v, "sweep.L_values");
    };
    t["sweep.c_th_values"] = [](ExperimentConfig& c, std::string_view v) {
      c.sweep_c_th = parse_list<double>(v, "sweep.c_th_values");
    };
    num.operator()<double>("scenario.c_th_final", [](ExperimentConfig& c) -> auto& { return c.scenario_c_th_final; });
    num.operator()<std::uint32_t>("search.L_min", [](ExperimentConfig& c) -> auto& { return c.search.agents_min; });
    num.operator()<std::uint32_t>("search.L_max", [](ExperimentConfig& c) -> auto& { return c.search.agents_max; });
    num.operator()<double>("search.rel_tol", [](ExperimentConfig& c) -> auto& { return c.search.rel_tol; });
    num.operator()<std::uint32_t>("search.scan_radius", [](ExperimentConfig& c) -> auto& { return c.search.scan_radius; });
    num.operator()<std::uint32_t>("search.replicas", [](ExperimentConfig& c) -> auto& { return c.search.replicas; });
    return t;
  }();
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  run.validate();
  if (sweep_agents.empty() || sweep_c_th.empty()) throw ConfigError("sweep grids must be non-empty");
  for (auto l : sweep_agents)
    if (l < 2) throw ConfigError("sweep.L_values entries must be >= 2");
  for (double c : sweep_c_th)
    if (!(c > -1.0 && c < 0.0)) throw ConfigError("sweep.c_th_values entries must lie in (-1, 0)");
  if (!(scenario_c_th_final > -1.0 && scenario_c_th_final < 0.0))
    throw ConfigError("scenario.c_th_final must lie in (-1, 0)");
  if (search.agents_min < 2 || search.agents_min >= search.agents_max)
    throw ConfigError("search bracket must satisfy 2 <= search.L_min < search.L_max");
  if (!(search.rel_tol >= 0.0)) throw ConfigError("search.rel_tol must be >= 0");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + "missing value for '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "L = " << c.run.dynamics.agents << '\n'
     << "c_th = " << format_real(c.run.dynamics.c_th) << '\n'
     << "run.total_steps = " << c.run.total_steps << '\n'
     << "run.transient = " << c.run.transient << '\n'
     << "run.seed = " << c.run.seed << '\n'
     << "run.replicas = " << c.run.replicas << '\n'
     << "run.audit_every = " << c.run.audit_every << '\n'
     << "dynamics.smoothing = " << format_real(c.run.dynamics.smoothing) << '\n'
     << "dynamics.mode = " << (c.run.dynamics.mode == GrowthMode::uniform ? "uniform" : "preferential") << '\n'
     << "measure.window = " << c.run.measure.window << '\n'
     << "measure.sample_every = " << c.run.measure.sample_every << '\n'
     << "sweep.L_values = " << format_list(c.sweep_agents) << '\n'
     << "sweep.c_th_values = " << format_list(c.sweep_c_th) << '\n'
     << "scenario.c_th_final = " << format_real(c.scenario_c_th_final) << '\n'
     << "search.L_min = " << c.search.agents_min << '\n'
     << "search.L_max = " << c.search.agents_max << '\n'
     << "search.rel_tol = " << format_real(c.search.rel_tol) << '\n'
     << "search.scan_radius = " << c.search.scan_radius << '\n'
     << "search.replicas = " << c.search.replicas << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace econet
