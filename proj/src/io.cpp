#include "econet/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "econet/error.hpp"

namespace econet {

namespace {

std::string fixed(double v) {
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, end);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    auto field = line.substr(0, comma);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

std::optional<std::uint64_t> to_size(std::string_view s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

nlohmann::ordered_json run_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["L"] = r.config.dynamics.agents;
  j["c_th"] = r.config.dynamics.c_th;
  j["omega_mean"] = r.omega_mean;
  j["n_avalanches"] = r.avalanches.size();
  if (r.fit) {
    j["fit"] = fit_json(*r.fit);
  } else {
    j["fit"] = nullptr;
    j["warning"] = r.fit_warning;
  }
  return j;
}

}  // namespace

void write_provenance_line(std::ostream& os, const Provenance& p) {
  os << "# config_hash=" << p.config_hash << " master_seed=" << p.master_seed << '\n';
}

void write_series_csv(std::ostream& os, const TimeSeries& s, std::string_view value_name, const Provenance& p) {
  write_provenance_line(os, p);
  write_csv(os, s, value_name);
}

void write_avalanches_jsonl(std::ostream& os, std::span<const AvalancheSummary> avalanches, const Provenance& p) {
  write_provenance_line(os, p);
  for (const auto& a : avalanches)
    os << "{\"t\":" << a.t << ",\"size\":" << a.size << ",\"n_agents\":" << a.n_agents
       << ",\"generations\":" << a.generations << "}\n";
}

void write_ccdf_csv(std::ostream& os, std::span<const CcdfPoint> points, const Provenance& p) {
  write_provenance_line(os, p);
  os << "s,pc\n";
  for (const auto& pt : points) os << pt.s << ',' << fixed(pt.pc) << '\n';
}

void write_surface_csv(std::ostream& os, const SweepSurface& surface, const Provenance& p) {
  write_provenance_line(os, p);
  os << "L,c_th,m_ccdf,m_err,omega_mean,n_tail\n";
  for (const auto& c : surface.grid) {
    os << c.agents << ',' << fixed(c.c_th) << ',';
    if (c.ok)
      os << fixed(c.m_ccdf) << ',' << fixed(c.m_err) << ',' << fixed(c.omega_mean) << ',' << c.n_tail;
    else
      os << ",," << (c.ran ? fixed(c.omega_mean) : std::string()) << ',';
    os << '\n';
  }
}

nlohmann::ordered_json fit_json(const TailFit& fit) {
  nlohmann::ordered_json j;
  j["m_density"] = fit.m_density;
  j["m_ccdf"] = fit.m_ccdf;
  j["m_err"] = fit.m_err;
  j["s_min"] = fit.s_min;
  j["ks"] = fit.ks;
  j["n_tail"] = fit.n_tail;
  return j;
}

nlohmann::ordered_json fit_document(const std::optional<TailFit>& fit, const std::string& warning,
                                    const Provenance& p) {
  nlohmann::ordered_json j;
  if (fit) {
    j = fit_json(*fit);
  } else {
    j["fit"] = nullptr;
    j["warning"] = warning;
  }
  j["config_hash"] = p.config_hash;
  j["master_seed"] = p.master_seed;
  return j;
}

nlohmann::ordered_json scenario_document(const ScenarioReport& report, const Provenance& p) {
  nlohmann::ordered_json j;
  j["config_hash"] = p.config_hash;
  j["master_seed"] = p.master_seed;
  j["c_th_initial"] = report.c_th_initial;
  j["c_th_final"] = report.c_th_final;
  j["F_0"] = run_json(report.f0);
  j["F_L"] = run_json(report.f_l);
  j["F_Omega"] = run_json(report.f_omega);
  nlohmann::ordered_json s;
  s["L"] = report.search.agents;
  s["omega"] = report.search.omega;
  s["within_tolerance"] = report.search.within_tolerance;
  s["bisection_evals"] = report.search.bisection_evals;
  s["evaluations"] = nlohmann::ordered_json::array();
  for (const auto& [l, w] : report.search.evaluations) s["evaluations"].push_back({l, w});
  j["search"] = s;
  j["ordering_ok"] = report.ordering_ok;
  return j;
}

std::vector<std::uint64_t> read_sizes(std::istream& in) {
  std::vector<std::uint64_t> sizes;
  std::optional<std::size_t> column;
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";

    if (line.front() == '{') {
      try {
        sizes.push_back(nlohmann::json::parse(line).at("size").get<std::uint64_t>());
      } catch (const nlohmann::json::exception& e) {
        throw StatsError(where + "bad avalanche record: " + e.what());
      }
      continue;
    }
    const auto fields = split(line);
    if (!column) {
      if (auto v = to_size(fields.front())) {
        column = 0;
      } else {
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (fields[i] == "size" || fields[i] == "s") column = i;
        if (!column) throw StatsError(where + "no 'size' column in header");
        continue;
      }
    }
    if (*column >= fields.size()) throw StatsError(where + "missing size column");
    auto v = to_size(fields[*column]);
    if (!v) throw StatsError(where + "size is not a non-negative integer: '" + std::string(fields[*column]) + "'");
    sizes.push_back(*v);
  }
  return sizes;
}

}  // namespace econet
