#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "econet/experiments.hpp"
#include "econet/measures.hpp"
#include "econet/tail_stats.hpp"

namespace econet {

// Written as a leading `# config_hash=<hex> master_seed=<n>` line in CSV and
// JSONL files, and as top-level fields in JSON documents.
struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

void write_provenance_line(std::ostream& os, const Provenance& p);

// `t,u_t` / `t,omega` series with the provenance line.
void write_series_csv(std::ostream& os, const TimeSeries& s, std::string_view value_name, const Provenance& p);

// One `{"t":..,"size":..,"n_agents":..,"generations":..}` object per line.
void write_avalanches_jsonl(std::ostream& os, std::span<const AvalancheSummary> avalanches, const Provenance& p);

// `s,pc` rows of the empirical CCDF.
void write_ccdf_csv(std::ostream& os, std::span<const CcdfPoint> points, const Provenance& p);

// `L,c_th,m_ccdf,m_err,omega_mean,n_tail`; failed cells leave the fit
// columns empty.
void write_surface_csv(std::ostream& os, const SweepSurface& surface, const Provenance& p);

nlohmann::ordered_json fit_json(const TailFit& fit);
// The fit object, or {"fit": null, "warning": ...} when the tail was not
// fittable, plus provenance fields.
nlohmann::ordered_json fit_document(const std::optional<TailFit>& fit, const std::string& warning,
                                    const Provenance& p);
nlohmann::ordered_json scenario_document(const ScenarioReport& report, const Provenance& p);

// Avalanche sizes from an avalanches.jsonl file, a CSV with a `size` column,
// or a bare one-column list. Blank lines and `#` lines are skipped.
std::vector<std::uint64_t> read_sizes(std::istream& in);

}  // namespace econet
