#include "econet/measures.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "econet/error.hpp"

namespace econet {

void MeasureParams::validate() const {
  if (window < 1) throw ConfigError("measure.window must be >= 1");
  if (sample_every < 1) throw ConfigError("measure.sample_every must be >= 1");
}

double overall_product(const Network& net) {
  const auto n = static_cast<std::ptrdiff_t>(net.edge_count());
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = net.live_edge(static_cast<std::size_t>(i));
    sum += pair_balance_at(static_cast<std::int64_t>(net.k_out(c.src)) - static_cast<std::int64_t>(net.k_in(c.dst)));
  }
  return sum;
}

double overall_product_serial(const Network& net) {
  double sum = 0.0;
  for (const Connection& c : net.live_connections()) sum += 1.0 - alpha(net.k_out(c.src), net.k_in(c.dst));
  return sum;
}

TimeSeries returns(const TimeSeries& u) {
  if (u.empty()) throw StatsError("returns: empty series");
  TimeSeries r;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    if (u.v[k] == 0.0) continue;
    r.push(u.t[k + 1], (u.v[k + 1] - u.v[k]) / u.v[k]);
  }
  return r;
}

TimeSeries business_level(const TimeSeries& u, const MeasureParams& params, std::uint32_t agents) {
  params.validate();
  if (agents == 0) throw StatsError("business_level: agent count must be positive");
  if (u.empty() || u.t.back() - u.t.front() + 1 < params.window)
    throw StatsError("business_level: series spans fewer than window=" + std::to_string(params.window) + " steps");

  // prefix[k] = sum of u.v[0..k)
  std::vector<double> prefix(u.size() + 1, 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) prefix[k + 1] = prefix[k] + u.v[k];

  TimeSeries omega;
  const double scale = 1.0 / static_cast<double>(agents);
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < u.size(); ++lo) {
    const std::int64_t end = u.t[lo] + params.window;  // exclusive
    if (end - 1 > u.t.back()) break;
    if (hi < lo) hi = lo;
    while (hi < u.size() && u.t[hi] < end) ++hi;
    const auto count = static_cast<double>(hi - lo);
    omega.push(u.t[lo], scale * ((prefix[hi] - prefix[lo]) / count));
  }
  return omega;
}

double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 4) throw StatsError("excess_kurtosis: need at least 4 values");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw StatsError("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

TimeSeries decimate(const TimeSeries& s, std::int64_t every) {
  if (every < 1) throw StatsError("decimate: stride must be >= 1");
  TimeSeries out;
  for (std::size_t k = 0; k < s.size(); k += static_cast<std::size_t>(every)) out.push(s.t[k], s.v[k]);
  return out;
}

void write_csv(std::ostream& os, const TimeSeries& s, std::string_view value_name) {
  os << "t," << value_name << '\n';
  char buf[400];
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s.v[k], std::chars_format::fixed);
    os << s.t[k] << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

}  // namespace econet
