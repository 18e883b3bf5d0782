#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "econet/network.hpp"

namespace econet {

struct TimeSeries {
  std::vector<std::int64_t> t;
  std::vector<double> v;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
  void push(std::int64_t time, double value) {
    t.push_back(time);
    v.push_back(value);
  }
  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

struct MeasureParams {
  std::int64_t window = 10'000;     // T_S, steps
  std::int64_t sample_every = 100;  // stride of persisted series

  void validate() const;
  friend bool operator==(const MeasureParams&, const MeasureParams&) = default;
};

// Overall product: sum of (1 - alpha) over all live connections, priced from
// current degrees. OpenMP reduction over the live edge store.
double overall_product(const Network& net);
// Reference: sequential per-connection alpha() evaluation.
double overall_product_serial(const Network& net);

// Relative changes r_k = (u_{k+1} - u_k) / u_k, stamped at t_{k+1}. Points with
// u_k == 0 are dropped. Throws StatsError on an empty series.
TimeSeries returns(const TimeSeries& u);

// Moving business level Omega(t) = (1/L) * mean of u over [t, t + window),
// for every sample time whose window is fully covered by the series.
// Throws StatsError if the series spans fewer than `window` steps.
TimeSeries business_level(const TimeSeries& u, const MeasureParams& params, std::uint32_t agents);

// Sample excess kurtosis (zero for a normal distribution).
double excess_kurtosis(std::span<const double> xs);

// Keeps every k-th point, always starting from the first.
TimeSeries decimate(const TimeSeries& s, std::int64_t every);

// CSV with header "t,<value_name>"; values at full round-trip precision.
void write_csv(std::ostream& os, const TimeSeries& s, std::string_view value_name);

}  // namespace econet
