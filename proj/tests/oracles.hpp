#pragma once

// Independent reference implementations shared by the unit and acceptance
// tests. Nothing here reuses engine code beyond the public mix64 hash.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "econet/rng.hpp"

namespace oracle {

struct Edge {
  std::uint64_t id;
  std::uint32_t src, dst;
};

struct CascadeResult {
  std::set<std::uint32_t> bankrupt;
  std::uint64_t size = 0;
  std::vector<std::uint64_t> surviving;  // sorted ids
};

// Brute-force cascade: degrees recounted from the raw edge list after every
// single edge removal, all agents rescanned each round, lowest id first. The
// retained edge of a bankrupt agent is the one with the smallest
// mix64(key ^ id), ties to the smaller id.
inline CascadeResult cascade(std::vector<Edge> edges, std::uint32_t n, double c_th, std::uint64_t key) {
  std::vector<std::uint32_t> kin, kout;
  auto recount = [&] {
    kin.assign(n, 0);
    kout.assign(n, 0);
    for (const auto& e : edges) {
      ++kout[e.src];
      ++kin[e.dst];
    }
  };
  CascadeResult res;
  while (true) {
    recount();
    std::int64_t victim = -1;
    for (std::uint32_t a = 0; a < n && victim < 0; ++a)
      if (kin[a] >= 2 && static_cast<double>(kout[a]) / kin[a] - 1.0 < c_th) victim = a;
    if (victim < 0) break;
    const auto a = static_cast<std::uint32_t>(victim);
    res.bankrupt.insert(a);

    std::uint64_t keep = 0, best = 0;
    bool first = true;
    for (const auto& e : edges)
      if (e.dst == a) {
        const auto h = econet::mix64(key ^ e.id);
        if (first || h < best || (h == best && e.id < keep)) {
          keep = e.id;
          best = h;
          first = false;
        }
      }
    while (true) {
      auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& e) { return e.dst == a && e.id != keep; });
      if (it == edges.end()) break;
      edges.erase(it);
      ++res.size;
      recount();
    }
  }
  for (const auto& e : edges) res.surviving.push_back(e.id);
  std::sort(res.surviving.begin(), res.surviving.end());
  return res;
}

// Exact discrete power law p(s) ~ s^-a on s >= s_min, by rejection from a
// floored continuous Pareto. With X ~ Pareto(s_min, a - 1), floor(X) = s has
// probability proportional to the integral of x^-a over [s, s + 1); the
// acceptance ratio s^-a / that integral is decreasing in s.
inline std::uint64_t zeta_sample(econet::Rng& rng, double a, std::uint64_t s_min) {
  auto ratio = [a](double s) { return std::pow(s, -a) * (a - 1) / (std::pow(s, 1 - a) - std::pow(s + 1, 1 - a)); };
  const double r0 = ratio(static_cast<double>(s_min));
  while (true) {
    const double x = static_cast<double>(s_min) * std::pow(1.0 - rng.uniform01(), -1.0 / (a - 1));
    const double s = std::floor(x);
    if (rng.uniform01() * r0 <= ratio(s)) return static_cast<std::uint64_t>(s);
  }
}

}  // namespace oracle
