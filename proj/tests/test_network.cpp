#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "econet/error.hpp"
#include "econet/measures.hpp"
#include "econet/network.hpp"
#include "econet/rng.hpp"

using namespace econet;

namespace {

void check_recount(const Network& net) {
  std::vector<std::uint32_t> in(net.size(), 0), out(net.size(), 0);
  for (const auto& c : net.live_connections()) {
    ++out[index(c.src)];
    ++in[index(c.dst)];
  }
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < net.size(); ++i) {
    REQUIRE(net.k_in(agent(i)) == in[i]);
    REQUIRE(net.k_out(agent(i)) == out[i]);
    REQUIRE(net.in_connections(agent(i)).size() == in[i]);
    REQUIRE(net.out_connections(agent(i)).size() == out[i]);
    total += in[i];
  }
  REQUIRE(net.total_in() == total);
  REQUIRE(net.total_out() == total);
}

// Independent per-edge sum from a plain degree recount.
double product_oracle(const Network& net) {
  std::map<std::uint32_t, std::uint64_t> in, out;
  const auto edges = net.live_connections();
  for (const auto& c : edges) {
    ++out[index(c.src)];
    ++in[index(c.dst)];
  }
  double sum = 0.0;
  for (const auto& c : edges) {
    const double d = static_cast<double>(out[index(c.src)]) - static_cast<double>(in[index(c.dst)]);
    sum += 1.0 - 2.0 / (1.0 + std::exp(-d));
  }
  return sum;
}

}  // namespace

TEST_CASE("alpha anchors") {
  CHECK(alpha(5, 5) == 1.0);
  CHECK(pair_balance(5, 5) == 0.0);
  // 2 / (1 + e^-2) evaluated at 30 digits: 1.76159415595576488811945828260
  CHECK(alpha(3, 1) == doctest::Approx(1.7615941559557648881).epsilon(1e-15));
  CHECK(pair_balance(3, 1) == doctest::Approx(-0.7615941559557648881).epsilon(1e-15));
  CHECK(alpha(1000, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pair_balance(0, 1000) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("alpha bounds and antisymmetry") {
  Rng rng(7);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t range = i % 2 ? 60 : 5000;
    const auto a = rng.below(range), b = rng.below(range);
    const double x = alpha(a, b);
    CHECK(x > 0.0);
    CHECK(x < 2.0);
    CHECK(x + alpha(b, a) == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("tabulated pair balance matches direct evaluation") {
  for (std::int64_t d = -80; d <= 80; ++d) {
    const double direct = 1.0 - 2.0 / (1.0 + std::exp(-static_cast<double>(d)));
    CHECK(pair_balance_at(d) == doctest::Approx(direct).epsilon(1e-15));
  }
}

TEST_CASE("add and remove connections") {
  Network net(3);
  const auto c = net.add_connection(agent(0), agent(1));
  CHECK(net.k_out(agent(0)) == 1);
  CHECK(net.k_in(agent(1)) == 1);
  const auto d = net.add_connection(agent(0), agent(1));
  CHECK(net.k_out(agent(0)) == 2);
  CHECK(net.k_in(agent(1)) == 2);
  CHECK(c.id != d.id);
  net.remove_connection(c.id);
  CHECK(net.k_out(agent(0)) == 1);
  CHECK(net.k_in(agent(1)) == 1);
  CHECK_FALSE(net.contains(c.id));
  CHECK(net.contains(d.id));
  net.remove_connection(d.id);
  CHECK(net.k_out(agent(0)) == 0);
  CHECK(net.k_in(agent(1)) == 0);
  CHECK(net.edge_count() == 0);
  CHECK(net.product() == 0.0);

  CHECK_THROWS_AS(net.add_connection(agent(2), agent(2)), ModelError);
  CHECK_THROWS_AS(net.add_connection(agent(0), agent(3)), ModelError);
  CHECK_THROWS_AS(net.remove_connection(c.id), ModelError);
  CHECK_THROWS_AS(net.connection(c.id), ModelError);
}

TEST_CASE("degree counters survive random add/remove sequences") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::uint32_t>(2 + rng.below(12));
    Network net(n);
    std::vector<ConnectionId> live;
    for (int op = 0; op < 300; ++op) {
      if (live.empty() || rng.uniform01() < 0.6) {
        const auto s = static_cast<std::uint32_t>(rng.below(n));
        auto d = static_cast<std::uint32_t>(rng.below(n - 1));
        if (d >= s) ++d;
        live.push_back(net.add_connection(agent(s), agent(d)).id);
      } else {
        const auto pos = rng.below(live.size());
        net.remove_connection(live[pos]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
      }
      if (op % 25 == 0) check_recount(net);
    }
    check_recount(net);
    REQUIRE(net.product() == doctest::Approx(product_oracle(net)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("removing every edge in random order empties the network") {
  Rng rng(3);
  Network net(8);
  std::vector<ConnectionId> ids;
  for (int i = 0; i < 20; ++i) {
    const auto s = static_cast<std::uint32_t>(rng.below(8));
    ids.push_back(net.add_connection(agent(s), agent((s + 1 + rng.below(7)) % 8)).id);
  }
  std::shuffle(ids.begin(), ids.end(), rng);
  for (auto id : ids) net.remove_connection(id);
  CHECK(net.total_in() == 0);
  CHECK(net.total_out() == 0);
  check_recount(net);
  CHECK(std::abs(net.product()) < 1e-12);
}

TEST_CASE("sever_incoming_except keeps one edge and updates creditors") {
  Network net(4);
  const auto keep = net.add_connection(agent(1), agent(0));
  net.add_connection(agent(2), agent(0));
  net.add_connection(agent(2), agent(0));
  net.add_connection(agent(3), agent(0));
  net.add_connection(agent(0), agent(1));
  std::vector<Connection> severed;
  net.sever_incoming_except(agent(0), keep.id, severed);
  CHECK(severed.size() == 3);
  CHECK(net.k_in(agent(0)) == 1);
  CHECK(net.in_connections(agent(0)).front().id == keep.id);
  CHECK(net.k_out(agent(2)) == 0);
  CHECK(net.k_out(agent(3)) == 0);
  check_recount(net);
  CHECK(net.product() == doctest::Approx(product_oracle(net)).epsilon(1e-12));
}

TEST_CASE("mean-field leverage") {
  Network net(6);
  net.add_connection(agent(1), agent(0));
  net.add_connection(agent(0), agent(1));
  CHECK(leverage_mean_field(net, agent(0)) == 0.0);
  // agent 2: k_out = 3, k_in = 4
  for (int i = 0; i < 3; ++i) net.add_connection(agent(2), agent(3));
  for (int i = 0; i < 4; ++i) net.add_connection(agent(4), agent(2));
  CHECK(leverage_mean_field(net, agent(2)) == -0.25);
  // agent 3: k_out = 0
  CHECK(leverage_mean_field(net, agent(3)) == -1.0);
  CHECK_THROWS_AS(leverage_mean_field(net, agent(5)), ModelError);

  Rng rng(5);
  Network g(10);
  for (int i = 0; i < 60; ++i) {
    const auto s = static_cast<std::uint32_t>(rng.below(10));
    g.add_connection(agent(s), agent((s + 1 + rng.below(9)) % 10));
  }
  for (std::uint32_t i = 0; i < 10; ++i) {
    if (g.k_in(agent(i)) == 0) continue;
    const double c = leverage_mean_field(g, agent(i));
    CHECK(c >= -1.0);
    CHECK((c == -1.0) == (g.k_out(agent(i)) == 0));
  }
}

TEST_CASE("exact energy balance") {
  Network iso(2);
  CHECK(energy_balance_exact(iso, agent(0)) == 0.0);

  Network one(2);
  one.add_connection(agent(0), agent(1));
  CHECK(energy_balance_exact(one, agent(0)) == 0.0);
  CHECK(energy_balance_exact(one, agent(1)) == 0.0);

  // Hand-built 5-agent network against a plain edge-list sum.
  Network net(5);
  const std::vector<std::pair<int, int>> edges{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {0, 1}, {2, 4}};
  for (auto [s, d] : edges) net.add_connection(agent(s), agent(d));
  std::vector<double> kout(5, 0), kin(5, 0);
  for (auto [s, d] : edges) {
    ++kout[s];
    ++kin[d];
  }
  for (int a = 0; a < 5; ++a) {
    double u = 0.0;
    for (auto [s, d] : edges) {
      const double al = 2.0 / (1.0 + std::exp(-(kout[s] - kin[d])));
      if (s == a) u += 1.0 - al;
      if (d == a) u += al - 1.0;
    }
    CHECK(energy_balance_exact(net, agent(a)) == doctest::Approx(u).epsilon(1e-14));
  }
}

TEST_CASE("exact balance sign agrees with mean-field leverage under uniform imbalance") {
  // Enumerate small random multigraphs and keep those whose edges all carry
  // the same imbalance d = k_out,src - k_in,dst. Then U_i = (1 - alpha(d)) *
  // (k_out,i - k_in,i), so the signs agree whenever d < 0 (and flip for d > 0).
  Rng rng(23);
  int kept = 0;
  for (int trial = 0; trial < 200000 && kept < 300; ++trial) {
    const auto n = static_cast<std::uint32_t>(3 + rng.below(3));
    Network net(n);
    const auto m = 1 + rng.below(6);
    for (std::uint64_t e = 0; e < m; ++e) {
      const auto s = static_cast<std::uint32_t>(rng.below(n));
      net.add_connection(agent(s), agent((s + 1 + static_cast<std::uint32_t>(rng.below(n - 1))) % n));
    }
    const auto edges = net.live_connections();
    const auto imbalance = [&](const Connection& c) {
      return static_cast<std::int64_t>(net.k_out(c.src)) - static_cast<std::int64_t>(net.k_in(c.dst));
    };
    const auto d = imbalance(edges.front());
    if (d >= 0 || !std::all_of(edges.begin(), edges.end(), [&](const auto& c) { return imbalance(c) == d; }))
      continue;
    ++kept;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double exact = energy_balance_exact(net, agent(i));
      const auto num = static_cast<std::int64_t>(net.k_out(agent(i))) - static_cast<std::int64_t>(net.k_in(agent(i)));
      CHECK((exact > 0) == (num > 0));
      CHECK((exact < 0) == (num < 0));
    }
  }
  CHECK(kept >= 100);
}

TEST_CASE("incremental product equals full recomputation") {
  Network empty(3);
  CHECK(overall_product(empty) == 0.0);
  CHECK(empty.product() == 0.0);

  Rng rng(19);
  Network net(12);
  for (int i = 0; i < 30; ++i) {
    const auto s = static_cast<std::uint32_t>(rng.below(12));
    net.add_connection(agent(s), agent((s + 1 + rng.below(11)) % 12));
  }
  const double oracle = product_oracle(net);
  CHECK(net.product() == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(overall_product(net) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(overall_product_serial(net) == doctest::Approx(oracle).epsilon(1e-9));
}
