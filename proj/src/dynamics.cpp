#include "econet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "econet/error.hpp"

namespace econet {

void DynamicsParams::validate() const {
  if (!(c_th > -1.0 && c_th < 0.0))
    throw ConfigError("c_th must lie in (-1, 0): bankruptcy needs a negative leverage threshold, got " +
                      std::to_string(c_th));
  if (agents < 2) throw ConfigError("agents must be >= 2, got " + std::to_string(agents));
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing))
    throw ConfigError("smoothing must be a finite non-negative number");
}

Network initialize(const DynamicsParams& params, Rng& rng) {
  params.validate();
  const auto n = params.agents;
  Network net(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto src = static_cast<std::uint32_t>(rng.below(n - 1));
    if (src >= i) ++src;
    net.add_connection(agent(src), agent(i));
  }
  return net;
}

namespace {

enum class Side { out, in };

AgentId weighted_pick(const Network& net, const DynamicsParams& params, Rng& rng, Side side) {
  const std::uint32_t n = net.size();
  if (params.mode == GrowthMode::uniform) return agent(static_cast<std::uint32_t>(rng.below(n)));

  // Weight k + a per agent. Total mass splits into one unit per live
  // connection (pick its endpoint) plus a per agent (pick uniformly).
  const auto edges = static_cast<double>(net.edge_count());
  const double smoothing_mass = params.smoothing * n;
  const double total = edges + smoothing_mass;
  if (!(total > 0.0)) throw ModelError("attachment weights are all zero; set smoothing > 0");
  const double u = rng.uniform01() * total;
  if (u < edges) {
    const auto pos = std::min(static_cast<std::size_t>(u), net.edge_count() - 1);
    const auto& c = net.live_edge(pos);
    return side == Side::out ? c.src : c.dst;
  }
  const auto i = static_cast<std::uint32_t>((u - edges) / params.smoothing);
  return agent(std::min(i, n - 1));
}

}  // namespace

AgentId pick_source(const Network& net, const DynamicsParams& params, Rng& rng) {
  return weighted_pick(net, params, rng, Side::out);
}

AgentId pick_target(const Network& net, const DynamicsParams& params, Rng& rng, AgentId source) {
  // Small populations get a floor on the cap so that a heavy source does not
  // turn an unlucky streak into an error.
  const std::uint32_t n = std::max<std::uint32_t>(net.size(), kMinTargetDraws);
  for (std::uint32_t attempt = 0; attempt < n; ++attempt) {
    const AgentId t = weighted_pick(net, params, rng, Side::in);
    if (t != source) return t;
  }
  throw ModelError("pick_target: no target distinct from source after " + std::to_string(n) + " draws");
}

Connection growth_step(Network& net, const DynamicsParams& params, Rng& rng) {
  const AgentId src = pick_source(net, params, rng);
  const AgentId dst = pick_target(net, params, rng, src);
  net.advance_time();
  const Connection c = net.add_connection(src, dst);
  if (net.k_in(dst) > 1) net.set_insolvent(dst, false);
  return c;
}

bool eligible(const Network& net, AgentId a, double c_th) noexcept {
  const auto k_in = net.k_in(a);
  if (k_in < 2) return false;
  return static_cast<double>(net.k_out(a)) / static_cast<double>(k_in) - 1.0 < c_th;
}

ConnectionId retained_connection(const Network& net, AgentId a, std::uint64_t key) {
  const auto ins = net.in_connections(a);
  if (ins.empty()) throw ModelError("retained_connection: agent has no incoming connection");
  ConnectionId best = ins.front().id;
  std::uint64_t best_h = mix64(key ^ index(best));
  for (const Incidence& e : ins.subspan(1)) {
    const ConnectionId id = e.id;
    const std::uint64_t h = mix64(key ^ index(id));
    if (h < best_h || (h == best_h && index(id) < index(best))) {
      best = id;
      best_h = h;
    }
  }
  return best;
}

void bankrupt_keyed(Network& net, AgentId a, std::uint64_t key, std::vector<Connection>& severed) {
  if (net.k_in(a) < 2)
    throw ModelError("bankrupt: agent " + std::to_string(index(a)) + " has k_in < 2, nothing to sever");
  net.sever_incoming_except(a, retained_connection(net, a, key), severed);
  net.set_insolvent(a, true);
}

std::vector<Connection> bankrupt(Network& net, AgentId a, Rng& rng) {
  std::vector<Connection> severed;
  bankrupt_keyed(net, a, rng.next_u64(), severed);
  return severed;
}

std::optional<AvalancheEvent> cascade_from(Network& net, const DynamicsParams& params, Rng& rng,
                                           std::span<const AgentId> touched, CascadeWorkspace& ws) {
  const double c_th = params.c_th;
  ws.wave.clear();
  for (AgentId a : touched)
    if (eligible(net, a, c_th)) ws.wave.push_back(a);
  if (ws.wave.empty()) return std::nullopt;
  std::sort(ws.wave.begin(), ws.wave.end());
  ws.wave.erase(std::unique(ws.wave.begin(), ws.wave.end()), ws.wave.end());

  if (ws.stamp.size() != net.size()) {
    ws.stamp.assign(net.size(), 0);
    ws.epoch = 0;
  }

  AvalancheEvent ev;
  ev.trigger_time = net.time();
  ev.trigger_agent = ws.wave.front();
  const std::uint64_t key = rng.next_u64();

  while (!ws.wave.empty()) {
    ++ev.generations;
    if (++ws.epoch == 0) {
      std::fill(ws.stamp.begin(), ws.stamp.end(), 0);
      ws.epoch = 1;
    }
    ws.next.clear();
    for (AgentId a : ws.wave) {
      if (!eligible(net, a, c_th)) continue;
      ws.severed.clear();
      bankrupt_keyed(net, a, key, ws.severed);
      ev.bankrupt_agents.push_back(a);
      ev.size += ws.severed.size();
      for (const Connection& c : ws.severed) {
        auto& s = ws.stamp[index(c.src)];
        if (s != ws.epoch) {
          s = ws.epoch;
          ws.next.push_back(c.src);
        }
      }
    }
    ws.wave.clear();
    for (AgentId a : ws.next)
      if (eligible(net, a, c_th)) ws.wave.push_back(a);
    std::sort(ws.wave.begin(), ws.wave.end());
  }
  return ev;
}

std::optional<AvalancheEvent> cascade(Network& net, const DynamicsParams& params, Rng& rng) {
  std::vector<AgentId> all(net.size());
  for (std::uint32_t i = 0; i < net.size(); ++i) all[i] = agent(i);
  CascadeWorkspace ws;
  return cascade_from(net, params, rng, all, ws);
}

StepRecord step(Network& net, const DynamicsParams& params, Rng& rng, CascadeWorkspace& ws) {
  const Connection c = growth_step(net, params, rng);
  StepRecord rec;
  rec.time = net.time();
  // Only the receiver's leverage fell; the source's rose.
  const AgentId touched[1] = {c.dst};
  rec.avalanche = cascade_from(net, params, rng, touched, ws);
  rec.u_t = net.product();
  return rec;
}

Simulation::Simulation(const DynamicsParams& params, std::uint64_t seed)
    : params_(params), rng_(seed), net_(initialize(params_, rng_)) {}

}  // namespace econet
