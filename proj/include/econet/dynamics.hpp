#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "econet/network.hpp"
#include "econet/rng.hpp"

namespace econet {

enum class GrowthMode { preferential, uniform };

struct DynamicsParams {
  double c_th = -0.70;        // minimum capital level, in (-1, 0)
  std::uint32_t agents = 2000;
  double smoothing = 1.0;     // attractiveness offset added to degrees
  GrowthMode mode = GrowthMode::preferential;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

struct AvalancheEvent {
  std::int64_t trigger_time = 0;
  AgentId trigger_agent{};
  std::vector<AgentId> bankrupt_agents;  // in bankruptcy order
  std::uint64_t size = 0;                // severed connections
  std::uint32_t generations = 0;

  friend bool operator==(const AvalancheEvent&, const AvalancheEvent&) = default;
};

struct StepRecord {
  std::int64_t time = 0;
  double u_t = 0.0;
  std::optional<AvalancheEvent> avalanche;
};

// Reusable buffers for the cascade; keeps the hot loop allocation-free.
struct CascadeWorkspace {
  std::vector<AgentId> wave;
  std::vector<AgentId> next;
  std::vector<Connection> severed;
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
};

// Every agent receives one incoming connection from a uniformly chosen other
// agent, so leverage is defined from step 0.
Network initialize(const DynamicsParams& params, Rng& rng);

// Draws an agent with probability (k_out + a) / sum(k_out + a), or uniformly
// in uniform mode.
AgentId pick_source(const Network& net, const DynamicsParams& params, Rng& rng);

inline constexpr std::uint32_t kMinTargetDraws = 1000;

// As pick_source with k_in; redraws on `source`, giving up with ModelError
// after max(L, kMinTargetDraws) draws.
AgentId pick_target(const Network& net, const DynamicsParams& params, Rng& rng, AgentId source);

// Adds one connection and advances time by one step.
Connection growth_step(Network& net, const DynamicsParams& params, Rng& rng);

// True when the agent is insolvent and has something to sever:
// k_in >= 2 and k_out / k_in - 1 < c_th.
bool eligible(const Network& net, AgentId a, double c_th) noexcept;

// The incoming connection an agent keeps on bankruptcy: the one minimising a
// hash keyed by `key`. Uniform over the in-connections for a random key and
// independent of the order in which agents are processed.
ConnectionId retained_connection(const Network& net, AgentId a, std::uint64_t key);

// Severs all incoming connections of `a` except one retained at random.
// Throws ModelError if k_in < 2.
std::vector<Connection> bankrupt(Network& net, AgentId a, Rng& rng);
// Same, with the retention key supplied; appends to `severed`.
void bankrupt_keyed(Network& net, AgentId a, std::uint64_t key, std::vector<Connection>& severed);

// Runs bankruptcies to quiescence in breadth-first waves, ascending AgentId
// within a wave. The first wave is every eligible agent in the network.
std::optional<AvalancheEvent> cascade(Network& net, const DynamicsParams& params, Rng& rng);
// Same, but the first wave is drawn only from `touched`; valid when every
// agent outside `touched` is known to be ineligible.
std::optional<AvalancheEvent> cascade_from(Network& net, const DynamicsParams& params, Rng& rng,
                                           std::span<const AgentId> touched, CascadeWorkspace& ws);

// growth_step, then cascade, then sample the overall product.
StepRecord step(Network& net, const DynamicsParams& params, Rng& rng, CascadeWorkspace& ws);

// A single run's state: network, random stream and scratch space.
class Simulation {
public:
  Simulation(const DynamicsParams& params, std::uint64_t seed);

  StepRecord step() { return econet::step(net_, params_, rng_, ws_); }

  const Network& network() const noexcept { return net_; }
  Network& network() noexcept { return net_; }
  const DynamicsParams& params() const noexcept { return params_; }

private:
  DynamicsParams params_;
  Rng rng_;
  Network net_;
  CascadeWorkspace ws_;
};

}  // namespace econet
