#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace econet {

enum class AgentId : std::uint32_t {};
enum class ConnectionId : std::uint64_t {};

constexpr std::uint32_t index(AgentId a) noexcept { return static_cast<std::uint32_t>(a); }
constexpr std::uint64_t index(ConnectionId c) noexcept { return static_cast<std::uint64_t>(c); }
constexpr AgentId agent(std::uint32_t i) noexcept { return static_cast<AgentId>(i); }

// One trade: src delivers one unit of energy to dst.
struct Connection {
  ConnectionId id;
  AgentId src;
  AgentId dst;
  std::int64_t created_at;

  friend bool operator==(const Connection&, const Connection&) = default;
};

// Entry of an incidence list: the connection and the agent at its other end.
struct Incidence {
  ConnectionId id;
  AgentId peer;
};

struct AgentRecord {
  std::uint32_t k_in;
  std::uint32_t k_out;
  bool insolvent;
};

// Price coefficient of a trade from a deliverer with k_out_src outgoing
// connections to a receiver with k_in_dst incoming ones: 2 / (1 + e^-(k_out - k_in)).
double alpha(std::uint64_t k_out_src, std::uint64_t k_in_dst) noexcept;

// Energy balance of the deliverer on one trade, 1 - alpha.
double pair_balance(std::uint64_t k_out_src, std::uint64_t k_in_dst) noexcept;

// pair_balance as a function of the degree imbalance k_out_src - k_in_dst.
// Table-backed; bit-identical to pair_balance.
double pair_balance_at(std::int64_t imbalance) noexcept;

// Directed multigraph over a fixed population of agents.
//
// Connections live in an id-indexed store; each agent keeps incidence lists
// of its live in/out connections with O(1) swap-removal, and degrees sit in
// compact arrays.
//
// The overall product (sum of pair balances over live connections) is kept
// up to date on every mutation: each added or removed connection adjusts the
// sum by its own term, and each degree change re-prices the connections
// incident to that agent.
class Network {
public:
  explicit Network(std::uint32_t agent_count);

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(k_out_.size()); }

  std::uint32_t k_in(AgentId a) const noexcept { return k_in_[index(a)]; }
  std::uint32_t k_out(AgentId a) const noexcept { return k_out_[index(a)]; }
  AgentRecord record(AgentId a) const noexcept { return {k_in(a), k_out(a), insolvent_[index(a)] != 0}; }

  bool insolvent(AgentId a) const noexcept { return insolvent_[index(a)] != 0; }
  void set_insolvent(AgentId a, bool flag) noexcept { insolvent_[index(a)] = flag ? 1 : 0; }

  std::span<const Incidence> in_connections(AgentId a) const noexcept { return in_[index(a)]; }
  std::span<const Incidence> out_connections(AgentId a) const noexcept { return out_[index(a)]; }

  std::uint64_t total_out() const noexcept { return total_out_; }
  std::uint64_t total_in() const noexcept { return total_in_; }
  std::size_t edge_count() const noexcept { return live_.size(); }
  std::uint64_t edges_created() const noexcept { return edges_.size(); }

  // Live connection by dense position in [0, edge_count()). Positions are
  // not stable across removals.
  const Connection& live_edge(std::size_t pos) const noexcept { return edges_[index(live_[pos])].conn; }

  bool contains(ConnectionId id) const noexcept;
  // Throws ModelError for an unknown or removed id.
  const Connection& connection(ConnectionId id) const;
  std::vector<Connection> live_connections() const;

  std::int64_t time() const noexcept { return time_; }
  void advance_time() noexcept { ++time_; }

  // Throws ModelError on self-loops or out-of-range agents.
  Connection add_connection(AgentId src, AgentId dst);
  // Throws ModelError for an unknown or already removed id.
  void remove_connection(ConnectionId id);
  // Removes every incoming connection of `a` except `keep`, appending the
  // removed connections to `severed`. `keep` must be incoming to `a`.
  void sever_incoming_except(AgentId a, ConnectionId keep, std::vector<Connection>& severed);

  // Incrementally maintained overall product.
  double product() const noexcept { return product_; }

private:
  static constexpr std::uint32_t kDead = 0xFFFFFFFFu;

  struct EdgeRecord {
    Connection conn;
    std::uint32_t pos_out;
    std::uint32_t pos_in;
    std::uint32_t pos_live;  // kDead once removed
  };

  void detach_out(const EdgeRecord& rec);
  void detach_in(const EdgeRecord& rec);
  void detach_live(const EdgeRecord& rec);
  // Set k_out / k_in and re-price the agent's current out / in connections.
  void reprice_out(std::uint32_t a, std::uint32_t new_k_out);
  void reprice_in(std::uint32_t a, std::uint32_t new_k_in);

  std::vector<std::vector<Incidence>> out_;
  std::vector<std::vector<Incidence>> in_;
  std::vector<std::uint32_t> k_out_;
  std::vector<std::uint32_t> k_in_;
  std::vector<std::uint8_t> insolvent_;
  std::vector<EdgeRecord> edges_;
  std::vector<ConnectionId> live_;
  std::uint64_t total_out_ = 0;
  std::uint64_t total_in_ = 0;
  std::int64_t time_ = 0;
  double product_ = 0.0;

  // Scratch for sever_incoming_except: severed-edge multiplicity per creditor.
  std::vector<std::uint32_t> creditor_hits_;
  std::vector<std::uint32_t> creditors_;
};

// Mean-field leverage k_out / k_in - 1. Throws ModelError if k_in == 0.
double leverage_mean_field(const Network& net, AgentId a);

// Exact total energy balance of an agent: sum of (1 - alpha) over its
// out-connections plus sum of (alpha - 1) over its in-connections, priced
// from current degrees.
double energy_balance_exact(const Network& net, AgentId a);

}  // namespace econet
