#include "econet/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "econet/error.hpp"

namespace econet {

namespace {

double alpha_of(double imbalance) noexcept { return 2.0 / (1.0 + std::exp(-imbalance)); }

// Beyond |imbalance| = 64 the logistic is saturated in double precision:
// 1 - alpha is exactly -1 above and exactly +1 below.
constexpr std::int64_t kTableHalfWidth = 64;

std::array<double, 2 * kTableHalfWidth + 1> make_balance_table() {
  std::array<double, 2 * kTableHalfWidth + 1> t{};
  for (std::int64_t x = -kTableHalfWidth; x <= kTableHalfWidth; ++x)
    t[static_cast<std::size_t>(x + kTableHalfWidth)] = 1.0 - alpha_of(static_cast<double>(x));
  return t;
}

const std::array<double, 2 * kTableHalfWidth + 1> kBalanceTable = make_balance_table();

std::string id_str(ConnectionId id) { return std::to_string(index(id)); }

}  // namespace

// The logistic never reaches its asymptotes; keep that true after rounding.
double alpha(std::uint64_t k_out_src, std::uint64_t k_in_dst) noexcept {
  const double a = alpha_of(static_cast<double>(k_out_src) - static_cast<double>(k_in_dst));
  return std::clamp(a, std::numeric_limits<double>::denorm_min(), std::nextafter(2.0, 0.0));
}

double pair_balance(std::uint64_t k_out_src, std::uint64_t k_in_dst) noexcept {
  return 1.0 - alpha(k_out_src, k_in_dst);
}

double pair_balance_at(std::int64_t imbalance) noexcept {
  if (imbalance > kTableHalfWidth) return -1.0;
  if (imbalance < -kTableHalfWidth) return 1.0;
  return kBalanceTable[static_cast<std::size_t>(imbalance + kTableHalfWidth)];
}

Network::Network(std::uint32_t agent_count)
    : out_(agent_count),
      in_(agent_count),
      k_out_(agent_count, 0),
      k_in_(agent_count, 0),
      insolvent_(agent_count, 0),
      creditor_hits_(agent_count, 0) {}

bool Network::contains(ConnectionId id) const noexcept {
  return index(id) < edges_.size() && edges_[index(id)].pos_live != kDead;
}

const Connection& Network::connection(ConnectionId id) const {
  if (!contains(id)) throw ModelError("unknown connection id " + id_str(id));
  return edges_[index(id)].conn;
}

std::vector<Connection> Network::live_connections() const {
  std::vector<Connection> out;
  out.reserve(live_.size());
  for (ConnectionId id : live_) out.push_back(edges_[index(id)].conn);
  return out;
}

void Network::reprice_out(std::uint32_t a, std::uint32_t new_k_out) {
  const auto before = static_cast<std::int64_t>(k_out_[a]);
  const auto after = static_cast<std::int64_t>(new_k_out);
  double delta = 0.0;
  for (const Incidence& e : out_[a]) {
    const auto b = static_cast<std::int64_t>(k_in_[index(e.peer)]);
    delta += pair_balance_at(after - b) - pair_balance_at(before - b);
  }
  product_ += delta;
  k_out_[a] = new_k_out;
}

void Network::reprice_in(std::uint32_t a, std::uint32_t new_k_in) {
  const auto before = static_cast<std::int64_t>(k_in_[a]);
  const auto after = static_cast<std::int64_t>(new_k_in);
  double delta = 0.0;
  for (const Incidence& e : in_[a]) {
    const auto k = static_cast<std::int64_t>(k_out_[index(e.peer)]);
    delta += pair_balance_at(k - after) - pair_balance_at(k - before);
  }
  product_ += delta;
  k_in_[a] = new_k_in;
}

Connection Network::add_connection(AgentId src, AgentId dst) {
  if (index(src) >= size() || index(dst) >= size())
    throw ModelError("add_connection: agent out of range");
  if (src == dst)
    throw ModelError("add_connection: self-loop on agent " + std::to_string(index(src)));

  const auto id = static_cast<ConnectionId>(edges_.size());
  auto& outs = out_[index(src)];
  auto& ins = in_[index(dst)];
  EdgeRecord rec{Connection{id, src, dst, time_}, static_cast<std::uint32_t>(outs.size()),
                 static_cast<std::uint32_t>(ins.size()), static_cast<std::uint32_t>(live_.size())};
  edges_.push_back(rec);
  product_ += pair_balance_at(static_cast<std::int64_t>(k_out_[index(src)]) -
                              static_cast<std::int64_t>(k_in_[index(dst)]));
  outs.push_back({id, dst});
  ins.push_back({id, src});
  live_.push_back(id);
  ++total_out_;
  ++total_in_;
  reprice_out(index(src), k_out_[index(src)] + 1);
  reprice_in(index(dst), k_in_[index(dst)] + 1);
  return rec.conn;
}

void Network::detach_out(const EdgeRecord& rec) {
  auto& list = out_[index(rec.conn.src)];
  const Incidence moved = list.back();
  list[rec.pos_out] = moved;
  edges_[index(moved.id)].pos_out = rec.pos_out;
  list.pop_back();
}

void Network::detach_in(const EdgeRecord& rec) {
  auto& list = in_[index(rec.conn.dst)];
  const Incidence moved = list.back();
  list[rec.pos_in] = moved;
  edges_[index(moved.id)].pos_in = rec.pos_in;
  list.pop_back();
}

void Network::detach_live(const EdgeRecord& rec) {
  const ConnectionId moved = live_.back();
  live_[rec.pos_live] = moved;
  edges_[index(moved)].pos_live = rec.pos_live;
  live_.pop_back();
}

void Network::remove_connection(ConnectionId id) {
  if (!contains(id)) throw ModelError("remove_connection: unknown connection id " + id_str(id));
  auto& rec = edges_[index(id)];
  const auto s = index(rec.conn.src);
  const auto d = index(rec.conn.dst);
  product_ -= pair_balance_at(static_cast<std::int64_t>(k_out_[s]) - static_cast<std::int64_t>(k_in_[d]));
  detach_out(rec);
  detach_in(rec);
  detach_live(rec);
  rec.pos_live = kDead;
  --total_out_;
  --total_in_;
  reprice_out(s, k_out_[s] - 1);
  reprice_in(d, k_in_[d] - 1);
}

void Network::sever_incoming_except(AgentId a, ConnectionId keep, std::vector<Connection>& severed) {
  if (!contains(keep) || edges_[index(keep)].conn.dst != a)
    throw ModelError("sever_incoming_except: retained connection is not incoming to the agent");
  const auto ai = index(a);
  const auto k_in_a = static_cast<std::int64_t>(k_in_[ai]);
  auto& ins = in_[ai];
  creditors_.clear();
  for (const Incidence& e : ins) {
    if (e.id == keep) continue;
    auto& rec = edges_[index(e.id)];
    const auto s = index(e.peer);
    product_ -= pair_balance_at(static_cast<std::int64_t>(k_out_[s]) - k_in_a);
    detach_out(rec);
    detach_live(rec);
    rec.pos_live = kDead;
    if (creditor_hits_[s]++ == 0) creditors_.push_back(s);
    severed.push_back(rec.conn);
  }
  const auto removed = ins.size() - 1;
  total_out_ -= removed;
  total_in_ -= removed;
  const Incidence kept{keep, edges_[index(keep)].conn.src};
  ins.assign(1, kept);
  edges_[index(keep)].pos_in = 0;
  reprice_in(ai, 1);
  for (std::uint32_t s : creditors_) {
    reprice_out(s, k_out_[s] - creditor_hits_[s]);
    creditor_hits_[s] = 0;
  }
}

double leverage_mean_field(const Network& net, AgentId a) {
  const auto k_in = net.k_in(a);
  if (k_in == 0)
    throw ModelError("leverage undefined: agent " + std::to_string(index(a)) + " has no incoming connection");
  return static_cast<double>(net.k_out(a)) / static_cast<double>(k_in) - 1.0;
}

double energy_balance_exact(const Network& net, AgentId a) {
  double u = 0.0;
  for (const Incidence& e : net.out_connections(a)) u += 1.0 - alpha(net.k_out(a), net.k_in(e.peer));
  for (const Incidence& e : net.in_connections(a)) u += alpha(net.k_out(e.peer), net.k_in(a)) - 1.0;
  return u;
}

}  // namespace econet
