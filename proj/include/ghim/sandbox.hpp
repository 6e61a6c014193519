#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ghim/auction.hpp"
#include "ghim/event_log.hpp"
#include "ghim/kernel.hpp"
#include "ghim/payment.hpp"
#include "ghim/pubsub.hpp"

namespace ghim {

enum class Role { agent, human, observer, admin };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

/// One simulated world: clock, event log, bus, payment network and auction
/// engine, all drawing randomness from substreams of a single root seed.
class Sandbox {
 public:
  explicit Sandbox(std::uint64_t seed, AuctionOptions options = {});
  Sandbox(const Sandbox&) = delete;
  Sandbox& operator=(const Sandbox&) = delete;

  std::uint64_t seed() const noexcept { return seed_; }

  VirtualClock& clock() noexcept { return clock_; }
  EventLog& log() noexcept { return log_; }
  PubSubBus& bus() noexcept { return bus_; }
  PaymentNetwork& payments() noexcept { return payments_; }
  AuctionEngine& auctions() noexcept { return engine_; }
  const VirtualClock& clock() const noexcept { return clock_; }
  const EventLog& log() const noexcept { return log_; }
  const PubSubBus& bus() const noexcept { return bus_; }
  const PaymentNetwork& payments() const noexcept { return payments_; }
  const AuctionEngine& auctions() const noexcept { return engine_; }

  /// Ledger account plus bus node.
  void add_actor(const ActorId& id, Money funds = Money::zero(), LinkPolicy policy = {});
  /// Adds `id` with no funds if it is not yet known to either subsystem.
  void ensure_actor(const ActorId& id, LinkPolicy policy = {});
  bool has_actor(const ActorId& id) const;

 private:
  std::uint64_t seed_;
  VirtualClock clock_;
  EventLog log_;
  PubSubBus bus_;
  PaymentNetwork payments_;
  AuctionEngine engine_;
};

}  // namespace ghim
