#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghim/encoding.hpp"
#include "ghim/event_log.hpp"
#include "ghim/kernel.hpp"
#include "ghim/money.hpp"

namespace ghim {

enum class InvoiceState { open, in_flight, settled, cancelled, expired };

std::string_view to_string(InvoiceState state) noexcept;

/// Hash-locked amount held on one channel hop of an in-flight payment. The
/// amount has already left the sender-side balance.
struct HtlcHold {
  std::string invoice_id;
  Money amount;
  std::size_t route_position = 0;
  Millis locked_at = 0;
  /// Which party funded the hold (and receives it on settle is the other).
  ActorId sender;
};

struct Channel {
  std::string channel_id;
  ActorId party_a;
  ActorId party_b;
  Money capacity;
  Money balance_a;
  Money balance_b;
  std::vector<HtlcHold> in_flight;

  Money held() const;
  Money balance_of(const ActorId& party) const;
  const ActorId& peer_of(const ActorId& party) const;
};

struct Route {
  std::vector<std::string> hops;
  /// Payer first, payee last; size is hops.size() + 1.
  std::vector<ActorId> nodes;
};

struct Invoice {
  std::string invoice_id;
  ActorId payee;
  Money amount;
  Hash256 payment_hash{};
  bool hold = false;
  Millis expiry = 0;
  InvoiceState state = InvoiceState::open;
  std::string memo;
  /// Optional auction id the payment belongs to; copied onto logged events.
  std::optional<std::string> tag;
  std::optional<ActorId> payer;
  Route route;
};

struct PaymentResult {
  std::string invoice_id;
  Route route;
  InvoiceState state = InvoiceState::open;
};

/// One line of the ledger export.
struct LedgerEvent {
  Millis ts = 0;
  std::string kind;
  std::string channel_id;
  std::string invoice_id;
  Money amount;
  ActorId actor;
};

ordered_json to_json(const LedgerEvent& e);
ordered_json to_json(const Channel& c);
ordered_json to_json(const Invoice& inv);

inline constexpr std::size_t kMaxMemoBytes = 256;

/// In-process payment-channel ledger: on-ledger funds, bilateral channels,
/// hash-locked (hold) invoices and zero-fee multi-hop routing.
///
/// Conservation holds after every public call, successful or not: on-ledger
/// funds plus every channel's balances and holds equal the total supply minted
/// through `register_actor` and `fund`.
class PaymentNetwork {
 public:
  PaymentNetwork(VirtualClock& clock, SeededRng rng, EventLog* log = nullptr);

  void register_actor(const ActorId& actor, Money funds = Money::zero());
  bool is_registered(const ActorId& actor) const;
  std::vector<ActorId> actors() const;
  /// Regtest-style minting; increases the total supply.
  void fund(const ActorId& actor, Money amount);
  Money onchain_balance(const ActorId& actor) const;

  std::string open_channel(const ActorId& a, const ActorId& b, Money capacity, Money push_to_b);
  /// Returns both balances to the parties' on-ledger funds. Requires no holds.
  void close_channel(std::string_view channel_id);

  Invoice create_invoice(const ActorId& payee, Money amount, bool hold, std::string memo, Millis expiry,
                         std::optional<std::string> tag = std::nullopt);
  const Invoice& invoice(std::string_view invoice_id) const;
  const Invoice* find_invoice_by_hash(const Hash256& payment_hash) const;
  /// The payee's retained secret for one of its invoices.
  Preimage preimage_of(const ActorId& payee, std::string_view invoice_id) const;

  Route find_route(const ActorId& payer, const ActorId& payee, Money amount) const;
  PaymentResult pay_invoice(const ActorId& payer, std::string_view invoice_id);
  void settle_hold(const ActorId& payee, const Preimage& preimage, std::string_view note = {});
  void cancel_hold(const ActorId& payee, const Hash256& payment_hash, std::string_view reason = "cancelled");
  /// Expires open invoices and cancels in-flight ones whose expiry has passed.
  std::size_t expire_due();

  Money spendable_balance(const ActorId& node) const;

  Money total_supply() const noexcept { return supply_; }
  /// Sum over on-ledger funds and all channel balances and holds.
  Money total_money() const;
  /// Throws Error(invalid_state) on any conservation or closure violation.
  void check_invariants() const;

  const std::map<std::string, Channel, std::less<>>& channels() const noexcept { return channels_; }
  const Channel& channel(std::string_view channel_id) const;
  std::vector<const Channel*> channels_of(const ActorId& actor) const;
  const std::map<std::string, Invoice, std::less<>>& invoices() const noexcept { return invoices_; }

  const std::vector<LedgerEvent>& ledger() const noexcept { return ledger_; }
  std::string ledger_ndjson() const;
  std::size_t export_ledger(const std::filesystem::path& path) const;

 private:
  Channel& channel_mut(std::string_view channel_id);
  Invoice& invoice_mut(std::string_view invoice_id);
  Money& side_of(Channel& c, const ActorId& party);
  void require_actor(const ActorId& actor) const;
  void lock_route(Invoice& inv, const ActorId& payer, const Route& route);
  void settle_invoice(Invoice& inv, std::string_view note);
  void release_invoice(Invoice& inv, InvoiceState final_state, std::string_view reason);
  void note(std::string kind, std::string channel_id, std::string invoice_id, Money amount, const ActorId& actor);
  SeededRng& preimage_rng(const ActorId& payee);

  VirtualClock& clock_;
  SeededRng rng_;
  EventLog* log_;
  IdGenerator ids_;
  Money supply_;
  std::map<ActorId, Money> onchain_;
  std::map<std::string, Channel, std::less<>> channels_;
  std::map<ActorId, std::vector<std::string>> adjacency_;
  std::map<std::string, Invoice, std::less<>> invoices_;
  std::map<Hash256, std::string> by_hash_;
  std::map<std::string, Preimage, std::less<>> preimages_;
  std::map<ActorId, SeededRng> preimage_rngs_;
  std::vector<LedgerEvent> ledger_;
};

}  // namespace ghim
