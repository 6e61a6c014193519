#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghim/event_log.hpp"
#include "ghim/kernel.hpp"
#include "ghim/money.hpp"
#include "ghim/payment.hpp"
#include "ghim/pubsub.hpp"

namespace ghim {

inline constexpr std::string_view kAnnounceTopic = "auctions.announce";
inline constexpr std::string_view kResultTopic = "auctions.result";

struct Issue {
  std::string issue_id;
  std::string title;
  std::string body;
  std::set<std::string> domain_tags;
  double difficulty = 1.0;

  void validate() const;
  bool operator==(const Issue&) const = default;
};

enum class AuctionState { open, closed_won, closed_no_sale, escrowed, settled, cancelled };

std::string_view to_string(AuctionState state) noexcept;
/// Edges of the auction state graph.
bool is_valid_transition(AuctionState from, AuctionState to) noexcept;

struct Bid {
  std::string auction_id;
  ActorId bidder;
  Money amount;
  Millis placed_at = 0;
  /// Arrival order within the engine; fixes the order of same-tick bids.
  std::uint64_t arrival = 0;
};

struct Winner {
  ActorId bidder;
  Money price;

  bool operator==(const Winner&) const = default;
};

/// Sealed-bid first-price reverse auction rule: among bids with amount <=
/// reserve, the lowest amount wins; ties go to the earliest placed_at, then
/// to the lexicographically smallest bidder id.
std::optional<Winner> select_winner(std::span<const Bid> bids, Money reserve);

struct Auction {
  std::string auction_id;
  std::string issue_id;
  ActorId buyer;
  Money reserve;
  Millis opened_at = 0;
  Millis deadline = 0;
  AuctionState state = AuctionState::open;
  std::vector<Bid> bids;
  std::optional<Winner> winner;
  std::optional<std::string> invoice_id;
  std::vector<AuctionState> history;
};

ordered_json to_json(const Auction& a);

struct BidResult {
  bool accepted = false;
  std::string reason;
};

struct EscrowOutcome {
  bool locked = false;
  std::string invoice_id;
  std::string failure;
};

struct AuctionOptions {
  /// Lifetime of the escrow hold invoice, measured from escrow time.
  Millis escrow_expiry_ms = 30LL * 24 * 3600 * 1000;
};

/// Exact bytes carried on the announce and result topics.
std::string announcement_payload(const Auction& a, const Issue& issue);
std::string result_payload(const Auction& a);

/// Reverse-auction lifecycle: open -> bid -> close -> escrow (hold invoice)
/// -> deliver (preimage settles) with the cancel and no-sale exits.
class AuctionEngine {
 public:
  AuctionEngine(VirtualClock& clock, PubSubBus& bus, PaymentNetwork& payments, EventLog& log,
                AuctionOptions options = {});

  std::string open_auction(const ActorId& buyer, const Issue& issue, Money reserve, Millis deadline);
  BidResult place_bid(const ActorId& bidder, std::string_view auction_id, Money amount);
  std::optional<Winner> close_auction(std::string_view auction_id);
  EscrowOutcome escrow(std::string_view auction_id);
  void deliver(const ActorId& winner, std::string_view auction_id, std::string_view artifact_ref);
  AuctionState expire_or_cancel(std::string_view auction_id);

  const Auction& auction(std::string_view auction_id) const;
  const std::map<std::string, Auction, std::less<>>& auctions() const noexcept { return auctions_; }
  const Issue& issue(std::string_view issue_id) const;
  bool has_issue(std::string_view issue_id) const;

 private:
  Auction& auction_mut(std::string_view auction_id);
  void transition(Auction& a, AuctionState to);
  void publish_result(const Auction& a);
  void log_closed(const Auction& a);

  VirtualClock& clock_;
  PubSubBus& bus_;
  PaymentNetwork& payments_;
  EventLog& log_;
  AuctionOptions options_;
  IdGenerator ids_;
  std::uint64_t arrivals_ = 0;
  std::map<std::string, Auction, std::less<>> auctions_;
  std::map<std::string, Issue, std::less<>> issues_;
};

}  // namespace ghim
