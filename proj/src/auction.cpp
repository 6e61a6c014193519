#include "ghim/auction.hpp"

#include <algorithm>

#include "ghim/error.hpp"

namespace ghim {

void Issue::validate() const {
  if (issue_id.empty()) throw Error(Errc::invalid_argument, "issue id must be non-empty");
  if (domain_tags.empty()) throw Error(Errc::invalid_argument, "issue " + issue_id + " needs at least one domain tag");
  if (!(difficulty > 0)) throw Error(Errc::invalid_argument, "issue " + issue_id + " difficulty must be positive");
}

std::string_view to_string(AuctionState state) noexcept {
  switch (state) {
    case AuctionState::open: return "open";
    case AuctionState::closed_won: return "closed_won";
    case AuctionState::closed_no_sale: return "closed_no_sale";
    case AuctionState::escrowed: return "escrowed";
    case AuctionState::settled: return "settled";
    case AuctionState::cancelled: return "cancelled";
  }
  return "unknown";
}

bool is_valid_transition(AuctionState from, AuctionState to) noexcept {
  using S = AuctionState;
  switch (from) {
    case S::open: return to == S::closed_won || to == S::closed_no_sale;
    case S::closed_won: return to == S::escrowed || to == S::cancelled;
    case S::escrowed: return to == S::settled || to == S::cancelled;
    case S::closed_no_sale:
    case S::settled:
    case S::cancelled: return false;
  }
  return false;
}

std::optional<Winner> select_winner(std::span<const Bid> bids, Money reserve) {
  const Bid* best = nullptr;
  for (const auto& b : bids) {
    if (b.amount > reserve) continue;
    if (best == nullptr || b.amount < best->amount ||
        (b.amount == best->amount &&
         (b.placed_at < best->placed_at || (b.placed_at == best->placed_at && b.bidder < best->bidder)))) {
      best = &b;
    }
  }
  if (best == nullptr) return std::nullopt;
  return Winner{best->bidder, best->amount};
}

ordered_json to_json(const Auction& a) {
  ordered_json j;
  j["auction_id"] = a.auction_id;
  j["issue_id"] = a.issue_id;
  j["buyer"] = a.buyer.str();
  j["reserve_msat"] = a.reserve.msat();
  j["opened_at_ms"] = a.opened_at;
  j["deadline_ms"] = a.deadline;
  j["state"] = to_string(a.state);
  j["n_bids"] = a.bids.size();
  // Amounts stay sealed while bidding is open.
  if (a.state != AuctionState::open) {
    ordered_json bids = ordered_json::array();
    for (const auto& b : a.bids) {
      ordered_json bj;
      bj["bidder"] = b.bidder.str();
      bj["amount_msat"] = b.amount.msat();
      bj["placed_at_ms"] = b.placed_at;
      bids.push_back(std::move(bj));
    }
    j["bids"] = std::move(bids);
  }
  j["winner_id"] = a.winner ? ordered_json(a.winner->bidder.str()) : ordered_json(nullptr);
  j["price_msat"] = a.winner ? ordered_json(a.winner->price.msat()) : ordered_json(nullptr);
  j["invoice_id"] = a.invoice_id ? ordered_json(*a.invoice_id) : ordered_json(nullptr);
  return j;
}

std::string announcement_payload(const Auction& a, const Issue& issue) {
  ordered_json j;
  j["auction_id"] = a.auction_id;
  j["issue_id"] = a.issue_id;
  j["title"] = issue.title;
  j["reserve_msat"] = a.reserve.msat();
  j["deadline_ms"] = a.deadline;
  return j.dump();
}

std::string result_payload(const Auction& a) {
  ordered_json j;
  j["auction_id"] = a.auction_id;
  j["winner_id"] = a.winner ? ordered_json(a.winner->bidder.str()) : ordered_json(nullptr);
  j["price_msat"] = a.winner ? ordered_json(a.winner->price.msat()) : ordered_json(nullptr);
  return j.dump();
}

AuctionEngine::AuctionEngine(VirtualClock& clock, PubSubBus& bus, PaymentNetwork& payments, EventLog& log,
                             AuctionOptions options)
    : clock_(clock), bus_(bus), payments_(payments), log_(log), options_(options) {}

Auction& AuctionEngine::auction_mut(std::string_view auction_id) {
  const auto it = auctions_.find(auction_id);
  if (it == auctions_.end()) throw Error(Errc::not_found, "unknown auction '" + std::string(auction_id) + "'");
  return it->second;
}

const Auction& AuctionEngine::auction(std::string_view auction_id) const {
  const auto it = auctions_.find(auction_id);
  if (it == auctions_.end()) throw Error(Errc::not_found, "unknown auction '" + std::string(auction_id) + "'");
  return it->second;
}

const Issue& AuctionEngine::issue(std::string_view issue_id) const {
  const auto it = issues_.find(issue_id);
  if (it == issues_.end()) throw Error(Errc::not_found, "unknown issue '" + std::string(issue_id) + "'");
  return it->second;
}

bool AuctionEngine::has_issue(std::string_view issue_id) const { return issues_.contains(issue_id); }

void AuctionEngine::transition(Auction& a, AuctionState to) {
  if (!is_valid_transition(a.state, to)) {
    throw Error(Errc::invalid_state, "auction " + a.auction_id + " cannot move from " +
                                         std::string(to_string(a.state)) + " to " + std::string(to_string(to)));
  }
  a.state = to;
  a.history.push_back(to);
}

std::string AuctionEngine::open_auction(const ActorId& buyer, const Issue& issue, Money reserve, Millis deadline) {
  issue.validate();
  if (reserve.is_zero()) throw Error(Errc::invalid_argument, "reserve must be positive");
  if (deadline <= clock_.now()) throw Error(Errc::invalid_argument, "deadline must be after the current time");
  if (!bus_.has_node(buyer)) throw Error(Errc::not_found, "buyer '" + buyer.str() + "' has no bus node");
  const Money spendable = payments_.spendable_balance(buyer);
  if (spendable < reserve) {
    throw Error(Errc::insufficient_funds, "buyer " + buyer.str() + " can spend " + to_string(spendable) +
                                              ", below the reserve of " + to_string(reserve));
  }
  if (const auto it = issues_.find(issue.issue_id); it != issues_.end() && !(it->second == issue)) {
    throw Error(Errc::duplicate, "issue id '" + issue.issue_id + "' is already registered with different content");
  }
  issues_.emplace(issue.issue_id, issue);

  Auction a;
  a.auction_id = ids_.next("auc");
  a.issue_id = issue.issue_id;
  a.buyer = buyer;
  a.reserve = reserve;
  a.opened_at = clock_.now();
  a.deadline = deadline;
  a.history.push_back(AuctionState::open);
  const std::string id = a.auction_id;
  const Auction& stored = auctions_.emplace(id, std::move(a)).first->second;

  ordered_json tags = ordered_json::array();
  for (const auto& t : issue.domain_tags) tags.push_back(t);
  ordered_json p;
  p["issue_id"] = issue.issue_id;
  p["title"] = issue.title;
  p["domain_tags"] = std::move(tags);
  p["deadline_ms"] = deadline;
  log_.record(clock_.now(), EventKind::auction_opened, buyer, id, reserve, p);
  bus_.publish(buyer, kAnnounceTopic, announcement_payload(stored, issue));
  return id;
}

BidResult AuctionEngine::place_bid(const ActorId& bidder, std::string_view auction_id, Money amount) {
  const auto it = auctions_.find(auction_id);
  if (it == auctions_.end()) return {false, "unknown auction"};
  Auction& a = it->second;
  if (a.state != AuctionState::open) return {false, "auction not open"};
  if (clock_.now() >= a.deadline) return {false, "past deadline"};
  if (bidder == a.buyer) return {false, "self-bid"};
  if (amount.is_zero()) return {false, "zero amount"};
  if (!payments_.is_registered(bidder)) return {false, "unknown bidder"};
  const bool repeat = std::any_of(a.bids.begin(), a.bids.end(), [&](const Bid& b) { return b.bidder == bidder; });
  if (repeat) return {false, "already bid"};

  a.bids.push_back({a.auction_id, bidder, amount, clock_.now(), ++arrivals_});
  ordered_json p;
  p["issue_id"] = a.issue_id;
  log_.record(clock_.now(), EventKind::bid_placed, bidder, a.auction_id, amount, p);
  return {true, {}};
}

void AuctionEngine::log_closed(const Auction& a) {
  const auto eligible = std::count_if(a.bids.begin(), a.bids.end(), [&](const Bid& b) { return b.amount <= a.reserve; });
  ordered_json p;
  p["issue_id"] = a.issue_id;
  p["winner_id"] = a.winner ? ordered_json(a.winner->bidder.str()) : ordered_json(nullptr);
  p["price_msat"] = a.winner ? ordered_json(a.winner->price.msat()) : ordered_json(nullptr);
  p["n_bids"] = a.bids.size();
  p["n_eligible"] = eligible;
  log_.record(clock_.now(), EventKind::auction_closed, a.buyer, a.auction_id,
              a.winner ? std::optional<Money>(a.winner->price) : std::nullopt, p);
}

void AuctionEngine::publish_result(const Auction& a) { bus_.publish(a.buyer, kResultTopic, result_payload(a)); }

std::optional<Winner> AuctionEngine::close_auction(std::string_view auction_id) {
  Auction& a = auction_mut(auction_id);
  if (a.state != AuctionState::open) {
    throw Error(Errc::invalid_state, "auction " + a.auction_id + " is already " + std::string(to_string(a.state)));
  }
  if (clock_.now() < a.deadline) {
    throw Error(Errc::invalid_state, "auction " + a.auction_id + " deadline (" + std::to_string(a.deadline) +
                                         " ms) not reached");
  }
  a.winner = select_winner(a.bids, a.reserve);
  transition(a, a.winner ? AuctionState::closed_won : AuctionState::closed_no_sale);
  log_closed(a);
  publish_result(a);
  return a.winner;
}

EscrowOutcome AuctionEngine::escrow(std::string_view auction_id) {
  Auction& a = auction_mut(auction_id);
  if (a.state != AuctionState::closed_won) {
    throw Error(Errc::invalid_state, "auction " + a.auction_id + " is " + std::string(to_string(a.state)) +
                                         "; escrow needs closed_won");
  }
  const Winner w = *a.winner;
  const Invoice inv = payments_.create_invoice(w.bidder, w.price, true, "escrow " + a.auction_id,
                                               clock_.now() + options_.escrow_expiry_ms, a.auction_id);
  a.invoice_id = inv.invoice_id;
  try {
    payments_.pay_invoice(a.buyer, inv.invoice_id);
  } catch (const Error& e) {
    transition(a, AuctionState::cancelled);
    ordered_json p;
    p["invoice_id"] = inv.invoice_id;
    p["payer"] = a.buyer.str();
    p["payee"] = w.bidder.str();
    p["reason"] = std::string("escrow failed: ") + e.what();
    log_.record(clock_.now(), EventKind::payment_cancelled, w.bidder, a.auction_id, w.price, p);
    return {false, inv.invoice_id, e.what()};
  }
  transition(a, AuctionState::escrowed);
  ordered_json p;
  p["invoice_id"] = inv.invoice_id;
  p["payee"] = w.bidder.str();
  log_.record(clock_.now(), EventKind::escrow_locked, a.buyer, a.auction_id, w.price, p);
  return {true, inv.invoice_id, {}};
}

void AuctionEngine::deliver(const ActorId& winner, std::string_view auction_id, std::string_view artifact_ref) {
  Auction& a = auction_mut(auction_id);
  if (!a.winner || a.winner->bidder != winner) {
    throw Error(Errc::forbidden, winner.str() + " is not the winner of " + a.auction_id);
  }
  if (a.state != AuctionState::escrowed) {
    throw Error(Errc::invalid_state, "auction " + a.auction_id + " is " + std::string(to_string(a.state)) +
                                         "; delivery needs escrowed");
  }
  const Preimage preimage = payments_.preimage_of(winner, *a.invoice_id);
  payments_.settle_hold(winner, preimage, artifact_ref);
  transition(a, AuctionState::settled);
}

AuctionState AuctionEngine::expire_or_cancel(std::string_view auction_id) {
  Auction& a = auction_mut(auction_id);
  switch (a.state) {
    case AuctionState::open: {
      if (clock_.now() < a.deadline) {
        throw Error(Errc::invalid_state, "auction " + a.auction_id + " is still open for bids");
      }
      if (select_winner(a.bids, a.reserve)) {
        throw Error(Errc::invalid_state, "auction " + a.auction_id + " has eligible bids; close it instead");
      }
      transition(a, AuctionState::closed_no_sale);
      log_closed(a);
      publish_result(a);
      break;
    }
    case AuctionState::escrowed: {
      const Invoice& inv = payments_.invoice(*a.invoice_id);
      if (inv.state == InvoiceState::in_flight) {
        payments_.cancel_hold(a.winner->bidder, inv.payment_hash, "auction cancelled");
      }
      transition(a, AuctionState::cancelled);
      break;
    }
    default:
      throw Error(Errc::invalid_state, "auction " + a.auction_id + " is " + std::string(to_string(a.state)) +
                                           " and cannot be expired or cancelled");
  }
  return a.state;
}

}  // namespace ghim
