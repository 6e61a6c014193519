#include "ghim/payment.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include "ghim/error.hpp"

namespace ghim {

std::string_view to_string(InvoiceState state) noexcept {
  switch (state) {
    case InvoiceState::open: return "open";
    case InvoiceState::in_flight: return "in_flight";
    case InvoiceState::settled: return "settled";
    case InvoiceState::cancelled: return "cancelled";
    case InvoiceState::expired: return "expired";
  }
  return "unknown";
}

Money Channel::held() const {
  Money total;
  for (const auto& h : in_flight) total += h.amount;
  return total;
}

Money Channel::balance_of(const ActorId& party) const {
  if (party == party_a) return balance_a;
  if (party == party_b) return balance_b;
  throw Error(Errc::invalid_argument, party.str() + " is not a party of channel " + channel_id);
}

const ActorId& Channel::peer_of(const ActorId& party) const {
  if (party == party_a) return party_b;
  if (party == party_b) return party_a;
  throw Error(Errc::invalid_argument, party.str() + " is not a party of channel " + channel_id);
}

ordered_json to_json(const LedgerEvent& e) {
  ordered_json j;
  j["ts"] = e.ts;
  j["kind"] = e.kind;
  j["channel_id"] = e.channel_id.empty() ? ordered_json(nullptr) : ordered_json(e.channel_id);
  j["invoice_id"] = e.invoice_id.empty() ? ordered_json(nullptr) : ordered_json(e.invoice_id);
  j["amount_msat"] = e.amount.msat();
  j["actor"] = e.actor.str();
  return j;
}

ordered_json to_json(const Channel& c) {
  ordered_json j;
  j["channel_id"] = c.channel_id;
  j["party_a"] = c.party_a.str();
  j["party_b"] = c.party_b.str();
  j["capacity_msat"] = c.capacity.msat();
  j["balance_a_msat"] = c.balance_a.msat();
  j["balance_b_msat"] = c.balance_b.msat();
  j["held_msat"] = c.held().msat();
  j["holds"] = c.in_flight.size();
  return j;
}

ordered_json to_json(const Invoice& inv) {
  ordered_json j;
  j["invoice_id"] = inv.invoice_id;
  j["payee"] = inv.payee.str();
  j["amount_msat"] = inv.amount.msat();
  j["payment_hash"] = to_hex(inv.payment_hash);
  j["hold"] = inv.hold;
  j["expiry_ms"] = inv.expiry;
  j["state"] = to_string(inv.state);
  j["memo"] = inv.memo;
  j["tag"] = inv.tag ? ordered_json(*inv.tag) : ordered_json(nullptr);
  j["payer"] = inv.payer ? ordered_json(inv.payer->str()) : ordered_json(nullptr);
  ordered_json hops = ordered_json::array();
  for (const auto& h : inv.route.hops) hops.push_back(h);
  j["route"] = std::move(hops);
  return j;
}

PaymentNetwork::PaymentNetwork(VirtualClock& clock, SeededRng rng, EventLog* log)
    : clock_(clock), rng_(std::move(rng)), log_(log) {}

void PaymentNetwork::note(std::string kind, std::string channel_id, std::string invoice_id, Money amount,
                          const ActorId& actor) {
  ledger_.push_back({clock_.now(), std::move(kind), std::move(channel_id), std::move(invoice_id), amount, actor});
}

void PaymentNetwork::register_actor(const ActorId& actor, Money funds) {
  if (actor.empty()) throw Error(Errc::invalid_argument, "actor id must be non-empty");
  if (onchain_.contains(actor)) throw Error(Errc::duplicate, "actor '" + actor.str() + "' already registered");
  const Money new_supply = supply_ + funds;
  onchain_.emplace(actor, funds);
  adjacency_[actor];
  supply_ = new_supply;
  note("fund", {}, {}, funds, actor);
}

bool PaymentNetwork::is_registered(const ActorId& actor) const { return onchain_.contains(actor); }

std::vector<ActorId> PaymentNetwork::actors() const {
  std::vector<ActorId> out;
  for (const auto& [id, funds] : onchain_) out.push_back(id);
  return out;
}

void PaymentNetwork::require_actor(const ActorId& actor) const {
  if (!onchain_.contains(actor)) throw Error(Errc::not_found, "unknown actor '" + actor.str() + "'");
}

void PaymentNetwork::fund(const ActorId& actor, Money amount) {
  require_actor(actor);
  const Money new_supply = supply_ + amount;
  const Money new_balance = onchain_.at(actor) + amount;
  supply_ = new_supply;
  onchain_.at(actor) = new_balance;
  note("fund", {}, {}, amount, actor);
}

Money PaymentNetwork::onchain_balance(const ActorId& actor) const {
  require_actor(actor);
  return onchain_.at(actor);
}

std::string PaymentNetwork::open_channel(const ActorId& a, const ActorId& b, Money capacity, Money push_to_b) {
  require_actor(a);
  require_actor(b);
  if (a == b) throw Error(Errc::invalid_argument, "cannot open a channel to self");
  if (capacity.is_zero()) throw Error(Errc::invalid_argument, "channel capacity must be positive");
  if (push_to_b > capacity) throw Error(Errc::invalid_argument, "push amount exceeds channel capacity");
  if (onchain_.at(a) < capacity) {
    throw Error(Errc::insufficient_funds, a.str() + " has " + to_string(onchain_.at(a)) + " on-ledger, needs " +
                                              to_string(capacity));
  }
  onchain_.at(a) -= capacity;
  Channel c;
  c.channel_id = ids_.next("ch");
  c.party_a = a;
  c.party_b = b;
  c.capacity = capacity;
  c.balance_a = capacity - push_to_b;
  c.balance_b = push_to_b;
  adjacency_[a].push_back(c.channel_id);
  adjacency_[b].push_back(c.channel_id);
  note("channel_open", c.channel_id, {}, capacity, a);
  const std::string id = c.channel_id;
  channels_.emplace(id, std::move(c));
  return id;
}

void PaymentNetwork::close_channel(std::string_view channel_id) {
  Channel& c = channel_mut(channel_id);
  if (!c.in_flight.empty()) {
    throw Error(Errc::invalid_state, "channel " + c.channel_id + " has in-flight holds");
  }
  const Money new_a = onchain_.at(c.party_a) + c.balance_a;
  const Money new_b = onchain_.at(c.party_b) + c.balance_b;
  onchain_.at(c.party_a) = new_a;
  onchain_.at(c.party_b) = new_b;
  note("channel_close", c.channel_id, {}, c.capacity, c.party_a);
  for (const auto& party : {c.party_a, c.party_b}) {
    auto& adj = adjacency_.at(party);
    adj.erase(std::remove(adj.begin(), adj.end(), c.channel_id), adj.end());
  }
  channels_.erase(channels_.find(channel_id));
}

Channel& PaymentNetwork::channel_mut(std::string_view channel_id) {
  const auto it = channels_.find(channel_id);
  if (it == channels_.end()) throw Error(Errc::not_found, "unknown channel '" + std::string(channel_id) + "'");
  return it->second;
}

const Channel& PaymentNetwork::channel(std::string_view channel_id) const {
  const auto it = channels_.find(channel_id);
  if (it == channels_.end()) throw Error(Errc::not_found, "unknown channel '" + std::string(channel_id) + "'");
  return it->second;
}

std::vector<const Channel*> PaymentNetwork::channels_of(const ActorId& actor) const {
  require_actor(actor);
  std::vector<const Channel*> out;
  for (const auto& id : adjacency_.at(actor)) out.push_back(&channels_.find(id)->second);
  return out;
}

Money& PaymentNetwork::side_of(Channel& c, const ActorId& party) {
  if (party == c.party_a) return c.balance_a;
  if (party == c.party_b) return c.balance_b;
  throw Error(Errc::invalid_argument, party.str() + " is not a party of channel " + c.channel_id);
}

SeededRng& PaymentNetwork::preimage_rng(const ActorId& payee) {
  auto it = preimage_rngs_.find(payee);
  if (it == preimage_rngs_.end()) it = preimage_rngs_.emplace(payee, rng_.substream("preimage/" + payee.str())).first;
  return it->second;
}

Invoice PaymentNetwork::create_invoice(const ActorId& payee, Money amount, bool hold, std::string memo, Millis expiry,
                                       std::optional<std::string> tag) {
  require_actor(payee);
  if (amount.is_zero()) throw Error(Errc::invalid_argument, "invoice amount must be positive");
  if (expiry <= clock_.now()) throw Error(Errc::invalid_argument, "invoice expiry must be in the future");
  if (memo.size() > kMaxMemoBytes) throw Error(Errc::invalid_argument, "invoice memo exceeds 256 bytes");

  Preimage preimage{};
  Hash256 hash{};
  // A repeated hash would make settlement ambiguous; draw again (2^-256 odds).
  do {
    preimage_rng(payee).fill(preimage);
    hash = sha256(preimage);
  } while (by_hash_.contains(hash));

  Invoice inv;
  inv.invoice_id = ids_.next("inv");
  inv.payee = payee;
  inv.amount = amount;
  inv.payment_hash = hash;
  inv.hold = hold;
  inv.expiry = expiry;
  inv.memo = std::move(memo);
  inv.tag = std::move(tag);
  by_hash_.emplace(hash, inv.invoice_id);
  preimages_.emplace(inv.invoice_id, preimage);
  note("invoice_created", {}, inv.invoice_id, amount, payee);
  invoices_.emplace(inv.invoice_id, inv);
  return inv;
}

const Invoice& PaymentNetwork::invoice(std::string_view invoice_id) const {
  const auto it = invoices_.find(invoice_id);
  if (it == invoices_.end()) throw Error(Errc::not_found, "unknown invoice '" + std::string(invoice_id) + "'");
  return it->second;
}

Invoice& PaymentNetwork::invoice_mut(std::string_view invoice_id) {
  const auto it = invoices_.find(invoice_id);
  if (it == invoices_.end()) throw Error(Errc::not_found, "unknown invoice '" + std::string(invoice_id) + "'");
  return it->second;
}

const Invoice* PaymentNetwork::find_invoice_by_hash(const Hash256& payment_hash) const {
  const auto it = by_hash_.find(payment_hash);
  return it == by_hash_.end() ? nullptr : &invoices_.find(it->second)->second;
}

Preimage PaymentNetwork::preimage_of(const ActorId& payee, std::string_view invoice_id) const {
  const Invoice& inv = invoice(invoice_id);
  if (inv.payee != payee) throw Error(Errc::forbidden, payee.str() + " is not the payee of " + inv.invoice_id);
  return preimages_.find(invoice_id)->second;
}

Route PaymentNetwork::find_route(const ActorId& payer, const ActorId& payee, Money amount) const {
  require_actor(payer);
  require_actor(payee);
  if (payer == payee) throw Error(Errc::invalid_argument, "payer and payee must differ");

  auto usable = [&](const Channel& c, const ActorId& sender) { return c.balance_of(sender) >= amount; };

  // Hop distance to the payee over edges whose sender side can carry `amount`.
  std::map<ActorId, std::size_t> dist{{payee, 0}};
  std::deque<ActorId> frontier{payee};
  while (!frontier.empty() && !dist.contains(payer)) {
    const ActorId v = frontier.front();
    frontier.pop_front();
    for (const auto& id : adjacency_.at(v)) {
      const Channel& c = channels_.find(id)->second;
      const ActorId& u = c.peer_of(v);
      if (!dist.contains(u) && usable(c, u)) {
        dist.emplace(u, dist.at(v) + 1);
        frontier.push_back(u);
      }
    }
  }
  if (!dist.contains(payer)) {
    throw Error(Errc::no_route, "no route from " + payer.str() + " to " + payee.str() + " for " + to_string(amount));
  }

  // Greedy smallest-next-node walk down the distance gradient yields the
  // lexicographically smallest node sequence among minimum-hop routes.
  Route route;
  route.nodes.push_back(payer);
  ActorId u = payer;
  while (u != payee) {
    const std::size_t want = dist.at(u) - 1;
    const Channel* best = nullptr;
    for (const auto& id : adjacency_.at(u)) {
      const Channel& c = channels_.find(id)->second;
      const ActorId& v = c.peer_of(u);
      const auto d = dist.find(v);
      if (d == dist.end() || d->second != want || !usable(c, u)) continue;
      if (best == nullptr || v < best->peer_of(u) || (v == best->peer_of(u) && c.channel_id < best->channel_id)) {
        best = &c;
      }
    }
    route.hops.push_back(best->channel_id);
    u = best->peer_of(u);
    route.nodes.push_back(u);
  }
  return route;
}

void PaymentNetwork::lock_route(Invoice& inv, const ActorId& payer, const Route& route) {
  for (std::size_t i = 0; i < route.hops.size(); ++i) {
    Channel& c = channel_mut(route.hops[i]);
    const ActorId& sender = route.nodes[i];
    side_of(c, sender) -= inv.amount;
    c.in_flight.push_back({inv.invoice_id, inv.amount, i, clock_.now(), sender});
    note("htlc_lock", c.channel_id, inv.invoice_id, inv.amount, sender);
  }
  inv.payer = payer;
  inv.route = route;
  inv.state = InvoiceState::in_flight;
}

PaymentResult PaymentNetwork::pay_invoice(const ActorId& payer, std::string_view invoice_id) {
  require_actor(payer);
  Invoice& inv = invoice_mut(invoice_id);
  if (inv.state == InvoiceState::open && clock_.now() >= inv.expiry) {
    inv.state = InvoiceState::expired;
    note("invoice_expired", {}, inv.invoice_id, inv.amount, inv.payee);
  }
  if (inv.state == InvoiceState::expired) throw Error(Errc::expired, "invoice " + inv.invoice_id + " has expired");
  if (inv.state != InvoiceState::open) {
    throw Error(Errc::invalid_state, "invoice " + inv.invoice_id + " is already " + std::string(to_string(inv.state)));
  }
  const Route route = find_route(payer, inv.payee, inv.amount);
  lock_route(inv, payer, route);
  if (!inv.hold) settle_invoice(inv, {});
  return PaymentResult{inv.invoice_id, inv.route, inv.state};
}

void PaymentNetwork::settle_invoice(Invoice& inv, std::string_view note_text) {
  for (const auto& channel_id : inv.route.hops) {
    Channel& c = channel_mut(channel_id);
    const auto it = std::find_if(c.in_flight.begin(), c.in_flight.end(),
                                 [&](const HtlcHold& h) { return h.invoice_id == inv.invoice_id; });
    const ActorId receiver = c.peer_of(it->sender);
    side_of(c, receiver) += it->amount;
    note("htlc_settle", c.channel_id, inv.invoice_id, it->amount, receiver);
    c.in_flight.erase(it);
  }
  inv.state = InvoiceState::settled;
  if (log_) {
    ordered_json p;
    p["invoice_id"] = inv.invoice_id;
    p["payer"] = inv.payer->str();
    p["payee"] = inv.payee.str();
    if (!note_text.empty()) p["note"] = note_text;
    log_->record(clock_.now(), EventKind::payment_settled, inv.payee, inv.tag, inv.amount, p);
  }
}

void PaymentNetwork::release_invoice(Invoice& inv, InvoiceState final_state, std::string_view reason) {
  for (const auto& channel_id : inv.route.hops) {
    Channel& c = channel_mut(channel_id);
    const auto it = std::find_if(c.in_flight.begin(), c.in_flight.end(),
                                 [&](const HtlcHold& h) { return h.invoice_id == inv.invoice_id; });
    side_of(c, it->sender) += it->amount;
    note("htlc_cancel", c.channel_id, inv.invoice_id, it->amount, it->sender);
    c.in_flight.erase(it);
  }
  inv.state = final_state;
  if (log_) {
    ordered_json p;
    p["invoice_id"] = inv.invoice_id;
    p["payer"] = inv.payer->str();
    p["payee"] = inv.payee.str();
    p["reason"] = reason;
    log_->record(clock_.now(), EventKind::payment_cancelled, inv.payee, inv.tag, inv.amount, p);
  }
}

void PaymentNetwork::settle_hold(const ActorId& payee, const Preimage& preimage, std::string_view note_text) {
  const Hash256 hash = sha256(preimage);
  const auto it = by_hash_.find(hash);
  if (it == by_hash_.end()) throw Error(Errc::not_found, "no invoice matches the preimage");
  Invoice& inv = invoice_mut(it->second);
  if (inv.payee != payee) throw Error(Errc::forbidden, payee.str() + " is not the payee of " + inv.invoice_id);
  if (inv.state != InvoiceState::in_flight) {
    throw Error(Errc::invalid_state, "invoice " + inv.invoice_id + " is " + std::string(to_string(inv.state)) +
                                         ", not in flight");
  }
  settle_invoice(inv, note_text);
}

void PaymentNetwork::cancel_hold(const ActorId& payee, const Hash256& payment_hash, std::string_view reason) {
  const auto it = by_hash_.find(payment_hash);
  if (it == by_hash_.end()) throw Error(Errc::not_found, "unknown payment hash " + to_hex(payment_hash));
  Invoice& inv = invoice_mut(it->second);
  if (inv.payee != payee) throw Error(Errc::forbidden, payee.str() + " is not the payee of " + inv.invoice_id);
  if (inv.state != InvoiceState::in_flight) {
    throw Error(Errc::invalid_state, "invoice " + inv.invoice_id + " is " + std::string(to_string(inv.state)) +
                                         ", not in flight");
  }
  release_invoice(inv, InvoiceState::cancelled, reason);
}

std::size_t PaymentNetwork::expire_due() {
  std::size_t n = 0;
  const Millis now = clock_.now();
  for (auto& [id, inv] : invoices_) {
    if (now < inv.expiry) continue;
    if (inv.state == InvoiceState::open) {
      inv.state = InvoiceState::expired;
      note("invoice_expired", {}, inv.invoice_id, inv.amount, inv.payee);
      ++n;
    } else if (inv.state == InvoiceState::in_flight) {
      release_invoice(inv, InvoiceState::expired, "expired");
      ++n;
    }
  }
  return n;
}

Money PaymentNetwork::spendable_balance(const ActorId& node) const {
  require_actor(node);
  Money total;
  for (const auto& id : adjacency_.at(node)) total += channels_.find(id)->second.balance_of(node);
  return total;
}

Money PaymentNetwork::total_money() const {
  Money total;
  for (const auto& [id, funds] : onchain_) total += funds;
  for (const auto& [id, c] : channels_) total += c.balance_a + c.balance_b + c.held();
  return total;
}

void PaymentNetwork::check_invariants() const {
  for (const auto& [id, c] : channels_) {
    if (c.balance_a + c.balance_b + c.held() != c.capacity) {
      throw Error(Errc::invalid_state, "channel " + id + " violates balance closure");
    }
  }
  if (total_money() != supply_) throw Error(Errc::invalid_state, "money supply is not conserved");
  for (const auto& [id, c] : channels_) {
    for (const auto& h : c.in_flight) {
      if (invoice(h.invoice_id).state != InvoiceState::in_flight) {
        throw Error(Errc::invalid_state, "stale hold for " + h.invoice_id + " on " + id);
      }
    }
  }
}

std::string PaymentNetwork::ledger_ndjson() const {
  std::string out;
  for (const auto& e : ledger_) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::size_t PaymentNetwork::export_ledger(const std::filesystem::path& path) const {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io, "cannot write ledger to " + path.string());
  const std::string text = ledger_ndjson();
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  return text.size();
}

}  // namespace ghim
