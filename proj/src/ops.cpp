#include "ghim/ops.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "ghim/encoding.hpp"
#include "ghim/error.hpp"
#include "ghim/feedback.hpp"

namespace ghim {

namespace {

using json = nlohmann::json;

constexpr Millis kDefaultInvoiceLifetimeMs = 3600 * 1000;

class Args {
 public:
  Args(const json& j, std::string_view op) : j_(j), op_(op) {
    if (!j.is_null() && !j.is_object()) throw UsageError(std::string(op_) + ": args must be an object");
  }

  bool has(std::string_view key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(std::string_view key) const {
    if (!has(key)) throw UsageError(std::string(op_) + ": missing argument '" + std::string(key) + "'");
    return j_.at(key);
  }

  std::string str(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_string()) bad(key, "string");
    return v.get<std::string>();
  }
  std::string str_or(std::string_view key, std::string fallback) const { return has(key) ? str(key) : fallback; }

  std::uint64_t u64(std::string_view key) const {
    const json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    bad(key, "non-negative integer");
  }
  std::uint64_t u64_or(std::string_view key, std::uint64_t fallback) const { return has(key) ? u64(key) : fallback; }

  std::int64_t i64(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) bad(key, "integer");
    return v.get<std::int64_t>();
  }

  double num_or(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) bad(key, "number");
    return v.get<double>();
  }

  bool flag_or(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) bad(key, "boolean");
    return v.get<bool>();
  }

  Money money(std::string_view key) const { return Money::msat(u64(key)); }

  std::vector<std::string> strings(std::string_view key) const {
    const json& v = at(key);
    std::vector<std::string> out;
    if (v.is_string()) {
      // Comma-separated form used by the CLI.
      std::string cur;
      for (char c : v.get<std::string>()) {
        if (c == ',') {
          if (!cur.empty()) out.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!cur.empty()) out.push_back(cur);
      return out;
    }
    if (!v.is_array()) bad(key, "array of strings");
    for (const auto& e : v) {
      if (!e.is_string()) bad(key, "array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  /// The acting party: defaults to the caller; non-admins may only name
  /// themselves.
  ActorId acting(std::string_view key, const Caller& caller) const {
    if (!has(key)) {
      if (caller.actor.empty()) throw UsageError(std::string(op_) + ": missing argument '" + std::string(key) + "'");
      return caller.actor;
    }
    const auto s = str(key);
    if (s.empty()) throw UsageError(std::string(op_) + ": '" + std::string(key) + "' must be non-empty");
    ActorId id(s);
    if (caller.role != Role::admin && id != caller.actor) {
      throw Error(Errc::forbidden, caller.actor.str() + " may not act as " + id.str());
    }
    return id;
  }

  ActorId actor(std::string_view key) const {
    const auto s = str(key);
    if (s.empty()) throw UsageError(std::string(op_) + ": '" + std::string(key) + "' must be non-empty");
    return ActorId(s);
  }

 private:
  [[noreturn]] void bad(std::string_view key, std::string_view want) const {
    throw UsageError(std::string(op_) + ": argument '" + std::string(key) + "' must be a " + std::string(want));
  }

  const json& j_;
  std::string_view op_;
};

using Handler = std::function<ordered_json(Simulation&, const Args&, const Caller&)>;

void require_admin(const Caller& caller, std::string_view op) {
  if (caller.role != Role::admin) throw Error(Errc::forbidden, std::string(op) + " requires the admin role");
}

void require_party(const Caller& caller, const ActorId& owner, std::string_view what) {
  if (caller.role == Role::admin || caller.actor == owner) return;
  throw Error(Errc::forbidden, caller.actor.str() + " is not the " + std::string(what));
}

std::string hex_of(const std::array<std::uint8_t, 32>& b) { return to_hex(b); }

ordered_json route_json(const Route& r) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : r.nodes) nodes.push_back(n.str());
  return {{"hops", r.hops}, {"nodes", std::move(nodes)}};
}

EventFilter parse_filter(const Args& a) {
  EventFilter f;
  if (a.has("kinds")) {
    std::set<EventKind> kinds;
    for (const auto& k : a.strings("kinds")) {
      const auto kind = parse_event_kind(k);
      if (!kind) throw UsageError("unknown event kind '" + k + "'");
      kinds.insert(*kind);
    }
    f.kinds = std::move(kinds);
  }
  if (a.has("actor")) f.actor = a.actor("actor");
  if (a.has("from_ms") || a.has("to_ms")) {
    const Millis from = a.has("from_ms") ? a.i64("from_ms") : std::numeric_limits<Millis>::min();
    const Millis to = a.has("to_ms") ? a.i64("to_ms") : std::numeric_limits<Millis>::max();
    f.time_range = {from, to};
  }
  if (a.has("auction_id")) f.auction_id = a.str("auction_id");
  if (a.has("limit")) f.limit = a.u64("limit");
  return f;
}

ordered_json auction_summary(const Auction& a) {
  ordered_json j;
  j["auction_id"] = a.auction_id;
  j["issue_id"] = a.issue_id;
  j["buyer"] = a.buyer.str();
  j["reserve_msat"] = a.reserve.msat();
  j["deadline_ms"] = a.deadline;
  j["state"] = to_string(a.state);
  j["n_bids"] = a.bids.size();
  return j;
}

struct Entry {
  OpInfo info;
  Handler handler;
};

const std::map<std::string_view, Entry>& registry();

}  // namespace

ordered_json envelope_json(const Envelope& env) {
  ordered_json j;
  j["msg_id"] = env.msg_id;
  j["topic"] = env.topic;
  j["sender"] = env.sender.str();
  j["seq"] = env.seq;
  j["sent_at_ms"] = env.sent_at;
  j["payload_b64"] = base64_encode(env.payload);
  try {
    (void)json(env.payload).dump();
    j["payload"] = env.payload;
  } catch (const json::type_error&) {
    j["payload"] = nullptr;
  }
  return j;
}

namespace {

ordered_json bus_create_node(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId node = a.acting("node", c);
  LinkPolicy p;
  p.latency_ms_min = static_cast<Millis>(a.u64_or("latency_ms_min", 0));
  p.latency_ms_max = static_cast<Millis>(a.u64_or("latency_ms_max", static_cast<std::uint64_t>(p.latency_ms_min)));
  p.drop_prob = a.num_or("drop_prob", 0.0);
  p.dup_prob = a.num_or("dup_prob", 0.0);
  const NodeHandle h = sim.sandbox().bus().create_node(node, p);
  return {{"node_id", h.node_id.str()}};
}

ordered_json bus_subscribe(Simulation& sim, const Args& a, const Caller& c, bool on) {
  const ActorId node = a.acting("node", c);
  const auto topic = a.str("topic");
  if (on) {
    sim.sandbox().bus().subscribe(node, topic);
  } else {
    sim.sandbox().bus().unsubscribe(node, topic);
  }
  return {{"node_id", node.str()}, {"topic", topic}, {"subscribed", on}};
}

ordered_json bus_publish(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId node = a.acting("node", c);
  const auto topic = a.str("topic");
  std::string payload;
  if (a.has("payload_b64")) {
    const auto decoded = base64_decode(a.str("payload_b64"));
    if (!decoded) throw UsageError("bus.publish: payload_b64 is not valid base64");
    payload = *decoded;
  } else {
    payload = a.str("payload");
  }
  const auto msg_id = sim.sandbox().bus().publish(node, topic, std::move(payload));
  return {{"msg_id", msg_id}};
}

ordered_json bus_poll(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId node = a.acting("node", c);
  ordered_json out = ordered_json::array();
  for (const auto& d : sim.sandbox().bus().poll_inbox(node, a.flag_or("dedup", true))) {
    ordered_json j = envelope_json(d.envelope);
    j["delivered_at_ms"] = d.delivered_at;
    j["duplicate"] = d.duplicate;
    out.push_back(std::move(j));
  }
  return {{"node_id", node.str()}, {"deliveries", std::move(out)}};
}

ordered_json bus_nodes(Simulation& sim, const Args&, const Caller&) {
  ordered_json out = ordered_json::array();
  for (const auto& n : sim.sandbox().bus().nodes()) out.push_back(n.str());
  return {{"nodes", std::move(out)}};
}

ordered_json bus_subscriptions(Simulation& sim, const Args& a, const Caller&) {
  const ActorId node = a.actor("node");
  return {{"node_id", node.str()}, {"topics", sim.sandbox().bus().subscriptions(node)}};
}

ordered_json wallet_register(Simulation& sim, const Args& a, const Caller& c) {
  require_admin(c, "wallet.register");
  const ActorId actor = a.actor("actor");
  const Money funds = a.has("funds_msat") ? a.money("funds_msat") : Money::zero();
  auto& sb = sim.sandbox();
  if (sb.has_actor(actor)) throw Error(Errc::duplicate, "actor '" + actor.str() + "' is already registered");
  sb.ensure_actor(actor, sim.scenario().link_policy);
  if (!funds.is_zero()) sb.payments().fund(actor, funds);
  return {{"actor", actor.str()}, {"onchain_msat", sb.payments().onchain_balance(actor).msat()}};
}

ordered_json wallet_fund(Simulation& sim, const Args& a, const Caller& c) {
  require_admin(c, "wallet.fund");
  const ActorId actor = a.actor("actor");
  sim.sandbox().payments().fund(actor, a.money("amount_msat"));
  return {{"actor", actor.str()}, {"onchain_msat", sim.sandbox().payments().onchain_balance(actor).msat()}};
}

ordered_json wallet_balance(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId actor = a.has("actor") ? a.actor("actor") : a.acting("actor", c);
  const auto& pay = sim.sandbox().payments();
  const bool known = pay.is_registered(actor);
  ordered_json j;
  j["actor"] = actor.str();
  j["registered"] = known;
  j["spendable_msat"] = known ? pay.spendable_balance(actor).msat() : 0;
  j["onchain_msat"] = known ? pay.onchain_balance(actor).msat() : 0;
  return j;
}

ordered_json wallet_open_channel(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId from = a.acting("a", c);
  const ActorId to = a.actor("b");
  const Money push = a.has("push_msat") ? a.money("push_msat") : Money::zero();
  const auto id = sim.sandbox().payments().open_channel(from, to, a.money("capacity_msat"), push);
  return to_json(sim.sandbox().payments().channel(id));
}

ordered_json wallet_close_channel(Simulation& sim, const Args& a, const Caller& c) {
  const auto id = a.str("channel_id");
  auto& pay = sim.sandbox().payments();
  const Channel& ch = pay.channel(id);
  if (c.role != Role::admin && c.actor != ch.party_a && c.actor != ch.party_b) {
    throw Error(Errc::forbidden, c.actor.str() + " is not a party to " + id);
  }
  pay.close_channel(id);
  return {{"channel_id", id}, {"closed", true}};
}

ordered_json wallet_channels(Simulation& sim, const Args& a, const Caller&) {
  const auto& pay = sim.sandbox().payments();
  ordered_json out = ordered_json::array();
  if (a.has("actor")) {
    const ActorId actor = a.actor("actor");
    if (pay.is_registered(actor)) {
      for (const Channel* ch : pay.channels_of(actor)) out.push_back(to_json(*ch));
    }
  } else {
    for (const auto& [id, ch] : pay.channels()) out.push_back(to_json(ch));
  }
  return {{"channels", std::move(out)}};
}

ordered_json wallet_invoice(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId payee = a.acting("payee", c);
  auto& pay = sim.sandbox().payments();
  const Millis expiry = a.has("expiry_ms") ? a.i64("expiry_ms") : sim.sandbox().clock().now() + kDefaultInvoiceLifetimeMs;
  const Invoice inv = pay.create_invoice(payee, a.money("amount_msat"), a.flag_or("hold", false), a.str_or("memo", ""),
                                         expiry, a.has("tag") ? std::optional<std::string>(a.str("tag")) : std::nullopt);
  ordered_json j = to_json(inv);
  // Only the payee ever sees its secret.
  j["preimage"] = hex_of(pay.preimage_of(payee, inv.invoice_id));
  return j;
}

ordered_json wallet_pay(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId payer = a.acting("payer", c);
  const auto r = sim.sandbox().payments().pay_invoice(payer, a.str("invoice_id"));
  return {{"invoice_id", r.invoice_id}, {"state", to_string(r.state)}, {"route", route_json(r.route)}};
}

ordered_json wallet_settle(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId payee = a.acting("payee", c);
  const auto pre = hex32(a.str("preimage"));
  if (!pre) throw UsageError("wallet.settle: preimage must be 64 hex characters");
  auto& pay = sim.sandbox().payments();
  const Invoice* inv = pay.find_invoice_by_hash(sha256(*pre));
  pay.settle_hold(payee, *pre, a.str_or("note", ""));
  return {{"invoice_id", inv ? ordered_json(inv->invoice_id) : ordered_json(nullptr)}, {"state", "settled"}};
}

ordered_json wallet_cancel(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId payee = a.acting("payee", c);
  const auto hash = hex32(a.str("payment_hash"));
  if (!hash) throw UsageError("wallet.cancel: payment_hash must be 64 hex characters");
  auto& pay = sim.sandbox().payments();
  pay.cancel_hold(payee, *hash, a.str_or("reason", "cancelled by payee"));
  const Invoice* inv = pay.find_invoice_by_hash(*hash);
  return {{"invoice_id", inv ? ordered_json(inv->invoice_id) : ordered_json(nullptr)},
          {"state", inv ? ordered_json(to_string(inv->state)) : ordered_json(nullptr)}};
}

ordered_json wallet_route(Simulation& sim, const Args& a, const Caller&) {
  return route_json(sim.sandbox().payments().find_route(a.actor("payer"), a.actor("payee"), a.money("amount_msat")));
}

ordered_json wallet_invoice_status(Simulation& sim, const Args& a, const Caller&) {
  return to_json(sim.sandbox().payments().invoice(a.str("invoice_id")));
}

ordered_json auction_open(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId buyer = a.acting("buyer", c);
  Issue issue;
  issue.issue_id = a.str("issue_id");
  auto& engine = sim.sandbox().auctions();
  if (!a.has("domain_tags") && engine.has_issue(issue.issue_id)) {
    issue = engine.issue(issue.issue_id);
  } else {
    issue.title = a.str_or("title", "");
    issue.body = a.str_or("body", "");
    for (auto& t : a.strings("domain_tags")) issue.domain_tags.insert(std::move(t));
    issue.difficulty = a.num_or("difficulty", 1.0);
  }
  const auto id = engine.open_auction(buyer, issue, a.money("reserve_msat"), a.i64("deadline_ms"));
  return auction_summary(engine.auction(id));
}

ordered_json auction_bid(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId bidder = a.acting("bidder", c);
  const auto id = a.str("auction_id");
  const auto r = sim.sandbox().auctions().place_bid(bidder, id, a.money("amount_msat"));
  if (!r.accepted) throw Error(Errc::rejected, r.reason);
  return {{"auction_id", id}, {"bidder", bidder.str()}, {"accepted", true}};
}

ordered_json auction_close(Simulation& sim, const Args& a, const Caller& c) {
  auto& engine = sim.sandbox().auctions();
  const auto id = a.str("auction_id");
  require_party(c, engine.auction(id).buyer, "buyer of " + id);
  engine.close_auction(id);
  return to_json(engine.auction(id));
}

ordered_json auction_escrow(Simulation& sim, const Args& a, const Caller& c) {
  auto& engine = sim.sandbox().auctions();
  const auto id = a.str("auction_id");
  require_party(c, engine.auction(id).buyer, "buyer of " + id);
  const auto out = engine.escrow(id);
  return {{"auction_id", id},
          {"locked", out.locked},
          {"invoice_id", out.invoice_id},
          {"failure", out.failure.empty() ? ordered_json(nullptr) : ordered_json(out.failure)}};
}

ordered_json auction_deliver(Simulation& sim, const Args& a, const Caller& c) {
  const ActorId winner = a.acting("winner", c);
  const auto id = a.str("auction_id");
  auto& engine = sim.sandbox().auctions();
  engine.deliver(winner, id, a.str_or("artifact_ref", ""));
  return auction_summary(engine.auction(id));
}

ordered_json auction_cancel(Simulation& sim, const Args& a, const Caller& c) {
  auto& engine = sim.sandbox().auctions();
  const auto id = a.str("auction_id");
  require_party(c, engine.auction(id).buyer, "buyer of " + id);
  engine.expire_or_cancel(id);
  return auction_summary(engine.auction(id));
}

ordered_json auction_status(Simulation& sim, const Args& a, const Caller&) {
  return to_json(sim.sandbox().auctions().auction(a.str("auction_id")));
}

ordered_json auction_list(Simulation& sim, const Args& a, const Caller&) {
  ordered_json out = ordered_json::array();
  const auto state = a.str_or("state", "");
  for (const auto& [id, auction] : sim.sandbox().auctions().auctions()) {
    if (!state.empty() && to_string(auction.state) != state) continue;
    out.push_back(auction_summary(auction));
  }
  return {{"auctions", std::move(out)}};
}

ordered_json feedback_query(Simulation& sim, const Args& a, const Caller&) {
  const auto events = sim.sandbox().log().query(parse_filter(a));
  ordered_json out = ordered_json::array();
  for (const auto& e : events) out.push_back(event_to_json(e));
  return {{"events", std::move(out)}};
}

ordered_json feedback_aggregate(Simulation& sim, const Args& a, const Caller&) {
  const auto name = a.str("metric");
  const auto metric = parse_metric(name);
  if (!metric) throw UsageError("feedback.aggregate: unknown metric '" + name + "'");
  return to_json(aggregate(sim.sandbox().log(), *metric, parse_filter(a)));
}

ordered_json feedback_context(Simulation& sim, const Args& a, const Caller&) {
  return to_json(retrieve_context(sim.sandbox().log(), a.str("query"), a.u64_or("k", 5)));
}

ordered_json feedback_answer(Simulation& sim, const Args& a, const Caller&) {
  const auto q = a.str("query");
  return {{"query", q}, {"answer", answer(sim.sandbox().log(), q, a.u64_or("k", 5))}};
}

ordered_json feedback_export(Simulation& sim, const Args& a, const Caller& c) {
  require_admin(c, "feedback.export");
  const auto path = a.str("path");
  const auto bytes = sim.sandbox().log().export_ndjson(path);
  return {{"path", path}, {"bytes", bytes}, {"events", sim.sandbox().log().size()}};
}

ordered_json sim_now(Simulation& sim, const Args&, const Caller&) {
  return {{"now_ms", sim.sandbox().clock().now()}, {"pending_timers", sim.sandbox().clock().pending()}};
}

ordered_json sim_advance(Simulation& sim, const Args& a, const Caller& c) {
  require_admin(c, "sim.advance");
  const auto delta = a.i64("delta_ms");
  if (delta < 0) throw UsageError("sim.advance: delta_ms must be non-negative");
  sim.advance_to(sim.sandbox().clock().now() + delta);
  return {{"now_ms", sim.sandbox().clock().now()}};
}

ordered_json sim_run(Simulation& sim, const Args&, const Caller& c) {
  require_admin(c, "sim.run");
  sim.run();
  return {{"now_ms", sim.sandbox().clock().now()}, {"events", sim.sandbox().log().size()}};
}

ordered_json sim_report(Simulation& sim, const Args&, const Caller&) {
  return to_json(build_report(sim.sandbox().log(), sim.scenario()));
}

const std::map<std::string_view, Entry>& registry() {
  static const std::map<std::string_view, Entry> table = [] {
    std::map<std::string_view, Entry> t;
    auto add = [&](std::string_view name, bool mutating, std::string_view summary, Handler h) {
      t.emplace(name, Entry{{name, mutating, summary}, std::move(h)});
    };
    add("bus.create_node", true, "create a pubsub node", bus_create_node);
    add("bus.subscribe", true, "subscribe a node to a topic",
        [](Simulation& s, const Args& a, const Caller& c) { return bus_subscribe(s, a, c, true); });
    add("bus.unsubscribe", true, "unsubscribe a node from a topic",
        [](Simulation& s, const Args& a, const Caller& c) { return bus_subscribe(s, a, c, false); });
    add("bus.publish", true, "publish a payload on a topic", bus_publish);
    add("bus.poll", true, "drain a node's due deliveries", bus_poll);
    add("bus.nodes", false, "list nodes", bus_nodes);
    add("bus.subscriptions", false, "list a node's topics", bus_subscriptions);
    add("wallet.register", true, "register an actor with optional funds", wallet_register);
    add("wallet.fund", true, "mint on-ledger funds", wallet_fund);
    add("wallet.balance", false, "spendable and on-ledger balance", wallet_balance);
    add("wallet.open_channel", true, "open a channel", wallet_open_channel);
    add("wallet.close_channel", true, "close a channel", wallet_close_channel);
    add("wallet.channels", false, "list channels", wallet_channels);
    add("wallet.invoice", true, "create an invoice", wallet_invoice);
    add("wallet.pay", true, "pay an invoice", wallet_pay);
    add("wallet.settle", true, "settle a hold invoice with its preimage", wallet_settle);
    add("wallet.cancel", true, "cancel a hold invoice", wallet_cancel);
    add("wallet.route", false, "find a payment route", wallet_route);
    add("wallet.invoice_status", false, "show an invoice", wallet_invoice_status);
    add("auction.open", true, "open a reverse auction", auction_open);
    add("auction.bid", true, "place a sealed bid", auction_bid);
    add("auction.close", true, "close an auction after its deadline", auction_close);
    add("auction.escrow", true, "lock the winner's price in a hold invoice", auction_escrow);
    add("auction.deliver", true, "deliver work and settle escrow", auction_deliver);
    add("auction.cancel", true, "expire or cancel an auction", auction_cancel);
    add("auction.status", false, "show an auction", auction_status);
    add("auction.list", false, "list auctions", auction_list);
    add("feedback.query", false, "filter the event log", feedback_query);
    add("feedback.aggregate", false, "compute a metric table", feedback_aggregate);
    add("feedback.context", false, "retrieve top-k relevant events", feedback_context);
    add("feedback.answer", false, "answer a question from retrieved events", feedback_answer);
    add("feedback.export", false, "export the event log as NDJSON", feedback_export);
    add("sim.now", false, "current virtual time", sim_now);
    add("sim.advance", true, "advance virtual time", sim_advance);
    add("sim.run", true, "run until no timers remain", sim_run);
    add("sim.report", false, "metrics report from the log", sim_report);
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<OpInfo>& op_table() {
  static const std::vector<OpInfo> ops = [] {
    std::vector<OpInfo> out;
    for (const auto& [name, e] : registry()) out.push_back(e.info);
    return out;
  }();
  return ops;
}

const OpInfo* find_op(std::string_view name) {
  const auto it = registry().find(name);
  return it == registry().end() ? nullptr : &it->second.info;
}

ordered_json execute_op(Simulation& sim, std::string_view op, const json& args, const Caller& caller) {
  const auto it = registry().find(op);
  if (it == registry().end()) throw UsageError("unknown op '" + std::string(op) + "'");
  const Entry& e = it->second;
  if (caller.role == Role::observer && e.info.mutating) {
    throw Error(Errc::forbidden, "observer sessions cannot run " + std::string(op));
  }
  const Args a(args, op);
  return e.handler(sim, a, caller);
}

}  // namespace ghim
