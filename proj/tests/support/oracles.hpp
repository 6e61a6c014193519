#pragma once

// Brute-force reference implementations used as oracles by the tests. They
// deliberately avoid calling the production code paths they check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ghim/auction.hpp"
#include "ghim/event_log.hpp"
#include "ghim/feedback.hpp"
#include "ghim/scenario.hpp"
#include "json.hpp"

namespace ghim::test {

struct RefBid {
  std::string bidder;
  std::uint64_t amount;
  std::int64_t at;
};

/// The winner is the eligible bid that no other eligible bid beats on
/// (amount, time, bidder id).
inline std::optional<RefBid> winner_oracle(const std::vector<RefBid>& bids, std::uint64_t reserve) {
  for (const auto& candidate : bids) {
    if (candidate.amount > reserve) continue;
    bool beaten = false;
    for (const auto& other : bids) {
      if (&other == &candidate || other.amount > reserve) continue;
      if (other.amount < candidate.amount) beaten = true;
      if (other.amount == candidate.amount && other.at < candidate.at) beaten = true;
      if (other.amount == candidate.amount && other.at == candidate.at && other.bidder < candidate.bidder) beaten = true;
    }
    if (!beaten) return candidate;
  }
  return std::nullopt;
}

inline bool filter_oracle(const EventFilter& f, const Event& e) {
  if (f.kinds && std::find(f.kinds->begin(), f.kinds->end(), e.kind) == f.kinds->end()) return false;
  if (f.actor && !(e.actor == *f.actor)) return false;
  if (f.time_range && !(e.ts >= f.time_range->first && e.ts < f.time_range->second)) return false;
  if (f.auction_id && (!e.auction_id || *e.auction_id != *f.auction_id)) return false;
  return true;
}

inline std::vector<Event> query_oracle(const std::vector<Event>& events, const EventFilter& f) {
  std::vector<Event> out;
  for (const auto& e : events) {
    if (out.size() >= f.limit) break;
    if (filter_oracle(f, e)) out.push_back(e);
  }
  return out;
}

/// (key, num, den) rows; den == 0 marks "undefined".
struct RefRow {
  std::string key;
  long long num;
  long long den;
  bool operator==(const RefRow&) const = default;
};

inline std::vector<RefRow> aggregate_oracle(const std::vector<Event>& events, Metric metric, const EventFilter& scope) {
  std::vector<const Event*> in;
  for (const auto& e : events) {
    if (filter_oracle(scope, e)) in.push_back(&e);
  }
  auto field = [](const Event& e, const char* name) -> std::optional<std::string> {
    const auto j = nlohmann::json::parse(e.payload);
    if (j.is_object() && j.contains(name) && j[name].is_string()) return j[name].get<std::string>();
    return std::nullopt;
  };
  auto mean_row = [](long long sum, long long n) {
    return std::vector<RefRow>{{"all", n ? sum : 0, n}};
  };
  long long sum = 0, n = 0;
  std::map<std::string, long long> per;
  switch (metric) {
    case Metric::mean_clearing_price:
      for (auto* e : in) {
        if (e->kind == EventKind::payment_settled && e->auction_id) {
          sum += static_cast<long long>(e->amount ? e->amount->msat() : 0);
          ++n;
        }
      }
      return mean_row(sum, n);
    case Metric::cost_per_resolved_issue:
      for (auto* e : in) {
        if (e->kind == EventKind::issue_solved) {
          sum += static_cast<long long>(e->amount ? e->amount->msat() : 0);
          ++n;
        }
      }
      return mean_row(sum, n);
    case Metric::auction_count:
      for (auto* e : in) n += e->kind == EventKind::auction_opened;
      return {{"all", n, 1}};
    case Metric::win_count_by_agent:
      for (auto* e : in) {
        if (e->kind != EventKind::auction_closed) continue;
        if (auto w = field(*e, "winner_id")) per[*w] += 1;
      }
      break;
    case Metric::net_balance_by_agent:
      for (auto* e : in) {
        if (e->kind != EventKind::payment_settled) continue;
        const auto amt = static_cast<long long>(e->amount ? e->amount->msat() : 0);
        per[e->actor.str()] += amt;
        if (auto p = field(*e, "payer")) per[*p] -= amt;
      }
      break;
  }
  std::vector<RefRow> rows;
  for (const auto& [k, v] : per) rows.push_back({k, v, 1});
  return rows;
}

inline std::vector<RefRow> rows_of(const MetricTable& t) {
  std::vector<RefRow> rows;
  for (const auto& r : t.rows) {
    if (r.value) {
      rows.push_back({r.key, r.value->num, r.value->den});
    } else {
      rows.push_back({r.key, 0, 0});
    }
  }
  return rows;
}

/// Case-folded maximal runs of ASCII alphanumerics and non-ASCII bytes.
inline std::set<std::string> tokens_oracle(const std::string& text) {
  std::set<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    const bool keep = c >= 0x80 || std::isalnum(c);
    if (keep) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
      continue;
    }
    if (!cur.empty()) out.insert(cur);
    cur.clear();
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

/// Repeated selection of the best remaining (score, seq) pair.
inline std::vector<std::pair<std::uint64_t, std::size_t>> retrieval_oracle(const std::vector<Event>& events,
                                                                           const std::string& query, std::size_t k) {
  const auto q = tokens_oracle(query);
  std::vector<std::pair<std::size_t, std::uint64_t>> pool;
  for (const auto& e : events) {
    const auto t = tokens_oracle(e.payload + " " + std::string(to_string(e.kind)) + " " + e.actor.str());
    std::size_t score = 0;
    for (const auto& w : q) score += t.count(w);
    if (score) pool.emplace_back(score, e.seq);
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
  while (ranked.size() < k && !pool.empty()) {
    auto best = pool.begin();
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      if (it->first > best->first || (it->first == best->first && it->second > best->second)) best = it;
    }
    ranked.emplace_back(best->second, best->first);
    pool.erase(best);
  }
  return ranked;
}

// ---------------------------------------------------------------- scenario builders

inline AgentSpec agent_spec(const std::string& id, std::map<std::string, std::uint64_t> costs,
                            std::uint64_t budget = 1'000'000'000'000ULL) {
  AgentSpec a;
  a.config.agent_id = ActorId(id);
  a.config.budget = Money::msat(budget);
  for (const auto& [d, c] : costs) a.config.cost_model.base_cost_by_domain[d] = Money::msat(c);
  if (!a.config.cost_model.base_cost_by_domain.count("default")) {
    a.config.cost_model.base_cost_by_domain["default"] = Money::msat(1'000'000);
  }
  return a;
}

inline Issue issue_of(const std::string& id, std::set<std::string> tags) {
  Issue i;
  i.issue_id = id;
  i.title = "issue " + id;
  i.domain_tags = std::move(tags);
  return i;
}

inline HubTopology hub_of(std::uint64_t capacity) { return HubTopology{ActorId("hub"), Money::msat(capacity), std::nullopt}; }

/// `n` truthful bidders with cost R*U, U ~ uniform[0,1), and one buyer
/// running `count` sequential auctions with reserve R.
inline Scenario competition_scenario(std::size_t n, std::size_t count, std::uint64_t r, std::uint64_t seed) {
  Scenario s;
  s.name = "competition";
  s.seed = seed;
  s.agents.push_back(agent_spec("buyer", {{"default", r}}));
  for (std::size_t i = 0; i < n; ++i) {
    auto a = agent_spec("bidder-" + std::to_string(i + 1), {{"default", r}});
    a.config.cost_model.noise_kind = NoiseKind::uniform;
    a.config.cost_model.uniform_lo = 0.0;
    a.config.cost_model.uniform_hi = 1.0;
    s.agents.push_back(a);
  }
  for (std::size_t k = 0; k < count; ++k) {
    const auto id = "c-" + std::to_string(k);
    s.issues.push_back(issue_of(id, {"general"}));
    const Millis open = static_cast<Millis>(k) * 10;
    s.schedule.push_back({id, ActorId("buyer"), Money::msat(r), open, open + 5});
  }
  // Enough capacity that the lone bidder at n=1 can receive every payment.
  s.hub = hub_of(static_cast<std::uint64_t>(count) * r * 2 + 2 * r);
  s.solve_delay_ms = 1;
  return s;
}

}  // namespace ghim::test

namespace ghim::test {

/// Random log of up to `max_events` events over a small vocabulary so that
/// filters, metrics and queries hit often.
inline EventLog random_log(SeededRng& r, std::size_t max_events) {
  static const std::vector<std::string> actors = {"alpha", "beta", "gamma", "delta", "Hub"};
  static const std::vector<std::string> words = {"frontend", "database", "auction", "alpha", "Fix", "crash",
                                                 "ui",       "bid",      "näive",   "x9"};
  const auto& kinds = all_event_kinds();
  EventLog log;
  const auto n = r.uniform_int(std::uint64_t{0}, std::uint64_t(max_events));
  Millis ts = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    ts += static_cast<Millis>(r.uniform_int(std::uint64_t{0}, std::uint64_t{3}));
    const auto kind = kinds[r.uniform_int(std::uint64_t{0}, std::uint64_t(kinds.size() - 1))];
    const auto& actor = actors[r.uniform_int(std::uint64_t{0}, std::uint64_t(actors.size() - 1))];
    std::optional<std::string> auction;
    if (r.bernoulli(0.7)) auction = "auc-" + std::to_string(r.uniform_int(std::uint64_t{1}, std::uint64_t{4}));
    std::optional<Money> amount;
    if (r.bernoulli(0.8)) amount = Money::msat(r.uniform_int(std::uint64_t{1}, std::uint64_t{5000}));
    ordered_json payload = ordered_json::object();
    if (r.bernoulli(0.6)) payload["winner_id"] = actors[r.uniform_int(std::uint64_t{0}, std::uint64_t{4})];
    if (r.bernoulli(0.2)) payload["winner_id"] = nullptr;
    if (r.bernoulli(0.6)) payload["payer"] = actors[r.uniform_int(std::uint64_t{0}, std::uint64_t{4})];
    std::string note;
    for (int w = 0; w < 3; ++w) note += words[r.uniform_int(std::uint64_t{0}, std::uint64_t(words.size() - 1))] + " ";
    payload["note"] = note;
    log.record(ts, kind, ActorId(actor), auction, amount, payload);
  }
  return log;
}

inline EventFilter random_filter(SeededRng& r, Millis max_ts) {
  static const std::vector<std::string> actors = {"alpha", "beta", "gamma", "delta", "Hub"};
  EventFilter f;
  if (r.bernoulli(0.5)) {
    std::set<EventKind> ks;
    for (auto k : all_event_kinds()) {
      if (r.bernoulli(0.3)) ks.insert(k);
    }
    f.kinds = ks;
  }
  if (r.bernoulli(0.4)) f.actor = ActorId(actors[r.uniform_int(std::uint64_t{0}, std::uint64_t{4})]);
  if (r.bernoulli(0.4)) {
    const auto a = r.uniform_int(std::int64_t{0}, max_ts + 1);
    const auto b = r.uniform_int(std::int64_t{0}, max_ts + 1);
    f.time_range = std::pair<Millis, Millis>{std::min(a, b), std::max(a, b)};
  }
  if (r.bernoulli(0.3)) f.auction_id = "auc-" + std::to_string(r.uniform_int(std::uint64_t{1}, std::uint64_t{5}));
  if (r.bernoulli(0.3)) f.limit = r.uniform_int(std::uint64_t{1}, std::uint64_t{30});
  return f;
}

inline std::string random_query(SeededRng& r) {
  static const std::vector<std::string> words = {"FRONTEND", "database", "auction_closed", "alpha", "fix",
                                                 "bid",      "Hub",      "zzz",            "näive", "payment_settled",
                                                 "x9",       "winner_id"};
  std::string q;
  const auto n = r.uniform_int(std::uint64_t{1}, std::uint64_t{4});
  for (std::uint64_t i = 0; i < n; ++i) q += words[r.uniform_int(std::uint64_t{0}, std::uint64_t(words.size() - 1))] + ",";
  return q;
}

}  // namespace ghim::test
