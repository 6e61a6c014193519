#include "ghim/feedback.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "ghim/error.hpp"

namespace ghim {

namespace {

constexpr std::array<std::string_view, 5> kMetricNames = {
    "mean_clearing_price", "auction_count", "win_count_by_agent", "net_balance_by_agent", "cost_per_resolved_issue",
};

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::int64_t as_signed(Money m) {
  if (m.msat() > static_cast<Money::rep>(std::numeric_limits<std::int64_t>::max())) {
    throw Error(Errc::overflow, "amount too large for signed aggregation");
  }
  return static_cast<std::int64_t>(m.msat());
}

std::optional<std::string> payload_string(const Event& e, const char* field) {
  const auto payload = ordered_json::parse(e.payload);
  if (!payload.is_object()) return std::nullopt;
  const auto it = payload.find(field);
  if (it == payload.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

MetricTable mean_of(Metric metric, const std::vector<const Event*>& events) {
  MetricTable table{metric, {}};
  std::int64_t sum = 0;
  std::int64_t count = 0;
  for (const auto* e : events) {
    sum += as_signed(e->amount.value_or(Money::zero()));
    ++count;
  }
  MetricRow row{"all", std::nullopt};
  if (count > 0) row.value = Ratio{sum, count};
  table.rows.push_back(row);
  return table;
}

MetricTable per_key(Metric metric, const std::map<std::string, std::int64_t>& values) {
  MetricTable table{metric, {}};
  for (const auto& [key, v] : values) table.rows.push_back({key, Ratio{v, 1}});
  return table;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept { return kMetricNames[static_cast<std::size_t>(metric)]; }

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == text) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

MetricTable aggregate(const EventLog& log, Metric metric, const EventFilter& scope) {
  std::vector<const Event*> in_scope;
  for (const auto& e : log.events()) {
    if (scope.matches(e)) in_scope.push_back(&e);
  }
  auto only = [&](EventKind kind, bool need_auction = false) {
    std::vector<const Event*> out;
    for (const auto* e : in_scope) {
      if (e->kind == kind && (!need_auction || e->auction_id)) out.push_back(e);
    }
    return out;
  };

  switch (metric) {
    case Metric::mean_clearing_price:
      return mean_of(metric, only(EventKind::payment_settled, true));
    case Metric::cost_per_resolved_issue:
      return mean_of(metric, only(EventKind::issue_solved));
    case Metric::auction_count: {
      const auto n = static_cast<std::int64_t>(only(EventKind::auction_opened).size());
      return MetricTable{metric, {{"all", Ratio{n, 1}}}};
    }
    case Metric::win_count_by_agent: {
      std::map<std::string, std::int64_t> wins;
      for (const auto* e : only(EventKind::auction_closed)) {
        if (auto winner = payload_string(*e, "winner_id")) ++wins[*winner];
      }
      return per_key(metric, wins);
    }
    case Metric::net_balance_by_agent: {
      std::map<std::string, std::int64_t> net;
      for (const auto* e : only(EventKind::payment_settled)) {
        const auto amount = as_signed(e->amount.value_or(Money::zero()));
        net[e->actor.str()] += amount;
        if (auto payer = payload_string(*e, "payer")) net[*payer] -= amount;
      }
      return per_key(metric, net);
    }
  }
  throw Error(Errc::invalid_argument, "unknown metric");
}

ordered_json to_json(const MetricTable& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r;
    r["key"] = row.key;
    if (row.value) {
      r["num"] = row.value->num;
      r["den"] = row.value->den;
      r["value"] = std::round(row.value->value() * 1000.0) / 1000.0;
    } else {
      r["num"] = nullptr;
      r["den"] = nullptr;
      r["value"] = nullptr;
      r["empty"] = true;
    }
    rows.push_back(std::move(r));
  }
  ordered_json j;
  j["metric"] = to_string(table.metric);
  j["rows"] = std::move(rows);
  return j;
}

std::set<std::string> tokenize(std::string_view text) {
  std::set<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(std::move(current));
  return tokens;
}

std::string retrieval_text(const Event& e) {
  std::string text = e.payload;
  text += ' ';
  text += to_string(e.kind);
  text += ' ';
  text += e.actor.str();
  return text;
}

ContextPack retrieve_context(const EventLog& log, std::string_view query_text, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
  ContextPack pack{std::string(query_text), k, {}};
  const auto query = tokenize(query_text);
  if (query.empty()) return pack;

  std::vector<std::pair<std::size_t, const Event*>> scored;
  for (const auto& e : log.events()) {
    const auto tokens = tokenize(retrieval_text(e));
    std::size_t overlap = 0;
    for (const auto& t : query) overlap += tokens.count(t);
    if (overlap > 0) scored.emplace_back(overlap, &e);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->seq > b.second->seq;
  });
  if (scored.size() > k) scored.resize(k);
  for (const auto& [score, e] : scored) pack.items.push_back({*e, static_cast<double>(score)});
  return pack;
}

ordered_json to_json(const ContextPack& pack) {
  ordered_json items = ordered_json::array();
  for (const auto& item : pack.items) {
    ordered_json j;
    j["score"] = item.score;
    j["event"] = event_to_json(item.event);
    items.push_back(std::move(j));
  }
  ordered_json j;
  j["query"] = pack.query_text;
  j["k"] = pack.k;
  j["items"] = std::move(items);
  return j;
}

ordered_json generation_request(const ContextPack& pack) {
  ordered_json events = ordered_json::array();
  for (const auto& item : pack.items) events.push_back(event_to_json(item.event));
  ordered_json j;
  j["query"] = pack.query_text;
  j["context_events"] = std::move(events);
  return j;
}

std::string template_answer(const ordered_json& request) {
  std::ostringstream out;
  const auto& events = request.at("context_events");
  out << "Context for \"" << request.at("query").get<std::string>() << "\":";
  if (events.empty()) {
    out << " no matching events.\n";
    return out.str();
  }
  out << '\n';
  int n = 1;
  for (const auto& e : events) {
    out << n++ << ". [seq " << e.at("seq").get<std::uint64_t>() << " @ " << e.at("ts").get<Millis>() << " ms] "
        << e.at("kind").get<std::string>() << " by " << e.at("actor").get<std::string>();
    if (!e.at("auction_id").is_null()) out << " (auction " << e.at("auction_id").get<std::string>() << ")";
    if (!e.at("amount_msat").is_null()) out << ", " << e.at("amount_msat").get<std::uint64_t>() << " msat";
    out << '\n';
  }
  return out.str();
}

std::string answer(const EventLog& log, std::string_view query_text, std::size_t k, const GenerationHook& hook) {
  return hook(generation_request(retrieve_context(log, query_text, k)));
}

}  // namespace ghim
