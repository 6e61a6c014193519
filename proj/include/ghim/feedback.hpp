#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ghim/event_log.hpp"

namespace ghim {

// ---------------------------------------------------------------- aggregates

enum class Metric {
  mean_clearing_price,
  auction_count,
  win_count_by_agent,
  net_balance_by_agent,
  cost_per_resolved_issue,
};

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;

/// Exact rational value; `den` is always positive.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio&) const = default;
};

/// A row whose `value` is empty carries the explicit "undefined" marker (an
/// empty denominator), never a silent zero.
struct MetricRow {
  std::string key;
  std::optional<Ratio> value;

  bool operator==(const MetricRow&) const = default;
};

struct MetricTable {
  Metric metric = Metric::auction_count;
  std::vector<MetricRow> rows;

  bool operator==(const MetricTable&) const = default;
};

/// Metric definitions over the events matched by `scope` (its limit is ignored):
///  - mean_clearing_price: mean amount of payment_settled events that carry an auction id.
///  - auction_count: number of auction_opened events.
///  - win_count_by_agent: auction_closed events with a non-null payload winner_id, per winner.
///  - net_balance_by_agent: payment_settled amounts, +payee (event actor) and -payer (payload).
///  - cost_per_resolved_issue: mean amount of issue_solved events.
MetricTable aggregate(const EventLog& log, Metric metric, const EventFilter& scope = {});

ordered_json to_json(const MetricTable& table);

// ---------------------------------------------------------------- retrieval

/// Splits on every ASCII character that is not a letter or digit and folds ASCII
/// case. Bytes >= 0x80 are kept inside tokens unchanged.
std::set<std::string> tokenize(std::string_view text);

/// Text an event is indexed by: payload, kind and actor joined by spaces.
std::string retrieval_text(const Event& e);

struct ScoredEvent {
  Event event;
  double score = 0;
};

struct ContextPack {
  std::string query_text;
  std::size_t k = 0;
  std::vector<ScoredEvent> items;
};

/// Ranks events by the size of the overlap between the query's token set and
/// the event's token set. Zero-score events are dropped; ties go to the more
/// recent event (higher seq); at most `k` items are returned.
ContextPack retrieve_context(const EventLog& log, std::string_view query_text, std::size_t k);

ordered_json to_json(const ContextPack& pack);

// ---------------------------------------------------------------- generation hook

/// Boundary for third-party generation: receives {query, context_events:[...]}
/// and returns UTF-8 text.
using GenerationHook = std::function<std::string(const ordered_json& request)>;

ordered_json generation_request(const ContextPack& pack);

/// Default hook: formats the retrieved events as a numbered plain-text list.
std::string template_answer(const ordered_json& request);

std::string answer(const EventLog& log, std::string_view query_text, std::size_t k,
                   const GenerationHook& hook = template_answer);

}  // namespace ghim
