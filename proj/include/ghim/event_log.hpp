#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghim/kernel.hpp"
#include "ghim/money.hpp"
#include "json.hpp"

namespace ghim {

using ordered_json = nlohmann::ordered_json;

enum class EventKind {
  node_created,
  msg_published,
  auction_opened,
  bid_placed,
  auction_closed,
  escrow_locked,
  payment_settled,
  payment_cancelled,
  issue_solved,
  agent_budget_changed,
};

inline constexpr std::size_t kEventKindCount = 10;
inline constexpr std::size_t kMaxEventPayloadBytes = 4096;

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;
const std::vector<EventKind>& all_event_kinds();

/// One record of the append-only system log. `payload` is compact JSON text.
struct Event {
  std::uint64_t seq = 0;
  Millis ts = 0;
  EventKind kind = EventKind::node_created;
  ActorId actor;
  std::optional<std::string> auction_id;
  std::optional<Money> amount;
  std::string payload = "{}";

  bool operator==(const Event&) const = default;
};

ordered_json event_to_json(const Event& e);
Event event_from_json(const ordered_json& j);

struct EventFilter {
  std::optional<std::set<EventKind>> kinds;
  std::optional<ActorId> actor;
  /// Half-open [from, to).
  std::optional<std::pair<Millis, Millis>> time_range;
  std::optional<std::string> auction_id;
  std::size_t limit = std::numeric_limits<std::size_t>::max();

  bool matches(const Event& e) const;
};

/// Append-only event log with gap-free sequence numbers starting at 1 and
/// non-decreasing timestamps. Listeners observe every append in order.
class EventLog {
 public:
  using Listener = std::function<void(const Event&)>;
  using ListenerId = std::uint64_t;

  /// Appends `event` (its `seq` is ignored and reassigned). The payload must be
  /// valid JSON of at most 4 KiB; it is stored in canonical compact form.
  std::uint64_t append(Event event);

  /// Convenience append for in-process producers.
  std::uint64_t record(Millis ts, EventKind kind, const ActorId& actor, std::optional<std::string> auction_id,
                       std::optional<Money> amount, const ordered_json& payload);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  std::vector<Event> query(const EventFilter& filter) const;

  std::string to_ndjson() const;
  std::size_t export_ndjson(const std::filesystem::path& path) const;
  static EventLog from_ndjson(std::string_view text);
  static EventLog import_ndjson(const std::filesystem::path& path);

  ListenerId add_listener(Listener listener);
  void remove_listener(ListenerId id);

 private:
  std::uint64_t push(Event event);

  std::vector<Event> events_;
  std::map<ListenerId, Listener> listeners_;
  ListenerId next_listener_ = 1;
};

}  // namespace ghim
