#include "ghim/event_log.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "ghim/error.hpp"

namespace ghim {

namespace {

constexpr std::array<std::string_view, kEventKindCount> kKindNames = {
    "node_created",   "msg_published",   "auction_opened",    "bid_placed",   "auction_closed",
    "escrow_locked",  "payment_settled", "payment_cancelled", "issue_solved", "agent_budget_changed",
};

std::string canonical_payload(std::string_view text) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("event payload is not valid JSON: ") + e.what());
  }
  return parsed.dump();
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  const auto i = static_cast<std::size_t>(kind);
  return i < kKindNames.size() ? kKindNames[i] : std::string_view("unknown");
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

const std::vector<EventKind>& all_event_kinds() {
  static const std::vector<EventKind> kinds = [] {
    std::vector<EventKind> out;
    for (std::size_t i = 0; i < kEventKindCount; ++i) out.push_back(static_cast<EventKind>(i));
    return out;
  }();
  return kinds;
}

ordered_json event_to_json(const Event& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["ts"] = e.ts;
  j["kind"] = to_string(e.kind);
  j["actor"] = e.actor.str();
  j["auction_id"] = e.auction_id ? ordered_json(*e.auction_id) : ordered_json(nullptr);
  j["amount_msat"] = e.amount ? ordered_json(e.amount->msat()) : ordered_json(nullptr);
  j["payload"] = ordered_json::parse(e.payload);
  return j;
}

Event event_from_json(const ordered_json& j) {
  Event e;
  try {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts = j.at("ts").get<Millis>();
    const auto kind_text = j.at("kind").get<std::string>();
    const auto kind = parse_event_kind(kind_text);
    if (!kind) throw Error(Errc::invalid_argument, "unknown event kind '" + kind_text + "'");
    e.kind = *kind;
    e.actor = ActorId(j.at("actor").get<std::string>());
    if (const auto& a = j.at("auction_id"); !a.is_null()) e.auction_id = a.get<std::string>();
    if (const auto& m = j.at("amount_msat"); !m.is_null()) e.amount = Money::msat(m.get<std::uint64_t>());
    e.payload = j.at("payload").dump();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::invalid_argument, std::string("malformed event record: ") + ex.what());
  }
  return e;
}

bool EventFilter::matches(const Event& e) const {
  if (kinds && !kinds->contains(e.kind)) return false;
  if (actor && e.actor != *actor) return false;
  if (time_range && (e.ts < time_range->first || e.ts >= time_range->second)) return false;
  if (auction_id && e.auction_id != auction_id) return false;
  return true;
}

std::uint64_t EventLog::append(Event event) {
  if (static_cast<std::size_t>(event.kind) >= kEventKindCount) {
    throw Error(Errc::invalid_argument, "unknown event kind");
  }
  if (event.payload.size() > kMaxEventPayloadBytes) {
    throw Error(Errc::invalid_argument, "event payload exceeds 4 KiB");
  }
  event.payload = canonical_payload(event.payload);
  return push(std::move(event));
}

std::uint64_t EventLog::record(Millis ts, EventKind kind, const ActorId& actor, std::optional<std::string> auction_id,
                               std::optional<Money> amount, const ordered_json& payload) {
  Event e;
  e.ts = ts;
  e.kind = kind;
  e.actor = actor;
  e.auction_id = std::move(auction_id);
  e.amount = amount;
  e.payload = payload.dump();
  if (e.payload.size() > kMaxEventPayloadBytes) {
    throw Error(Errc::invalid_argument, "event payload exceeds 4 KiB");
  }
  return push(std::move(e));
}

std::uint64_t EventLog::push(Event event) {
  if (event.actor.empty()) throw Error(Errc::invalid_argument, "event actor must be set");
  if (!events_.empty() && event.ts < events_.back().ts) {
    throw Error(Errc::invalid_argument, "event timestamp " + std::to_string(event.ts) +
                                            " ms precedes the previous event (" + std::to_string(events_.back().ts) +
                                            " ms)");
  }
  event.seq = events_.size() + 1;
  events_.push_back(std::move(event));
  const auto seq = events_.back().seq;
  if (!listeners_.empty()) {
    // Listeners may append, which can reallocate events_.
    const Event stored = events_.back();
    for (const auto& [id, listener] : listeners_) listener(stored);
  }
  return seq;
}

std::vector<Event> EventLog::query(const EventFilter& filter) const {
  if (filter.limit == 0) throw Error(Errc::invalid_argument, "filter limit must be at least 1");
  std::vector<Event> out;
  for (const auto& e : events_) {
    if (out.size() >= filter.limit) break;
    if (filter.matches(e)) out.push_back(e);
  }
  return out;
}

std::string EventLog::to_ndjson() const {
  std::string out;
  for (const auto& e : events_) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::size_t EventLog::export_ndjson(const std::filesystem::path& path) const {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io, "cannot write event log to " + path.string());
  const std::string text = to_ndjson();
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw Error(Errc::io, "failed writing event log to " + path.string());
  return text.size();
}

EventLog EventLog::from_ndjson(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    Event e;
    try {
      e = event_from_json(ordered_json::parse(line));
    } catch (const nlohmann::json::parse_error& ex) {
      throw Error(Errc::invalid_argument, "line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (e.seq != log.size() + 1) {
      throw Error(Errc::invalid_argument, "line " + std::to_string(line_no) + ": sequence gap");
    }
    log.push(std::move(e));
  }
  return log;
}

EventLog EventLog::import_ndjson(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::io, "cannot read event log " + path.string());
  std::ostringstream ss;
  ss << file.rdbuf();
  return from_ndjson(ss.str());
}

EventLog::ListenerId EventLog::add_listener(Listener listener) {
  const auto id = next_listener_++;
  listeners_.emplace(id, std::move(listener));
  return id;
}

void EventLog::remove_listener(ListenerId id) { listeners_.erase(id); }

}  // namespace ghim
