#include "ghim/session.hpp"

#include <algorithm>
#include <sstream>

#include "ghim/error.hpp"
#include "ghim/ops.hpp"

namespace ghim {

SessionRecorder::SessionRecorder(const std::filesystem::path& path, const SessionRecording& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error(Errc::io, "cannot write recording to " + path.string());
  ordered_json h;
  h["format"] = kRecordingFormat;
  h["session_id"] = header.session_id;
  h["actor"] = header.actor.str();
  h["role"] = to_string(header.role);
  h["seed"] = header.seed;
  h["started_at_ms"] = header.started_at_ms;
  out_ << h.dump() << '\n' << std::flush;
  if (!out_) throw Error(Errc::io, "cannot write recording to " + path.string());
}

void SessionRecorder::append(const RecordedFrame& frame) {
  ordered_json line;
  line["at_ms"] = frame.at_ms;
  line["arrival"] = frame.arrival;
  line["frame"] = ordered_json::parse(frame.frame.dump());
  out_ << line.dump() << '\n' << std::flush;
  if (!out_) throw Error(Errc::io, "write failed for " + path_.string());
}

SessionRecording parse_recording(std::string_view text) {
  SessionRecording rec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = "recording line " + std::to_string(lineno) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      if (!header) {
        if (j.value("format", "") != kRecordingFormat) {
          throw Error(Errc::invalid_argument, where + "not a " + std::string(kRecordingFormat) + " header");
        }
        rec.session_id = j.at("session_id").get<std::string>();
        rec.actor = ActorId(j.at("actor").get<std::string>());
        const auto role = parse_role(j.at("role").get<std::string>());
        if (!role) throw Error(Errc::invalid_argument, where + "unknown role");
        rec.role = *role;
        rec.seed = j.at("seed").get<std::uint64_t>();
        rec.started_at_ms = j.at("started_at_ms").get<Millis>();
        header = true;
        continue;
      }
      rec.frames.push_back({j.at("at_ms").get<Millis>(), j.at("arrival").get<std::uint64_t>(), j.at("frame")});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::invalid_argument, where + e.what());
    }
  }
  if (!header) throw Error(Errc::invalid_argument, "recording has no header");
  return rec;
}

SessionRecording load_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_recording(ss.str());
}

bool is_connection_op(std::string_view op) noexcept {
  return op == "auth" || op == "subscribe" || op == "unsubscribe" || op == "session.record" || op == "ping";
}

std::vector<ReplayStep> replay_sessions(Simulation& sim, const std::vector<SessionRecording>& recordings) {
  struct Item {
    const RecordedFrame* frame;
    const SessionRecording* rec;
  };
  std::vector<Item> items;
  for (const auto& r : recordings) {
    for (const auto& f : r.frames) items.push_back({&f, &r});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.frame->at_ms, a.frame->arrival) < std::tie(b.frame->at_ms, b.frame->arrival);
  });

  std::vector<ReplayStep> steps;
  for (const auto& item : items) {
    const auto& f = *item.frame;
    const std::string op = f.frame.value("op", "");
    if (is_connection_op(op)) continue;
    if (f.at_ms > sim.sandbox().clock().now()) sim.advance_to(f.at_ms);
    ReplayStep step{f, item.rec->actor, false, nullptr};
    try {
      step.result = execute_op(sim, op, f.frame.contains("args") ? f.frame.at("args") : nlohmann::json::object(),
                               Caller{item.rec->actor, item.rec->role});
      step.ok = true;
    } catch (const Error& e) {
      step.result = {{"code", to_string(e.code())}, {"message", e.what()}};
    } catch (const UsageError& e) {
      step.result = {{"code", "usage"}, {"message", e.what()}};
    }
    steps.push_back(std::move(step));
  }
  sim.run();
  return steps;
}

}  // namespace ghim
