#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ghim/event_log.hpp"
#include "ghim/experiment.hpp"
#include "ghim/sandbox.hpp"

namespace ghim {

inline constexpr std::string_view kRecordingFormat = "ghim-session/1";

/// One inbound frame as it reached the kernel loop: virtual time of dispatch
/// and gateway-wide arrival index.
struct RecordedFrame {
  Millis at_ms = 0;
  std::uint64_t arrival = 0;
  nlohmann::json frame;
};

struct SessionRecording {
  std::string session_id;
  ActorId actor;
  Role role = Role::observer;
  std::uint64_t seed = 0;
  Millis started_at_ms = 0;
  std::vector<RecordedFrame> frames;
};

/// NDJSON writer: a header line, then one line per frame, flushed as written.
class SessionRecorder {
 public:
  SessionRecorder(const std::filesystem::path& path, const SessionRecording& header);

  void append(const RecordedFrame& frame);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

SessionRecording parse_recording(std::string_view text);
SessionRecording load_recording(const std::filesystem::path& path);

/// Ops that only make sense on a live connection and are skipped on replay.
bool is_connection_op(std::string_view op) noexcept;

struct ReplayStep {
  RecordedFrame frame;
  ActorId actor;
  bool ok = false;
  ordered_json result;
};

/// Interleaves the recordings by (at_ms, arrival), moving the clock to each
/// frame's time before dispatching it as the recorded actor, then drains the
/// remaining timers.
std::vector<ReplayStep> replay_sessions(Simulation& sim, const std::vector<SessionRecording>& recordings);

}  // namespace ghim
