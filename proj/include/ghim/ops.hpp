#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ghim/event_log.hpp"
#include "ghim/experiment.hpp"
#include "ghim/pubsub.hpp"
#include "ghim/sandbox.hpp"

namespace ghim {

/// Who is asking. Agents and humans may only act as themselves; observers may
/// only read; admin (the local CLI) may do anything.
struct Caller {
  ActorId actor;
  Role role = Role::admin;
};

struct OpInfo {
  std::string_view name;
  bool mutating;
  std::string_view summary;
};

/// Envelope as carried in results and stream frames: payload_b64 always, and
/// the payload as text when it is valid UTF-8.
ordered_json envelope_json(const Envelope& env);

/// Every operation reachable from the CLI and the gateway, in tool order.
const std::vector<OpInfo>& op_table();
const OpInfo* find_op(std::string_view name);

/// Runs one operation against the simulation. Throws UsageError for an
/// unknown op or malformed arguments and Error for domain failures (a
/// rejected bid is Errc::rejected carrying the engine's reason).
ordered_json execute_op(Simulation& sim, std::string_view op, const nlohmann::json& args, const Caller& caller);

}  // namespace ghim
