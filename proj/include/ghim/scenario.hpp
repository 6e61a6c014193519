#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghim/agent.hpp"
#include "ghim/auction.hpp"
#include "ghim/event_log.hpp"
#include "ghim/pubsub.hpp"
#include "ghim/sandbox.hpp"

namespace ghim {

enum class Mode { outsourcing, baseline };

std::string_view to_string(Mode mode) noexcept;

struct AgentSpec {
  AgentConfig config;
  /// Gateway token; empty disables remote login as this agent.
  std::string token;

  bool operator==(const AgentSpec&) const = default;
};

/// Non-simulated actor that joins through the gateway (human or observer).
struct ParticipantSpec {
  ActorId id;
  Role role = Role::human;
  std::string token;
  Money funds;

  bool operator==(const ParticipantSpec&) const = default;
};

/// Pure routing node with on-ledger funds.
struct RouterSpec {
  ActorId id;
  Money funds;

  bool operator==(const RouterSpec&) const = default;
};

struct ScheduledAuction {
  std::string issue_id;
  ActorId buyer;
  Money reserve;
  Millis open_at = 0;
  Millis deadline = 0;

  bool operator==(const ScheduledAuction&) const = default;
};

struct ChannelSpec {
  ActorId a;
  ActorId b;
  Money capacity;
  Money push;

  bool operator==(const ChannelSpec&) const = default;
};

/// Star topology: the hub opens one channel to every agent and participant,
/// pushing half the capacity to the far side. The hub is minted exactly the
/// funds it needs unless `hub_funds` says otherwise.
struct HubTopology {
  ActorId hub;
  Money capacity;
  std::optional<Money> hub_funds;

  bool operator==(const HubTopology&) const = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Mode mode = Mode::outsourcing;
  LinkPolicy link_policy;
  std::vector<AgentSpec> agents;
  std::vector<ParticipantSpec> participants;
  std::vector<RouterSpec> routers;
  std::vector<Issue> issues;
  std::vector<ScheduledAuction> schedule;
  std::vector<ChannelSpec> channels;
  std::optional<HubTopology> hub;
  Millis solve_delay_ms = 1000;
  Millis escrow_expiry_ms = 30LL * 24 * 3600 * 1000;
  /// Events retrieved as bidding context per decision; 0 skips retrieval.
  std::size_t feedback_k = 0;

  /// Referential integrity and value checks; throws Error(invalid_argument).
  void validate() const;
  const Issue& issue(std::string_view issue_id) const;
  const AgentSpec* agent(const ActorId& id) const;
  bool operator==(const Scenario&) const = default;
};

/// Parses a scenario document. `base_dir` resolves a relative `issue_catalog`
/// path. Diagnostics name the JSON field path, or the line and column for
/// syntax errors.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {},
                        std::string_view source = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical form: issues inline, generated auctions expanded.
ordered_json to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// GitHub-like export: array of {number, title, body, labels}; labels may be
/// strings or {name} objects; a "difficulty:<x>" label sets the difficulty.
std::vector<Issue> parse_issue_catalog(std::string_view text, std::string_view source = "catalog");

}  // namespace ghim
