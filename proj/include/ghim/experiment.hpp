#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ghim/agent.hpp"
#include "ghim/feedback.hpp"
#include "ghim/sandbox.hpp"
#include "ghim/scenario.hpp"

namespace ghim {

inline constexpr std::string_view kBaselineNote =
    "baseline = each issue owner solves its own issues at its own cost; no auctions, bids or payments";

/// Runs a scenario's agents and schedule on a sandbox's virtual clock.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const Scenario& scenario() const noexcept { return scenario_; }
  Sandbox& sandbox() noexcept { return *sandbox_; }
  const Sandbox& sandbox() const noexcept { return *sandbox_; }
  const std::map<ActorId, Agent>& agents() const noexcept { return agents_; }

  /// Fires every timer up to and including `t`.
  void advance_to(Millis t);
  /// Drains all pending timers.
  void run();

 private:
  void setup_actors();
  void setup_channels();
  void schedule_auction(std::size_t index);
  void open_scheduled(std::size_t index);
  void close_scheduled(const std::string& auction_id, const ActorId& owner);
  void self_solve(const ActorId& owner, const std::string& issue_id, const std::optional<std::string>& auction_id);
  void finish_delivery(const std::string& auction_id);
  void wake(const ActorId& node);
  Agent* agent_mut(const ActorId& id);

  Scenario scenario_;
  std::unique_ptr<Sandbox> sandbox_;
  std::map<ActorId, Agent> agents_;
  std::set<std::pair<ActorId, Millis>> wake_pending_;
  std::map<std::string, std::set<ActorId>> participants_of_;
};

struct AuctionRow {
  std::string auction_id;
  std::string issue_id;
  ActorId buyer;
  Money reserve;
  std::uint64_t n_bids = 0;
  bool closed = false;
  std::optional<ActorId> winner;
  std::optional<Money> clearing_price;
  bool settled = false;
};

struct AgentRow {
  ActorId agent;
  std::uint64_t wins = 0;
  /// Payments received minus payments sent.
  std::int64_t net_balance_change = 0;
  std::uint64_t issues_solved = 0;
  Money total_incurred_cost;
};

/// Every field is derived from the event log alone.
struct MetricsReport {
  std::string scenario;
  Mode mode = Mode::outsourcing;
  std::uint64_t seed = 0;
  std::vector<AuctionRow> auctions;
  std::vector<AgentRow> agents;
  /// Over settled auctions.
  std::optional<Ratio> mean_clearing_price;
  std::optional<double> clearing_price_stderr;
  std::uint64_t n_settled = 0;
  Money total_system_cost;
  std::uint64_t resolved_count = 0;
};

/// `agents` fixes the agent rows (in order); actors seen in the log but not
/// listed are appended in id order.
MetricsReport build_report(const EventLog& log, const Scenario& scenario);

ordered_json to_json(const MetricsReport& r);
std::string auctions_csv(const MetricsReport& r);
std::string agents_csv(const MetricsReport& r);

struct RunResult {
  MetricsReport report;
  std::string log_ndjson;
};

RunResult run_scenario(const Scenario& scenario);
/// Writes report.json, auctions.csv, agents.csv and events.ndjson into `dir`.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

struct AgentDelta {
  ActorId agent;
  std::int64_t net_balance_outsourcing = 0;
  std::int64_t net_balance_baseline = 0;
  Money incurred_outsourcing;
  Money incurred_baseline;
  /// (net balance - incurred) outsourcing minus the same in baseline.
  std::int64_t delta_net_position = 0;
};

struct BaselineComparison {
  MetricsReport outsourcing;
  MetricsReport baseline;
  /// outsourcing total_system_cost - baseline total_system_cost.
  std::int64_t delta_total_cost = 0;
  std::vector<AgentDelta> agents;
};

BaselineComparison compare_baseline(const Scenario& scenario);
ordered_json to_json(const BaselineComparison& c);

enum class SweepParam { n_bidders, reserve_scale };

std::optional<SweepParam> parse_sweep_param(std::string_view text) noexcept;
std::string_view to_string(SweepParam p) noexcept;

struct SweepPoint {
  double value = 0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

/// The scenario a sweep point runs. n_bidders replaces every non-buyer agent
/// by `value` clones of the first one ("<id>-01", ...), which requires a hub
/// topology so clones get channels; reserve_scale multiplies every reserve.
Scenario sweep_point_scenario(const Scenario& scenario, SweepParam param, double value);
std::vector<SweepPoint> sweep(const Scenario& scenario, SweepParam param, const std::vector<double>& values);
ordered_json to_json(const std::vector<SweepPoint>& series, SweepParam param);
std::string sweep_csv(const std::vector<SweepPoint>& series, SweepParam param);

struct SpecializationRow {
  ActorId agent;
  std::string domain;
  std::uint64_t wins = 0;
  std::uint64_t settled = 0;
  double share = 0;
};

/// For every domain with settled auctions, each agent's share of them.
std::vector<SpecializationRow> specialization_report(const MetricsReport& report, const std::vector<Issue>& catalog,
                                                     const std::vector<ActorId>& agents);
ordered_json to_json(const std::vector<SpecializationRow>& rows);

}  // namespace ghim
