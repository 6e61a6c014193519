#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "ghim/auction.hpp"
#include "ghim/event_log.hpp"
#include "ghim/feedback.hpp"
#include "ghim/kernel.hpp"
#include "ghim/money.hpp"

namespace ghim {

/// Cost-model key used when none of an issue's tags has a listed base cost.
inline constexpr std::string_view kDefaultDomain = "default";

enum class NoiseKind { lognormal, uniform };

std::string_view to_string(NoiseKind kind) noexcept;

/// estimate = round(base(best domain) * difficulty_multiplier^difficulty * noise)
///
/// `lognormal` noise is exp(noise_sigma * Z); `uniform` noise is a draw from
/// [uniform_lo, uniform_hi). Estimates are clamped to at least 1 msat.
struct CostModel {
  std::map<std::string, Money> base_cost_by_domain;
  double difficulty_multiplier = 1.0;
  double noise_sigma = 0.0;
  NoiseKind noise_kind = NoiseKind::lognormal;
  double uniform_lo = 0.0;
  double uniform_hi = 1.0;

  void validate() const;
  bool operator==(const CostModel&) const = default;
};

enum class StrategyKind { truthful, markup, adaptive };

std::string_view to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_strategy_kind(std::string_view text) noexcept;

struct Strategy {
  StrategyKind kind = StrategyKind::truthful;
  double markup_rate = 0.0;
  double adapt_step = 0.02;
  double lo = 0.0;
  double hi = 0.5;

  void validate() const;
  /// Markup actually applied when bidding (zero for truthful agents).
  double effective_markup() const noexcept { return kind == StrategyKind::truthful ? 0.0 : markup_rate; }
  bool operator==(const Strategy&) const = default;
};

/// Bounded additive adaptation: adaptive strategies step the markup up after a
/// win and down after a loss, clamped to [lo, hi]. Other kinds are unchanged.
Strategy on_auction_result(const Strategy& strategy, bool won);

struct AgentConfig {
  ActorId agent_id;
  Money budget;
  CostModel cost_model;
  Strategy strategy;
  /// Domains the agent bids in; empty means every domain.
  std::set<std::string> domains;

  void validate() const;
  bool operator==(const AgentConfig&) const = default;
};

/// Decoded announcement payload.
struct Announcement {
  std::string auction_id;
  std::string issue_id;
  std::string title;
  Money reserve;
  Millis deadline = 0;

  static Announcement parse(std::string_view payload);
};

/// Decoded result payload.
struct AuctionResultNotice {
  std::string auction_id;
  std::optional<ActorId> winner;
  std::optional<Money> price;

  static AuctionResultNotice parse(std::string_view payload);
};

/// Base cost of the cheapest listed domain among the issue's tags, else the
/// default entry.
Money base_cost(const CostModel& model, const Issue& issue);

/// Deterministic in (root_seed, agent id, issue id, config); `stream` separates
/// the estimation draw from the execution draw.
Money cost_draw(const AgentConfig& agent, const Issue& issue, std::uint64_t root_seed, std::string_view stream);

/// round(cost * (1 + markup)); nullopt (pass) when that exceeds the reserve or
/// the bidder's budget headroom.
std::optional<Money> bid_rule(Money cost, double markup, Money reserve, Money headroom);

/// Reference SWE-agent bidder: cost model, strategy state and budget book.
class Agent {
 public:
  Agent(AgentConfig config, std::uint64_t root_seed);

  const AgentConfig& config() const noexcept { return config_; }
  const ActorId& id() const noexcept { return config_.agent_id; }
  const Strategy& strategy() const noexcept { return strategy_; }

  bool competent_in(const Issue& issue) const;
  Money estimate_cost(const Issue& issue) const;
  /// The announcement's reserve and the current strategy decide; `feedback` is
  /// available to richer strategies and unused by the reference rule.
  std::optional<Money> decide_bid(const Announcement& announcement, const Issue& issue,
                                  const ContextPack& feedback) const;
  void on_auction_result(bool won);

  /// Realized cost using the execution substream; logs issue_solved and the
  /// matching budget debit.
  Money solve_issue(const Issue& issue, EventLog& log, Millis now, const std::optional<std::string>& auction_id,
                    std::string_view mode);

  std::int64_t budget_balance() const noexcept { return balance_; }
  Money headroom() const noexcept;
  void apply_budget_delta(std::int64_t delta, std::string_view reason, EventLog& log, Millis now,
                          const std::optional<std::string>& auction_id);

 private:
  AgentConfig config_;
  std::uint64_t root_seed_;
  Strategy strategy_;
  std::int64_t balance_;
};

}  // namespace ghim
