#include "ghim/agent.hpp"

#include <algorithm>
#include <cmath>

#include "ghim/error.hpp"

namespace ghim {

std::string_view to_string(NoiseKind kind) noexcept {
  return kind == NoiseKind::uniform ? std::string_view("uniform") : std::string_view("lognormal");
}

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::truthful: return "truthful";
    case StrategyKind::markup: return "markup";
    case StrategyKind::adaptive: return "adaptive";
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) noexcept {
  if (text == "truthful") return StrategyKind::truthful;
  if (text == "markup") return StrategyKind::markup;
  if (text == "adaptive") return StrategyKind::adaptive;
  return std::nullopt;
}

void CostModel::validate() const {
  if (base_cost_by_domain.empty()) throw Error(Errc::invalid_argument, "cost model needs at least one base cost");
  if (!base_cost_by_domain.contains(std::string(kDefaultDomain))) {
    throw Error(Errc::invalid_argument, "cost model needs a '" + std::string(kDefaultDomain) + "' base cost");
  }
  for (const auto& [domain, cost] : base_cost_by_domain) {
    if (cost.is_zero()) throw Error(Errc::invalid_argument, "base cost for '" + domain + "' must be positive");
  }
  if (!(difficulty_multiplier > 0)) throw Error(Errc::invalid_argument, "difficulty multiplier must be positive");
  if (!(noise_sigma >= 0)) throw Error(Errc::invalid_argument, "noise sigma must be non-negative");
  if (noise_kind == NoiseKind::uniform && !(uniform_lo >= 0 && uniform_lo <= uniform_hi)) {
    throw Error(Errc::invalid_argument, "uniform noise needs 0 <= lo <= hi");
  }
}

void Strategy::validate() const {
  if (!(markup_rate >= -0.5)) throw Error(Errc::invalid_argument, "markup rate must be >= -0.5");
  if (kind == StrategyKind::adaptive) {
    if (!(adapt_step > 0)) throw Error(Errc::invalid_argument, "adapt step must be positive");
    if (!(lo >= -0.5 && lo <= hi)) throw Error(Errc::invalid_argument, "markup bounds must satisfy -0.5 <= lo <= hi");
    if (markup_rate < lo || markup_rate > hi) throw Error(Errc::invalid_argument, "markup rate outside [lo, hi]");
  }
}

Strategy on_auction_result(const Strategy& strategy, bool won) {
  Strategy next = strategy;
  if (strategy.kind != StrategyKind::adaptive) return next;
  next.markup_rate = won ? std::min(strategy.hi, strategy.markup_rate + strategy.adapt_step)
                         : std::max(strategy.lo, strategy.markup_rate - strategy.adapt_step);
  return next;
}

void AgentConfig::validate() const {
  if (agent_id.empty()) throw Error(Errc::invalid_argument, "agent id must be non-empty");
  cost_model.validate();
  strategy.validate();
}

Announcement Announcement::parse(std::string_view payload) {
  try {
    const auto j = nlohmann::json::parse(payload);
    return Announcement{j.at("auction_id").get<std::string>(), j.at("issue_id").get<std::string>(),
                        j.at("title").get<std::string>(), Money::msat(j.at("reserve_msat").get<std::uint64_t>()),
                        j.at("deadline_ms").get<Millis>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed announcement: ") + e.what());
  }
}

AuctionResultNotice AuctionResultNotice::parse(std::string_view payload) {
  try {
    const auto j = nlohmann::json::parse(payload);
    AuctionResultNotice r;
    r.auction_id = j.at("auction_id").get<std::string>();
    if (!j.at("winner_id").is_null()) r.winner = ActorId(j.at("winner_id").get<std::string>());
    if (!j.at("price_msat").is_null()) r.price = Money::msat(j.at("price_msat").get<std::uint64_t>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed auction result: ") + e.what());
  }
}

Money base_cost(const CostModel& model, const Issue& issue) {
  std::optional<Money> best;
  for (const auto& tag : issue.domain_tags) {
    const auto it = model.base_cost_by_domain.find(tag);
    if (it != model.base_cost_by_domain.end() && (!best || it->second < *best)) best = it->second;
  }
  if (best) return *best;
  const auto it = model.base_cost_by_domain.find(std::string(kDefaultDomain));
  if (it == model.base_cost_by_domain.end()) {
    throw Error(Errc::invalid_argument, "cost model has no entry for issue " + issue.issue_id);
  }
  return it->second;
}

Money cost_draw(const AgentConfig& agent, const Issue& issue, std::uint64_t root_seed, std::string_view stream) {
  const CostModel& m = agent.cost_model;
  double cost = static_cast<double>(base_cost(m, issue).msat()) * std::pow(m.difficulty_multiplier, issue.difficulty);
  SeededRng rng(root_seed, "agent/" + agent.agent_id.str() + "/" + std::string(stream) + "/" + issue.issue_id);
  if (m.noise_kind == NoiseKind::uniform) {
    cost *= m.uniform_lo + (m.uniform_hi - m.uniform_lo) * rng.next_uniform();
  } else if (m.noise_sigma > 0) {
    cost *= std::exp(m.noise_sigma * rng.next_normal());
  }
  return std::max(money_from_real(cost), Money::msat(1));
}

std::optional<Money> bid_rule(Money cost, double markup, Money reserve, Money headroom) {
  const Money bid = std::max(money_from_real(static_cast<double>(cost.msat()) * (1.0 + markup)), Money::msat(1));
  if (bid > reserve || bid > headroom) return std::nullopt;
  return bid;
}

Agent::Agent(AgentConfig config, std::uint64_t root_seed)
    : config_(std::move(config)),
      root_seed_(root_seed),
      strategy_(config_.strategy),
      balance_(static_cast<std::int64_t>(config_.budget.msat())) {
  config_.validate();
}

bool Agent::competent_in(const Issue& issue) const {
  if (config_.domains.empty()) return true;
  return std::any_of(issue.domain_tags.begin(), issue.domain_tags.end(),
                     [&](const std::string& t) { return config_.domains.contains(t); });
}

Money Agent::estimate_cost(const Issue& issue) const { return cost_draw(config_, issue, root_seed_, "estimate"); }

std::optional<Money> Agent::decide_bid(const Announcement& announcement, const Issue& issue,
                                       const ContextPack& /*feedback*/) const {
  if (!competent_in(issue)) return std::nullopt;
  return bid_rule(estimate_cost(issue), strategy_.effective_markup(), announcement.reserve, headroom());
}

void Agent::on_auction_result(bool won) { strategy_ = ghim::on_auction_result(strategy_, won); }

Money Agent::solve_issue(const Issue& issue, EventLog& log, Millis now, const std::optional<std::string>& auction_id,
                         std::string_view mode) {
  const Money cost = cost_draw(config_, issue, root_seed_, "execute");
  ordered_json p;
  p["issue_id"] = issue.issue_id;
  p["mode"] = mode;
  log.record(now, EventKind::issue_solved, config_.agent_id, auction_id, cost, p);
  apply_budget_delta(-static_cast<std::int64_t>(cost.msat()), "solve_cost", log, now, auction_id);
  return cost;
}

Money Agent::headroom() const noexcept {
  return balance_ > 0 ? Money::msat(static_cast<Money::rep>(balance_)) : Money::zero();
}

void Agent::apply_budget_delta(std::int64_t delta, std::string_view reason, EventLog& log, Millis now,
                               const std::optional<std::string>& auction_id) {
  balance_ += delta;
  ordered_json p;
  p["delta_msat"] = delta;
  p["reason"] = reason;
  p["balance_msat"] = balance_;
  const auto magnitude = static_cast<Money::rep>(delta < 0 ? -delta : delta);
  log.record(now, EventKind::agent_budget_changed, config_.agent_id, auction_id, Money::msat(magnitude), p);
}

}  // namespace ghim
