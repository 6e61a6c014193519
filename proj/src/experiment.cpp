#include "ghim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ghim/error.hpp"

namespace ghim {

namespace {

std::int64_t signed_msat(Money m) { return static_cast<std::int64_t>(m.msat()); }

Money sum_hub_capacity(const Scenario& s) {
  Money total;
  const auto spokes = s.agents.size() + s.participants.size();
  for (std::size_t i = 0; i < spokes; ++i) total = money_add(total, s.hub->capacity);
  return total;
}

}  // namespace

// ---------------------------------------------------------------- Simulation

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  sandbox_ = std::make_unique<Sandbox>(scenario_.seed, AuctionOptions{scenario_.escrow_expiry_ms});
  setup_actors();
  setup_channels();

  auto& sb = *sandbox_;
  sb.bus().on_delivery_scheduled([this](const ActorId& node, Millis at) {
    if (!agents_.contains(node) || !wake_pending_.insert({node, at}).second) return;
    sandbox_->clock().schedule_at(at, [this, node, at] {
      wake_pending_.erase({node, at});
      wake(node);
    });
  });
  // Budget bookkeeping follows escrow settlement whoever triggered it.
  sb.log().add_listener([this](const Event& e) {
    if (e.kind != EventKind::payment_settled || !e.auction_id) return;
    const std::string auction_id = *e.auction_id;
    sandbox_->clock().schedule_at(sandbox_->clock().now(), [this, auction_id] {
      const Auction& a = sandbox_->auctions().auction(auction_id);
      if (!a.winner) return;
      const auto price = signed_msat(a.winner->price);
      const auto now = sandbox_->clock().now();
      if (Agent* buyer = agent_mut(a.buyer)) {
        buyer->apply_budget_delta(-price, "auction_payment", sandbox_->log(), now, auction_id);
      }
      if (Agent* winner = agent_mut(a.winner->bidder)) {
        winner->apply_budget_delta(price, "auction_revenue", sandbox_->log(), now, auction_id);
      }
    });
  });

  for (std::size_t i = 0; i < scenario_.schedule.size(); ++i) schedule_auction(i);
}

Agent* Simulation::agent_mut(const ActorId& id) {
  const auto it = agents_.find(id);
  return it == agents_.end() ? nullptr : &it->second;
}

void Simulation::setup_actors() {
  auto& sb = *sandbox_;
  const auto& policy = scenario_.link_policy;
  for (const auto& a : scenario_.agents) {
    sb.add_actor(a.config.agent_id, a.config.budget, policy);
    agents_.emplace(a.config.agent_id, Agent(a.config, scenario_.seed));
    if (scenario_.mode == Mode::outsourcing) {
      sb.bus().subscribe(a.config.agent_id, kAnnounceTopic);
      sb.bus().subscribe(a.config.agent_id, kResultTopic);
    }
  }
  for (const auto& p : scenario_.participants) sb.add_actor(p.id, p.funds, policy);
  for (const auto& r : scenario_.routers) sb.add_actor(r.id, r.funds, policy);
  if (scenario_.hub) {
    const Money funds = scenario_.hub->hub_funds ? *scenario_.hub->hub_funds : sum_hub_capacity(scenario_);
    sb.add_actor(scenario_.hub->hub, funds, policy);
  }
}

void Simulation::setup_channels() {
  auto& pay = sandbox_->payments();
  try {
    if (scenario_.hub) {
      const auto& hub = *scenario_.hub;
      const Money push = Money::msat(hub.capacity.msat() / 2);
      for (const auto& a : scenario_.agents) pay.open_channel(hub.hub, a.config.agent_id, hub.capacity, push);
      for (const auto& p : scenario_.participants) pay.open_channel(hub.hub, p.id, hub.capacity, push);
    }
    for (const auto& c : scenario_.channels) pay.open_channel(c.a, c.b, c.capacity, c.push);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("infeasible channel topology: ") + e.what());
  }
}

void Simulation::schedule_auction(std::size_t index) {
  const auto& entry = scenario_.schedule[index];
  sandbox_->clock().schedule_at(entry.open_at, [this, index] {
    const auto& e = scenario_.schedule[index];
    if (scenario_.mode == Mode::baseline) {
      self_solve(e.buyer, e.issue_id, std::nullopt);
    } else {
      open_scheduled(index);
    }
  });
}

void Simulation::open_scheduled(std::size_t index) {
  const auto& e = scenario_.schedule[index];
  auto& engine = sandbox_->auctions();
  std::string auction_id;
  try {
    auction_id = engine.open_auction(e.buyer, scenario_.issue(e.issue_id), e.reserve, e.deadline);
  } catch (const Error&) {
    // A buyer that cannot fund the reserve keeps the issue.
    self_solve(e.buyer, e.issue_id, std::nullopt);
    return;
  }
  const ActorId owner = e.buyer;
  sandbox_->clock().schedule_at(e.deadline, [this, auction_id, owner] { close_scheduled(auction_id, owner); });
}

void Simulation::close_scheduled(const std::string& auction_id, const ActorId& owner) {
  auto& engine = sandbox_->auctions();
  if (engine.auction(auction_id).state == AuctionState::open) engine.close_auction(auction_id);
  const Auction& a = engine.auction(auction_id);
  if (a.state == AuctionState::closed_no_sale) {
    self_solve(owner, a.issue_id, auction_id);
    return;
  }
  if (a.state != AuctionState::closed_won) return;
  const EscrowOutcome out = engine.escrow(auction_id);
  if (!out.locked) {
    self_solve(owner, a.issue_id, auction_id);
    return;
  }
  if (!agents_.contains(a.winner->bidder)) return;  // remote winners deliver through the gateway
  sandbox_->clock().schedule_after(scenario_.solve_delay_ms, [this, auction_id] { finish_delivery(auction_id); });
}

void Simulation::finish_delivery(const std::string& auction_id) {
  auto& engine = sandbox_->auctions();
  const Auction& a = engine.auction(auction_id);
  if (a.state != AuctionState::escrowed) return;
  const ActorId winner = a.winner->bidder;
  agent_mut(winner)->solve_issue(engine.issue(a.issue_id), sandbox_->log(), sandbox_->clock().now(), auction_id,
                                 "outsourced");
  engine.deliver(winner, auction_id, "artifact://" + auction_id);
}

void Simulation::self_solve(const ActorId& owner, const std::string& issue_id,
                            const std::optional<std::string>& auction_id) {
  Agent* agent = agent_mut(owner);
  if (agent == nullptr) return;
  agent->solve_issue(scenario_.issue(issue_id), sandbox_->log(), sandbox_->clock().now(), auction_id, "self");
}

void Simulation::wake(const ActorId& node) {
  Agent* agent = agent_mut(node);
  auto& sb = *sandbox_;
  for (const auto& d : sb.bus().poll_inbox(node, true)) {
    const auto& env = d.envelope;
    if (env.topic == kAnnounceTopic) {
      const auto ann = Announcement::parse(env.payload);
      const Auction& a = sb.auctions().auction(ann.auction_id);
      if (a.buyer == node || a.state != AuctionState::open || sb.clock().now() >= a.deadline) continue;
      const Issue& issue = sb.auctions().issue(ann.issue_id);
      ContextPack pack{ann.title, scenario_.feedback_k, {}};
      if (scenario_.feedback_k > 0) {
        std::string query = issue.title;
        for (const auto& t : issue.domain_tags) query += " " + t;
        pack = retrieve_context(sb.log(), query, scenario_.feedback_k);
      }
      const auto bid = agent->decide_bid(ann, issue, pack);
      if (!bid) continue;
      if (sb.auctions().place_bid(node, ann.auction_id, *bid).accepted) participants_of_[ann.auction_id].insert(node);
    } else if (env.topic == kResultTopic) {
      const auto result = AuctionResultNotice::parse(env.payload);
      const auto it = participants_of_.find(result.auction_id);
      if (it == participants_of_.end() || !it->second.contains(node)) continue;
      agent->on_auction_result(result.winner && *result.winner == node);
    }
  }
}

void Simulation::advance_to(Millis t) { sandbox_->clock().advance_to(t); }

void Simulation::run() {
  auto& clock = sandbox_->clock();
  while (const auto due = clock.next_due()) clock.advance_to(*due);
}

// ---------------------------------------------------------------- report

MetricsReport build_report(const EventLog& log, const Scenario& scenario) {
  MetricsReport r;
  r.scenario = scenario.name;
  r.mode = scenario.mode;
  r.seed = scenario.seed;

  std::map<std::string, std::size_t> row_of;
  std::map<ActorId, AgentRow> by_agent;
  auto agent_row = [&](const ActorId& id) -> AgentRow& {
    auto& row = by_agent[id];
    row.agent = id;
    return row;
  };
  for (const auto& a : scenario.agents) agent_row(a.config.agent_id);

  for (const auto& e : log.events()) {
    switch (e.kind) {
      case EventKind::auction_opened: {
        const auto p = nlohmann::json::parse(e.payload);
        AuctionRow row;
        row.auction_id = *e.auction_id;
        row.issue_id = p.at("issue_id").get<std::string>();
        row.buyer = e.actor;
        row.reserve = e.amount.value_or(Money::zero());
        row_of[row.auction_id] = r.auctions.size();
        r.auctions.push_back(std::move(row));
        break;
      }
      case EventKind::bid_placed: {
        if (const auto it = row_of.find(e.auction_id.value_or("")); it != row_of.end()) ++r.auctions[it->second].n_bids;
        break;
      }
      case EventKind::auction_closed: {
        const auto it = row_of.find(e.auction_id.value_or(""));
        if (it == row_of.end()) break;
        auto& row = r.auctions[it->second];
        row.closed = true;
        const auto p = nlohmann::json::parse(e.payload);
        if (!p.at("winner_id").is_null()) {
          row.winner = ActorId(p.at("winner_id").get<std::string>());
          row.clearing_price = Money::msat(p.at("price_msat").get<std::uint64_t>());
          ++agent_row(*row.winner).wins;
        }
        break;
      }
      case EventKind::payment_settled: {
        const auto p = nlohmann::json::parse(e.payload);
        const auto amount = signed_msat(e.amount.value_or(Money::zero()));
        agent_row(e.actor).net_balance_change += amount;
        agent_row(ActorId(p.at("payer").get<std::string>())).net_balance_change -= amount;
        if (e.auction_id) {
          if (const auto it = row_of.find(*e.auction_id); it != row_of.end()) r.auctions[it->second].settled = true;
        }
        break;
      }
      case EventKind::issue_solved: {
        auto& row = agent_row(e.actor);
        ++row.issues_solved;
        row.total_incurred_cost = money_add(row.total_incurred_cost, e.amount.value_or(Money::zero()));
        r.total_system_cost = money_add(r.total_system_cost, e.amount.value_or(Money::zero()));
        ++r.resolved_count;
        break;
      }
      default: break;
    }
  }

  std::set<ActorId> listed;
  for (const auto& a : scenario.agents) {
    r.agents.push_back(by_agent.at(a.config.agent_id));
    listed.insert(a.config.agent_id);
  }
  for (const auto& [id, row] : by_agent) {
    if (!listed.contains(id)) r.agents.push_back(row);
  }

  std::int64_t sum = 0;
  double sum_sq = 0;
  for (const auto& a : r.auctions) {
    if (!a.settled || !a.clearing_price) continue;
    ++r.n_settled;
    sum += signed_msat(*a.clearing_price);
    const auto v = static_cast<double>(a.clearing_price->msat());
    sum_sq += v * v;
  }
  if (r.n_settled > 0) {
    const auto n = static_cast<std::int64_t>(r.n_settled);
    r.mean_clearing_price = Ratio{sum, n};
    if (n > 1) {
      const double mean = static_cast<double>(sum) / static_cast<double>(n);
      const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
      r.clearing_price_stderr = std::sqrt(var / static_cast<double>(n));
    }
  }
  return r;
}

ordered_json to_json(const MetricsReport& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["baseline_interpretation"] = kBaselineNote;
  ordered_json auctions = ordered_json::array();
  for (const auto& a : r.auctions) {
    ordered_json aj;
    aj["auction_id"] = a.auction_id;
    aj["issue_id"] = a.issue_id;
    aj["buyer"] = a.buyer.str();
    aj["reserve_msat"] = a.reserve.msat();
    aj["n_bids"] = a.n_bids;
    aj["no_sale"] = a.closed && !a.winner;
    aj["winner"] = a.winner ? ordered_json(a.winner->str()) : ordered_json(nullptr);
    aj["clearing_price_msat"] = a.clearing_price ? ordered_json(a.clearing_price->msat()) : ordered_json(nullptr);
    aj["settled"] = a.settled;
    auctions.push_back(std::move(aj));
  }
  j["auctions"] = std::move(auctions);
  ordered_json agents = ordered_json::array();
  for (const auto& a : r.agents) {
    ordered_json aj;
    aj["agent"] = a.agent.str();
    aj["wins"] = a.wins;
    aj["net_balance_change_msat"] = a.net_balance_change;
    aj["issues_solved"] = a.issues_solved;
    aj["total_incurred_cost_msat"] = a.total_incurred_cost.msat();
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  ordered_json g;
  if (r.mean_clearing_price) {
    g["mean_clearing_price_msat"] = std::round(r.mean_clearing_price->value() * 1000.0) / 1000.0;
  } else {
    g["mean_clearing_price_msat"] = nullptr;
  }
  g["clearing_price_stderr_msat"] =
      r.clearing_price_stderr ? ordered_json(std::round(*r.clearing_price_stderr * 1000.0) / 1000.0) : ordered_json(nullptr);
  g["n_settled"] = r.n_settled;
  g["total_system_cost_msat"] = r.total_system_cost.msat();
  g["resolved_count"] = r.resolved_count;
  j["global"] = std::move(g);
  return j;
}

std::string auctions_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "auction_id,issue_id,buyer,reserve_msat,n_bids,no_sale,winner,clearing_price_msat,settled\n";
  for (const auto& a : r.auctions) {
    out << a.auction_id << ',' << a.issue_id << ',' << a.buyer.str() << ',' << a.reserve.msat() << ',' << a.n_bids
        << ',' << ((a.closed && !a.winner) ? "true" : "false") << ',' << (a.winner ? a.winner->str() : "") << ','
        << (a.clearing_price ? std::to_string(a.clearing_price->msat()) : "") << ',' << (a.settled ? "true" : "false")
        << '\n';
  }
  return out.str();
}

std::string agents_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "agent,wins,net_balance_change_msat,issues_solved,total_incurred_cost_msat\n";
  for (const auto& a : r.agents) {
    out << a.agent.str() << ',' << a.wins << ',' << a.net_balance_change << ',' << a.issues_solved << ','
        << a.total_incurred_cost.msat() << '\n';
  }
  return out.str();
}

RunResult run_scenario(const Scenario& scenario) {
  Simulation sim(scenario);
  sim.run();
  return {build_report(sim.sandbox().log(), scenario), sim.sandbox().log().to_ndjson()};
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out || !(out << body)) throw Error(Errc::io, "cannot write " + (dir / name).string());
  };
  write("report.json", to_json(result.report).dump(2) + "\n");
  write("auctions.csv", auctions_csv(result.report));
  write("agents.csv", agents_csv(result.report));
  write("events.ndjson", result.log_ndjson);
}

// ---------------------------------------------------------------- baseline

BaselineComparison compare_baseline(const Scenario& scenario) {
  if (scenario.mode != Mode::outsourcing) {
    throw Error(Errc::invalid_argument, "compare_baseline needs an outsourcing-mode scenario");
  }
  Scenario base = scenario;
  base.mode = Mode::baseline;
  BaselineComparison c;
  c.outsourcing = run_scenario(scenario).report;
  c.baseline = run_scenario(base).report;
  c.delta_total_cost = signed_msat(c.outsourcing.total_system_cost) - signed_msat(c.baseline.total_system_cost);

  std::map<ActorId, AgentDelta> deltas;
  std::vector<ActorId> order;
  auto touch = [&](const ActorId& id) -> AgentDelta& {
    if (!deltas.contains(id)) order.push_back(id);
    auto& d = deltas[id];
    d.agent = id;
    return d;
  };
  for (const auto& row : c.outsourcing.agents) {
    auto& d = touch(row.agent);
    d.net_balance_outsourcing = row.net_balance_change;
    d.incurred_outsourcing = row.total_incurred_cost;
  }
  for (const auto& row : c.baseline.agents) {
    auto& d = touch(row.agent);
    d.net_balance_baseline = row.net_balance_change;
    d.incurred_baseline = row.total_incurred_cost;
  }
  for (const auto& id : order) {
    auto& d = deltas.at(id);
    d.delta_net_position = (d.net_balance_outsourcing - signed_msat(d.incurred_outsourcing)) -
                           (d.net_balance_baseline - signed_msat(d.incurred_baseline));
    c.agents.push_back(d);
  }
  return c;
}

ordered_json to_json(const BaselineComparison& c) {
  ordered_json j;
  j["scenario"] = c.outsourcing.scenario;
  j["seed"] = c.outsourcing.seed;
  j["baseline_interpretation"] = kBaselineNote;
  j["outsourcing_total_cost_msat"] = c.outsourcing.total_system_cost.msat();
  j["baseline_total_cost_msat"] = c.baseline.total_system_cost.msat();
  j["delta_total_cost_msat"] = c.delta_total_cost;
  ordered_json agents = ordered_json::array();
  for (const auto& d : c.agents) {
    ordered_json a;
    a["agent"] = d.agent.str();
    a["net_balance_outsourcing_msat"] = d.net_balance_outsourcing;
    a["net_balance_baseline_msat"] = d.net_balance_baseline;
    a["delta_net_balance_msat"] = d.net_balance_outsourcing - d.net_balance_baseline;
    a["incurred_outsourcing_msat"] = d.incurred_outsourcing.msat();
    a["incurred_baseline_msat"] = d.incurred_baseline.msat();
    a["delta_net_position_msat"] = d.delta_net_position;
    agents.push_back(std::move(a));
  }
  j["agents"] = std::move(agents);
  return j;
}

// ---------------------------------------------------------------- sweep

std::optional<SweepParam> parse_sweep_param(std::string_view text) noexcept {
  if (text == "n_bidders") return SweepParam::n_bidders;
  if (text == "reserve_scale") return SweepParam::reserve_scale;
  return std::nullopt;
}

std::string_view to_string(SweepParam p) noexcept {
  return p == SweepParam::n_bidders ? "n_bidders" : "reserve_scale";
}

namespace {

std::string format_value(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<std::int64_t>(v));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scenario sweep_point_scenario(const Scenario& scenario, SweepParam param, double value) {
  Scenario s = scenario;
  s.seed = derive_seed(scenario.seed, "sweep/" + std::string(to_string(param)) + "=" + format_value(value));
  if (param == SweepParam::reserve_scale) {
    if (!(value > 0)) throw Error(Errc::invalid_argument, "reserve_scale values must be positive");
    for (auto& a : s.schedule) {
      a.reserve = money_from_real(static_cast<double>(a.reserve.msat()) * value);
      if (a.reserve.is_zero()) throw Error(Errc::invalid_argument, "scaled reserve rounds to zero");
    }
    return s;
  }

  if (!(value >= 1) || value != std::floor(value)) {
    throw Error(Errc::invalid_argument, "n_bidders values must be positive integers");
  }
  if (!s.hub) throw Error(Errc::invalid_argument, "n_bidders sweeps need a hub topology");
  std::set<ActorId> buyers;
  for (const auto& a : s.schedule) buyers.insert(a.buyer);
  const AgentSpec* tmpl = nullptr;
  for (const auto& a : scenario.agents) {
    if (!buyers.contains(a.config.agent_id)) {
      tmpl = &a;
      break;
    }
  }
  if (tmpl == nullptr) throw Error(Errc::invalid_argument, "n_bidders sweeps need a non-buyer agent to clone");

  std::set<ActorId> dropped;
  std::vector<AgentSpec> agents;
  for (const auto& a : scenario.agents) {
    if (buyers.contains(a.config.agent_id)) {
      agents.push_back(a);
    } else {
      dropped.insert(a.config.agent_id);
    }
  }
  const auto n = static_cast<std::size_t>(value);
  const std::size_t width = std::max<std::size_t>(2, std::to_string(n).size());
  for (std::size_t i = 1; i <= n; ++i) {
    AgentSpec clone = *tmpl;
    auto suffix = std::to_string(i);
    suffix.insert(0, width - suffix.size(), '0');
    clone.config.agent_id = ActorId(tmpl->config.agent_id.str() + "-" + suffix);
    clone.token.clear();
    agents.push_back(std::move(clone));
  }
  s.agents = std::move(agents);
  std::erase_if(s.channels, [&](const ChannelSpec& c) { return dropped.contains(c.a) || dropped.contains(c.b); });
  s.validate();
  return s;
}

std::vector<SweepPoint> sweep(const Scenario& scenario, SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "sweep needs at least one value");
  std::vector<SweepPoint> out;
  for (const double v : values) {
    const Scenario point = sweep_point_scenario(scenario, param, v);
    out.push_back({v, point.seed, run_scenario(point).report});
  }
  return out;
}

ordered_json to_json(const std::vector<SweepPoint>& series, SweepParam param) {
  ordered_json j;
  j["param"] = to_string(param);
  ordered_json points = ordered_json::array();
  for (const auto& p : series) {
    ordered_json pj;
    if (p.value == std::floor(p.value) && std::abs(p.value) < 9.0e15) {
      pj["value"] = static_cast<std::int64_t>(p.value);
    } else {
      pj["value"] = p.value;
    }
    pj["seed"] = p.seed;
    pj["n_auctions"] = p.report.auctions.size();
    pj["n_settled"] = p.report.n_settled;
    pj["mean_clearing_price_msat"] =
        p.report.mean_clearing_price ? ordered_json(p.report.mean_clearing_price->value()) : ordered_json(nullptr);
    pj["clearing_price_stderr_msat"] =
        p.report.clearing_price_stderr ? ordered_json(*p.report.clearing_price_stderr) : ordered_json(nullptr);
    pj["total_system_cost_msat"] = p.report.total_system_cost.msat();
    pj["resolved_count"] = p.report.resolved_count;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j;
}

std::string sweep_csv(const std::vector<SweepPoint>& series, SweepParam param) {
  std::ostringstream out;
  out << to_string(param) << ",seed,n_auctions,n_settled,mean_clearing_price_msat,clearing_price_stderr_msat,"
      << "total_system_cost_msat,resolved_count\n";
  out.precision(10);
  for (const auto& p : series) {
    out << format_value(p.value) << ',' << p.seed << ',' << p.report.auctions.size() << ',' << p.report.n_settled << ',';
    if (p.report.mean_clearing_price) out << p.report.mean_clearing_price->value();
    out << ',';
    if (p.report.clearing_price_stderr) out << *p.report.clearing_price_stderr;
    out << ',' << p.report.total_system_cost.msat() << ',' << p.report.resolved_count << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- specialization

std::vector<SpecializationRow> specialization_report(const MetricsReport& report, const std::vector<Issue>& catalog,
                                                     const std::vector<ActorId>& agents) {
  std::map<std::string, const Issue*> issues;
  for (const auto& i : catalog) issues[i.issue_id] = &i;
  std::map<std::string, std::uint64_t> settled_by_domain;
  std::map<std::pair<std::string, ActorId>, std::uint64_t> wins;
  for (const auto& a : report.auctions) {
    if (!a.settled || !a.winner) continue;
    const auto it = issues.find(a.issue_id);
    if (it == issues.end()) continue;
    for (const auto& d : it->second->domain_tags) {
      ++settled_by_domain[d];
      ++wins[{d, *a.winner}];
    }
  }
  std::vector<ActorId> roster = agents;
  for (const auto& [key, _] : wins) {
    if (std::find(roster.begin(), roster.end(), key.second) == roster.end()) roster.push_back(key.second);
  }
  std::vector<SpecializationRow> rows;
  for (const auto& [domain, settled] : settled_by_domain) {
    for (const auto& agent : roster) {
      const auto w = wins.contains({domain, agent}) ? wins.at({domain, agent}) : 0;
      rows.push_back({agent, domain, w, settled, static_cast<double>(w) / static_cast<double>(settled)});
    }
  }
  return rows;
}

ordered_json to_json(const std::vector<SpecializationRow>& rows) {
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"agent", r.agent.str()},
                 {"domain", r.domain},
                 {"wins", r.wins},
                 {"settled", r.settled},
                 {"share", std::round(r.share * 1e6) / 1e6}});
  }
  return j;
}

}  // namespace ghim
