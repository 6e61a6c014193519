#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ghim/agent.hpp"
#include "ghim/error.hpp"
#include "ghim/scenario.hpp"
#include "oracles.hpp"

using namespace ghim;

namespace {

AgentConfig plain(std::uint64_t base) {
  return test::agent_spec("a", {{"default", base}}, 10'000'000).config;
}

}  // namespace

TEST_CASE("noiseless estimate is the base cost at any difficulty with multiplier one") {
  const Agent a(plain(1000), 1);
  for (double d : {0.5, 1.0, 3.0}) {
    auto issue = test::issue_of("i", {"web"});
    issue.difficulty = d;
    CHECK(a.estimate_cost(issue).msat() == 1000);
  }
}

TEST_CASE("the cheapest listed tag sets the base cost") {
  auto cfg = test::agent_spec("a", {{"default", 900}, {"web", 500}, {"db", 300}}).config;
  CHECK(base_cost(cfg.cost_model, test::issue_of("i", {"web", "db"})).msat() == 300);
  CHECK(base_cost(cfg.cost_model, test::issue_of("i", {"ml"})).msat() == 900);
}

TEST_CASE("estimates are deterministic and execution uses its own stream") {
  auto cfg = plain(100000);
  cfg.cost_model.noise_sigma = 0.3;
  const Agent a(cfg, 42), b(cfg, 42);
  const auto issue = test::issue_of("i-1", {"web"});
  CHECK(a.estimate_cost(issue) == b.estimate_cost(issue));
  CHECK(a.estimate_cost(issue) == a.estimate_cost(issue));
  CHECK(cost_draw(cfg, issue, 42, "estimate") != cost_draw(cfg, issue, 42, "execute"));
}

TEST_CASE("truthful bid equals cost; markup over reserve passes") {
  CHECK(bid_rule(Money::msat(900), 0.0, Money::msat(1000), Money::msat(1'000'000)) == Money::msat(900));
  CHECK_FALSE(bid_rule(Money::msat(900), 0.2, Money::msat(1000), Money::msat(1'000'000)));
  CHECK_FALSE(bid_rule(Money::msat(900), 0.0, Money::msat(1000), Money::msat(899)));
}

TEST_CASE("bid decisions match an independent rule on random configs") {
  SeededRng r(31, "bid-rule");
  for (int t = 0; t < 2000; ++t) {
    auto cfg = plain(r.uniform_int(std::uint64_t{1}, std::uint64_t{5000}));
    cfg.strategy.kind = static_cast<StrategyKind>(r.uniform_int(std::uint64_t{0}, std::uint64_t{2}));
    cfg.strategy.markup_rate = r.next_uniform() * 0.5;
    cfg.cost_model.noise_sigma = r.bernoulli(0.5) ? r.next_uniform() : 0.0;
    cfg.budget = Money::msat(r.uniform_int(std::uint64_t{0}, std::uint64_t{8000}));
    const Agent a(cfg, t);
    const auto issue = test::issue_of("i-" + std::to_string(t), {"web"});
    const Announcement ann{"auc-1", issue.issue_id, "", Money::msat(r.uniform_int(std::uint64_t{1}, std::uint64_t{8000})), 10};

    const double markup = cfg.strategy.kind == StrategyKind::truthful ? 0.0 : cfg.strategy.markup_rate;
    const auto cost = a.estimate_cost(issue).msat();
    auto bid = static_cast<std::uint64_t>(std::llround(double(cost) * (1.0 + markup)));
    if (bid == 0) bid = 1;
    const bool pass = bid > ann.reserve.msat() || bid > cfg.budget.msat();

    const auto got = a.decide_bid(ann, issue, {});
    REQUIRE(got.has_value() == !pass);
    if (got) REQUIRE(got->msat() == bid);
  }
}

TEST_CASE("agents skip issues outside their domains") {
  auto cfg = plain(10);
  cfg.domains = {"db"};
  const Agent a(cfg, 1);
  const Announcement ann{"auc-1", "i", "", Money::msat(100), 10};
  CHECK_FALSE(a.decide_bid(ann, test::issue_of("i", {"web"}), {}));
  CHECK(a.decide_bid(ann, test::issue_of("i", {"web", "db"}), {}));
}

TEST_CASE("adaptive markup follows W,W,L,L,L") {
  Strategy s{StrategyKind::adaptive, 0.10, 0.02, 0.0, 0.5};
  const std::vector<double> want = {0.12, 0.14, 0.12, 0.10, 0.08};
  const std::vector<bool> outcome = {true, true, false, false, false};
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    s = on_auction_result(s, outcome[i]);
    CHECK(s.markup_rate == Catch::Approx(want[i]).margin(1e-12));
  }
}

TEST_CASE("adaptation is clamped and other kinds ignore results") {
  Strategy s{StrategyKind::adaptive, 0.01, 0.02, 0.0, 0.03};
  CHECK(on_auction_result(s, false).markup_rate == 0.0);
  s.markup_rate = 0.02;
  CHECK(on_auction_result(s, true).markup_rate == 0.03);
  const Strategy t{StrategyKind::truthful, 0.0, 0.02, 0.0, 0.5};
  CHECK(on_auction_result(t, true) == t);
  const Strategy m{StrategyKind::markup, 0.1, 0.02, 0.0, 0.5};
  CHECK(on_auction_result(m, false) == m);
}

TEST_CASE("solving logs the cost and the matching budget debit") {
  EventLog log;
  Agent a(plain(700), 1);
  const auto cost = a.solve_issue(test::issue_of("i", {"web"}), log, 5, std::string("auc-1"), "outsourced");
  CHECK(cost.msat() == 700);
  CHECK(a.budget_balance() == 10'000'000 - 700);
  REQUIRE(log.size() == 2);
  CHECK(log.events()[0].kind == EventKind::issue_solved);
  CHECK(log.events()[1].kind == EventKind::agent_budget_changed);
  CHECK(log.events()[1].payload.find("\"delta_msat\":-700") != std::string::npos);
}

TEST_CASE("invalid cost models and strategies are rejected") {
  auto cfg = plain(10);
  cfg.cost_model.base_cost_by_domain.erase("default");
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = plain(10);
  cfg.strategy.kind = StrategyKind::adaptive;
  cfg.strategy.lo = 0.6;
  cfg.strategy.hi = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = plain(10);
  cfg.cost_model.noise_sigma = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("the higher-cost model estimates above the cheaper one on every catalog issue") {
  // Same shape as the sample marketplace: one model prices every domain above the other.
  auto sc = load_scenario(std::string(GHIM_SCENARIO_DIR) + "/marketplace.json");
  auto gpt4 = sc.agent(ActorId("swe-gpt4"))->config;
  auto opus = sc.agent(ActorId("swe-opus"))->config;
  gpt4.cost_model.noise_sigma = 0;
  opus.cost_model.noise_sigma = 0;
  const Agent g(gpt4, sc.seed), o(opus, sc.seed);
  REQUIRE_FALSE(sc.issues.empty());
  for (const auto& issue : sc.issues) CHECK(o.estimate_cost(issue) > g.estimate_cost(issue));
}
