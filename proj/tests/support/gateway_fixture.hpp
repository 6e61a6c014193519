#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <memory>
#include <thread>

#include "ghim/experiment.hpp"
#include "ghim/gateway.hpp"
#include "ghim/session.hpp"
#include "oracles.hpp"

namespace ghim::test {

/// A buyer agent with three scheduled auctions, a human, an observer and an
/// admin token, all behind a manual-clock gateway on a free port.
inline Scenario gateway_scenario(std::uint64_t seed) {
  Scenario s;
  s.name = "gateway";
  s.seed = seed;
  auto buyer = agent_spec("maintainer", {{"default", 5000}});
  buyer.token = "tok-maintainer";
  s.agents.push_back(buyer);
  auto bot = agent_spec("bot", {{"default", 800}});
  bot.config.cost_model.noise_sigma = 0.2;
  s.agents.push_back(bot);
  s.participants.push_back({ActorId("alice"), Role::human, "tok-alice", Money::zero()});
  s.participants.push_back({ActorId("bob"), Role::human, "tok-bob", Money::zero()});
  s.participants.push_back({ActorId("watcher"), Role::observer, "tok-watch", Money::zero()});
  for (int i = 0; i < 3; ++i) {
    const auto id = "g-" + std::to_string(i);
    s.issues.push_back(issue_of(id, {"web"}));
    s.schedule.push_back({id, ActorId("maintainer"), Money::msat(5000), i * 100, i * 100 + 1000});
  }
  s.hub = hub_of(1'000'000);
  return s;
}

class GatewayFixture {
 public:
  explicit GatewayFixture(Scenario scenario) : sim(std::move(scenario)) {
    sim.advance_to(0);
    GatewayOptions opts;
    opts.manual_clock = true;
    opts.tokens = scenario_tokens(sim.scenario());
    opts.tokens["tok-admin"] = {ActorId("admin"), Role::admin};
    gateway = std::make_unique<Gateway>(sim, opts);
    port = gateway->start();
    thread = std::thread([this] { gateway->run(); });
  }

  ~GatewayFixture() { stop(); }

  /// Stops the io thread; the simulation may be inspected afterwards.
  void stop() {
    if (!thread.joinable()) return;
    gateway->stop();
    thread.join();
  }

  std::unique_ptr<GatewayClient> client(const std::string& token) {
    auto c = std::make_unique<GatewayClient>();
    c->connect("127.0.0.1", port);
    const auto r = c->request("auth", {{"token", token}});
    if (!r.value("ok", false)) throw std::runtime_error("auth failed: " + r.dump());
    return c;
  }

  Simulation sim;
  std::unique_ptr<Gateway> gateway;
  unsigned short port = 0;
  std::thread thread;
};

}  // namespace ghim::test

namespace ghim::test {

struct RecordedRun {
  std::string recording;
  std::vector<Event> live_bids;
};

/// Alice records a session and bids on each of the three auctions at a
/// different virtual time while an admin session moves the clock.
inline RecordedRun record_three_bids(std::uint64_t seed, const std::filesystem::path& path) {
  GatewayFixture fx(gateway_scenario(seed));
  auto admin = fx.client("tok-admin");
  auto alice = fx.client("tok-alice");
  if (!alice->request("session.record", {{"path", path.string()}}).value("ok", false)) {
    throw std::runtime_error("session.record failed");
  }
  const std::vector<std::pair<Millis, std::uint64_t>> plan = {{30, 4100}, {170, 3900}, {275, 4500}};
  int i = 1;
  for (const auto& [delta, amount] : plan) {
    admin->request("sim.advance", {{"delta_ms", delta}});
    const auto r = alice->request("auction.bid", {{"auction_id", "auc-" + std::to_string(i++)}, {"amount_msat", amount}});
    if (!r.value("ok", false)) throw std::runtime_error("bid failed: " + r.dump());
  }
  admin->request("sim.run");
  fx.stop();
  RecordedRun out;
  for (const auto& e : fx.sim.sandbox().log().events()) {
    if (e.kind == EventKind::bid_placed && e.actor == ActorId("alice")) out.live_bids.push_back(e);
  }
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  out.recording = ss.str();
  return out;
}

inline std::vector<Event> replayed_bids(std::uint64_t seed, const std::string& recording, const ActorId& who) {
  Simulation sim(gateway_scenario(seed));
  replay_sessions(sim, {parse_recording(recording)});
  std::vector<Event> out;
  for (const auto& e : sim.sandbox().log().events()) {
    if (e.kind == EventKind::bid_placed && e.actor == who) out.push_back(e);
  }
  return out;
}

}  // namespace ghim::test
