#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ghim/event_log.hpp"
#include "ghim/experiment.hpp"
#include "ghim/sandbox.hpp"

namespace ghim {

struct Credential {
  ActorId actor;
  Role role = Role::observer;
};

struct GatewayOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port; see Gateway::port().
  unsigned short port = 0;
  std::chrono::milliseconds tick{100};
  /// Virtual milliseconds added per wall tick.
  Millis virtual_per_tick = 100;
  /// No wall ticks: time moves only through sim.advance / sim.run.
  bool manual_clock = false;
  /// token -> credential.
  std::map<std::string, Credential> tokens;
};

/// Tokens declared by a scenario's agents and participants.
std::map<std::string, Credential> scenario_tokens(const Scenario& scenario);

/// WebSocket front door to one simulation. Every frame is handled on the
/// gateway's single io thread, so all state mutations are serialized in
/// arrival order.
class Gateway {
 public:
  Gateway(Simulation& sim, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts accepting; returns the bound port.
  unsigned short start();
  unsigned short port() const noexcept;
  /// Runs the io loop on the calling thread until stop().
  void run();
  /// Thread-safe.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Minimal synchronous client for tests, scripted agents and tooling.
class GatewayClient {
 public:
  GatewayClient();
  ~GatewayClient();
  GatewayClient(const GatewayClient&) = delete;
  GatewayClient& operator=(const GatewayClient&) = delete;

  void connect(const std::string& host, unsigned short port);
  void send_text(const std::string& text);
  /// Next frame of any kind.
  nlohmann::json receive();
  /// Sends {op, request_id, args} and waits for the matching response;
  /// stream frames seen meanwhile are kept for take_streams().
  nlohmann::json request(const std::string& op, const nlohmann::json& args = nlohmann::json::object());
  /// Waits until `count` stream frames are buffered or the timeout passes.
  std::vector<nlohmann::json> take_streams(std::size_t count = 0,
                                           std::chrono::milliseconds timeout = std::chrono::milliseconds(0));
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ghim
