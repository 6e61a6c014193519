#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "ghim/event_log.hpp"
#include "ghim/kernel.hpp"

namespace ghim {

/// Opaque, binary-safe message body.
using Bytes = std::string;

inline constexpr std::size_t kMaxTopicBytes = 128;
inline constexpr std::size_t kMaxPayloadBytes = 64 * 1024;

void validate_topic(std::string_view topic);

struct LinkPolicy {
  Millis latency_ms_min = 0;
  Millis latency_ms_max = 0;
  double drop_prob = 0.0;
  double dup_prob = 0.0;

  void validate() const;
  bool operator==(const LinkPolicy&) const = default;
};

struct Envelope {
  std::string msg_id;
  std::string topic;
  ActorId sender;
  std::uint64_t seq = 0;
  Bytes payload;
  Millis sent_at = 0;

  bool operator==(const Envelope&) const = default;
};

struct Delivery {
  Envelope envelope;
  Millis delivered_at = 0;
  /// True for the second copy produced by link duplication.
  bool duplicate = false;
};

struct NodeHandle {
  ActorId node_id;
};

/// Topic-based publish/subscribe with per-link latency, loss and duplication.
///
/// Delivery is decided centrally at publish time, one independent draw per
/// subscriber from the (publisher -> subscriber) link substream, and observed
/// only through each node's inbox. The publisher's node policy applies to its
/// outgoing links unless a per-link override is installed.
class PubSubBus {
 public:
  using Tap = std::function<void(const Envelope&)>;
  using DeliveryHook = std::function<void(const ActorId& node, Millis deliver_at)>;

  PubSubBus(VirtualClock& clock, SeededRng rng, EventLog* log = nullptr);

  NodeHandle create_node(const ActorId& node_id, LinkPolicy policy = {});
  bool has_node(const ActorId& node_id) const;
  std::vector<ActorId> nodes() const;

  void subscribe(const ActorId& node, std::string_view topic);
  void unsubscribe(const ActorId& node, std::string_view topic);
  std::set<std::string> subscriptions(const ActorId& node) const;
  std::vector<ActorId> subscribers(std::string_view topic) const;

  void set_link_policy(const ActorId& from, const ActorId& to, LinkPolicy policy);

  std::string publish(const ActorId& node, std::string_view topic, Bytes payload);

  /// Deliveries due at the current virtual time, ordered by delivery time and
  /// then publish order. With `dedup`, a msg_id already returned to this node
  /// is never returned again.
  std::vector<Delivery> poll_inbox(const ActorId& node, bool dedup);
  std::size_t pending(const ActorId& node) const;

  /// Passive observers notified synchronously on every publish; they never
  /// affect delivery draws and produce no events.
  std::uint64_t add_tap(Tap tap);
  void remove_tap(std::uint64_t id);

  /// Invoked once per scheduled delivery so a driver can wake the node.
  void on_delivery_scheduled(DeliveryHook hook) { delivery_hook_ = std::move(hook); }

 private:
  // (deliver_at, publish index, copy)
  using InboxKey = std::tuple<Millis, std::uint64_t, int>;

  struct Node {
    LinkPolicy policy;
    std::set<std::string, std::less<>> topics;
    std::map<InboxKey, Delivery> inbox;
    std::unordered_set<std::uint64_t> returned;
  };

  Node& node_ref(const ActorId& id);
  const Node& node_ref(const ActorId& id) const;
  SeededRng& link_rng(const ActorId& from, const ActorId& to);
  const LinkPolicy& policy_for(const ActorId& from, const ActorId& to) const;
  void enqueue(const ActorId& to, Node& node, const Envelope& env, std::uint64_t index, Millis at, int copy);

  VirtualClock& clock_;
  SeededRng rng_;
  EventLog* log_;
  std::map<ActorId, Node> nodes_;
  std::map<std::string, std::set<ActorId>, std::less<>> topic_members_;
  std::map<std::pair<ActorId, ActorId>, LinkPolicy> link_overrides_;
  std::map<std::pair<ActorId, ActorId>, SeededRng> link_rngs_;
  std::map<std::pair<ActorId, std::string>, std::uint64_t> seq_counters_;
  std::map<std::uint64_t, Tap> taps_;
  std::uint64_t next_tap_ = 1;
  std::uint64_t publish_count_ = 0;
  DeliveryHook delivery_hook_;
};

// ---------------------------------------------------------------- gateway wire format

/// One externally injected publish: a JSON object {topic, sender, payload_b64}
/// per line.
struct InjectedPublish {
  std::string topic;
  ActorId sender;
  Bytes payload;
};

InjectedPublish parse_injected_publish(std::string_view line);
std::string encode_injected_publish(const InjectedPublish& p);

}  // namespace ghim
