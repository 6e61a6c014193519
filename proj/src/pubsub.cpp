#include "ghim/pubsub.hpp"

#include "ghim/encoding.hpp"
#include "ghim/error.hpp"

namespace ghim {

void validate_topic(std::string_view topic) {
  if (topic.empty()) throw Error(Errc::invalid_argument, "topic must be non-empty");
  if (topic.size() > kMaxTopicBytes) throw Error(Errc::invalid_argument, "topic exceeds 128 bytes");
}

void LinkPolicy::validate() const {
  if (latency_ms_min < 0 || latency_ms_max < latency_ms_min) {
    throw Error(Errc::invalid_argument, "link latency must satisfy 0 <= min <= max");
  }
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0) || !(dup_prob >= 0.0 && dup_prob <= 1.0)) {
    throw Error(Errc::invalid_argument, "link probabilities must lie in [0, 1]");
  }
}

PubSubBus::PubSubBus(VirtualClock& clock, SeededRng rng, EventLog* log)
    : clock_(clock), rng_(std::move(rng)), log_(log) {}

NodeHandle PubSubBus::create_node(const ActorId& node_id, LinkPolicy policy) {
  if (node_id.empty()) throw Error(Errc::invalid_argument, "node id must be non-empty");
  policy.validate();
  if (nodes_.contains(node_id)) throw Error(Errc::duplicate, "node '" + node_id.str() + "' already exists");
  nodes_.emplace(node_id, Node{policy, {}, {}, {}});
  if (log_) {
    ordered_json payload;
    payload["node_id"] = node_id.str();
    log_->record(clock_.now(), EventKind::node_created, node_id, std::nullopt, std::nullopt, payload);
  }
  return NodeHandle{node_id};
}

bool PubSubBus::has_node(const ActorId& node_id) const { return nodes_.contains(node_id); }

std::vector<ActorId> PubSubBus::nodes() const {
  std::vector<ActorId> out;
  for (const auto& [id, node] : nodes_) out.push_back(id);
  return out;
}

PubSubBus::Node& PubSubBus::node_ref(const ActorId& id) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::not_found, "unknown node '" + id.str() + "'");
  return it->second;
}

const PubSubBus::Node& PubSubBus::node_ref(const ActorId& id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::not_found, "unknown node '" + id.str() + "'");
  return it->second;
}

void PubSubBus::subscribe(const ActorId& node, std::string_view topic) {
  validate_topic(topic);
  auto& n = node_ref(node);
  n.topics.emplace(topic);
  auto it = topic_members_.find(topic);
  if (it == topic_members_.end()) it = topic_members_.emplace(std::string(topic), std::set<ActorId>{}).first;
  it->second.insert(node);
}

void PubSubBus::unsubscribe(const ActorId& node, std::string_view topic) {
  validate_topic(topic);
  auto& n = node_ref(node);
  const auto t = n.topics.find(topic);
  if (t == n.topics.end()) return;
  n.topics.erase(t);
  if (auto it = topic_members_.find(topic); it != topic_members_.end()) it->second.erase(node);
  // In-transit copies would arrive after the unsubscribe; drop them.
  const Millis now = clock_.now();
  for (auto it = n.inbox.begin(); it != n.inbox.end();) {
    if (std::get<0>(it->first) > now && it->second.envelope.topic == topic) {
      it = n.inbox.erase(it);
    } else {
      ++it;
    }
  }
}

std::set<std::string> PubSubBus::subscriptions(const ActorId& node) const {
  const auto& n = node_ref(node);
  return {n.topics.begin(), n.topics.end()};
}

std::vector<ActorId> PubSubBus::subscribers(std::string_view topic) const {
  const auto it = topic_members_.find(topic);
  if (it == topic_members_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

void PubSubBus::set_link_policy(const ActorId& from, const ActorId& to, LinkPolicy policy) {
  policy.validate();
  node_ref(from);
  node_ref(to);
  link_overrides_[{from, to}] = policy;
}

const LinkPolicy& PubSubBus::policy_for(const ActorId& from, const ActorId& to) const {
  if (const auto it = link_overrides_.find({from, to}); it != link_overrides_.end()) return it->second;
  return node_ref(from).policy;
}

SeededRng& PubSubBus::link_rng(const ActorId& from, const ActorId& to) {
  auto it = link_rngs_.find({from, to});
  if (it == link_rngs_.end()) {
    it = link_rngs_.emplace(std::pair{from, to}, rng_.substream("link/" + from.str() + "->" + to.str())).first;
  }
  return it->second;
}

void PubSubBus::enqueue(const ActorId& to, Node& node, const Envelope& env, std::uint64_t index, Millis at,
                        int copy) {
  node.inbox.emplace(InboxKey{at, index, copy}, Delivery{env, at, copy > 0});
  if (delivery_hook_) delivery_hook_(to, at);
}

std::string PubSubBus::publish(const ActorId& node, std::string_view topic, Bytes payload) {
  validate_topic(topic);
  node_ref(node);
  if (payload.size() > kMaxPayloadBytes) throw Error(Errc::invalid_argument, "payload exceeds 64 KiB");

  const std::uint64_t index = ++publish_count_;
  Envelope env;
  env.msg_id = "m" + std::to_string(index);
  env.topic = std::string(topic);
  env.sender = node;
  env.seq = ++seq_counters_[{node, env.topic}];
  env.payload = std::move(payload);
  env.sent_at = clock_.now();

  if (log_) {
    ordered_json p;
    p["msg_id"] = env.msg_id;
    p["topic"] = env.topic;
    p["seq"] = env.seq;
    p["bytes"] = env.payload.size();
    log_->record(env.sent_at, EventKind::msg_published, node, std::nullopt, std::nullopt, p);
  }

  for (const auto& subscriber : subscribers(topic)) {
    const LinkPolicy& policy = policy_for(node, subscriber);
    SeededRng& rng = link_rng(node, subscriber);
    if (rng.bernoulli(policy.drop_prob)) continue;
    Node& target = nodes_.at(subscriber);
    const Millis first = env.sent_at + rng.uniform_int(policy.latency_ms_min, policy.latency_ms_max);
    enqueue(subscriber, target, env, index, first, 0);
    if (rng.bernoulli(policy.dup_prob)) {
      const Millis second = env.sent_at + rng.uniform_int(policy.latency_ms_min, policy.latency_ms_max);
      enqueue(subscriber, target, env, index, second, 1);
    }
  }
  for (const auto& [id, tap] : taps_) tap(env);
  return env.msg_id;
}

std::vector<Delivery> PubSubBus::poll_inbox(const ActorId& node, bool dedup) {
  auto& n = node_ref(node);
  const Millis now = clock_.now();
  std::vector<Delivery> out;
  while (!n.inbox.empty() && std::get<0>(n.inbox.begin()->first) <= now) {
    auto entry = n.inbox.extract(n.inbox.begin());
    const std::uint64_t index = std::get<1>(entry.key());
    const bool seen = !n.returned.insert(index).second;
    if (dedup && seen) continue;
    out.push_back(std::move(entry.mapped()));
  }
  return out;
}

std::size_t PubSubBus::pending(const ActorId& node) const { return node_ref(node).inbox.size(); }

std::uint64_t PubSubBus::add_tap(Tap tap) {
  const auto id = next_tap_++;
  taps_.emplace(id, std::move(tap));
  return id;
}

void PubSubBus::remove_tap(std::uint64_t id) { taps_.erase(id); }

InjectedPublish parse_injected_publish(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("injected publish is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::invalid_argument, "injected publish must be a JSON object");
  for (const char* field : {"topic", "sender", "payload_b64"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw Error(Errc::invalid_argument, std::string("injected publish needs string field '") + field + "'");
    }
  }
  auto payload = base64_decode(j["payload_b64"].get<std::string>());
  if (!payload) throw Error(Errc::invalid_argument, "payload_b64 is not valid base64");
  InjectedPublish p{j["topic"].get<std::string>(), ActorId(j["sender"].get<std::string>()), std::move(*payload)};
  validate_topic(p.topic);
  return p;
}

std::string encode_injected_publish(const InjectedPublish& p) {
  ordered_json j;
  j["topic"] = p.topic;
  j["sender"] = p.sender.str();
  j["payload_b64"] = base64_encode(p.payload);
  return j.dump();
}

}  // namespace ghim
