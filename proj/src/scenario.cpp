#include "ghim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "ghim/error.hpp"

namespace ghim {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& path, const std::string& msg) {
  throw Error(Errc::invalid_argument, std::string(source) + ": " + (path.empty() ? "" : path + ": ") + msg);
}

std::string type_name(const json& j) { return j.type_name(); }

// Typed access into one JSON object with path-qualified diagnostics and
// rejection of unknown keys.
class Obj {
 public:
  Obj(const json& j, std::string path, std::string_view source, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j.is_object()) fail(source_, path_, "expected object, got " + type_name(j));
    for (const auto& [key, _] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(source_, sub(key), "unknown field");
      }
    }
  }

  std::string sub(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
  bool has(std::string_view key) const { return j_.contains(key); }

  const json& at(std::string_view key) const {
    const auto it = j_.find(key);
    if (it == j_.end()) fail(source_, sub(key), "missing required field");
    return *it;
  }

  std::string str(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(source_, sub(key), "expected string, got " + type_name(v));
    return v.get<std::string>();
  }
  std::string str_or(std::string_view key, std::string fallback) const { return has(key) ? str(key) : fallback; }

  ActorId actor(std::string_view key) const {
    auto s = str(key);
    if (s.empty()) fail(source_, sub(key), "actor id must be non-empty");
    return ActorId(s);
  }

  std::uint64_t u64(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(source_, sub(key), "expected non-negative integer, got " + type_name(v));
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t u64_or(std::string_view key, std::uint64_t fallback) const { return has(key) ? u64(key) : fallback; }

  std::int64_t i64(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(source_, sub(key), "expected integer, got " + type_name(v));
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(source_, sub(key), "integer out of range");
    }
    return v.get<std::int64_t>();
  }
  std::int64_t i64_or(std::string_view key, std::int64_t fallback) const { return has(key) ? i64(key) : fallback; }

  Money money(std::string_view key) const { return Money::msat(u64(key)); }
  Money money_or(std::string_view key, Money fallback) const { return has(key) ? money(key) : fallback; }

  double num(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(source_, sub(key), "expected number, got " + type_name(v));
    return v.get<double>();
  }
  double num_or(std::string_view key, double fallback) const { return has(key) ? num(key) : fallback; }

  const json& array(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(source_, sub(key), "expected array, got " + type_name(v));
    return v;
  }

  std::set<std::string> string_set(std::string_view key) const {
    std::set<std::string> out;
    const json& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(source_, sub(key) + "[" + std::to_string(i) + "]", "expected string");
      out.insert(arr[i].get<std::string>());
    }
    return out;
  }

  [[noreturn]] void error(std::string_view key, const std::string& msg) const { fail(source_, sub(key), msg); }
  std::string_view source() const { return source_; }

 private:
  const json& j_;
  std::string path_;
  std::string_view source_;
};

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(Errc::invalid_argument,
                std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

LinkPolicy parse_link_policy(const json& j, const std::string& path, std::string_view source) {
  Obj o(j, path, source, {"latency_ms_min", "latency_ms_max", "drop_prob", "dup_prob"});
  LinkPolicy p;
  p.latency_ms_min = o.i64_or("latency_ms_min", 0);
  p.latency_ms_max = o.i64_or("latency_ms_max", p.latency_ms_min);
  p.drop_prob = o.num_or("drop_prob", 0.0);
  p.dup_prob = o.num_or("dup_prob", 0.0);
  try {
    p.validate();
  } catch (const Error& e) {
    fail(source, path, e.what());
  }
  return p;
}

CostModel parse_cost_model(const json& j, const std::string& path, std::string_view source) {
  Obj o(j, path, source, {"base_cost_msat", "difficulty_multiplier", "noise_sigma", "noise"});
  CostModel m;
  const json& base = o.at("base_cost_msat");
  if (!base.is_object()) o.error("base_cost_msat", "expected object mapping domain to msat");
  for (const auto& [domain, v] : base.items()) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      o.error("base_cost_msat." + domain, "expected non-negative integer");
    }
    m.base_cost_by_domain[domain] = Money::msat(v.get<std::uint64_t>());
  }
  m.difficulty_multiplier = o.num_or("difficulty_multiplier", 1.0);
  m.noise_sigma = o.num_or("noise_sigma", 0.0);
  if (o.has("noise")) {
    Obj n(o.at("noise"), o.sub("noise"), source, {"kind", "lo", "hi"});
    const auto kind = n.str("kind");
    if (kind == "lognormal") {
      m.noise_kind = NoiseKind::lognormal;
    } else if (kind == "uniform") {
      m.noise_kind = NoiseKind::uniform;
      m.uniform_lo = n.num_or("lo", 0.0);
      m.uniform_hi = n.num_or("hi", 1.0);
    } else {
      n.error("kind", "expected one of lognormal, uniform");
    }
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(source, path, e.what());
  }
  return m;
}

Strategy parse_strategy(const json& j, const std::string& path, std::string_view source) {
  Obj o(j, path, source, {"kind", "markup_rate", "adapt_step", "lo", "hi"});
  Strategy s;
  const auto kind = o.str("kind");
  const auto parsed = parse_strategy_kind(kind);
  if (!parsed) o.error("kind", "expected one of truthful, markup, adaptive");
  s.kind = *parsed;
  s.markup_rate = o.num_or("markup_rate", 0.0);
  s.adapt_step = o.num_or("adapt_step", s.adapt_step);
  s.lo = o.num_or("lo", s.lo);
  s.hi = o.num_or("hi", s.hi);
  try {
    s.validate();
  } catch (const Error& e) {
    fail(source, path, e.what());
  }
  return s;
}

AgentSpec parse_agent(const json& j, const std::string& path, std::string_view source) {
  Obj o(j, path, source, {"id", "budget_msat", "domains", "cost_model", "strategy", "token"});
  AgentSpec a;
  a.config.agent_id = o.actor("id");
  a.config.budget = o.money_or("budget_msat", Money::zero());
  if (o.has("domains")) a.config.domains = o.string_set("domains");
  a.config.cost_model = parse_cost_model(o.at("cost_model"), o.sub("cost_model"), source);
  if (o.has("strategy")) a.config.strategy = parse_strategy(o.at("strategy"), o.sub("strategy"), source);
  a.token = o.str_or("token", "");
  return a;
}

Issue parse_issue(const json& j, const std::string& path, std::string_view source) {
  Obj o(j, path, source, {"issue_id", "title", "body", "domain_tags", "difficulty"});
  Issue i;
  i.issue_id = o.str("issue_id");
  i.title = o.str_or("title", "");
  i.body = o.str_or("body", "");
  i.domain_tags = o.string_set("domain_tags");
  i.difficulty = o.num_or("difficulty", 1.0);
  try {
    i.validate();
  } catch (const Error& e) {
    fail(source, path, e.what());
  }
  return i;
}

std::string padded(std::size_t value, std::size_t width) {
  auto s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

void expand_generator(const json& j, const std::string& path, std::string_view source, Scenario& s) {
  Obj o(j, path, source,
        {"count", "buyer", "reserve_msat", "start_ms", "interval_ms", "duration_ms", "domain_tags", "difficulty",
         "issue_prefix", "title"});
  const auto count = o.u64("count");
  const auto buyer = o.actor("buyer");
  const auto reserve = o.money("reserve_msat");
  const auto start = o.i64_or("start_ms", 0);
  const auto interval = o.i64("interval_ms");
  const auto duration = o.i64("duration_ms");
  const auto tags = o.string_set("domain_tags");
  const auto difficulty = o.num_or("difficulty", 1.0);
  const auto prefix = o.str_or("issue_prefix", "gen-");
  const auto title = o.str_or("title", "generated issue");
  if (interval < 0) o.error("interval_ms", "must be non-negative");
  if (duration <= 0) o.error("duration_ms", "must be positive");
  const std::size_t width = std::to_string(count).size();
  s.issues.reserve(s.issues.size() + count);
  s.schedule.reserve(s.schedule.size() + count);
  for (std::uint64_t n = 0; n < count; ++n) {
    Issue issue;
    issue.issue_id = prefix + padded(n + 1, width);
    issue.title = title + " " + std::to_string(n + 1);
    issue.domain_tags = tags;
    issue.difficulty = difficulty;
    const Millis open_at = start + static_cast<Millis>(n) * interval;
    s.schedule.push_back({issue.issue_id, buyer, reserve, open_at, open_at + duration});
    s.issues.push_back(std::move(issue));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(Mode mode) noexcept { return mode == Mode::baseline ? "baseline" : "outsourcing"; }

std::vector<Issue> parse_issue_catalog(std::string_view text, std::string_view source) {
  const json doc = parse_json(text, source);
  if (!doc.is_array()) fail(source, "", "catalog must be an array of issues");
  std::vector<Issue> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = idx("", i);
    const json& e = doc[i];
    if (!e.is_object()) fail(source, path, "expected object");
    Issue issue;
    if (!e.contains("number") || !e["number"].is_number_integer()) fail(source, path + ".number", "expected integer");
    issue.issue_id = "gh-" + std::to_string(e["number"].get<std::int64_t>());
    if (!e.contains("title") || !e["title"].is_string()) fail(source, path + ".title", "expected string");
    issue.title = e["title"].get<std::string>();
    if (e.contains("body") && e["body"].is_string()) issue.body = e["body"].get<std::string>();
    if (e.contains("labels")) {
      const json& labels = e["labels"];
      if (!labels.is_array()) fail(source, path + ".labels", "expected array");
      for (std::size_t k = 0; k < labels.size(); ++k) {
        std::string name;
        if (labels[k].is_string()) {
          name = labels[k].get<std::string>();
        } else if (labels[k].is_object() && labels[k].contains("name") && labels[k]["name"].is_string()) {
          name = labels[k]["name"].get<std::string>();
        } else {
          fail(source, idx(path + ".labels", k), "expected string or {name}");
        }
        if (name.rfind("difficulty:", 0) == 0) {
          try {
            issue.difficulty = std::stod(name.substr(11));
          } catch (const std::exception&) {
            fail(source, idx(path + ".labels", k), "bad difficulty label '" + name + "'");
          }
        } else {
          issue.domain_tags.insert(name);
        }
      }
    }
    if (issue.domain_tags.empty()) issue.domain_tags.insert("untagged");
    try {
      issue.validate();
    } catch (const Error& err) {
      fail(source, path, err.what());
    }
    out.push_back(std::move(issue));
  }
  return out;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir, std::string_view source) {
  const json doc = parse_json(text, source);
  Obj o(doc, "", source,
        {"name", "seed", "mode", "link_policy", "agents", "participants", "routers", "issues", "issue_catalog",
         "auction_schedule", "auction_generator", "channels", "topology", "solve_delay_ms", "escrow_expiry_ms",
         "feedback_k"});
  Scenario s;
  s.name = o.str("name");
  s.seed = o.u64("seed");
  const auto mode = o.str_or("mode", "outsourcing");
  if (mode == "outsourcing") {
    s.mode = Mode::outsourcing;
  } else if (mode == "baseline") {
    s.mode = Mode::baseline;
  } else {
    o.error("mode", "expected one of outsourcing, baseline");
  }
  if (o.has("link_policy")) s.link_policy = parse_link_policy(o.at("link_policy"), "link_policy", source);

  const json& agents = o.array("agents");
  for (std::size_t i = 0; i < agents.size(); ++i) s.agents.push_back(parse_agent(agents[i], idx("agents", i), source));

  if (o.has("participants")) {
    const json& arr = o.array("participants");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj p(arr[i], idx("participants", i), source, {"id", "role", "token", "funds_msat"});
      ParticipantSpec spec;
      spec.id = p.actor("id");
      const auto role = parse_role(p.str("role"));
      if (!role || *role == Role::agent || *role == Role::admin) p.error("role", "expected one of human, observer");
      spec.role = *role;
      spec.token = p.str_or("token", "");
      spec.funds = p.money_or("funds_msat", Money::zero());
      s.participants.push_back(std::move(spec));
    }
  }
  if (o.has("routers")) {
    const json& arr = o.array("routers");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj r(arr[i], idx("routers", i), source, {"id", "funds_msat"});
      s.routers.push_back({r.actor("id"), r.money_or("funds_msat", Money::zero())});
    }
  }

  if (o.has("issues")) {
    const json& arr = o.array("issues");
    for (std::size_t i = 0; i < arr.size(); ++i) s.issues.push_back(parse_issue(arr[i], idx("issues", i), source));
  }
  if (o.has("issue_catalog")) {
    std::filesystem::path path = o.str("issue_catalog");
    if (path.is_relative()) path = base_dir / path;
    std::string text_catalog;
    try {
      text_catalog = read_file(path);
    } catch (const Error& e) {
      o.error("issue_catalog", e.what());
    }
    for (auto& issue : parse_issue_catalog(text_catalog, path.string())) s.issues.push_back(std::move(issue));
  }

  if (o.has("auction_schedule")) {
    const json& arr = o.array("auction_schedule");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj a(arr[i], idx("auction_schedule", i), source,
            {"issue_id", "buyer", "reserve_msat", "open_at_ms", "deadline_ms"});
      s.schedule.push_back(
          {a.str("issue_id"), a.actor("buyer"), a.money("reserve_msat"), a.i64_or("open_at_ms", 0), a.i64("deadline_ms")});
    }
  }
  if (o.has("auction_generator")) expand_generator(o.at("auction_generator"), "auction_generator", source, s);

  if (o.has("channels")) {
    const json& arr = o.array("channels");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj c(arr[i], idx("channels", i), source, {"a", "b", "capacity_msat", "push_msat"});
      s.channels.push_back({c.actor("a"), c.actor("b"), c.money("capacity_msat"), c.money_or("push_msat", Money::zero())});
    }
  }
  if (o.has("topology")) {
    Obj t(o.at("topology"), "topology", source, {"kind", "hub_id", "capacity_msat", "hub_funds_msat"});
    if (t.str("kind") != "hub") t.error("kind", "expected \"hub\"");
    HubTopology hub{t.actor("hub_id"), t.money("capacity_msat"), std::nullopt};
    if (t.has("hub_funds_msat")) hub.hub_funds = t.money("hub_funds_msat");
    s.hub = std::move(hub);
  }
  s.solve_delay_ms = o.i64_or("solve_delay_ms", s.solve_delay_ms);
  s.escrow_expiry_ms = o.i64_or("escrow_expiry_ms", s.escrow_expiry_ms);
  s.feedback_k = o.u64_or("feedback_k", 0);

  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(Errc::invalid_argument, std::string(source) + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path(), path.string());
}

void Scenario::validate() const {
  std::set<ActorId> actors;
  auto declare = [&](const ActorId& id, const std::string& where) {
    if (!actors.insert(id).second) throw Error(Errc::invalid_argument, where + ": duplicate actor id '" + id.str() + "'");
  };
  for (std::size_t i = 0; i < agents.size(); ++i) {
    declare(agents[i].config.agent_id, idx("agents", i));
    try {
      agents[i].config.validate();
    } catch (const Error& e) {
      throw Error(Errc::invalid_argument, idx("agents", i) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < participants.size(); ++i) declare(participants[i].id, idx("participants", i));
  for (std::size_t i = 0; i < routers.size(); ++i) declare(routers[i].id, idx("routers", i));
  if (hub) declare(hub->hub, "topology.hub_id");

  std::set<std::string> issue_ids;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    issues[i].validate();
    if (!issue_ids.insert(issues[i].issue_id).second) {
      throw Error(Errc::invalid_argument, idx("issues", i) + ": duplicate issue id '" + issues[i].issue_id + "'");
    }
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& a = schedule[i];
    const auto where = idx("auction_schedule", i);
    if (!issue_ids.contains(a.issue_id)) {
      throw Error(Errc::invalid_argument, where + ": unknown issue_id '" + a.issue_id + "'");
    }
    if (agent(a.buyer) == nullptr) {
      throw Error(Errc::invalid_argument, where + ": buyer '" + a.buyer.str() + "' is not a declared agent");
    }
    if (a.reserve.is_zero()) throw Error(Errc::invalid_argument, where + ": reserve must be positive");
    if (a.open_at < 0) throw Error(Errc::invalid_argument, where + ": open_at_ms must be non-negative");
    if (a.deadline <= a.open_at) throw Error(Errc::invalid_argument, where + ": deadline must be after open_at");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& c = channels[i];
    const auto where = idx("channels", i);
    for (const auto* end : {&c.a, &c.b}) {
      if (!actors.contains(*end)) {
        throw Error(Errc::invalid_argument, where + ": unknown actor '" + end->str() + "'");
      }
    }
    if (c.a == c.b) throw Error(Errc::invalid_argument, where + ": channel endpoints must differ");
    if (c.capacity.is_zero()) throw Error(Errc::invalid_argument, where + ": capacity must be positive");
    if (c.push > c.capacity) throw Error(Errc::invalid_argument, where + ": push exceeds capacity");
  }
  if (hub && hub->capacity.is_zero()) throw Error(Errc::invalid_argument, "topology: capacity must be positive");
  link_policy.validate();
  if (solve_delay_ms < 0) throw Error(Errc::invalid_argument, "solve_delay_ms must be non-negative");
  if (escrow_expiry_ms <= 0) throw Error(Errc::invalid_argument, "escrow_expiry_ms must be positive");
}

const Issue& Scenario::issue(std::string_view issue_id) const {
  for (const auto& i : issues) {
    if (i.issue_id == issue_id) return i;
  }
  throw Error(Errc::not_found, "unknown issue '" + std::string(issue_id) + "'");
}

const AgentSpec* Scenario::agent(const ActorId& id) const {
  for (const auto& a : agents) {
    if (a.config.agent_id == id) return &a;
  }
  return nullptr;
}

ordered_json to_json(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["mode"] = to_string(s.mode);
  j["link_policy"] = {{"latency_ms_min", s.link_policy.latency_ms_min},
                      {"latency_ms_max", s.link_policy.latency_ms_max},
                      {"drop_prob", s.link_policy.drop_prob},
                      {"dup_prob", s.link_policy.dup_prob}};
  ordered_json agents = ordered_json::array();
  for (const auto& a : s.agents) {
    const auto& c = a.config;
    ordered_json aj;
    aj["id"] = c.agent_id.str();
    aj["budget_msat"] = c.budget.msat();
    aj["domains"] = c.domains;
    ordered_json base = ordered_json::object();
    for (const auto& [d, m] : c.cost_model.base_cost_by_domain) base[d] = m.msat();
    ordered_json cm;
    cm["base_cost_msat"] = std::move(base);
    cm["difficulty_multiplier"] = c.cost_model.difficulty_multiplier;
    cm["noise_sigma"] = c.cost_model.noise_sigma;
    if (c.cost_model.noise_kind == NoiseKind::uniform) {
      cm["noise"] = {{"kind", "uniform"}, {"lo", c.cost_model.uniform_lo}, {"hi", c.cost_model.uniform_hi}};
    } else {
      cm["noise"] = {{"kind", "lognormal"}};
    }
    aj["cost_model"] = std::move(cm);
    aj["strategy"] = {{"kind", to_string(c.strategy.kind)},
                      {"markup_rate", c.strategy.markup_rate},
                      {"adapt_step", c.strategy.adapt_step},
                      {"lo", c.strategy.lo},
                      {"hi", c.strategy.hi}};
    aj["token"] = a.token;
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  ordered_json participants = ordered_json::array();
  for (const auto& p : s.participants) {
    participants.push_back(
        {{"id", p.id.str()}, {"role", to_string(p.role)}, {"token", p.token}, {"funds_msat", p.funds.msat()}});
  }
  j["participants"] = std::move(participants);
  ordered_json routers = ordered_json::array();
  for (const auto& r : s.routers) routers.push_back({{"id", r.id.str()}, {"funds_msat", r.funds.msat()}});
  j["routers"] = std::move(routers);
  ordered_json issues = ordered_json::array();
  for (const auto& i : s.issues) {
    issues.push_back({{"issue_id", i.issue_id},
                      {"title", i.title},
                      {"body", i.body},
                      {"domain_tags", i.domain_tags},
                      {"difficulty", i.difficulty}});
  }
  j["issues"] = std::move(issues);
  ordered_json schedule = ordered_json::array();
  for (const auto& a : s.schedule) {
    schedule.push_back({{"issue_id", a.issue_id},
                        {"buyer", a.buyer.str()},
                        {"reserve_msat", a.reserve.msat()},
                        {"open_at_ms", a.open_at},
                        {"deadline_ms", a.deadline}});
  }
  j["auction_schedule"] = std::move(schedule);
  ordered_json channels = ordered_json::array();
  for (const auto& c : s.channels) {
    channels.push_back(
        {{"a", c.a.str()}, {"b", c.b.str()}, {"capacity_msat", c.capacity.msat()}, {"push_msat", c.push.msat()}});
  }
  j["channels"] = std::move(channels);
  if (s.hub) {
    ordered_json t;
    t["kind"] = "hub";
    t["hub_id"] = s.hub->hub.str();
    t["capacity_msat"] = s.hub->capacity.msat();
    if (s.hub->hub_funds) t["hub_funds_msat"] = s.hub->hub_funds->msat();
    j["topology"] = std::move(t);
  }
  j["solve_delay_ms"] = s.solve_delay_ms;
  j["escrow_expiry_ms"] = s.escrow_expiry_ms;
  j["feedback_k"] = s.feedback_k;
  return j;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

}  // namespace ghim
