#include "ghim/cli.hpp"

#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "ghim/error.hpp"
#include "ghim/experiment.hpp"
#include "ghim/gateway.hpp"
#include "ghim/ops.hpp"
#include "ghim/scenario.hpp"
#include "ghim/session.hpp"

namespace ghim {

namespace {

using json = nlohmann::json;

constexpr std::string_view kJournalFormat = "ghim-journal/1";
constexpr const char* kDefaultStateDir = ".ghim";

enum class PType { str, u64, i64, real, boolean, list };

struct Param {
  const char* key;
  PType type;
  const char* help;
};

struct VerbSpec {
  const char* op;
  std::vector<Param> params;
};

const std::vector<Param> kFilterParams = {
    {"kinds", PType::list, "comma-separated event kinds"},
    {"actor", PType::str, "actor id"},
    {"from_ms", PType::i64, "start of the time range (inclusive)"},
    {"to_ms", PType::i64, "end of the time range (exclusive)"},
    {"auction_id", PType::str, "auction id"},
    {"limit", PType::u64, "maximum number of events"},
};

std::vector<Param> with_filter(std::vector<Param> head) {
  head.insert(head.end(), kFilterParams.begin(), kFilterParams.end());
  return head;
}

const std::vector<VerbSpec>& verb_specs() {
  static const std::vector<VerbSpec> specs = {
      {"bus.create_node",
       {{"node", PType::str, "node id"},
        {"latency_ms_min", PType::u64, "minimum link latency"},
        {"latency_ms_max", PType::u64, "maximum link latency"},
        {"drop_prob", PType::real, "drop probability"},
        {"dup_prob", PType::real, "duplicate probability"}}},
      {"bus.subscribe", {{"node", PType::str, "node id"}, {"topic", PType::str, "topic"}}},
      {"bus.unsubscribe", {{"node", PType::str, "node id"}, {"topic", PType::str, "topic"}}},
      {"bus.publish",
       {{"node", PType::str, "publishing node"},
        {"topic", PType::str, "topic"},
        {"payload", PType::str, "payload text"},
        {"payload_b64", PType::str, "payload bytes, base64"}}},
      {"bus.poll", {{"node", PType::str, "node id"}, {"dedup", PType::boolean, "suppress repeated msg ids"}}},
      {"bus.nodes", {}},
      {"bus.subscriptions", {{"node", PType::str, "node id"}}},
      {"wallet.register", {{"actor", PType::str, "actor id"}, {"funds_msat", PType::u64, "initial on-ledger funds"}}},
      {"wallet.fund", {{"actor", PType::str, "actor id"}, {"amount_msat", PType::u64, "amount to mint"}}},
      {"wallet.balance", {{"actor", PType::str, "actor id"}}},
      {"wallet.open_channel",
       {{"a", PType::str, "funding party"},
        {"b", PType::str, "peer"},
        {"capacity_msat", PType::u64, "capacity"},
        {"push_msat", PType::u64, "initial balance pushed to the peer"}}},
      {"wallet.close_channel", {{"channel_id", PType::str, "channel id"}}},
      {"wallet.channels", {{"actor", PType::str, "only channels of this actor"}}},
      {"wallet.invoice",
       {{"payee", PType::str, "payee"},
        {"amount_msat", PType::u64, "amount"},
        {"hold", PType::boolean, "hold invoice"},
        {"memo", PType::str, "memo"},
        {"expiry_ms", PType::i64, "absolute expiry time"},
        {"tag", PType::str, "auction id to tag payments with"}}},
      {"wallet.pay", {{"payer", PType::str, "payer"}, {"invoice_id", PType::str, "invoice id"}}},
      {"wallet.settle",
       {{"payee", PType::str, "payee"}, {"preimage", PType::str, "preimage, 64 hex"}, {"note", PType::str, "note"}}},
      {"wallet.cancel",
       {{"payee", PType::str, "payee"},
        {"payment_hash", PType::str, "payment hash, 64 hex"},
        {"reason", PType::str, "reason"}}},
      {"wallet.route",
       {{"payer", PType::str, "payer"}, {"payee", PType::str, "payee"}, {"amount_msat", PType::u64, "amount"}}},
      {"wallet.invoice_status", {{"invoice_id", PType::str, "invoice id"}}},
      {"auction.open",
       {{"buyer", PType::str, "issue owner"},
        {"issue_id", PType::str, "issue id"},
        {"title", PType::str, "issue title"},
        {"body", PType::str, "issue body"},
        {"domain_tags", PType::list, "comma-separated domain tags"},
        {"difficulty", PType::real, "difficulty"},
        {"reserve_msat", PType::u64, "reserve price"},
        {"deadline_ms", PType::i64, "bidding deadline (absolute virtual time)"}}},
      {"auction.bid",
       {{"bidder", PType::str, "bidder"}, {"auction_id", PType::str, "auction id"}, {"amount_msat", PType::u64, "bid"}}},
      {"auction.close", {{"auction_id", PType::str, "auction id"}}},
      {"auction.escrow", {{"auction_id", PType::str, "auction id"}}},
      {"auction.deliver",
       {{"winner", PType::str, "winner"},
        {"auction_id", PType::str, "auction id"},
        {"artifact_ref", PType::str, "reference to the delivered work"}}},
      {"auction.cancel", {{"auction_id", PType::str, "auction id"}}},
      {"auction.status", {{"auction_id", PType::str, "auction id"}}},
      {"auction.list", {{"state", PType::str, "only auctions in this state"}}},
      {"feedback.query", with_filter({})},
      {"feedback.aggregate", with_filter({{"metric", PType::str, "metric name"}})},
      {"feedback.context", {{"query", PType::str, "query text"}, {"k", PType::u64, "number of events"}}},
      {"feedback.answer", {{"query", PType::str, "question"}, {"k", PType::u64, "number of events"}}},
      {"feedback.export", {{"path", PType::str, "output file"}}},
      {"sim.now", {}},
      {"sim.advance", {{"delta_ms", PType::i64, "virtual milliseconds"}}},
      {"sim.run", {}},
      {"sim.report", {}},
  };
  return specs;
}

std::string dashed(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const char* key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("--" + dashed(key) + ": '" + text + "' is not a valid number");
  return value;
}

json convert(const Param& p, const std::string& raw) {
  switch (p.type) {
    case PType::str: return raw;
    case PType::u64: return parse_number<std::uint64_t>(raw, p.key);
    case PType::i64: return parse_number<std::int64_t>(raw, p.key);
    case PType::real: {
      try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
      } catch (const std::exception&) {
        throw UsageError("--" + dashed(p.key) + ": '" + raw + "' is not a valid number");
      }
    }
    case PType::boolean: {
      if (raw == "true" || raw == "1" || raw.empty()) return true;
      if (raw == "false" || raw == "0") return false;
      throw UsageError("--" + dashed(p.key) + ": expected true or false");
    }
    case PType::list: {
      json arr = json::array();
      std::string cur;
      for (char c : raw + ",") {
        if (c == ',') {
          if (!cur.empty()) arr.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      return arr;
    }
  }
  return raw;
}

// ---------------------------------------------------------------- output

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

bool is_table(const ordered_json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& e : v) {
    if (!e.is_object()) return false;
  }
  return true;
}

void render_table(const ordered_json& rows, std::ostream& out, const std::string& indent) {
  std::vector<std::string> cols;
  for (const auto& [k, _] : rows.front().items()) cols.push_back(k);
  std::vector<std::size_t> width(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      line.push_back(r.contains(cols[c]) ? scalar_text(r.at(cols[c])) : "");
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto emit = [&](const std::vector<std::string>& line) {
    out << indent;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c + 1 < line.size()) {
        out << std::left << std::setw(static_cast<int>(width[c])) << line[c] << "  ";
      } else {
        out << line[c];
      }
    }
    out << '\n';
  };
  emit(cols);
  for (const auto& line : cells) emit(line);
}

void render_text(const ordered_json& v, std::ostream& out, const std::string& indent = "") {
  if (is_table(v)) {
    render_table(v, out, indent);
    return;
  }
  if (!v.is_object()) {
    out << indent << scalar_text(v) << '\n';
    return;
  }
  std::size_t key_width = 0;
  for (const auto& [k, _] : v.items()) key_width = std::max(key_width, k.size());
  for (const auto& [k, e] : v.items()) {
    if (is_table(e) || (e.is_object() && !e.empty())) {
      out << indent << k << ":\n";
      render_text(e, out, indent + "  ");
    } else if (e.is_array()) {
      std::string joined;
      for (const auto& x : e) joined += (joined.empty() ? "" : ", ") + scalar_text(x);
      out << indent << std::left << std::setw(static_cast<int>(key_width)) << k << "  " << joined << '\n';
    } else {
      out << indent << std::left << std::setw(static_cast<int>(key_width)) << k << "  " << scalar_text(e) << '\n';
    }
  }
}

// ---------------------------------------------------------------- state

struct Journal {
  std::filesystem::path path;
  std::uint64_t seed = 0;
  std::optional<Scenario> scenario;
  std::vector<json> ops;
};

std::filesystem::path journal_path(const std::filesystem::path& dir) { return dir / "journal.ndjson"; }

void write_journal_header(const std::filesystem::path& dir, std::uint64_t seed, const std::optional<Scenario>& scenario) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create state dir " + dir.string() + ": " + ec.message());
  std::ofstream out(journal_path(dir), std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + journal_path(dir).string());
  ordered_json h;
  h["format"] = kJournalFormat;
  h["seed"] = seed;
  h["scenario"] = scenario ? to_json(*scenario) : ordered_json(nullptr);
  out << h.dump() << '\n';
}

Journal read_journal(const std::filesystem::path& dir) {
  Journal j;
  j.path = journal_path(dir);
  std::ifstream in(j.path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + j.path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json v;
    try {
      v = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::invalid_argument, j.path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (lineno == 1) {
      if (v.value("format", "") != kJournalFormat) {
        throw Error(Errc::invalid_argument, j.path.string() + " is not a ghim state journal");
      }
      j.seed = v.at("seed").get<std::uint64_t>();
      if (!v.at("scenario").is_null()) j.scenario = parse_scenario(v.at("scenario").dump(), {}, j.path.string());
    } else {
      j.ops.push_back(std::move(v));
    }
  }
  if (lineno == 0) throw Error(Errc::invalid_argument, j.path.string() + " is empty");
  return j;
}

void append_journal(const std::filesystem::path& dir, Millis at, std::string_view op, const json& args) {
  std::ofstream out(journal_path(dir), std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::io, "cannot append to " + journal_path(dir).string());
  ordered_json line;
  line["at_ms"] = at;
  line["op"] = op;
  line["args"] = ordered_json::parse(args.dump());
  out << line.dump() << '\n';
}

Scenario adhoc_scenario(std::uint64_t seed) {
  Scenario s;
  s.name = "cli";
  s.seed = seed;
  return s;
}

std::unique_ptr<Simulation> restore(const Journal& j) {
  auto sim = std::make_unique<Simulation>(j.scenario ? *j.scenario : adhoc_scenario(j.seed));
  for (const auto& line : j.ops) {
    const Millis at = line.at("at_ms").get<Millis>();
    if (at > sim->sandbox().clock().now()) sim->advance_to(at);
    execute_op(*sim, line.at("op").get<std::string>(), line.at("args"), Caller{});
  }
  return sim;
}

// ---------------------------------------------------------------- driver

struct Globals {
  std::string state_dir = kDefaultStateDir;
  bool state_dir_given = false;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

std::filesystem::path state_dir_of(const Globals& g) {
  if (g.state_dir_given) return g.state_dir;
  if (const char* env = std::getenv("GHIM_STATE_DIR"); env != nullptr && *env != '\0') return env;
  return g.state_dir;
}

void print(const ordered_json& result, const Globals& g, std::ostream& out) {
  if (g.format == "text") {
    render_text(result, out);
  } else {
    out << result.dump(2) << '\n';
  }
}

ordered_json run_stateful(const Globals& g, const std::string& op, const json& args) {
  const auto dir = state_dir_of(g);
  if (!std::filesystem::exists(journal_path(dir))) write_journal_header(dir, g.seed.value_or(0), std::nullopt);
  const Journal journal = read_journal(dir);
  if (g.seed && *g.seed != journal.seed) {
    throw UsageError("state dir " + dir.string() + " was initialized with seed " + std::to_string(journal.seed) +
                     "; run `ghim sim init` to start over");
  }
  auto sim = restore(journal);
  const Millis at = sim->sandbox().clock().now();
  ordered_json result = execute_op(*sim, op, args, Caller{});
  if (find_op(op)->mutating) append_journal(dir, at, op, args);
  return result;
}

Scenario scenario_with_seed(const std::string& path, const Globals& g) {
  Scenario s = load_scenario(path);
  if (g.seed) s.seed = *g.seed;
  return s;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--values: '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError("--values: need at least one value");
  return out;
}

Gateway* g_serving = nullptr;

extern "C" void on_stop_signal(int) {
  if (g_serving != nullptr) g_serving->stop();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic issue-marketplace sandbox toolbox", "ghim"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* state_opt = app.add_option("--state-dir", g.state_dir, "state directory (default $GHIM_STATE_DIR, else .ghim)");
  auto* seed_opt = app.add_option("--seed", "root seed");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "text"}));

  std::map<std::string, std::pair<const VerbSpec*, CLI::App*>> verbs;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> tools;
  const std::map<std::string, std::string> tool_help = {
      {"bus", "pubsub nodes, topics and messages"},
      {"wallet", "payment channels and invoices"},
      {"auction", "reverse auctions"},
      {"feedback", "event-log queries, metrics and retrieval"},
      {"sim", "virtual time, scenarios and experiments"},
  };
  for (const auto& [name, help] : tool_help) {
    auto* t = app.add_subcommand(name, help);
    t->require_subcommand(1);
    t->fallthrough();
    tools[name] = t;
  }
  for (const auto& spec : verb_specs()) {
    const std::string op = spec.op;
    const auto dot = op.find('.');
    const OpInfo* info = find_op(op);
    auto* v = tools.at(op.substr(0, dot))->add_subcommand(dashed(op.substr(dot + 1)), std::string(info->summary));
    v->fallthrough();
    auto& values = raw[op];
    for (const auto& p : spec.params) {
      const std::string flag = "--" + dashed(p.key);
      if (p.type == PType::boolean) {
        v->add_option(flag, values[p.key], p.help)->expected(0, 1);
      } else {
        v->add_option(flag, values[p.key], p.help);
      }
    }
    verbs[op] = {&spec, v};
  }

  // Experiment runner and lifecycle verbs that are not sandbox ops.
  auto* sim = tools.at("sim");
  std::string scenario_path;
  std::string out_dir;
  std::string param;
  std::string values;
  std::vector<std::string> recordings;
  auto* init = sim->add_subcommand("init", "reset the state dir, optionally from a scenario");
  init->add_option("--scenario", scenario_path, "scenario file");
  auto* validate = sim->add_subcommand("validate", "load and check a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* experiment = sim->add_subcommand("experiment", "run a scenario and report metrics");
  experiment->add_option("--scenario", scenario_path, "scenario file")->required();
  experiment->add_option("--out", out_dir, "write report.json, CSVs and events.ndjson here");
  auto* compare = sim->add_subcommand("compare", "outsourcing vs baseline on the same seed");
  compare->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* sweep_cmd = sim->add_subcommand("sweep", "one run per parameter value");
  sweep_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep_cmd->add_option("--param", param, "n_bidders or reserve_scale")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "write sweep.json and sweep.csv here");
  auto* special = sim->add_subcommand("specialization", "win share by domain");
  special->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* replay = sim->add_subcommand("replay", "replay recorded gateway sessions against a scenario");
  replay->add_option("--scenario", scenario_path, "scenario file");
  replay->add_option("--recording", recordings, "session recording (repeatable)")->required();
  replay->add_option("--out", out_dir, "write report.json, CSVs and events.ndjson here");
  for (auto* c : {init, validate, experiment, compare, sweep_cmd, special, replay}) c->fallthrough();

  auto* serve = app.add_subcommand("serve", "run the WebSocket gateway");
  serve->fallthrough();
  unsigned short port = 8765;
  std::string host = "127.0.0.1";
  int tick_ms = 100;
  Millis virtual_per_tick = 100;
  bool manual_clock = false;
  std::string admin_token;
  serve->add_option("--port", port, "listen port (0 picks one)");
  serve->add_option("--host", host, "listen address");
  serve->add_option("--scenario", scenario_path, "scenario file");
  serve->add_option("--tick-ms", tick_ms, "wall milliseconds per tick")->check(CLI::PositiveNumber);
  serve->add_option("--virtual-per-tick", virtual_per_tick, "virtual milliseconds per tick")->check(CLI::NonNegativeNumber);
  serve->add_flag("--manual-clock", manual_clock, "advance time only via sim.advance");
  serve->add_option("--admin-token", admin_token, "token granting the admin role");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    // Usage of the deepest subcommand reached.
    const CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
    err << deepest->help();
    return 2;
  }

  try {
    g.state_dir_given = state_opt->count() > 0;
    if (seed_opt->count() > 0) g.seed = parse_number<std::uint64_t>(seed_opt->as<std::string>(), "seed");

    for (const auto& [op, entry] : verbs) {
      CLI::App* v = entry.second;
      if (!v->parsed()) continue;
      json args = json::object();
      for (const auto& p : entry.first->params) {
        if (v->get_option("--" + dashed(p.key))->count() == 0) continue;
        args[p.key] = convert(p, raw[op][p.key]);
      }
      print(run_stateful(g, op, args), g, out);
      return 0;
    }

    if (init->parsed()) {
      std::optional<Scenario> s;
      if (!scenario_path.empty()) s = scenario_with_seed(scenario_path, g);
      const std::uint64_t seed = s ? s->seed : g.seed.value_or(0);
      const auto dir = state_dir_of(g);
      write_journal_header(dir, seed, s);
      print({{"state_dir", dir.string()}, {"seed", seed}, {"scenario", s ? ordered_json(s->name) : ordered_json(nullptr)}},
            g, out);
      return 0;
    }
    if (validate->parsed()) {
      const Scenario s = scenario_with_seed(scenario_path, g);
      print({{"scenario", s.name},
             {"valid", true},
             {"agents", s.agents.size()},
             {"issues", s.issues.size()},
             {"auctions", s.schedule.size()}},
            g, out);
      return 0;
    }
    if (experiment->parsed()) {
      const RunResult r = run_scenario(scenario_with_seed(scenario_path, g));
      if (!out_dir.empty()) write_run_outputs(r, out_dir);
      print(to_json(r.report), g, out);
      return 0;
    }
    if (compare->parsed()) {
      print(to_json(compare_baseline(scenario_with_seed(scenario_path, g))), g, out);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const auto p = parse_sweep_param(param);
      if (!p) throw UsageError("--param must be n_bidders or reserve_scale");
      const auto series = sweep(scenario_with_seed(scenario_path, g), *p, parse_values(values));
      const auto j = to_json(series, *p);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "sweep.json") << j.dump(2) << '\n';
        std::ofstream(std::filesystem::path(out_dir) / "sweep.csv") << sweep_csv(series, *p);
      }
      if (g.format == "text") {
        render_text(j.at("points"), out);
      } else {
        out << j.dump(2) << '\n';
      }
      return 0;
    }
    if (special->parsed()) {
      const Scenario s = scenario_with_seed(scenario_path, g);
      const auto r = run_scenario(s).report;
      std::vector<ActorId> ids;
      for (const auto& a : s.agents) ids.push_back(a.config.agent_id);
      const auto rows = to_json(specialization_report(r, s.issues, ids));
      if (g.format == "text") {
        render_text(rows, out);
      } else {
        out << rows.dump(2) << '\n';
      }
      return 0;
    }
    if (replay->parsed()) {
      std::vector<SessionRecording> recs;
      for (const auto& path : recordings) recs.push_back(load_recording(path));
      Scenario s = scenario_path.empty() ? adhoc_scenario(recs.front().seed) : scenario_with_seed(scenario_path, g);
      if (scenario_path.empty() && g.seed) s.seed = *g.seed;
      Simulation simulation(s);
      const auto steps = replay_sessions(simulation, recs);
      RunResult r{build_report(simulation.sandbox().log(), s), simulation.sandbox().log().to_ndjson()};
      if (!out_dir.empty()) write_run_outputs(r, out_dir);
      ordered_json j;
      j["frames_replayed"] = steps.size();
      j["frames_ok"] = std::count_if(steps.begin(), steps.end(), [](const ReplayStep& st) { return st.ok; });
      j["report"] = to_json(r.report);
      print(j, g, out);
      return 0;
    }
    if (serve->parsed()) {
      Scenario s = scenario_path.empty() ? adhoc_scenario(g.seed.value_or(0)) : scenario_with_seed(scenario_path, g);
      Simulation simulation(s);
      GatewayOptions opts;
      opts.host = host;
      opts.port = port;
      opts.tick = std::chrono::milliseconds(tick_ms);
      opts.virtual_per_tick = virtual_per_tick;
      opts.manual_clock = manual_clock;
      opts.tokens = scenario_tokens(s);
      if (!admin_token.empty()) opts.tokens[admin_token] = {ActorId("admin"), Role::admin};
      Gateway gateway(simulation, opts);
      const auto bound = gateway.start();
      out << "listening on ws://" << host << ":" << bound << std::endl;
      g_serving = &gateway;
      std::signal(SIGINT, on_stop_signal);
      std::signal(SIGTERM, on_stop_signal);
      gateway.run();
      g_serving = nullptr;
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    if (g.format == "json") {
      ordered_json j;
      j["ok"] = false;
      j["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
      out << j.dump(2) << '\n';
    }
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace ghim
