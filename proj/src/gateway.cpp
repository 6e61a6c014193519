#include "ghim/gateway.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <set>

#include "ghim/error.hpp"
#include "ghim/ops.hpp"
#include "ghim/session.hpp"

namespace ghim {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

std::map<std::string, Credential> scenario_tokens(const Scenario& scenario) {
  std::map<std::string, Credential> out;
  for (const auto& a : scenario.agents) {
    if (!a.token.empty()) out[a.token] = {a.config.agent_id, Role::agent};
  }
  for (const auto& p : scenario.participants) {
    if (!p.token.empty()) out[p.token] = {p.id, p.role};
  }
  return out;
}

// ---------------------------------------------------------------- server

struct Gateway::Impl {
  struct Session : std::enable_shared_from_this<Session> {
    Session(tcp::socket socket, Impl& gw, std::string id) : ws(std::move(socket)), gw(gw), id(std::move(id)) {}

    void start() {
      ws.text(true);
      ws.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) {
          self->gw.drop(self->id);
          return;
        }
        self->read();
      });
    }

    void read() {
      ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->closed = true;
          self->gw.drop(self->id);
          return;
        }
        const std::string text = beast::buffers_to_string(self->buffer.data());
        self->buffer.consume(self->buffer.size());
        self->gw.handle(*self, text);
        if (!self->closed) self->read();
      });
    }

    void send(std::string text) {
      if (closed) return;
      outbox.push_back(std::move(text));
      if (!writing) write_next();
    }

    void write_next() {
      writing = true;
      ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->outbox.pop_front();
        if (ec) {
          self->closed = true;
          self->writing = false;
          return;
        }
        if (self->outbox.empty()) {
          self->writing = false;
        } else {
          self->write_next();
        }
      });
    }

    websocket::stream<beast::tcp_stream> ws;
    Impl& gw;
    std::string id;
    beast::flat_buffer buffer;
    std::deque<std::string> outbox;
    bool writing = false;
    bool closed = false;
    std::optional<Credential> cred;
    std::set<std::string> topics;
    std::unique_ptr<SessionRecorder> recorder;
  };

  Impl(Simulation& sim, GatewayOptions options)
      : sim(sim), options(std::move(options)), acceptor(ioc), ticker(ioc) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      const auto id = "s" + std::to_string(++session_count);
      auto s = std::make_shared<Session>(std::move(socket), *this, id);
      sessions.emplace(id, s);
      s->start();
      accept();
    });
  }

  void drop(const std::string& id) { sessions.erase(id); }

  void arm_tick() {
    ticker.expires_after(options.tick);
    ticker.async_wait([this](beast::error_code ec) {
      if (ec) return;
      try {
        sim.advance_to(sim.sandbox().clock().now() + options.virtual_per_tick);
      } catch (const std::exception&) {
        // A failing timer must not stop the live loop; the state is still consistent.
      }
      broadcast("clock", ordered_json{{"now_ms", sim.sandbox().clock().now()}});
      arm_tick();
    });
  }

  void broadcast(const std::string& topic, const ordered_json& event) {
    std::string text;
    for (auto& [id, s] : sessions) {
      if (!s->cred || !s->topics.contains(topic)) continue;
      if (text.empty()) {
        ordered_json f;
        f["stream"] = topic;
        f["event"] = event;
        text = f.dump();
      }
      s->send(text);
    }
  }

  static std::string response(const json& request_id, const ordered_json& result) {
    ordered_json f;
    f["request_id"] = request_id;
    f["ok"] = true;
    f["result"] = result;
    return f.dump();
  }

  static std::string failure(const json& request_id, std::string_view code, std::string_view message) {
    ordered_json f;
    f["request_id"] = request_id;
    f["ok"] = false;
    f["error"] = {{"code", code}, {"message", message}};
    return f.dump();
  }

  void handle(Session& s, const std::string& text) {
    json frame;
    try {
      frame = json::parse(text);
    } catch (const json::exception& e) {
      s.send(failure(nullptr, "malformed", std::string("frame is not JSON: ") + e.what()));
      return;
    }
    if (!frame.is_object()) {
      s.send(failure(nullptr, "malformed", "frame must be a JSON object"));
      return;
    }
    const json request_id = frame.contains("request_id") ? frame["request_id"] : json(nullptr);
    if (!frame.contains("op") || !frame["op"].is_string()) {
      s.send(failure(request_id, "malformed", "frame needs a string 'op'"));
      return;
    }
    const json args = frame.contains("args") ? frame["args"] : json::object();
    if (!args.is_object()) {
      s.send(failure(request_id, "malformed", "'args' must be an object"));
      return;
    }
    const auto op = frame["op"].get<std::string>();
    try {
      s.send(response(request_id, dispatch(s, op, args, frame)));
    } catch (const Error& e) {
      s.send(failure(request_id, to_string(e.code()), e.what()));
    } catch (const UsageError& e) {
      s.send(failure(request_id, "usage", e.what()));
    } catch (const json::exception& e) {
      s.send(failure(request_id, "malformed", e.what()));
    } catch (const std::exception& e) {
      s.send(failure(request_id, "internal", e.what()));
    }
  }

  ordered_json dispatch(Session& s, const std::string& op, const json& args, const json& frame) {
    if (op == "ping") return {{"now_ms", sim.sandbox().clock().now()}};
    if (op == "auth") {
      if (!args.contains("token") || !args["token"].is_string()) throw UsageError("auth: missing argument 'token'");
      const auto it = options.tokens.find(args["token"].get<std::string>());
      if (it == options.tokens.end()) throw Error(Errc::forbidden, "unknown token");
      if (args.contains("actor") && args["actor"] != it->second.actor.str()) {
        throw Error(Errc::forbidden, "token does not belong to " + args["actor"].dump());
      }
      s.cred = it->second;
      return {{"session_id", s.id}, {"actor", s.cred->actor.str()}, {"role", to_string(s.cred->role)}};
    }
    if (!s.cred) throw Error(Errc::forbidden, "authenticate first");
    if (op == "subscribe" || op == "unsubscribe") {
      if (!args.contains("topic") || !args["topic"].is_string()) throw UsageError(op + ": missing argument 'topic'");
      const auto topic = args["topic"].get<std::string>();
      if (topic != "log" && topic != "clock") validate_topic(topic);
      if (op == "subscribe") {
        s.topics.insert(topic);
      } else {
        s.topics.erase(topic);
      }
      return {{"topic", topic}, {"subscribed", op == "subscribe"}};
    }
    if (op == "session.record") {
      if (!args.contains("path") || !args["path"].is_string()) throw UsageError("session.record: missing argument 'path'");
      SessionRecording header;
      header.session_id = s.id;
      header.actor = s.cred->actor;
      header.role = s.cred->role;
      header.seed = sim.scenario().seed;
      header.started_at_ms = sim.sandbox().clock().now();
      s.recorder = std::make_unique<SessionRecorder>(args["path"].get<std::string>(), header);
      return {{"path", s.recorder->path().string()}, {"session_id", s.id}};
    }
    const RecordedFrame rec{sim.sandbox().clock().now(), ++arrivals, frame};
    if (s.recorder) s.recorder->append(rec);
    return execute_op(sim, op, args, Caller{s.cred->actor, s.cred->role});
  }

  Simulation& sim;
  GatewayOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer ticker;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::uint64_t session_count = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t tap_id = 0;
  EventLog::ListenerId listener_id = 0;
  unsigned short bound_port = 0;
};

Gateway::Gateway(Simulation& sim, GatewayOptions options) : impl_(std::make_unique<Impl>(sim, std::move(options))) {
  Impl* impl = impl_.get();
  impl->tap_id = sim.sandbox().bus().add_tap([impl](const Envelope& env) { impl->broadcast(env.topic, envelope_json(env)); });
  impl->listener_id = sim.sandbox().log().add_listener([impl](const Event& e) { impl->broadcast("log", event_to_json(e)); });
}

Gateway::~Gateway() {
  impl_->sim.sandbox().bus().remove_tap(impl_->tap_id);
  impl_->sim.sandbox().log().remove_listener(impl_->listener_id);
}

unsigned short Gateway::start() {
  auto& a = impl_->acceptor;
  const tcp::endpoint ep(net::ip::make_address(impl_->options.host), impl_->options.port);
  beast::error_code ec;
  a.open(ep.protocol(), ec);
  if (!ec) a.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(ep, ec);
  if (!ec) a.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(Errc::io, "cannot listen on " + impl_->options.host + ":" + std::to_string(impl_->options.port) +
                                    ": " + ec.message());
  impl_->bound_port = a.local_endpoint().port();
  impl_->accept();
  if (!impl_->options.manual_clock) impl_->arm_tick();
  return impl_->bound_port;
}

unsigned short Gateway::port() const noexcept { return impl_->bound_port; }

void Gateway::run() { impl_->ioc.run(); }

void Gateway::stop() { impl_->ioc.stop(); }

// ---------------------------------------------------------------- client

struct GatewayClient::Impl {
  void arm() {
    ws.async_read(buffer, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        failure = ec;
        return;
      }
      inbox.push_back(json::parse(beast::buffers_to_string(buffer.data())));
      buffer.consume(buffer.size());
      arm();
    });
  }

  // Runs the io loop until a frame is queued or the deadline passes.
  bool pump(std::chrono::steady_clock::time_point deadline) {
    while (inbox.empty() && !failure && std::chrono::steady_clock::now() < deadline) {
      if (ioc.stopped()) ioc.restart();
      ioc.run_one_until(deadline);
    }
    return !inbox.empty();
  }

  json next(std::chrono::milliseconds timeout) {
    if (!pump(std::chrono::steady_clock::now() + timeout)) {
      if (failure) throw Error(Errc::io, "gateway connection lost: " + failure->message());
      throw Error(Errc::io, "timed out waiting for a gateway frame");
    }
    json f = std::move(inbox.front());
    inbox.pop_front();
    return f;
  }

  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  beast::flat_buffer buffer;
  std::deque<json> inbox;
  std::deque<json> streams;
  std::optional<beast::error_code> failure;
  std::uint64_t next_id = 0;
  bool open = false;
};

constexpr std::chrono::milliseconds kClientTimeout{10000};

GatewayClient::GatewayClient() : impl_(std::make_unique<Impl>()) {}

GatewayClient::~GatewayClient() {
  try {
    close();
  } catch (...) {
  }
}

void GatewayClient::connect(const std::string& host, unsigned short port) {
  tcp::resolver resolver(impl_->ioc);
  const auto results = resolver.resolve(host, std::to_string(port));
  net::connect(impl_->ws.next_layer(), results.begin(), results.end());
  impl_->ws.handshake(host + ":" + std::to_string(port), "/");
  impl_->ws.text(true);
  impl_->open = true;
  impl_->arm();
}

void GatewayClient::send_text(const std::string& text) { impl_->ws.write(net::buffer(text)); }

json GatewayClient::receive() { return impl_->next(kClientTimeout); }

json GatewayClient::request(const std::string& op, const json& args) {
  const auto id = "r" + std::to_string(++impl_->next_id);
  send_text(json{{"op", op}, {"request_id", id}, {"args", args}}.dump());
  const auto deadline = std::chrono::steady_clock::now() + kClientTimeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    json f = impl_->next(std::max(left, std::chrono::milliseconds(1)));
    if (f.contains("stream")) {
      impl_->streams.push_back(std::move(f));
      continue;
    }
    if (f.value("request_id", json(nullptr)) == id) return f;
  }
}

std::vector<json> GatewayClient::take_streams(std::size_t count, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    while (!impl_->inbox.empty()) {
      json f = std::move(impl_->inbox.front());
      impl_->inbox.pop_front();
      if (f.contains("stream")) impl_->streams.push_back(std::move(f));
    }
    if (impl_->streams.size() >= count || std::chrono::steady_clock::now() >= deadline || impl_->failure) break;
    impl_->pump(deadline);
  }
  std::vector<json> out(impl_->streams.begin(), impl_->streams.end());
  impl_->streams.clear();
  return out;
}

void GatewayClient::close() {
  if (!impl_->open) return;
  impl_->open = false;
  beast::error_code ec;
  impl_->ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
  impl_->ws.next_layer().close(ec);
  if (impl_->ioc.stopped()) impl_->ioc.restart();
  impl_->ioc.run_for(std::chrono::milliseconds(50));
}

}  // namespace ghim
