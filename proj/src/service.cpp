#include "outcry/service.hpp"

#include <algorithm>
#include <cmath>

#include "httplib.h"

namespace outcry {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::exception& e) {
    reply(res, 400, {{"accepted", false}, {"status", "rejected"}, {"reason", std::string("malformed JSON: ") + e.what()}});
    return std::nullopt;
  }
}

bool authorized(const httplib::Request& req, const std::string& token) {
  if (token.empty()) return true;
  if (req.get_header_value("X-Outcry-Token") == token) return true;
  return req.get_header_value("Authorization") == "Bearer " + token;
}

}  // namespace

std::string sse_message(const std::string& event, const std::string& data) {
  return "event: " + event + "\ndata: " + data + "\n\n";
}

SlipRequest slip_request_from_json(const json& j) {
  try {
    SlipRequest s;
    s.trader = j.at("trader").get<TraderId>();
    s.counterparty = j.at("counterparty").get<TraderId>();
    s.side = parse_side(j.at("side").get<std::string>());
    s.stock = parse_stock(j.at("stock").get<std::string>());
    const double qty = j.at("quantity").get<double>();
    if (qty != std::floor(qty)) throw std::invalid_argument("quantity must be a whole number");
    s.quantity = static_cast<std::int64_t>(qty);
    s.price = j.at("price").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed slip: ") + e.what());
  }
}

// ---------------------------------------------------------------- broadcaster

std::shared_ptr<Broadcaster::Subscriber> Broadcaster::subscribe() {
  auto sub = std::make_shared<Subscriber>();
  std::lock_guard lock(mutex_);
  subs_.push_back(sub);
  return sub;
}

void Broadcaster::unsubscribe(const std::shared_ptr<Subscriber>& sub) {
  std::lock_guard lock(mutex_);
  subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
}

void Broadcaster::publish(const std::string& message) {
  std::lock_guard lock(mutex_);
  for (const auto& sub : subs_) {
    {
      std::lock_guard sub_lock(sub->mutex);
      if (sub->queue.size() >= kMaxQueued) sub->queue.pop_front();
      sub->queue.push_back(message);
    }
    sub->ready.notify_one();
  }
}

void Broadcaster::close_all() {
  std::lock_guard lock(mutex_);
  for (const auto& sub : subs_) {
    {
      std::lock_guard sub_lock(sub->mutex);
      sub->closed = true;
    }
    sub->ready.notify_all();
  }
  subs_.clear();
}

std::size_t Broadcaster::subscribers() const {
  std::lock_guard lock(mutex_);
  return subs_.size();
}

// ---------------------------------------------------------------- service

Service::Service(PerformanceConfig cfg, ServiceOptions options)
    : cfg_(cfg),
      options_(std::move(options)),
      tick_period_(options_.tick_period.value_or(std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(cfg.market.tick_seconds * 1000.0))))),
      performance_(std::move(cfg)),
      server_(std::make_unique<httplib::Server>()) {
  if (options_.log_path) log_writer_.emplace(*options_.log_path);
  performance_.add_sink([this](const EventRecord& r) {
    if (log_writer_) log_writer_->write(r);
    if (auto view = public_view(r)) broadcaster_.publish(sse_message("record", view->dump()));
  });
  install_routes();
}

Service::~Service() { stop(); }

template <typename Fn>
CommandOutcome Service::locked(Fn&& fn) {
  std::lock_guard lock(mutex_);
  CommandOutcome outcome = fn(performance_);
  publish_snapshot_locked();
  ticker_wake_.notify_all();
  return outcome;
}

void Service::publish_snapshot_locked() {
  broadcaster_.publish(sse_message("snapshot", performance_.snapshot().to_json().dump()));
}

CommandOutcome Service::advance_tick() {
  return locked([](Performance& p) { return p.tick(); });
}

json Service::snapshot_json() const {
  std::lock_guard lock(mutex_);
  return performance_.snapshot().to_json();
}

std::vector<EventRecord> Service::log() const {
  std::lock_guard lock(mutex_);
  return performance_.log();
}

void Service::install_routes() {
  auto& srv = *server_;
  const std::string conductor = cfg_.conductor_token;
  const std::string admin = cfg_.admin_token;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization, X-Outcry-Token");
    res.status = 204;
  });

  // Wraps a command handler with token check and JSON body parsing.
  auto command = [this](const std::string& token, auto handler) {
    return [this, token, handler](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, token)) {
        reply(res, 401, {{"accepted", false}, {"status", "rejected"}, {"reason", "unauthorized"}});
        return;
      }
      const auto body = parse_body(req, res);
      if (!body) return;
      try {
        const CommandOutcome outcome = handler(*body);
        reply(res, outcome.accepted || outcome.slip_id ? 200 : 409, outcome.to_json());
      } catch (const std::invalid_argument& e) {
        reply(res, 400, {{"accepted", false}, {"status", "rejected"}, {"reason", e.what()}});
      }
    };
  };

  srv.Post("/performance/start", command(conductor, [this](const json&) {
             return locked([](Performance& p) { return p.handle_conductor(StartPerformance{}); });
           }));
  srv.Post("/performance/end", command(conductor, [this](const json&) {
             return locked([](Performance& p) { return p.handle_conductor(EndPerformance{}); });
           }));
  srv.Post("/conductor/regime", command(conductor, [this](const json& body) {
             if (!body.contains("mode") || !body["mode"].is_string()) throw std::invalid_argument("expected {\"mode\": ...}");
             const auto mode = body["mode"].get<std::string>();
             ForceRegime force;
             if (mode != "auto") force.regime = parse_regime(mode);
             return locked([&](Performance& p) { return p.handle_conductor(force); });
           }));
  srv.Post("/conductor/shout", command(conductor, [this](const json& body) {
             if (!body.contains("on") || !body["on"].is_boolean()) throw std::invalid_argument("expected {\"on\": bool}");
             const bool on = body["on"].get<bool>();
             return locked([&](Performance& p) { return p.handle_conductor(ShoutMode{on}); });
           }));
  srv.Post("/conductor/tempo", command(conductor, [this](const json& body) {
             if (!body.contains("bpm") || !body["bpm"].is_number()) throw std::invalid_argument("expected {\"bpm\": number}");
             const double bpm = body["bpm"].get<double>();
             return locked([&](Performance& p) { return p.handle_conductor(SetTempo{bpm}); });
           }));
  srv.Post("/admin/slip", command(admin, [this](const json& body) {
             const SlipRequest slip = slip_request_from_json(body);
             return locked([&](Performance& p) { return p.handle_admin(SubmitSlip{slip}); });
           }));
  srv.Post("/admin/injection", command(admin, [this](const json& body) {
             CashInjection inj;
             if (body.contains("amount")) {
               if (!body["amount"].is_number()) throw std::invalid_argument("amount must be a number");
               inj.amount = body["amount"].get<double>();
             }
             return locked([&](Performance& p) { return p.handle_admin(inj); });
           }));

  srv.Get("/state", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, snapshot_json()); });

  srv.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = broadcaster_.subscribe();
    {
      std::lock_guard lock(sub->mutex);
      sub->queue.push_back(sse_message("snapshot", snapshot_json().dump()));
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [sub](std::size_t, httplib::DataSink& sink) {
          std::deque<std::string> batch;
          {
            std::unique_lock lock(sub->mutex);
            sub->ready.wait_for(lock, std::chrono::milliseconds(500),
                                [&] { return sub->closed || !sub->queue.empty(); });
            if (sub->closed) return false;
            batch.swap(sub->queue);
          }
          // Write outside the lock so a slow client never stalls publishers.
          if (batch.empty()) {
            static const std::string kKeepAlive = ": keep-alive\n\n";
            return sink.write(kKeepAlive.data(), kKeepAlive.size());
          }
          for (const auto& msg : batch) {
            if (!sink.write(msg.data(), msg.size())) return false;
          }
          return true;
        },
        [this, sub](bool) { broadcaster_.unsubscribe(sub); });
  });
}

void Service::ticker_loop() {
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    if (performance_.state().phase != Phase::Running) {
      ticker_wake_.wait(lock, [&] { return stopping_ || performance_.state().phase == Phase::Running; });
      continue;
    }
    const auto deadline = std::chrono::steady_clock::now() + tick_period_;
    if (ticker_wake_.wait_until(lock, deadline, [&] {
          return stopping_ || performance_.state().phase != Phase::Running;
        })) {
      continue;
    }
    performance_.tick();
    publish_snapshot_locked();
  }
}

int Service::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  if (options_.auto_tick) ticker_thread_ = std::thread([this] { ticker_loop(); });
  server_->wait_until_ready();
  return bound;
}

void Service::stop() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  ticker_wake_.notify_all();
  broadcaster_.close_all();
  server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (ticker_thread_.joinable()) ticker_thread_.join();
}

}  // namespace outcry
