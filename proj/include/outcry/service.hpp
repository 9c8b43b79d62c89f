// HTTP + JSON front end for a live performance, with a server-sent event
// stream of public records and display snapshots.

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "outcry/performance.hpp"

namespace httplib {
class Server;
}

namespace outcry {

/// Fan-out of SSE messages; each subscriber owns a bounded queue.
class Broadcaster {
 public:
  struct Subscriber {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::string> queue;
    bool closed = false;
  };

  std::shared_ptr<Subscriber> subscribe();
  void unsubscribe(const std::shared_ptr<Subscriber>& sub);
  void publish(const std::string& message);
  void close_all();
  std::size_t subscribers() const;

 private:
  static constexpr std::size_t kMaxQueued = 4096;
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<Subscriber>> subs_;
};

struct ServiceOptions {
  /// Wall-clock tick period; defaults to the market's tick length.
  std::optional<std::chrono::milliseconds> tick_period;
  /// When false, ticks only advance through advance_tick(); used by tests.
  bool auto_tick = true;
  std::optional<std::string> log_path;
};

class Service {
 public:
  Service(PerformanceConfig cfg, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

  /// Runs one tick as the ticker would.
  CommandOutcome advance_tick();
  nlohmann::json snapshot_json() const;
  std::vector<EventRecord> log() const;

 private:
  void install_routes();
  void ticker_loop();
  void publish_snapshot_locked();
  template <typename Fn>
  CommandOutcome locked(Fn&& fn);

  PerformanceConfig cfg_;
  ServiceOptions options_;
  std::chrono::milliseconds tick_period_;
  mutable std::mutex mutex_;
  Performance performance_;
  std::optional<EventLogWriter> log_writer_;
  Broadcaster broadcaster_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread ticker_thread_;
  std::condition_variable ticker_wake_;
  bool stopping_ = false;
};

std::string sse_message(const std::string& event, const std::string& data);

}  // namespace outcry

namespace outcry {

/// Parses an administrator slip body `{trader, counterparty, side, stock, quantity, price}`.
/// Throws std::invalid_argument on missing or mistyped fields.
SlipRequest slip_request_from_json(const nlohmann::json& j);

}  // namespace outcry
