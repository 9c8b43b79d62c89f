// Live performance engine. Every state change is an EventRecord; the live
// engine and replay both drive the same reducer, so replaying a log rebuilds
// the exact final state without drawing any random numbers.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "outcry/exchange.hpp"
#include "outcry/market.hpp"

namespace outcry {

struct ExchangeConfig {
  std::size_t roster_size = 12;
  Portfolio initial_portfolio{{10, 10, 10}, 1000.0};
  double inflation_rate = 0.002;  // per tick
  double injection_amount = 50.0;
  std::uint64_t slip_max_age = 4;  // ticks
  double pot = 1000.0;
};

struct PerformanceConfig {
  MarketConfig market = default_market_config();
  ExchangeConfig exchange;
  std::uint64_t duration_ticks = 120;
  double tempo_start_bpm = 60.0;
  std::uint64_t seed = 2017;
  std::size_t recent_trades = 10;
  std::string conductor_token;  // empty = open
  std::string admin_token;

  void validate() const;  // throws ConfigError
};

/// JSON: {"market": {...} | "market_file": path, "exchange": {...}, "duration_ticks",
/// "tempo_start_bpm", "seed", "recent_trades", "tokens": {"conductor", "admin"}}.
PerformanceConfig performance_config_from_json(const nlohmann::json& j);
PerformanceConfig load_performance_config(const std::string& path);

enum class EventKind {
  PerformanceStart,
  ConductorCommand,
  Tick,
  RegimeChange,
  News,
  PriceUpdate,
  Inflation,
  SlipSubmitted,
  SlipExpired,
  TradeExecuted,
  TradeRejected,
  Injection,
  PerformanceEnd,
  Payout,
};

const char* to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct EventRecord {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  EventKind kind = EventKind::Tick;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

nlohmann::json to_json(const EventRecord& record);
EventRecord record_from_json(const nlohmann::json& j);

struct ForceRegime {
  std::optional<Regime> regime;  // nullopt = auto
};
struct ShoutMode {
  bool on = false;
};
struct SetTempo {
  double bpm = 60.0;
};
struct StartPerformance {};
struct EndPerformance {};
using ConductorCommand = std::variant<ForceRegime, ShoutMode, SetTempo, StartPerformance, EndPerformance>;

/// Slip fields as entered by the administrator; ids and ticks are assigned by the engine.
struct SlipRequest {
  TraderId trader = 0;
  TraderId counterparty = 0;
  Side side = Side::Buy;
  Stock stock = Stock::Wealth;
  std::int64_t quantity = 0;
  double price = 0.0;
};
struct SubmitSlip {
  SlipRequest slip;
};
struct CashInjection {
  std::optional<double> amount;  // nullopt = configured default
};
using AdminCommand = std::variant<SubmitSlip, CashInjection>;

struct ExecutedTrade {
  std::uint64_t id = 0;
  Trade trade;

  friend bool operator==(const ExecutedTrade&, const ExecutedTrade&) = default;
};

enum class Phase { Idle, Running, Ended };

struct PerformanceState {
  Phase phase = Phase::Idle;
  // Settings fixed at start (copied from the PerformanceStart record).
  std::size_t roster_size = 0;
  double inflation_rate = 0.0;
  double injection_amount = 0.0;
  std::uint64_t slip_max_age = 0;
  double pot = 0.0;
  std::uint64_t duration_ticks = 0;
  std::size_t recent_trades = 0;

  MarketState market;
  Ledger ledger;
  SlipBook book;
  std::vector<Prices> price_history;  // index = tick
  std::optional<std::string> latest_news;
  std::vector<ExecutedTrade> trades;
  bool shout = false;
  double tempo_bpm = 60.0;
  std::uint64_t next_slip_id = 1;
  std::uint64_t next_trade_id = 1;
  std::vector<double> payout_shares;  // filled at the end
  std::uint64_t last_seq = 0;

  friend bool operator==(const PerformanceState&, const PerformanceState&) = default;
};

struct PortfolioView {
  TraderId trader = 0;
  Portfolio portfolio;
  double value = 0.0;
};

struct PayoutView {
  TraderId trader = 0;
  double share = 0.0;
  double amount = 0.0;
};

/// What the venue screens show. Holds no regime information.
struct DisplaySnapshot {
  std::uint64_t tick = 0;
  Phase phase = Phase::Idle;
  Prices prices{};
  std::vector<Prices> price_history;
  std::optional<std::string> news;
  std::vector<PortfolioView> portfolios;  // descending value, ties by trader id
  std::vector<ExecutedTrade> recent_trades;  // newest first
  std::size_t pending_slips = 0;
  bool shout = false;
  double tempo_bpm = 60.0;
  std::vector<PayoutView> payout;

  nlohmann::json to_json() const;
};

DisplaySnapshot make_snapshot(const PerformanceState& state);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::uint64_t seq, const std::string& what);
  std::uint64_t seq() const { return seq_; }

 private:
  std::uint64_t seq_;
};

/// Tracks the record grammar (tick phases, trade outcomes, payout) while reducing.
class Reducer {
 public:
  /// Applies one record; throws ReplayError when it does not fit the log so far.
  void apply(PerformanceState& state, const EventRecord& record);
  /// Throws ReplayError when the log stopped in the middle of a step.
  void finish(const PerformanceState& state) const;
  bool mid_step() const;

 private:
  enum class Stage { Idle, TickStarted, RegimeChanged, NewsShown, PricesUpdated };
  Stage stage_ = Stage::Idle;
  std::optional<Trade> awaiting_trade_;
  bool awaiting_payout_ = false;
  std::uint64_t last_seq_ = 0;
  std::uint64_t tick_ = 0;
};

PerformanceState replay(std::span<const EventRecord> log);

struct CommandOutcome {
  bool accepted = false;
  std::string status;  // "ok", "pending", "matched", "rejected"
  std::string reason;
  std::optional<std::uint64_t> slip_id;
  std::optional<ExecutedTrade> trade;

  nlohmann::json to_json() const;
};

class Performance {
 public:
  using RecordSink = std::function<void(const EventRecord&)>;

  explicit Performance(PerformanceConfig cfg);

  /// Runs one market tick; rejected unless the performance is running.
  CommandOutcome tick();
  CommandOutcome handle_conductor(const ConductorCommand& cmd);
  CommandOutcome handle_admin(const AdminCommand& cmd);

  const PerformanceState& state() const { return state_; }
  const std::vector<EventRecord>& log() const { return log_; }
  const PerformanceConfig& config() const { return cfg_; }
  DisplaySnapshot snapshot() const { return make_snapshot(state_); }

  /// Called for each appended record, after it has been applied.
  void add_sink(RecordSink sink) { sinks_.push_back(std::move(sink)); }

 private:
  void emit(EventKind kind, nlohmann::json payload);
  void finish_performance();

  PerformanceConfig cfg_;
  Rng rng_;
  PerformanceState state_;
  Reducer reducer_;
  std::uint64_t stamp_ = 0;
  std::vector<EventRecord> log_;
  std::vector<RecordSink> sinks_;
};

/// Newline-delimited JSON, one record per line, flushed per record.
class EventLogWriter {
 public:
  explicit EventLogWriter(const std::string& path);
  void write(const EventRecord& record);

 private:
  std::unique_ptr<std::ofstream> out_;
};

/// Reads an NDJSON log. A line that does not parse raises ReplayError naming
/// the sequence number it should have carried.
std::vector<EventRecord> read_event_log(std::istream& in);
std::vector<EventRecord> read_event_log(const std::string& path);

/// Removes hidden-regime information for display consumers: RegimeChange
/// records and regime-force commands are dropped, News keeps only its text.
std::optional<nlohmann::json> public_view(const EventRecord& record);

}  // namespace outcry
