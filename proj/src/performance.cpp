#include "outcry/performance.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>

namespace outcry {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<EventKind, const char*>, 14> kKindNames = {{
    {EventKind::PerformanceStart, "PerformanceStart"},
    {EventKind::ConductorCommand, "ConductorCommand"},
    {EventKind::Tick, "Tick"},
    {EventKind::RegimeChange, "RegimeChange"},
    {EventKind::News, "News"},
    {EventKind::PriceUpdate, "PriceUpdate"},
    {EventKind::Inflation, "Inflation"},
    {EventKind::SlipSubmitted, "SlipSubmitted"},
    {EventKind::SlipExpired, "SlipExpired"},
    {EventKind::TradeExecuted, "TradeExecuted"},
    {EventKind::TradeRejected, "TradeRejected"},
    {EventKind::Injection, "Injection"},
    {EventKind::PerformanceEnd, "PerformanceEnd"},
    {EventKind::Payout, "Payout"},
}};

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Idle:
      return "idle";
    case Phase::Running:
      return "running";
    case Phase::Ended:
      return "ended";
  }
  return "?";
}

json prices_json(const Prices& prices) {
  json j = json::object();
  for (auto stock : kAllStocks) j[to_string(stock)] = prices[static_cast<std::size_t>(stock)];
  return j;
}

Prices prices_from(const json& j) {
  Prices p{};
  for (auto stock : kAllStocks) p[static_cast<std::size_t>(stock)] = j.at(to_string(stock)).get<double>();
  return p;
}

json portfolio_json(const Portfolio& p) {
  json holdings = json::object();
  for (auto stock : kAllStocks) holdings[to_string(stock)] = p.units(stock);
  return {{"holdings", holdings}, {"cash", p.cash}};
}

Portfolio portfolio_from(const json& j) {
  Portfolio p;
  const auto& h = j.at("holdings");
  for (auto stock : kAllStocks) {
    p.holdings[static_cast<std::size_t>(stock)] =
        h.is_array() ? h.at(static_cast<std::size_t>(stock)).get<std::int64_t>() : h.at(to_string(stock)).get<std::int64_t>();
  }
  p.cash = j.at("cash").get<double>();
  return p;
}

json slip_json(const Slip& s) {
  return {{"id", s.id},       {"trader", s.trader}, {"counterparty", s.counterparty}, {"side", to_string(s.side)},
          {"stock", to_string(s.stock)}, {"quantity", s.quantity}, {"price", s.price}, {"tick", s.tick_submitted}};
}

Slip slip_from(const json& j) {
  Slip s;
  s.id = j.at("id").get<std::uint64_t>();
  s.trader = j.at("trader").get<TraderId>();
  s.counterparty = j.at("counterparty").get<TraderId>();
  s.side = parse_side(j.at("side").get<std::string>());
  s.stock = parse_stock(j.at("stock").get<std::string>());
  s.quantity = j.at("quantity").get<std::int64_t>();
  s.price = j.at("price").get<double>();
  s.tick_submitted = j.at("tick").get<std::uint64_t>();
  return s;
}

json request_json(const SlipRequest& s) {
  return {{"trader", s.trader},         {"counterparty", s.counterparty}, {"side", to_string(s.side)},
          {"stock", to_string(s.stock)}, {"quantity", s.quantity},         {"price", s.price}};
}

json trade_json(const ExecutedTrade& t) {
  return {{"id", t.id},
          {"buyer", t.trade.buyer},
          {"seller", t.trade.seller},
          {"stock", to_string(t.trade.stock)},
          {"quantity", t.trade.quantity},
          {"price", t.trade.price},
          {"tick", t.trade.tick_executed}};
}

Trade trade_from(const json& j) {
  return Trade{j.at("buyer").get<TraderId>(),       j.at("seller").get<TraderId>(),
               parse_stock(j.at("stock").get<std::string>()), j.at("quantity").get<std::int64_t>(),
               j.at("price").get<double>(),         j.at("tick").get<std::uint64_t>()};
}

CommandOutcome rejected(std::string reason) { return {false, "rejected", std::move(reason), {}, {}}; }
CommandOutcome ok() { return {true, "ok", "", {}, {}}; }

}  // namespace

// ---------------------------------------------------------------- config

void PerformanceConfig::validate() const {
  if (duration_ticks < 1) throw ConfigError("duration_ticks must be at least 1");
  if (!(tempo_start_bpm > 0.0)) throw ConfigError("tempo_start_bpm must be positive");
  if (exchange.roster_size < 2) throw ConfigError("roster needs at least 2 traders");
  if (!(exchange.inflation_rate >= 0.0 && exchange.inflation_rate < 1.0)) {
    throw ConfigError("inflation_rate must lie in [0, 1)");
  }
  if (!(exchange.injection_amount > 0.0)) throw ConfigError("injection_amount must be positive");
  if (!(exchange.pot > 0.0)) throw ConfigError("pot must be positive");
  if (exchange.initial_portfolio.cash < 0.0) throw ConfigError("initial cash must be nonnegative");
  for (auto h : exchange.initial_portfolio.holdings) {
    if (h < 0) throw ConfigError("initial holdings must be nonnegative");
  }
}

PerformanceConfig performance_config_from_json(const json& j) {
  PerformanceConfig cfg;
  try {
    if (j.contains("market_file")) {
      cfg.market = load_market_config(j.at("market_file").get<std::string>());
    } else if (j.contains("market")) {
      cfg.market = market_config_from_json(j.at("market"));
    }
    if (j.contains("exchange")) {
      const auto& e = j.at("exchange");
      cfg.exchange.roster_size = e.value("roster_size", cfg.exchange.roster_size);
      if (e.contains("initial_portfolio")) cfg.exchange.initial_portfolio = portfolio_from(e.at("initial_portfolio"));
      cfg.exchange.inflation_rate = e.value("inflation_rate", cfg.exchange.inflation_rate);
      cfg.exchange.injection_amount = e.value("injection_amount", cfg.exchange.injection_amount);
      cfg.exchange.slip_max_age = e.value("slip_max_age", cfg.exchange.slip_max_age);
      cfg.exchange.pot = e.value("pot", cfg.exchange.pot);
    }
    cfg.duration_ticks = j.value("duration_ticks", cfg.duration_ticks);
    cfg.tempo_start_bpm = j.value("tempo_start_bpm", cfg.tempo_start_bpm);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.recent_trades = j.value("recent_trades", cfg.recent_trades);
    if (j.contains("tokens")) {
      cfg.conductor_token = j.at("tokens").value("conductor", "");
      cfg.admin_token = j.at("tokens").value("admin", "");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("performance config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PerformanceConfig load_performance_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open performance config '" + path + "'");
  try {
    json j = json::parse(in);
    // A relative market_file is relative to the config file.
    if (j.contains("market_file") && j["market_file"].is_string()) {
      const std::filesystem::path market = j["market_file"].get<std::string>();
      if (market.is_relative()) j["market_file"] = (std::filesystem::path(path).parent_path() / market).string();
    }
    return performance_config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError("performance config '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------- records

const char* to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

EventKind parse_event_kind(const std::string& text) {
  for (const auto& [k, name] : kKindNames) {
    if (text == name) return k;
  }
  throw std::invalid_argument("unknown event kind '" + text + "'");
}

json to_json(const EventRecord& record) {
  return {{"seq", record.seq}, {"tick", record.tick}, {"kind", to_string(record.kind)}, {"payload", record.payload}};
}

EventRecord record_from_json(const json& j) {
  EventRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.tick = j.at("tick").get<std::uint64_t>();
  r.kind = parse_event_kind(j.at("kind").get<std::string>());
  r.payload = j.at("payload");
  return r;
}

// ---------------------------------------------------------------- snapshot

DisplaySnapshot make_snapshot(const PerformanceState& state) {
  DisplaySnapshot snap;
  snap.tick = state.market.tick;
  snap.phase = state.phase;
  snap.prices = state.market.prices;
  snap.price_history = state.price_history;
  snap.news = state.latest_news;
  snap.shout = state.shout;
  snap.tempo_bpm = state.tempo_bpm;
  snap.pending_slips = state.book.size();
  for (std::size_t i = 0; i < state.ledger.size(); ++i) {
    const auto& p = state.ledger[i];
    snap.portfolios.push_back({static_cast<TraderId>(i + 1), p, value_portfolio(p, state.market.prices)});
  }
  std::stable_sort(snap.portfolios.begin(), snap.portfolios.end(),
                   [](const PortfolioView& a, const PortfolioView& b) { return a.value > b.value; });
  const auto shown = std::min(state.recent_trades, state.trades.size());
  snap.recent_trades.assign(state.trades.rbegin(), state.trades.rbegin() + static_cast<std::ptrdiff_t>(shown));
  for (std::size_t i = 0; i < state.payout_shares.size(); ++i) {
    snap.payout.push_back({static_cast<TraderId>(i + 1), state.payout_shares[i], state.payout_shares[i] * state.pot});
  }
  return snap;
}

json DisplaySnapshot::to_json() const {
  json j;
  j["tick"] = tick;
  j["phase"] = phase_name(phase);
  j["prices"] = prices_json(prices);
  j["price_history"] = json::array();
  for (const auto& p : price_history) j["price_history"].push_back(prices_json(p));
  j["news"] = news ? json(*news) : json(nullptr);
  j["portfolios"] = json::array();
  for (const auto& v : portfolios) {
    json pj = portfolio_json(v.portfolio);
    pj["trader"] = v.trader;
    pj["value"] = v.value;
    j["portfolios"].push_back(pj);
  }
  j["recent_trades"] = json::array();
  for (const auto& t : recent_trades) j["recent_trades"].push_back(trade_json(t));
  j["pending_slips"] = pending_slips;
  j["shout"] = shout;
  j["tempo_bpm"] = tempo_bpm;
  j["payout"] = json::array();
  for (const auto& p : payout) j["payout"].push_back({{"trader", p.trader}, {"share", p.share}, {"amount", p.amount}});
  return j;
}

// ---------------------------------------------------------------- reducer

ReplayError::ReplayError(std::uint64_t seq, const std::string& what)
    : std::runtime_error("event " + std::to_string(seq) + ": " + what), seq_(seq) {}

bool Reducer::mid_step() const { return stage_ != Stage::Idle || awaiting_trade_ || awaiting_payout_; }

void Reducer::finish(const PerformanceState& state) const {
  if (last_seq_ == 0) throw ReplayError(1, "log is empty, expected PerformanceStart");
  if (mid_step()) throw ReplayError(last_seq_ + 1, "log truncated in the middle of a step");
  (void)state;
}

void Reducer::apply(PerformanceState& state, const EventRecord& r) {
  const auto fail = [&](const std::string& what) { throw ReplayError(r.seq, what); };
  if (r.seq != last_seq_ + 1) {
    throw ReplayError(last_seq_ + 1, "expected sequence number " + std::to_string(last_seq_ + 1) + ", found " +
                                         std::to_string(r.seq));
  }
  if (last_seq_ == 0 && r.kind != EventKind::PerformanceStart) fail("log must start with PerformanceStart");
  if (awaiting_trade_ && r.kind != EventKind::TradeExecuted && r.kind != EventKind::TradeRejected) {
    fail("matched slip not followed by a trade outcome");
  }
  if (awaiting_payout_ && r.kind != EventKind::Payout) fail("PerformanceEnd not followed by Payout");
  const bool in_tick = stage_ != Stage::Idle;
  if (r.kind != EventKind::Tick && r.tick != tick_) {
    fail("record stamped tick " + std::to_string(r.tick) + ", expected " + std::to_string(tick_));
  }
  const auto& p = r.payload;

  try {
    switch (r.kind) {
      case EventKind::PerformanceStart: {
        if (state.phase != Phase::Idle) fail("performance already started");
        state.phase = Phase::Running;
        state.roster_size = p.at("roster_size").get<std::size_t>();
        state.inflation_rate = p.at("inflation_rate").get<double>();
        state.injection_amount = p.at("injection_amount").get<double>();
        state.slip_max_age = p.at("slip_max_age").get<std::uint64_t>();
        state.pot = p.at("pot").get<double>();
        state.duration_ticks = p.at("duration_ticks").get<std::uint64_t>();
        state.recent_trades = p.at("recent_trades").get<std::size_t>();
        state.tempo_bpm = p.at("tempo_bpm").get<double>();
        state.ledger.assign(state.roster_size, portfolio_from(p.at("initial_portfolio")));
        state.market = MarketState{};
        state.market.prices = prices_from(p.at("initial_prices"));
        state.market.regime = parse_regime(p.at("initial_regime").get<std::string>());
        state.price_history = {state.market.prices};
        break;
      }
      case EventKind::ConductorCommand: {
        if (state.phase != Phase::Running || in_tick) fail("conductor command outside a running performance");
        const auto cmd = p.at("command").get<std::string>();
        if (cmd == "regime") {
          const auto mode = p.at("mode").get<std::string>();
          state.market.forced = mode == "auto" ? std::nullopt : std::optional<Regime>(parse_regime(mode));
        } else if (cmd == "shout") {
          state.shout = p.at("on").get<bool>();
        } else if (cmd == "tempo") {
          state.tempo_bpm = p.at("bpm").get<double>();
        } else {
          fail("unknown conductor command '" + cmd + "'");
        }
        break;
      }
      case EventKind::Tick:
        if (state.phase != Phase::Running || in_tick) fail("Tick outside a running performance");
        if (r.tick != state.market.tick + 1) fail("Tick number out of order");
        tick_ = r.tick;
        stage_ = Stage::TickStarted;
        break;
      case EventKind::RegimeChange: {
        if (stage_ != Stage::TickStarted) fail("RegimeChange out of tick order");
        if (parse_regime(p.at("from").get<std::string>()) != state.market.regime) fail("RegimeChange from wrong regime");
        const auto to = parse_regime(p.at("to").get<std::string>());
        if (to == state.market.regime) fail("RegimeChange to the current regime");
        state.market.regime = to;
        state.market.ticks_in_regime = 0;
        stage_ = Stage::RegimeChanged;
        break;
      }
      case EventKind::News:
        if (stage_ != Stage::TickStarted && stage_ != Stage::RegimeChanged) fail("News out of tick order");
        if (parse_regime(p.at("regime").get<std::string>()) != state.market.regime) {
          fail("News does not match the regime in effect");
        }
        state.latest_news = p.at("text").get<std::string>();
        stage_ = Stage::NewsShown;
        break;
      case EventKind::PriceUpdate: {
        if (stage_ != Stage::NewsShown) fail("PriceUpdate out of tick order");
        const auto prices = prices_from(p.at("prices"));
        for (double v : prices) {
          if (!(v > 0.0)) fail("nonpositive price");
        }
        state.market.prices = prices;
        ++state.market.tick;
        ++state.market.ticks_in_regime;
        state.price_history.push_back(prices);
        stage_ = Stage::PricesUpdated;
        break;
      }
      case EventKind::Inflation:
        if (stage_ != Stage::PricesUpdated) fail("Inflation out of tick order");
        state.ledger = apply_inflation(state.ledger, p.at("rate").get<double>());
        stage_ = Stage::Idle;
        break;
      case EventKind::SlipExpired: {
        if (in_tick) fail("SlipExpired inside a tick");
        const auto id = p.at("slip_id").get<std::uint64_t>();
        const auto it = std::find_if(state.book.begin(), state.book.end(), [&](const Slip& s) { return s.id == id; });
        if (it == state.book.end()) fail("expired slip " + std::to_string(id) + " is not pending");
        state.book.erase(it);
        break;
      }
      case EventKind::SlipSubmitted: {
        if (state.phase != Phase::Running || in_tick) fail("SlipSubmitted outside a running performance");
        const Slip slip = slip_from(p.at("slip"));
        if (slip.id != state.next_slip_id) fail("slip id out of order");
        validate_slip(slip, state.roster_size);
        auto result = submit_slip(slip, state.book);
        state.book = std::move(result.book);
        ++state.next_slip_id;
        awaiting_trade_ = result.trade;
        break;
      }
      case EventKind::TradeExecuted: {
        if (!awaiting_trade_) fail("TradeExecuted without a matched slip");
        const Trade trade = trade_from(p.at("trade"));
        if (!(trade == *awaiting_trade_)) fail("TradeExecuted does not match the reconciled slips");
        if (p.at("trade").at("id").get<std::uint64_t>() != state.next_trade_id) fail("trade id out of order");
        state.ledger = execute_trade(trade, state.ledger);
        state.trades.push_back({state.next_trade_id++, trade});
        awaiting_trade_.reset();
        break;
      }
      case EventKind::TradeRejected:
        if (state.phase != Phase::Running || in_tick) fail("TradeRejected outside a running performance");
        awaiting_trade_.reset();
        break;
      case EventKind::Injection:
        if (state.phase != Phase::Running || in_tick) fail("Injection outside a running performance");
        state.ledger = apply_cash_injection(state.ledger, p.at("amount").get<double>());
        break;
      case EventKind::PerformanceEnd:
        if (state.phase != Phase::Running || in_tick) fail("PerformanceEnd outside a running performance");
        state.phase = Phase::Ended;
        awaiting_payout_ = true;
        break;
      case EventKind::Payout: {
        if (!awaiting_payout_) fail("Payout without PerformanceEnd");
        state.payout_shares = p.at("shares").get<std::vector<double>>();
        if (state.payout_shares.size() != state.roster_size) fail("payout roster size mismatch");
        awaiting_payout_ = false;
        break;
      }
    }
  } catch (const ReplayError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("malformed ") + to_string(r.kind) + " record: " + e.what());
  }
  last_seq_ = r.seq;
  state.last_seq = r.seq;
}

PerformanceState replay(std::span<const EventRecord> log) {
  PerformanceState state;
  Reducer reducer;
  for (const auto& r : log) reducer.apply(state, r);
  reducer.finish(state);
  return state;
}

// ---------------------------------------------------------------- engine

json CommandOutcome::to_json() const {
  json j = {{"accepted", accepted}, {"status", status}};
  if (!reason.empty()) j["reason"] = reason;
  if (slip_id) j["slip_id"] = *slip_id;
  if (trade) j["trade"] = trade_json(*trade);
  return j;
}

Performance::Performance(PerformanceConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate();
  state_.tempo_bpm = cfg_.tempo_start_bpm;
}

void Performance::emit(EventKind kind, json payload) {
  EventRecord r{log_.size() + 1, stamp_, kind, std::move(payload)};
  reducer_.apply(state_, r);
  log_.push_back(r);
  for (const auto& sink : sinks_) sink(log_.back());
}

void Performance::finish_performance() {
  emit(EventKind::PerformanceEnd, json::object());
  std::vector<double> values;
  for (const auto& p : state_.ledger) values.push_back(value_portfolio(p, state_.market.prices));
  const auto shares = payout_shares(values);
  emit(EventKind::Payout, {{"shares", shares}, {"values", values}, {"pot", state_.pot},
                           {"prices", prices_json(state_.market.prices)}});
}

CommandOutcome Performance::tick() {
  if (state_.phase == Phase::Idle) return rejected("performance not started");
  if (state_.phase == Phase::Ended) return rejected("performance ended");
  const auto& market = cfg_.market;

  // Records inside a step carry the step's tick, even before prices move.
  stamp_ = state_.market.tick + 1;
  emit(EventKind::Tick, {{"tick", stamp_}});
  const MarketState next = advance_regime(state_.market, market.hazard, rng_);
  if (next.regime != state_.market.regime) {
    emit(EventKind::RegimeChange, {{"from", to_string(state_.market.regime)}, {"to", to_string(next.regime)}});
  }
  const NewsItem news = pick_news(state_.market.regime, market.news, rng_);
  emit(EventKind::News, {{"text", news.text}, {"regime", to_string(news.regime)}});
  const MarketState stepped = step_prices(state_.market, market.params, rng_);
  emit(EventKind::PriceUpdate, {{"prices", prices_json(stepped.prices)}});
  emit(EventKind::Inflation, {{"rate", state_.inflation_rate}});

  std::vector<Slip> expired;
  expire_slips(state_.book, state_.market.tick, state_.slip_max_age, &expired);
  for (const auto& slip : expired) emit(EventKind::SlipExpired, {{"slip_id", slip.id}});

  if (state_.market.tick >= state_.duration_ticks) finish_performance();
  return ok();
}

CommandOutcome Performance::handle_conductor(const ConductorCommand& cmd) {
  if (std::holds_alternative<StartPerformance>(cmd)) {
    if (state_.phase != Phase::Idle) return rejected("performance already started");
    const auto& ex = cfg_.exchange;
    emit(EventKind::PerformanceStart, {{"roster_size", ex.roster_size},
                                       {"initial_portfolio", portfolio_json(ex.initial_portfolio)},
                                       {"inflation_rate", ex.inflation_rate},
                                       {"injection_amount", ex.injection_amount},
                                       {"slip_max_age", ex.slip_max_age},
                                       {"pot", ex.pot},
                                       {"duration_ticks", cfg_.duration_ticks},
                                       {"recent_trades", cfg_.recent_trades},
                                       {"tempo_bpm", cfg_.tempo_start_bpm},
                                       {"initial_prices", prices_json(cfg_.market.initial_prices)},
                                       {"initial_regime", to_string(cfg_.market.initial_regime)},
                                       {"seed", cfg_.seed}});
    return ok();
  }
  if (state_.phase == Phase::Idle) return rejected("performance not started");
  if (state_.phase == Phase::Ended) return rejected("performance ended");

  if (std::holds_alternative<EndPerformance>(cmd)) {
    finish_performance();
    return ok();
  }
  if (const auto* force = std::get_if<ForceRegime>(&cmd)) {
    emit(EventKind::ConductorCommand,
         {{"command", "regime"}, {"mode", force->regime ? to_string(*force->regime) : "auto"}});
  } else if (const auto* shout = std::get_if<ShoutMode>(&cmd)) {
    emit(EventKind::ConductorCommand, {{"command", "shout"}, {"on", shout->on}});
  } else if (const auto* tempo = std::get_if<SetTempo>(&cmd)) {
    if (!(tempo->bpm > 0.0)) return rejected("tempo must be positive");
    emit(EventKind::ConductorCommand, {{"command", "tempo"}, {"bpm", tempo->bpm}});
  }
  return ok();
}

CommandOutcome Performance::handle_admin(const AdminCommand& cmd) {
  if (state_.phase == Phase::Idle) return rejected("performance not started");
  if (state_.phase == Phase::Ended) return rejected("performance ended");

  if (const auto* inj = std::get_if<CashInjection>(&cmd)) {
    const double amount = inj->amount.value_or(state_.injection_amount);
    if (!(amount > 0.0)) return rejected("injection amount must be positive");
    emit(EventKind::Injection, {{"amount", amount}});
    return ok();
  }

  const auto& req = std::get<SubmitSlip>(cmd).slip;
  Slip slip{state_.next_slip_id, req.trader, req.counterparty, req.side, req.stock, req.quantity, req.price,
            state_.market.tick};
  try {
    validate_slip(slip, state_.roster_size);
  } catch (const ExchangeError& e) {
    emit(EventKind::TradeRejected, {{"slip", request_json(req)}, {"reason", to_string(e.reason())}});
    return rejected(to_string(e.reason()));
  }

  const auto match = submit_slip(slip, state_.book);
  emit(EventKind::SlipSubmitted, {{"slip", slip_json(slip)}});
  CommandOutcome outcome{true, "pending", "", slip.id, {}};
  if (!match.trade) return outcome;

  try {
    execute_trade(*match.trade, state_.ledger);
  } catch (const ExchangeError& e) {
    emit(EventKind::TradeRejected, {{"trade", trade_json({0, *match.trade})},
                                    {"slips", {*match.matched_slip, slip.id}},
                                    {"reason", to_string(e.reason())}});
    outcome.accepted = false;
    outcome.status = "rejected";
    outcome.reason = to_string(e.reason());
    return outcome;
  }
  const ExecutedTrade executed{state_.next_trade_id, *match.trade};
  emit(EventKind::TradeExecuted, {{"trade", trade_json(executed)}, {"slips", {*match.matched_slip, slip.id}}});
  outcome.status = "matched";
  outcome.trade = executed;
  return outcome;
}

// ---------------------------------------------------------------- log files

EventLogWriter::EventLogWriter(const std::string& path) : out_(std::make_unique<std::ofstream>(path)) {
  if (!*out_) throw std::runtime_error("cannot write event log '" + path + "'");
}

void EventLogWriter::write(const EventRecord& record) {
  *out_ << to_json(record).dump() << '\n';
  out_->flush();
}

std::vector<EventRecord> read_event_log(std::istream& in) {
  std::vector<EventRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::uint64_t expected = records.size() + 1;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ReplayError(expected, std::string("unreadable record: ") + e.what());
    }
  }
  return records;
}

std::vector<EventRecord> read_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event log '" + path + "'");
  return read_event_log(in);
}

std::optional<json> public_view(const EventRecord& record) {
  switch (record.kind) {
    case EventKind::RegimeChange:
      return std::nullopt;
    case EventKind::ConductorCommand:
      if (record.payload.value("command", "") == "regime") return std::nullopt;
      break;
    default:
      break;
  }
  json j = to_json(record);
  if (record.kind == EventKind::News) j["payload"] = {{"text", record.payload.at("text")}};
  if (record.kind == EventKind::PerformanceStart) {
    j["payload"].erase("initial_regime");
    j["payload"].erase("seed");
  }
  return j;
}

}  // namespace outcry
