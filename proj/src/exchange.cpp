#include "outcry/exchange.hpp"

#include <algorithm>
#include <numeric>

namespace outcry {

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::SelfTrade:
      return "SelfTrade";
    case RejectReason::NonPositiveQuantity:
      return "NonPositiveQuantity";
    case RejectReason::NonPositivePrice:
      return "NonPositivePrice";
    case RejectReason::UnknownTrader:
      return "UnknownTrader";
    case RejectReason::InsufficientCash:
      return "InsufficientCash";
    case RejectReason::InsufficientHoldings:
      return "InsufficientHoldings";
  }
  return "?";
}

ExchangeError::ExchangeError(RejectReason reason) : std::runtime_error(to_string(reason)), reason_(reason) {}

void validate_slip(const Slip& slip, std::size_t roster_size) {
  if (roster_size > 0) {
    const auto in_roster = [&](TraderId id) { return id >= 1 && static_cast<std::size_t>(id) <= roster_size; };
    if (!in_roster(slip.trader) || !in_roster(slip.counterparty)) throw ExchangeError(RejectReason::UnknownTrader);
  }
  if (slip.trader == slip.counterparty) throw ExchangeError(RejectReason::SelfTrade);
  if (slip.quantity < 1) throw ExchangeError(RejectReason::NonPositiveQuantity);
  if (!(slip.price > 0.0)) throw ExchangeError(RejectReason::NonPositivePrice);
}

SubmitResult submit_slip(const Slip& slip, const SlipBook& book) {
  validate_slip(slip);
  SubmitResult result{book, std::nullopt, std::nullopt};
  const auto mirror = std::find_if(result.book.begin(), result.book.end(), [&](const Slip& s) {
    return s.trader == slip.counterparty && s.counterparty == slip.trader && s.side != slip.side &&
           s.stock == slip.stock && s.quantity == slip.quantity && s.price == slip.price;
  });
  if (mirror == result.book.end()) {
    result.book.push_back(slip);
    return result;
  }
  const bool incoming_buys = slip.side == Side::Buy;
  result.trade = Trade{incoming_buys ? slip.trader : slip.counterparty,
                       incoming_buys ? slip.counterparty : slip.trader,
                       slip.stock,
                       slip.quantity,
                       slip.price,
                       slip.tick_submitted};
  result.matched_slip = mirror->id;
  result.book.erase(mirror);
  return result;
}

SlipBook expire_slips(const SlipBook& book, std::uint64_t now, std::uint64_t max_age, std::vector<Slip>* expired) {
  SlipBook kept;
  for (const auto& slip : book) {
    if (now >= slip.tick_submitted && now - slip.tick_submitted >= max_age) {
      if (expired) expired->push_back(slip);
    } else {
      kept.push_back(slip);
    }
  }
  return kept;
}

Ledger execute_trade(const Trade& trade, const Ledger& ledger) {
  const auto in_ledger = [&](TraderId id) { return id >= 1 && static_cast<std::size_t>(id) <= ledger.size(); };
  if (!in_ledger(trade.buyer) || !in_ledger(trade.seller)) throw ExchangeError(RejectReason::UnknownTrader);
  if (trade.buyer == trade.seller) throw ExchangeError(RejectReason::SelfTrade);
  if (trade.quantity < 1) throw ExchangeError(RejectReason::NonPositiveQuantity);
  if (!(trade.price > 0.0)) throw ExchangeError(RejectReason::NonPositivePrice);

  const auto s = static_cast<std::size_t>(trade.stock);
  const auto& buyer = ledger[static_cast<std::size_t>(trade.buyer - 1)];
  const auto& seller = ledger[static_cast<std::size_t>(trade.seller - 1)];
  const double cost = trade.notional();
  if (buyer.cash < cost) throw ExchangeError(RejectReason::InsufficientCash);
  if (seller.holdings[s] < trade.quantity) throw ExchangeError(RejectReason::InsufficientHoldings);

  Ledger out = ledger;
  auto& b = out[static_cast<std::size_t>(trade.buyer - 1)];
  auto& v = out[static_cast<std::size_t>(trade.seller - 1)];
  b.cash -= cost;
  b.holdings[s] += trade.quantity;
  v.cash += cost;
  v.holdings[s] -= trade.quantity;
  return out;
}

Ledger apply_inflation(const Ledger& ledger, double rate_per_tick) {
  if (!(rate_per_tick >= 0.0 && rate_per_tick < 1.0)) throw std::invalid_argument("inflation rate must lie in [0, 1)");
  Ledger out = ledger;
  for (auto& p : out) p.cash *= 1.0 - rate_per_tick;
  return out;
}

Ledger apply_cash_injection(const Ledger& ledger, double amount) {
  if (!(amount > 0.0)) throw std::invalid_argument("cash injection must be positive");
  Ledger out = ledger;
  for (auto& p : out) p.cash += amount;
  return out;
}

double value_portfolio(const Portfolio& portfolio, const Prices& prices) {
  double value = portfolio.cash;
  for (std::size_t i = 0; i < kStockCount; ++i) value += static_cast<double>(portfolio.holdings[i]) * prices[i];
  return value;
}

std::vector<double> payout_shares(std::span<const double> values) {
  std::vector<double> shares(values.size(), 0.0);
  if (values.empty()) return shares;
  const double total = std::accumulate(values.begin(), values.end(), 0.0,
                                       [](double acc, double v) { return acc + std::max(v, 0.0); });
  if (!(total > 0.0)) {
    std::fill(shares.begin(), shares.end(), 1.0 / static_cast<double>(values.size()));
    return shares;
  }
  for (std::size_t i = 0; i < values.size(); ++i) shares[i] = std::max(values[i], 0.0) / total;
  return shares;
}

std::vector<double> compute_payouts(const Ledger& ledger, const Prices& prices) {
  std::vector<double> values;
  values.reserve(ledger.size());
  for (const auto& p : ledger) values.push_back(value_portfolio(p, prices));
  return payout_shares(values);
}

}  // namespace outcry
