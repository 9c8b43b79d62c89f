// Slip reconciliation, trader portfolios, cash policy and payouts.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "outcry/harmony.hpp"

namespace outcry {

using TraderId = int;  // 1..roster size
using Prices = std::array<double, kStockCount>;

struct Portfolio {
  std::array<std::int64_t, kStockCount> holdings{};
  double cash = 0.0;

  std::int64_t units(Stock stock) const { return holdings[static_cast<std::size_t>(stock)]; }
  friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

/// Portfolios indexed by trader id - 1.
using Ledger = std::vector<Portfolio>;

struct Slip {
  std::uint64_t id = 0;
  TraderId trader = 0;
  TraderId counterparty = 0;
  Side side = Side::Buy;
  Stock stock = Stock::Wealth;
  std::int64_t quantity = 0;
  double price = 0.0;
  std::uint64_t tick_submitted = 0;

  friend bool operator==(const Slip&, const Slip&) = default;
};

struct Trade {
  TraderId buyer = 0;
  TraderId seller = 0;
  Stock stock = Stock::Wealth;
  std::int64_t quantity = 0;
  double price = 0.0;
  std::uint64_t tick_executed = 0;

  double notional() const { return static_cast<double>(quantity) * price; }
  friend bool operator==(const Trade&, const Trade&) = default;
};

enum class RejectReason {
  SelfTrade,
  NonPositiveQuantity,
  NonPositivePrice,
  UnknownTrader,
  InsufficientCash,
  InsufficientHoldings,
};

const char* to_string(RejectReason reason);

class ExchangeError : public std::runtime_error {
 public:
  explicit ExchangeError(RejectReason reason);
  RejectReason reason() const { return reason_; }

 private:
  RejectReason reason_;
};

/// Slips waiting for their mirror image, in arrival order.
using SlipBook = std::vector<Slip>;

struct SubmitResult {
  SlipBook book;
  std::optional<Trade> trade;
  std::optional<std::uint64_t> matched_slip;  // id of the consumed resting slip
};

/// Throws ExchangeError for structurally invalid slips. `roster_size` of 0 skips the id range check.
void validate_slip(const Slip& slip, std::size_t roster_size = 0);

/// Consumes a resting mirror slip (counterparties swapped, same stock,
/// quantity and price, opposite side) or adds the slip to the book.
SubmitResult submit_slip(const Slip& slip, const SlipBook& book);

/// Drops slips that have waited `max_age` ticks or more.
SlipBook expire_slips(const SlipBook& book, std::uint64_t now, std::uint64_t max_age,
                      std::vector<Slip>* expired = nullptr);

/// Atomic: throws ExchangeError and leaves nothing changed if the buyer lacks
/// cash or the seller lacks units.
Ledger execute_trade(const Trade& trade, const Ledger& ledger);

Ledger apply_inflation(const Ledger& ledger, double rate_per_tick);
Ledger apply_cash_injection(const Ledger& ledger, double amount);

double value_portfolio(const Portfolio& portfolio, const Prices& prices);

/// Pot shares proportional to portfolio value (negatives floored at 0);
/// equal split when no value is positive.
std::vector<double> compute_payouts(const Ledger& ledger, const Prices& prices);
std::vector<double> payout_shares(std::span<const double> values);

}  // namespace outcry
