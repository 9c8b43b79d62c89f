#include "outcry/exchange.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

namespace outcry {
namespace {

Slip slip(std::uint64_t id, TraderId trader, TraderId counterparty, Side side, std::int64_t qty = 10,
          double price = 100.0, Stock stock = Stock::Wealth) {
  return Slip{id, trader, counterparty, side, stock, qty, price, 0};
}

Ledger roster(std::size_t n, Portfolio p = Portfolio{{10, 10, 10}, 1000.0}) { return Ledger(n, p); }

TEST(SubmitSlipTest, MirrorSlipsMatch) {
  auto first = submit_slip(slip(1, 1, 2, Side::Buy), {});
  EXPECT_FALSE(first.trade);
  ASSERT_EQ(first.book.size(), 1u);
  auto second = submit_slip(slip(2, 2, 1, Side::Sell), first.book);
  ASSERT_TRUE(second.trade);
  EXPECT_EQ(second.trade->buyer, 1);
  EXPECT_EQ(second.trade->seller, 2);
  EXPECT_EQ(second.trade->quantity, 10);
  EXPECT_DOUBLE_EQ(second.trade->price, 100.0);
  EXPECT_EQ(second.matched_slip, 1u);
  EXPECT_TRUE(second.book.empty());
}

TEST(SubmitSlipTest, NonMirrorSlipsPend) {
  auto book = submit_slip(slip(1, 1, 2, Side::Buy), {}).book;
  auto same_side = submit_slip(slip(2, 2, 1, Side::Buy), book);
  EXPECT_FALSE(same_side.trade);
  EXPECT_EQ(same_side.book.size(), 2u);
  auto other_qty = submit_slip(slip(3, 2, 1, Side::Sell, 12), book);
  EXPECT_FALSE(other_qty.trade);
  auto other_price = submit_slip(slip(4, 2, 1, Side::Sell, 10, 99.0), book);
  EXPECT_FALSE(other_price.trade);
  auto third_party = submit_slip(slip(5, 3, 1, Side::Sell), book);
  EXPECT_FALSE(third_party.trade);
  auto other_stock = submit_slip(slip(6, 2, 1, Side::Sell, 10, 100.0, Stock::Comfort), book);
  EXPECT_FALSE(other_stock.trade);
}

TEST(SubmitSlipTest, OldestMirrorIsConsumedFirst) {
  SlipBook book = submit_slip(slip(1, 1, 2, Side::Buy), {}).book;
  book = submit_slip(slip(2, 1, 2, Side::Buy), book).book;
  const auto r = submit_slip(slip(3, 2, 1, Side::Sell), book);
  ASSERT_TRUE(r.trade);
  EXPECT_EQ(r.matched_slip, 1u);
  ASSERT_EQ(r.book.size(), 1u);
  EXPECT_EQ(r.book.front().id, 2u);
}

TEST(SubmitSlipTest, Validation) {
  const auto reason = [](const Slip& s, std::size_t roster_size = 12) {
    try {
      validate_slip(s, roster_size);
    } catch (const ExchangeError& e) {
      return e.reason();
    }
    ADD_FAILURE() << "slip accepted";
    return RejectReason::SelfTrade;
  };
  EXPECT_EQ(reason(slip(1, 1, 1, Side::Buy)), RejectReason::SelfTrade);
  EXPECT_EQ(reason(slip(1, 1, 2, Side::Buy, 0)), RejectReason::NonPositiveQuantity);
  EXPECT_EQ(reason(slip(1, 1, 2, Side::Buy, 1, 0.0)), RejectReason::NonPositivePrice);
  EXPECT_EQ(reason(slip(1, 1, 13, Side::Buy)), RejectReason::UnknownTrader);
  EXPECT_EQ(reason(slip(1, 0, 2, Side::Buy)), RejectReason::UnknownTrader);
  EXPECT_THROW(submit_slip(slip(1, 1, 1, Side::Buy), {}), ExchangeError);
}

TEST(ExpireSlipsTest, DropsAfterMaxAge) {
  SlipBook book = {Slip{1, 1, 2, Side::Buy, Stock::Wealth, 1, 1.0, 0}, Slip{2, 1, 2, Side::Buy, Stock::Wealth, 1, 1.0, 3}};
  std::vector<Slip> expired;
  EXPECT_EQ(expire_slips(book, 3, 4).size(), 2u);
  const auto kept = expire_slips(book, 4, 4, &expired);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.front().id, 2u);
  ASSERT_EQ(expired.size(), 1u);
  EXPECT_EQ(expired.front().id, 1u);
}

TEST(ExecuteTradeTest, ConservationArithmetic) {
  Ledger ledger = roster(2);
  ledger[0] = {{0, 0, 0}, 1000.0};
  ledger[1] = {{10, 0, 0}, 0.0};
  const auto out = execute_trade(Trade{1, 2, Stock::Wealth, 10, 100.0, 0}, ledger);
  EXPECT_DOUBLE_EQ(out[0].cash, 0.0);
  EXPECT_EQ(out[0].units(Stock::Wealth), 10);
  EXPECT_DOUBLE_EQ(out[1].cash, 1000.0);
  EXPECT_EQ(out[1].units(Stock::Wealth), 0);
}

TEST(ExecuteTradeTest, AtomicRejection) {
  Ledger ledger = roster(2);
  ledger[0] = {{0, 0, 0}, 999.0};
  ledger[1] = {{10, 0, 0}, 0.0};
  try {
    execute_trade(Trade{1, 2, Stock::Wealth, 10, 100.0, 0}, ledger);
    FAIL() << "trade should be rejected";
  } catch (const ExchangeError& e) {
    EXPECT_EQ(e.reason(), RejectReason::InsufficientCash);
  }
  ledger[0].cash = 5000.0;
  try {
    execute_trade(Trade{1, 2, Stock::Wealth, 11, 100.0, 0}, ledger);
    FAIL() << "trade should be rejected";
  } catch (const ExchangeError& e) {
    EXPECT_EQ(e.reason(), RejectReason::InsufficientHoldings);
  }
  EXPECT_EQ(ledger[0].cash, 5000.0);
  EXPECT_THROW(execute_trade(Trade{1, 3, Stock::Wealth, 1, 1.0, 0}, ledger), ExchangeError);
}

TEST(CashPolicyTest, Inflation) {
  Ledger ledger = roster(1, {{0, 0, 0}, 1000.0});
  EXPECT_DOUBLE_EQ(apply_inflation(ledger, 0.002)[0].cash, 998.0);
  EXPECT_EQ(apply_inflation(ledger, 0.0), ledger);
  for (int i = 0; i < 120; ++i) ledger = apply_inflation(ledger, 0.002);
  EXPECT_NEAR(ledger[0].cash / 1000.0, std::pow(0.998, 120), 1e-12);
  EXPECT_EQ(ledger[0].holdings, (std::array<std::int64_t, 3>{0, 0, 0}));
  EXPECT_THROW(apply_inflation(ledger, 1.0), std::invalid_argument);
}

TEST(CashPolicyTest, Injection) {
  const Ledger ledger = roster(12);
  const auto total = [](const Ledger& l) {
    return std::accumulate(l.begin(), l.end(), 0.0, [](double acc, const Portfolio& p) { return acc + p.cash; });
  };
  const auto once = apply_cash_injection(ledger, 50.0);
  EXPECT_DOUBLE_EQ(total(once) - total(ledger), 600.0);
  EXPECT_EQ(apply_cash_injection(once, 50.0), apply_cash_injection(ledger, 100.0));
  for (std::size_t i = 0; i < ledger.size(); ++i) EXPECT_EQ(once[i].holdings, ledger[i].holdings);
  EXPECT_THROW(apply_cash_injection(ledger, 0.0), std::invalid_argument);
}

TEST(ValuationTest, PremiereFinalPrices) {
  // Protection 75, Wealth 29, Comfort 82.
  const Prices prices = {29.0, 75.0, 82.0};
  const Portfolio p{{1, 2, 1}, 0.0};
  EXPECT_DOUBLE_EQ(value_portfolio(p, prices), 261.0);
  EXPECT_DOUBLE_EQ(value_portfolio(Portfolio{{0, 0, 0}, 12.5}, prices), 12.5);
  const Portfolio doubled{{2, 4, 2}, 0.0};
  EXPECT_DOUBLE_EQ(value_portfolio(doubled, prices), 522.0);
}

TEST(PayoutTest, ProportionalShares) {
  const Prices prices = {100.0, 100.0, 100.0};
  const auto equal = compute_payouts(roster(12), prices);
  for (double s : equal) EXPECT_NEAR(s, 1.0 / 12.0, 1e-15);

  const std::vector<double> values = {5.0, 0.0, -3.0, 20.0};
  const auto shares = payout_shares(values);
  EXPECT_DOUBLE_EQ(shares[3], 0.8);
  EXPECT_DOUBLE_EQ(shares[2], 0.0);
  EXPECT_DOUBLE_EQ(std::accumulate(shares.begin(), shares.end(), 0.0), 1.0);

  const auto fallback = payout_shares(std::vector<double>{-1.0, 0.0});
  EXPECT_DOUBLE_EQ(fallback[0], 0.5);
}

TEST(PayoutTest, PremiereDispersionIsRepresentable) {
  // Twelve values: top 16.9%, bottom 4.7%, the other ten share the rest evenly.
  std::vector<double> values(12, (1.0 - 0.169 - 0.047) / 10.0);
  values[0] = 0.169;
  values[11] = 0.047;
  for (auto& v : values) v *= 3000.0;
  const auto shares = payout_shares(values);
  EXPECT_NEAR(shares[0], 0.169, 1e-12);
  EXPECT_NEAR(shares[11], 0.047, 1e-12);
  EXPECT_EQ(std::max_element(shares.begin(), shares.end()) - shares.begin(), 0);
  EXPECT_EQ(std::min_element(shares.begin(), shares.end()) - shares.begin(), 11);
}

TEST(PayoutTest, ScaleInvariantAndOrdered) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> value(0.0, 1000.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> values(12);
    for (auto& v : values) v = value(rng);
    const auto a = payout_shares(values);
    for (auto& v : values) v *= 7.5;
    const auto b = payout_shares(values);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      EXPECT_GE(a[i], 0.0);
      sum += a[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(),
              std::max_element(values.begin(), values.end()) - values.begin());
  }
}

}  // namespace
}  // namespace outcry

#include "ledger_property.hpp"

namespace outcry {
namespace {

TEST(LedgerPropertyTest, ConservationOverRandomSequences) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = testing::run_ledger_property(seed, 10000);
    EXPECT_TRUE(r.ok) << r.failure;
    EXPECT_GT(r.trades, 100u);
    EXPECT_GT(r.rejections, 0u);
    EXPECT_GT(r.injections, 0u);
  }
}

}  // namespace
}  // namespace outcry
