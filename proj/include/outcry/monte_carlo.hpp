// Headless Monte Carlo over market paths: buy-and-hold each stock versus
// holding cash that loses value to inflation every tick.

#pragma once

#include <cstdint>
#include <iosfwd>

#include "outcry/kernels.hpp"
#include "outcry/market.hpp"

namespace outcry {

struct MonteCarloSummary {
  std::size_t paths = 0;
  std::size_t ticks = 0;
  double cash_factor = 1.0;          // (1 - inflation)^ticks
  Vector3 mean_final_price{};
  Vector3 beats_cash_fraction{};     // share of paths with final/initial price > cash_factor
  std::array<double, kRegimeCount> regime_share{};
};

MonteCarloSummary run_market_monte_carlo(const MarketConfig& cfg, std::size_t paths, std::size_t ticks,
                                         std::uint64_t seed, double inflation_per_tick = 0.002,
                                         int workers = 0);

void print_summary(const MonteCarloSummary& summary, std::ostream& out);

}  // namespace outcry
