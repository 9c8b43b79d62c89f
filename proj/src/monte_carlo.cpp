#include "outcry/monte_carlo.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace outcry {

MonteCarloSummary run_market_monte_carlo(const MarketConfig& cfg, std::size_t paths, std::size_t ticks,
                                         std::uint64_t seed, double inflation_per_tick, int workers) {
  if (paths == 0) throw std::invalid_argument("monte carlo needs at least one path");
  if (!(inflation_per_tick >= 0.0 && inflation_per_tick < 1.0)) {
    throw std::invalid_argument("inflation rate must lie in [0, 1)");
  }
  std::vector<kernels::PathResult> results(paths);
  kernels::simulate_paths_parallel(cfg.params, cfg.hazard, cfg.initial_state(), ticks, seed, results, workers);

  MonteCarloSummary summary;
  summary.paths = paths;
  summary.ticks = ticks;
  summary.cash_factor = std::pow(1.0 - inflation_per_tick, static_cast<double>(ticks));
  std::array<std::size_t, kStockCount> wins{};
  std::array<std::size_t, kRegimeCount> regime_ticks{};
  for (const auto& r : results) {
    for (std::size_t i = 0; i < kStockCount; ++i) {
      summary.mean_final_price[i] += r.final_prices[i];
      if (r.final_prices[i] / cfg.initial_prices[i] > summary.cash_factor) ++wins[i];
    }
    for (std::size_t k = 0; k < kRegimeCount; ++k) regime_ticks[k] += r.ticks_per_regime[k];
  }
  const auto n = static_cast<double>(paths);
  for (std::size_t i = 0; i < kStockCount; ++i) {
    summary.mean_final_price[i] /= n;
    summary.beats_cash_fraction[i] = static_cast<double>(wins[i]) / n;
  }
  if (ticks > 0) {
    for (std::size_t k = 0; k < kRegimeCount; ++k) {
      summary.regime_share[k] = static_cast<double>(regime_ticks[k]) / (n * static_cast<double>(ticks));
    }
  }
  return summary;
}

void print_summary(const MonteCarloSummary& summary, std::ostream& out) {
  out << "paths " << summary.paths << ", ticks " << summary.ticks << ", cash factor " << std::fixed
      << std::setprecision(6) << summary.cash_factor << "\n\n";
  out << std::left << std::setw(12) << "stock" << std::right << std::setw(18) << "mean final price"
      << std::setw(18) << "beats cash" << '\n';
  for (auto stock : kAllStocks) {
    const auto i = static_cast<std::size_t>(stock);
    out << std::left << std::setw(12) << to_string(stock) << std::right << std::setw(18) << std::setprecision(2)
        << summary.mean_final_price[i] << std::setw(17) << std::setprecision(1)
        << 100.0 * summary.beats_cash_fraction[i] << "%\n";
  }
  out << std::defaultfloat;
}

}  // namespace outcry
