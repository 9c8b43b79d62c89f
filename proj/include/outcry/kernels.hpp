// Data-parallel kernels. Each has a serial reference with identical results;
// tests compare the two and the benchmark target times them.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "outcry/ga.hpp"
#include "outcry/market.hpp"

namespace outcry::kernels {

void evaluate_fitness_serial(std::span<const Genome> population, const FitnessWeights& weights,
                             const IntervalScoreTable& table, std::span<double> out);

/// `workers` <= 0 uses the OpenMP default team size.
void evaluate_fitness_parallel(std::span<const Genome> population, const FitnessWeights& weights,
                               const IntervalScoreTable& table, std::span<double> out,
                               int workers = 0);

/// Final prices of independent market paths. Path p draws from its own
/// generator seeded by (seed, p), so results do not depend on the team size.
struct PathResult {
  std::array<double, kStockCount> final_prices{};
  std::array<std::size_t, 3> ticks_per_regime{};
};

void simulate_paths_serial(const MarketParams& params, const HazardParams& hazard,
                           const MarketState& initial, std::size_t ticks, std::uint64_t seed, std::span<PathResult> out);

void simulate_paths_parallel(const MarketParams& params, const HazardParams& hazard,
                             const MarketState& initial, std::size_t ticks, std::uint64_t seed, std::span<PathResult> out,
                             int workers = 0);

}  // namespace outcry::kernels
