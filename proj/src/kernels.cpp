#include "outcry/kernels.hpp"

#include <omp.h>

#include <stdexcept>

namespace outcry::kernels {

namespace {

void check_sizes(std::size_t in, std::size_t out) {
  if (in != out) throw std::invalid_argument("kernel output span size mismatch");
}

Rng path_rng(std::uint64_t seed, std::size_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return Rng(seq);
}

PathResult simulate_one(const MarketParams& params, const HazardParams& hazard, const MarketState& initial,
                        std::size_t ticks, std::uint64_t seed, std::size_t path) {
  Rng rng = path_rng(seed, path);
  MarketState state = initial;
  PathResult result;
  for (std::size_t t = 0; t < ticks; ++t) {
    state = advance_regime(state, hazard, rng);
    ++result.ticks_per_regime[static_cast<std::size_t>(state.regime)];
    state = step_prices(state, params, rng);
  }
  result.final_prices = state.prices;
  return result;
}

int team_size(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace

void evaluate_fitness_serial(std::span<const Genome> population, const FitnessWeights& weights,
                             const IntervalScoreTable& table, std::span<double> out) {
  check_sizes(population.size(), out.size());
  for (std::size_t i = 0; i < population.size(); ++i) out[i] = fitness(population[i], weights, table);
}

void evaluate_fitness_parallel(std::span<const Genome> population, const FitnessWeights& weights,
                               const IntervalScoreTable& table, std::span<double> out, int workers) {
  check_sizes(population.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(population.size());
#pragma omp parallel for schedule(static) num_threads(team_size(workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = fitness(population[k], weights, table);
  }
}

void simulate_paths_serial(const MarketParams& params, const HazardParams& hazard, const MarketState& initial,
                           std::size_t ticks, std::uint64_t seed, std::span<PathResult> out) {
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = simulate_one(params, hazard, initial, ticks, seed, p);
}

void simulate_paths_parallel(const MarketParams& params, const HazardParams& hazard, const MarketState& initial,
                             std::size_t ticks, std::uint64_t seed, std::span<PathResult> out, int workers) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(team_size(workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(i);
    out[p] = simulate_one(params, hazard, initial, ticks, seed, p);
  }
}

}  // namespace outcry::kernels
