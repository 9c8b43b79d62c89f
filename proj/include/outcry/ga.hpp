// Genetic search for co-harmonizing buy/sell trading tunes.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "outcry/harmony.hpp"

namespace outcry {

using Rng = std::mt19937_64;

struct TunePair {
  Tune buy;
  Tune sell;

  friend bool operator==(const TunePair&, const TunePair&) = default;
};

/// One candidate: a buy tune and a sell tune for each of the three stocks.
struct Genome {
  std::array<TunePair, kStockCount> pairs{};

  std::array<Tune, kStockCount> buys() const;
  std::array<Tune, kStockCount> sells() const;
  const TunePair& pair(Stock stock) const { return pairs[static_cast<std::size_t>(stock)]; }
  const Tune& tune(Stock stock, Side side) const {
    return side == Side::Buy ? pair(stock).buy : pair(stock).sell;
  }

  /// Flattened note list, stock-major, buy before sell (24 notes).
  std::array<Note, 2 * kStockCount * kTuneLength> flatten() const;
  static Genome from_flat(const std::array<Note, 2 * kStockCount * kTuneLength>& notes);

  /// Roles and stocks match their slots.
  bool valid() const;

  friend bool operator==(const Genome&, const Genome&) = default;
};

/// Genome where every note has the given pitch and duration; handy for tests and demos.
Genome uniform_genome(PitchClass pitch, Duration duration = Duration::from_steps(Duration::kStepsPerBeat));

struct FitnessWeights {
  double buy_sell = 1.5;
  double buy_buy = 1.0;
  double sell_sell = 1.0;  // subtracted
};

inline const std::vector<int> kCMajor = {0, 2, 4, 5, 7, 9, 11};
inline const std::vector<int> kCNaturalMinor = {0, 2, 3, 5, 7, 8, 10};

struct GaConfig {
  std::size_t population_size = 120;
  std::size_t generations = 4000;
  double breed_fraction = 0.20;
  double mutation_prob = 0.25;
  std::size_t elitism_count = 1;
  std::uint64_t seed = 20170101;
  FitnessWeights weights{};
  IntervalScoreTable score_table{};
  std::vector<int> buy_key = kCMajor;
  std::vector<int> sell_key = kCNaturalMinor;
  int min_duration_steps = 1;  // 1/4 beat
  int max_duration_steps = 8;  // 2 beats
  int workers = 0;             // fitness threads; 0 = OpenMP default

  /// Number of top-ranked members allowed to breed.
  std::size_t breeding_pool() const;
  void validate() const;  // throws std::invalid_argument
};

/// 1.5 * buySell + buyBuy - sellSell under the default weights.
double fitness(const Genome& genome, const FitnessWeights& weights = {},
               const IntervalScoreTable& table = {});

/// Fresh random tune in the given key; pitches and grid durations drawn uniformly.
Tune random_tune(Side role, Stock stock, std::span<const int> key, const GaConfig& cfg, Rng& rng);
Genome random_genome(const GaConfig& cfg, Rng& rng);

std::vector<Genome> init_population(const GaConfig& cfg);
std::vector<Genome> init_population(const GaConfig& cfg, Rng& rng);

/// Single-point crossover on the flattened note list. `split` in [1, 23].
Genome crossover(const Genome& first, const Genome& second, std::size_t split);
Genome breed(const Genome& first, const Genome& second, Rng& rng);

/// With probability `mutation_prob`, replaces one stock's buy and sell tunes.
Genome mutate(const Genome& genome, const GaConfig& cfg, Rng& rng);

struct GaResult {
  Genome best;
  double best_fitness = 0.0;
  std::vector<double> history;  // best fitness of each evaluated generation
};

GaResult run_ga(const GaConfig& cfg);

void write_tuneset(const Genome& genome, std::ostream& out);
void export_tunes(const Genome& genome, const std::string& path);
Genome read_tuneset(std::istream& in);
Genome import_tunes(const std::string& path);

}  // namespace outcry
