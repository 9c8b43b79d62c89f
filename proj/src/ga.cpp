#include "outcry/ga.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "outcry/kernels.hpp"

namespace outcry {

namespace {

constexpr std::size_t kFlatLength = 2 * kStockCount * kTuneLength;
constexpr const char* kTuneSetHeader = "tuneset-v1";

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

std::array<Tune, kStockCount> Genome::buys() const {
  std::array<Tune, kStockCount> out;
  for (std::size_t s = 0; s < kStockCount; ++s) out[s] = pairs[s].buy;
  return out;
}

std::array<Tune, kStockCount> Genome::sells() const {
  std::array<Tune, kStockCount> out;
  for (std::size_t s = 0; s < kStockCount; ++s) out[s] = pairs[s].sell;
  return out;
}

std::array<Note, kFlatLength> Genome::flatten() const {
  std::array<Note, kFlatLength> flat;
  auto it = flat.begin();
  for (const auto& pair : pairs) {
    it = std::copy(pair.buy.notes.begin(), pair.buy.notes.end(), it);
    it = std::copy(pair.sell.notes.begin(), pair.sell.notes.end(), it);
  }
  return flat;
}

Genome Genome::from_flat(const std::array<Note, kFlatLength>& notes) {
  Genome g;
  auto it = notes.begin();
  for (std::size_t s = 0; s < kStockCount; ++s) {
    auto& pair = g.pairs[s];
    pair.buy.role = Side::Buy;
    pair.sell.role = Side::Sell;
    pair.buy.stock = pair.sell.stock = kAllStocks[s];
    std::copy_n(it, kTuneLength, pair.buy.notes.begin());
    it += kTuneLength;
    std::copy_n(it, kTuneLength, pair.sell.notes.begin());
    it += kTuneLength;
  }
  return g;
}

bool Genome::valid() const {
  for (std::size_t s = 0; s < kStockCount; ++s) {
    const auto& pair = pairs[s];
    if (pair.buy.role != Side::Buy || pair.sell.role != Side::Sell) return false;
    if (pair.buy.stock != kAllStocks[s] || pair.sell.stock != kAllStocks[s]) return false;
    for (const auto* tune : {&pair.buy, &pair.sell}) {
      for (const auto& note : tune->notes) {
        if (note.duration.steps() <= 0) return false;
      }
    }
  }
  return true;
}

Genome uniform_genome(PitchClass pitch, Duration duration) {
  std::array<Note, kFlatLength> flat;
  flat.fill(Note{pitch, duration});
  return Genome::from_flat(flat);
}

std::size_t GaConfig::breeding_pool() const {
  return static_cast<std::size_t>(std::floor(breed_fraction * static_cast<double>(population_size) + 1e-9));
}

void GaConfig::validate() const {
  if (population_size == 0) throw std::invalid_argument("population size must be positive");
  if (generations == 0) throw std::invalid_argument("generation count must be positive");
  if (!(breed_fraction > 0.0 && breed_fraction <= 1.0)) {
    throw std::invalid_argument("breed fraction must lie in (0, 1]");
  }
  if (breeding_pool() < 2) throw std::invalid_argument("breeding pool must hold at least 2 members");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw std::invalid_argument("mutation probability must lie in [0, 1]");
  }
  if (elitism_count >= population_size) throw std::invalid_argument("elitism must leave room to breed");
  if (buy_key.empty() || sell_key.empty()) throw std::invalid_argument("key pitch sets must be nonempty");
  if (min_duration_steps < 1 || max_duration_steps < min_duration_steps) {
    throw std::invalid_argument("invalid duration range");
  }
}

double fitness(const Genome& genome, const FitnessWeights& weights, const IntervalScoreTable& table) {
  const auto buys = genome.buys();
  const auto sells = genome.sells();
  return weights.buy_sell * set_consonance(buys, sells, table) +
         weights.buy_buy * set_consonance(buys, buys, table) -
         weights.sell_sell * set_consonance(sells, sells, table);
}

Tune random_tune(Side role, Stock stock, std::span<const int> key, const GaConfig& cfg, Rng& rng) {
  std::uniform_int_distribution<int> steps(cfg.min_duration_steps, cfg.max_duration_steps);
  Tune tune;
  tune.role = role;
  tune.stock = stock;
  for (auto& note : tune.notes) {
    note.pitch = PitchClass(key[uniform_index(key.size(), rng)]);
    note.duration = Duration::from_steps(steps(rng));
  }
  return tune;
}

Genome random_genome(const GaConfig& cfg, Rng& rng) {
  Genome g;
  for (std::size_t s = 0; s < kStockCount; ++s) {
    g.pairs[s].buy = random_tune(Side::Buy, kAllStocks[s], cfg.buy_key, cfg, rng);
    g.pairs[s].sell = random_tune(Side::Sell, kAllStocks[s], cfg.sell_key, cfg, rng);
  }
  return g;
}

std::vector<Genome> init_population(const GaConfig& cfg, Rng& rng) {
  std::vector<Genome> population;
  population.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) population.push_back(random_genome(cfg, rng));
  return population;
}

std::vector<Genome> init_population(const GaConfig& cfg) {
  Rng rng(cfg.seed);
  return init_population(cfg, rng);
}

Genome crossover(const Genome& first, const Genome& second, std::size_t split) {
  if (split < 1 || split >= kFlatLength) throw std::out_of_range("crossover split outside [1, 23]");
  auto child = first.flatten();
  const auto tail = second.flatten();
  std::copy(tail.begin() + static_cast<std::ptrdiff_t>(split), tail.end(),
            child.begin() + static_cast<std::ptrdiff_t>(split));
  return Genome::from_flat(child);
}

Genome breed(const Genome& first, const Genome& second, Rng& rng) {
  const auto split = std::uniform_int_distribution<std::size_t>(1, kFlatLength - 1)(rng);
  return crossover(first, second, split);
}

Genome mutate(const Genome& genome, const GaConfig& cfg, Rng& rng) {
  if (!std::bernoulli_distribution(cfg.mutation_prob)(rng)) return genome;
  Genome out = genome;
  const auto s = uniform_index(kStockCount, rng);
  out.pairs[s].buy = random_tune(Side::Buy, kAllStocks[s], cfg.buy_key, cfg, rng);
  out.pairs[s].sell = random_tune(Side::Sell, kAllStocks[s], cfg.sell_key, cfg, rng);
  return out;
}

// All randomness comes from one generator consumed in a fixed order on the
// calling thread; only the (deterministic) fitness evaluation is parallel.
GaResult run_ga(const GaConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  auto population = init_population(cfg, rng);
  std::vector<double> scores(population.size());
  std::vector<std::size_t> order(population.size());
  const std::size_t pool = cfg.breeding_pool();

  GaResult result;
  result.history.reserve(cfg.generations);
  bool have_best = false;

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    kernels::evaluate_fitness_parallel(population, cfg.weights, cfg.score_table, scores, cfg.workers);

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const double gen_best = scores[order.front()];
    result.history.push_back(gen_best);
    if (!have_best || gen_best > result.best_fitness) {
      result.best = population[order.front()];
      result.best_fitness = gen_best;
      have_best = true;
    }
    if (gen + 1 == cfg.generations) break;

    std::vector<Genome> next;
    next.reserve(population.size());
    for (std::size_t e = 0; e < cfg.elitism_count; ++e) next.push_back(population[order[e]]);
    while (next.size() < population.size()) {
      const std::size_t a = uniform_index(pool, rng);
      std::size_t b = uniform_index(pool, rng);
      if (b == a) b = uniform_index(pool, rng);
      Genome child = breed(population[order[a]], population[order[b]], rng);
      next.push_back(mutate(child, cfg, rng));
    }
    population = std::move(next);
  }
  return result;
}

void write_tuneset(const Genome& genome, std::ostream& out) {
  out << kTuneSetHeader << '\n';
  for (const auto& pair : genome.pairs) {
    for (const auto* tune : {&pair.buy, &pair.sell}) {
      out << to_string(tune->stock) << ' ' << to_string(tune->role);
      for (const auto& note : tune->notes) {
        out << ' ' << note.pitch.value() << ':' << note.duration.to_string();
      }
      out << '\n';
    }
  }
}

void export_tunes(const Genome& genome, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tune set '" + path + "'");
  write_tuneset(genome, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing tune set '" + path + "'");
}

Genome read_tuneset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTuneSetHeader) {
    throw std::runtime_error("tune set must start with '" + std::string(kTuneSetHeader) + "'");
  }
  Genome g;
  std::array<std::array<bool, 2>, kStockCount> seen{};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "tune set line " + std::to_string(line_no) + ": ";
    std::istringstream fields(line);
    std::string stock_text;
    std::string side_text;
    fields >> stock_text >> side_text;
    Tune tune;
    try {
      tune.stock = parse_stock(stock_text);
      tune.role = parse_side(side_text);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + e.what());
    }
    for (auto& note : tune.notes) {
      std::string token;
      if (!(fields >> token)) throw std::runtime_error(where + "expected 4 pitch:duration pairs");
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw std::runtime_error(where + "malformed note '" + token + "'");
      int pitch = -1;
      try {
        std::size_t used = 0;
        pitch = std::stoi(token.substr(0, colon), &used);
        if (used != colon) pitch = -1;
      } catch (const std::logic_error&) {
      }
      if (pitch < 0 || pitch > 11) throw std::runtime_error(where + "pitch out of range in '" + token + "'");
      note.pitch = PitchClass(pitch);
      try {
        note.duration = Duration::parse(token.substr(colon + 1));
      } catch (const HarmonyError& e) {
        throw std::runtime_error(where + e.what());
      }
    }
    std::string extra;
    if (fields >> extra) throw std::runtime_error(where + "trailing data '" + extra + "'");
    const auto s = static_cast<std::size_t>(tune.stock);
    const auto r = static_cast<std::size_t>(tune.role);
    if (seen[s][r]) throw std::runtime_error(where + "duplicate tune");
    seen[s][r] = true;
    (tune.role == Side::Buy ? g.pairs[s].buy : g.pairs[s].sell) = tune;
  }
  for (const auto& roles : seen) {
    if (!roles[0] || !roles[1]) throw std::runtime_error("tune set must hold a buy and a sell tune per stock");
  }
  return g;
}

Genome import_tunes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tune set '" + path + "'");
  return read_tuneset(in);
}

}  // namespace outcry
