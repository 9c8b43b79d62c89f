// Independent reference computations for the consonance and fitness tests.
// Deliberately written as plain loops over raw pitch arrays; shares no code
// with the library's scoring path.

#pragma once

#include <array>
#include <random>
#include <vector>

#include "outcry/ga.hpp"

namespace outcry::oracle {

using RawTune = std::array<int, 4>;

inline constexpr std::array<int, 12> kTable = {6, 1, 3, 5, 6, 5, 1, 5, 6, 5, 3, 1};

inline RawTune raw(const Tune& t) {
  return {t.notes[0].pitch.value(), t.notes[1].pitch.value(), t.notes[2].pitch.value(), t.notes[3].pitch.value()};
}

// Offsets -3..3: a positive offset delays the second tune, a negative one the first.
inline double pair_score(const RawTune& a, const RawTune& b, const std::array<int, 12>& table = kTable) {
  double total = 0.0;
  int alignments = 0;
  for (int offset = -3; offset <= 3; ++offset) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        int lead = 0;
        int follow = 0;
        if (offset >= 0 && i - j == offset) {
          lead = a[i];
          follow = b[j];
        } else if (offset < 0 && j - i == -offset) {
          lead = b[j];
          follow = a[i];
        } else {
          continue;
        }
        sum += table[((follow - lead) % 12 + 12) % 12];
        ++count;
      }
    }
    total += sum / count;
    ++alignments;
  }
  return total / alignments;
}

inline double set_score(const std::vector<RawTune>& x, const std::vector<RawTune>& y, bool same_set,
                        const std::array<int, 12>& table = kTable) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (same_set && x.size() > 1 && i == j) continue;
      sum += pair_score(x[i], y[j], table);
      ++n;
    }
  }
  return sum / n;
}

inline double fitness(const Genome& g) {
  std::vector<RawTune> buys;
  std::vector<RawTune> sells;
  for (const auto& p : g.pairs) {
    buys.push_back(raw(p.buy));
    sells.push_back(raw(p.sell));
  }
  return 1.5 * set_score(buys, sells, false) + set_score(buys, buys, true) - set_score(sells, sells, true);
}

}  // namespace outcry::oracle

namespace outcry::testing {

inline Tune tune_of(std::array<int, 4> pitches, Side role = Side::Buy, Stock stock = Stock::Wealth) {
  Tune t;
  t.role = role;
  t.stock = stock;
  for (std::size_t i = 0; i < 4; ++i) t.notes[i] = {PitchClass(pitches[i]), Duration::from_steps(4)};
  return t;
}

inline Tune random_chromatic_tune(std::mt19937_64& rng, Side role = Side::Buy, Stock stock = Stock::Wealth) {
  std::uniform_int_distribution<int> pc(0, 11);
  std::uniform_int_distribution<int> steps(1, 8);
  Tune t;
  t.role = role;
  t.stock = stock;
  for (auto& n : t.notes) n = {PitchClass(pc(rng)), Duration::from_steps(steps(rng))};
  return t;
}

inline Genome random_chromatic_genome(std::mt19937_64& rng) {
  Genome g;
  for (std::size_t s = 0; s < kStockCount; ++s) {
    g.pairs[s].buy = random_chromatic_tune(rng, Side::Buy, kAllStocks[s]);
    g.pairs[s].sell = random_chromatic_tune(rng, Side::Sell, kAllStocks[s]);
  }
  return g;
}

}  // namespace outcry::testing
