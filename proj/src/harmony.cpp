#include "outcry/harmony.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace outcry {

namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

// Interval 8 mirrors the major third so the table stays symmetric.
constexpr std::array<int, 12> kDefaultScores = {6, 1, 3, 5, 6, 5, 1, 5, 6, 5, 3, 1};

void validate_scores(const std::array<int, 12>& scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int s = scores[i];
    if (s != 6 && s != 5 && s != 3 && s != 1) {
      throw HarmonyError("score table: interval " + std::to_string(i) + " has score " +
                         std::to_string(s) + ", expected one of 6, 5, 3, 1");
    }
  }
  if (scores[1] != 1 || scores[6] != 1 || scores[11] != 1) {
    throw HarmonyError("score table: semitone, tritone and major seventh must score 1");
  }
  if (scores[4] <= scores[7]) {
    throw HarmonyError("score table: major third must outscore the fifth");
  }
}

bool same_tunes(std::span<const Tune> x, std::span<const Tune> y) {
  return x.data() == y.data() ? x.size() == y.size() : std::ranges::equal(x, y);
}

}  // namespace

const char* to_string(Stock stock) {
  switch (stock) {
    case Stock::Wealth:
      return "Wealth";
    case Stock::Protection:
      return "Protection";
    case Stock::Comfort:
      return "Comfort";
  }
  return "?";
}

const char* to_string(Side side) { return side == Side::Buy ? "buy" : "sell"; }

Stock parse_stock(const std::string& text) {
  const std::string t = lower(text);
  if (t == "wealth") return Stock::Wealth;
  if (t == "protection") return Stock::Protection;
  if (t == "comfort") return Stock::Comfort;
  throw std::invalid_argument("unknown stock '" + text + "'");
}

Side parse_side(const std::string& text) {
  const std::string t = lower(text);
  if (t == "buy") return Side::Buy;
  if (t == "sell") return Side::Sell;
  throw std::invalid_argument("unknown side '" + text + "'");
}

Duration Duration::from_steps(int steps) {
  if (steps <= 0) throw HarmonyError("duration must be positive");
  return Duration(steps);
}

Duration Duration::parse(const std::string& text) {
  long num = 0;
  long den = 1;
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    num = std::stol(text.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? text.size() : slash)) throw std::invalid_argument(text);
    if (slash != std::string::npos) {
      const std::string tail = text.substr(slash + 1);
      den = std::stol(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw HarmonyError("malformed duration '" + text + "'");
  }
  if (num <= 0 || den <= 0) throw HarmonyError("duration must be positive: '" + text + "'");
  if ((num * kStepsPerBeat) % den != 0) {
    throw HarmonyError("duration '" + text + "' is off the quarter-beat grid");
  }
  return from_steps(static_cast<int>(num * kStepsPerBeat / den));
}

std::string Duration::to_string() const {
  const int g = std::gcd(steps_, kStepsPerBeat);
  const int num = steps_ / g;
  const int den = kStepsPerBeat / g;
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

IntervalScoreTable::IntervalScoreTable() : scores_(kDefaultScores) {}

IntervalScoreTable::IntervalScoreTable(const std::array<int, 12>& scores) : scores_(scores) {
  validate_scores(scores_);
}

IntervalScoreTable IntervalScoreTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarmonyError("cannot open score table '" + path + "'");
  std::array<int, 12> scores{};
  for (auto& s : scores) {
    if (!(in >> s)) throw HarmonyError("score table '" + path + "' needs 12 integers");
  }
  std::string extra;
  if (in >> extra) throw HarmonyError("score table '" + path + "' has trailing data");
  return IntervalScoreTable(scores);
}

int interval_score(PitchClass a, PitchClass b, const IntervalScoreTable& table) {
  return table[b.value() - a.value()];
}

double tune_pair_consonance(const Tune& a, const Tune& b, int shift, const IntervalScoreTable& table) {
  if (shift < 0 || shift >= static_cast<int>(kTuneLength)) {
    throw HarmonyError("shift " + std::to_string(shift) + " leaves no overlapping notes");
  }
  const auto overlap = kTuneLength - static_cast<std::size_t>(shift);
  int total = 0;
  for (std::size_t i = 0; i < overlap; ++i) {
    total += interval_score(a.notes[i + static_cast<std::size_t>(shift)].pitch, b.notes[i].pitch, table);
  }
  return static_cast<double>(total) / static_cast<double>(overlap);
}

double shifted_pair_consonance(const Tune& a, const Tune& b, const IntervalScoreTable& table) {
  double sum = tune_pair_consonance(a, b, 0, table);
  for (int shift = 1; shift < static_cast<int>(kTuneLength); ++shift) {
    sum += tune_pair_consonance(a, b, shift, table);
    sum += tune_pair_consonance(b, a, shift, table);
  }
  return sum / static_cast<double>(2 * kTuneLength - 1);
}

double set_consonance(std::span<const Tune> x, std::span<const Tune> y, const IntervalScoreTable& table) {
  if (x.empty() || y.empty()) throw HarmonyError("set_consonance needs nonempty tune sets");
  const bool skip_self = same_tunes(x, y) && x.size() > 1;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (skip_self && i == j) continue;
      sum += shifted_pair_consonance(x[i], y[j], table);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

SungPhrase expand_scaffold(const Tune& scaffold, const std::array<SungWord, kTuneLength>& words) {
  SungPhrase phrase;
  for (std::size_t slot = 0; slot < kTuneLength; ++slot) {
    if (words[slot].syllables < 1) {
      throw HarmonyError("word '" + words[slot].text + "' needs at least one syllable");
    }
    phrase.notes.insert(phrase.notes.end(), static_cast<std::size_t>(words[slot].syllables),
                        scaffold.notes[slot]);
  }
  phrase.words.assign(words.begin(), words.end());
  return phrase;
}

SungPhrase expand_scaffold(const Tune& scaffold, const std::array<int, kTuneLength>& syllable_counts) {
  std::array<SungWord, kTuneLength> words;
  for (std::size_t slot = 0; slot < kTuneLength; ++slot) {
    words[slot] = SungWord{"", syllable_counts[slot]};
  }
  return expand_scaffold(scaffold, words);
}

}  // namespace outcry
