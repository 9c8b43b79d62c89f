// Pitch-class consonance scoring, trading-tune representation and
// scaffold-to-phrase expansion.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace outcry {

enum class Stock : std::uint8_t { Wealth = 0, Protection = 1, Comfort = 2 };
inline constexpr std::size_t kStockCount = 3;
inline constexpr std::array<Stock, kStockCount> kAllStocks = {Stock::Wealth, Stock::Protection,
                                                              Stock::Comfort};

enum class Side : std::uint8_t { Buy = 0, Sell = 1 };

const char* to_string(Stock stock);
const char* to_string(Side side);
Stock parse_stock(const std::string& text);  // case-insensitive, throws std::invalid_argument
Side parse_side(const std::string& text);

class HarmonyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Octave-free pitch; the stored value is always reduced into [0, 11].
class PitchClass {
 public:
  constexpr PitchClass() = default;
  constexpr explicit PitchClass(int semitones) : value_(static_cast<std::uint8_t>(((semitones % 12) + 12) % 12)) {}

  constexpr int value() const { return value_; }
  friend constexpr bool operator==(PitchClass, PitchClass) = default;

 private:
  std::uint8_t value_ = 0;
};

/// Note length on a quarter-beat grid. Stored as a count of grid steps so
/// durations stay exact.
class Duration {
 public:
  static constexpr int kStepsPerBeat = 4;

  constexpr Duration() = default;
  static Duration from_steps(int steps);  // throws HarmonyError when steps <= 0
  static Duration parse(const std::string& text);  // "1/2", "3/4", "2", ...

  constexpr int steps() const { return steps_; }
  constexpr double beats() const { return static_cast<double>(steps_) / kStepsPerBeat; }
  std::string to_string() const;  // reduced rational, e.g. "1/2", "3/4", "1", "5/4"

  friend constexpr bool operator==(Duration, Duration) = default;

 private:
  constexpr explicit Duration(int steps) : steps_(steps) {}
  int steps_ = kStepsPerBeat;
};

struct Note {
  PitchClass pitch;
  Duration duration;

  friend bool operator==(const Note&, const Note&) = default;
};

inline constexpr std::size_t kTuneLength = 4;

struct Tune {
  std::array<Note, kTuneLength> notes{};
  Side role = Side::Buy;
  Stock stock = Stock::Wealth;

  friend bool operator==(const Tune&, const Tune&) = default;
};

/// Interval (semitones mod 12) to consonance score. Values are limited to
/// {6, 5, 3, 1}; semitone, tritone and major seventh score 1 and the major
/// third outranks the fifth.
class IntervalScoreTable {
 public:
  IntervalScoreTable();  // default table
  explicit IntervalScoreTable(const std::array<int, 12>& scores);  // validates, throws HarmonyError

  static IntervalScoreTable load(const std::string& path);

  int operator[](int interval) const { return scores_[static_cast<std::size_t>(((interval % 12) + 12) % 12)]; }
  const std::array<int, 12>& scores() const { return scores_; }

  friend bool operator==(const IntervalScoreTable&, const IntervalScoreTable&) = default;

 private:
  std::array<int, 12> scores_;
};

/// Score of the interval from a up to b, i.e. table[(b - a) mod 12].
int interval_score(PitchClass a, PitchClass b, const IntervalScoreTable& table = {});

/// Mean interval score over note-index pairs with `b` entering `shift` notes
/// after `a`. Durations are ignored. Throws HarmonyError when the overlap is empty.
double tune_pair_consonance(const Tune& a, const Tune& b, int shift,
                            const IntervalScoreTable& table = {});

/// Alignment-averaged consonance of one ordered tune pair: shift 0 once plus
/// shifts 1..3 in both directions.
double shifted_pair_consonance(const Tune& a, const Tune& b, const IntervalScoreTable& table = {});

/// Grand mean of shifted_pair_consonance over all cross pairs. When both sets
/// hold the same tunes, identical-tune pairs are skipped unless the set has a
/// single tune.
double set_consonance(std::span<const Tune> x, std::span<const Tune> y,
                      const IntervalScoreTable& table = {});

struct SungWord {
  std::string text;
  int syllables = 1;

  friend bool operator==(const SungWord&, const SungWord&) = default;
};

struct SungPhrase {
  std::vector<Note> notes;
  std::vector<SungWord> words;  // side, quantity, stock, price
};

/// Repeats scaffold note k once per syllable of the k-th word.
SungPhrase expand_scaffold(const Tune& scaffold, const std::array<SungWord, kTuneLength>& words);
SungPhrase expand_scaffold(const Tune& scaffold, const std::array<int, kTuneLength>& syllable_counts);

}  // namespace outcry
