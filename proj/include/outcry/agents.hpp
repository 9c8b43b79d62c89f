// Multi-agent sound-world simulation: simulated traders sing buy/sell tunes
// under a density / buy-bias schedule, rendered to a Standard MIDI File so a
// candidate tune set can be auditioned.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "outcry/ga.hpp"
#include "outcry/harmony.hpp"
#include "outcry/midi.hpp"

namespace outcry {

/// Rendered timing unit: 1/8 beat, exact for quarter-beat notes at half,
/// normal and double speed.
inline constexpr std::int64_t kUnitsPerBeat = 8;
inline constexpr std::uint32_t kMidiTicksPerQuarter = 480;

struct Segment {
  std::uint64_t duration_ticks = 0;
  double density = 0.0;   // per idle agent, per tick
  double buy_bias = 0.5;  // probability an initiated phrase is a buy

  friend bool operator==(const Segment&, const Segment&) = default;
};

using Schedule = std::vector<Segment>;

/// One segment per line: `duration_ticks density buy_bias`; '#' starts a comment.
Schedule read_schedule(std::istream& in);
Schedule load_schedule(const std::string& path);

struct WordBank {
  std::array<SungWord, 2> sides = {SungWord{"Buy", 1}, SungWord{"Sell", 1}};
  std::array<SungWord, kStockCount> stocks = {SungWord{"Wealth", 1}, SungWord{"Pro-tec-tion", 3},
                                              SungWord{"Com-fort", 2}};
  std::vector<SungWord> quantities = {{"One", 1},      {"Two", 1},     {"Five", 1}, {"Ten", 1},
                                      {"Twen-ty", 2},  {"Fif-ty", 2},  {"Se-ven", 2}};
  std::vector<SungWord> prices = {{"Ten", 1},         {"Twen-ty", 2},      {"Thir-ty", 2},
                                  {"Fif-ty", 2},      {"Se-ven-ty", 3},    {"Eigh-ty", 2},
                                  {"One-Hun-dred", 3}};
};

enum class TempoFactor : std::uint8_t { Half, Normal, Double };

double to_double(TempoFactor factor);

struct AgentSimConfig {
  std::size_t n_agents = 12;
  Genome tunes;
  Schedule schedule;
  std::uint64_t seed = 1;
  double base_tempo_bpm = 120.0;
  int repeat_min = 2;
  int repeat_max = 4;
  std::int64_t beats_per_tick = 1;
  WordBank words;

  void validate() const;  // throws std::invalid_argument
  std::uint64_t total_ticks() const;
};

/// A sung trade phrase, repeated `repeats` times back to back.
struct MusicEvent {
  std::size_t agent = 0;
  Side side = Side::Buy;
  Stock stock = Stock::Wealth;
  std::int64_t start = 0;  // units
  TempoFactor tempo = TempoFactor::Normal;
  int repeats = 1;
  SungPhrase phrase;

  std::int64_t note_units(const Note& note) const;
  std::int64_t phrase_units() const;
  std::int64_t end() const { return start + repeats * phrase_units(); }
};

struct RenderedNote {
  std::size_t agent = 0;
  std::int64_t onset = 0;     // units
  std::int64_t duration = 0;  // units
  int midi_pitch = 60;

  friend bool operator==(const RenderedNote&, const RenderedNote&) = default;
};

struct MusicEventTrack {
  std::size_t n_agents = 0;
  double tempo_bpm = 120.0;
  std::vector<RenderedNote> notes;  // ordered by onset, then agent
};

/// Fixed octave for each agent, round-robin over three registers starting at C3.
int agent_base_pitch(std::size_t agent);

class AgentSimulator {
 public:
  explicit AgentSimulator(AgentSimConfig cfg);

  /// Idle agents initiate with probability `segment.density`; busy agents are skipped.
  std::vector<MusicEvent> step(const Segment& segment, std::uint64_t tick);

  const AgentSimConfig& config() const { return cfg_; }

 private:
  MusicEvent initiate(std::size_t agent, const Segment& segment, std::int64_t start);

  AgentSimConfig cfg_;
  Rng rng_;
  std::vector<std::int64_t> busy_until_;
};

MusicEventTrack render_track(const std::vector<MusicEvent>& events, const AgentSimConfig& cfg);

/// Format 1: tempo track plus one track per agent.
midi::File to_midi(const MusicEventTrack& track);
void write_music_file(const MusicEventTrack& track, const std::string& path);

struct SimulationSummary {
  std::vector<std::size_t> events_per_segment;
  std::size_t buy_events = 0;
  std::size_t sell_events = 0;
  std::size_t notes = 0;

  std::size_t events() const { return buy_events + sell_events; }
  double buy_fraction() const;
};

struct SimulationRun {
  std::vector<MusicEvent> events;
  MusicEventTrack track;
  SimulationSummary summary;
};

SimulationRun simulate(const AgentSimConfig& cfg);
SimulationSummary run_simulation(const AgentSimConfig& cfg, const std::string& path);

}  // namespace outcry
