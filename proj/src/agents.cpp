#include "outcry/agents.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace outcry {

namespace {

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

// Units per quarter-beat grid step at each tempo factor.
std::int64_t units_per_step(TempoFactor factor) {
  switch (factor) {
    case TempoFactor::Half:
      return 4;
    case TempoFactor::Normal:
      return 2;
    case TempoFactor::Double:
      return 1;
  }
  return 2;
}

}  // namespace

Schedule read_schedule(std::istream& in) {
  Schedule schedule;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Segment seg;
    long long ticks = 0;
    if (!(fields >> ticks)) continue;
    std::string extra;
    if (!(fields >> seg.density >> seg.buy_bias) || (fields >> extra)) {
      throw std::runtime_error("schedule line " + std::to_string(line_no) +
                               ": expected 'duration_ticks density buy_bias'");
    }
    if (ticks <= 0) throw std::runtime_error("schedule line " + std::to_string(line_no) + ": duration must be positive");
    seg.duration_ticks = static_cast<std::uint64_t>(ticks);
    if (!(seg.density >= 0.0 && seg.density <= 1.0) || !(seg.buy_bias >= 0.0 && seg.buy_bias <= 1.0)) {
      throw std::runtime_error("schedule line " + std::to_string(line_no) + ": density and buy_bias must lie in [0, 1]");
    }
    schedule.push_back(seg);
  }
  if (schedule.empty()) throw std::runtime_error("schedule has no segments");
  return schedule;
}

Schedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule '" + path + "'");
  return read_schedule(in);
}

double to_double(TempoFactor factor) {
  switch (factor) {
    case TempoFactor::Half:
      return 0.5;
    case TempoFactor::Normal:
      return 1.0;
    case TempoFactor::Double:
      return 2.0;
  }
  return 1.0;
}

void AgentSimConfig::validate() const {
  if (n_agents == 0) throw std::invalid_argument("need at least one agent");
  if (!tunes.valid()) throw std::invalid_argument("tune set is not a valid genome");
  if (!(base_tempo_bpm > 0.0)) throw std::invalid_argument("tempo must be positive");
  if (repeat_min < 1 || repeat_max < repeat_min) throw std::invalid_argument("invalid repeat range");
  if (beats_per_tick < 1) throw std::invalid_argument("beats per tick must be positive");
  if (words.quantities.empty() || words.prices.empty()) throw std::invalid_argument("word bank is empty");
  for (const auto& seg : schedule) {
    if (seg.duration_ticks == 0) throw std::invalid_argument("schedule segments need positive duration");
    if (!(seg.density >= 0.0 && seg.density <= 1.0) || !(seg.buy_bias >= 0.0 && seg.buy_bias <= 1.0)) {
      throw std::invalid_argument("segment density and buy_bias must lie in [0, 1]");
    }
  }
}

std::uint64_t AgentSimConfig::total_ticks() const {
  std::uint64_t total = 0;
  for (const auto& seg : schedule) total += seg.duration_ticks;
  return total;
}

std::int64_t MusicEvent::note_units(const Note& note) const { return note.duration.steps() * units_per_step(tempo); }

std::int64_t MusicEvent::phrase_units() const {
  std::int64_t total = 0;
  for (const auto& note : phrase.notes) total += note_units(note);
  return total;
}

int agent_base_pitch(std::size_t agent) { return 48 + 12 * static_cast<int>(agent % 3); }

AgentSimulator::AgentSimulator(AgentSimConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), busy_until_(cfg_.n_agents, 0) {
  cfg_.validate();
}

MusicEvent AgentSimulator::initiate(std::size_t agent, const Segment& segment, std::int64_t start) {
  MusicEvent e;
  e.agent = agent;
  e.start = start;
  e.side = std::bernoulli_distribution(segment.buy_bias)(rng_) ? Side::Buy : Side::Sell;
  e.stock = kAllStocks[std::uniform_int_distribution<std::size_t>(0, kStockCount - 1)(rng_)];
  const auto& words = cfg_.words;
  const std::array<SungWord, kTuneLength> phrase_words = {
      words.sides[static_cast<std::size_t>(e.side)],
      pick(words.quantities, rng_),
      words.stocks[static_cast<std::size_t>(e.stock)],
      pick(words.prices, rng_),
  };
  e.phrase = expand_scaffold(cfg_.tunes.tune(e.stock, e.side), phrase_words);
  e.tempo = static_cast<TempoFactor>(std::uniform_int_distribution<int>(0, 2)(rng_));
  e.repeats = std::uniform_int_distribution<int>(cfg_.repeat_min, cfg_.repeat_max)(rng_);
  return e;
}

std::vector<MusicEvent> AgentSimulator::step(const Segment& segment, std::uint64_t tick) {
  const std::int64_t now = static_cast<std::int64_t>(tick) * cfg_.beats_per_tick * kUnitsPerBeat;
  std::vector<MusicEvent> events;
  std::bernoulli_distribution initiates(segment.density);
  for (std::size_t agent = 0; agent < cfg_.n_agents; ++agent) {
    if (busy_until_[agent] > now) continue;
    if (!initiates(rng_)) continue;
    events.push_back(initiate(agent, segment, now));
    busy_until_[agent] = events.back().end();
  }
  return events;
}

MusicEventTrack render_track(const std::vector<MusicEvent>& events, const AgentSimConfig& cfg) {
  MusicEventTrack track;
  track.n_agents = cfg.n_agents;
  track.tempo_bpm = cfg.base_tempo_bpm;
  for (const auto& e : events) {
    std::int64_t onset = e.start;
    for (int rep = 0; rep < e.repeats; ++rep) {
      for (const auto& note : e.phrase.notes) {
        const auto len = e.note_units(note);
        track.notes.push_back({e.agent, onset, len, agent_base_pitch(e.agent) + note.pitch.value()});
        onset += len;
      }
    }
  }
  std::stable_sort(track.notes.begin(), track.notes.end(), [](const RenderedNote& a, const RenderedNote& b) {
    return std::tie(a.onset, a.agent) < std::tie(b.onset, b.agent);
  });
  return track;
}

midi::File to_midi(const MusicEventTrack& track) {
  constexpr std::int64_t kTicksPerUnit = kMidiTicksPerQuarter / kUnitsPerBeat;
  midi::File file;
  file.ticks_per_quarter = static_cast<std::uint16_t>(kMidiTicksPerQuarter);
  file.microseconds_per_quarter = static_cast<std::uint32_t>(60'000'000.0 / track.tempo_bpm + 0.5);
  file.tracks.resize(track.n_agents + 1);
  file.tracks[0].name = "tempo";
  for (std::size_t a = 0; a < track.n_agents; ++a) file.tracks[a + 1].name = "agent " + std::to_string(a + 1);
  for (const auto& n : track.notes) {
    // Channel 9 is percussion in General MIDI; skip it.
    auto channel = static_cast<std::uint8_t>(n.agent % 15);
    if (channel >= 9) ++channel;
    file.tracks[n.agent + 1].notes.push_back({static_cast<std::uint32_t>(n.onset * kTicksPerUnit),
                                              static_cast<std::uint32_t>(n.duration * kTicksPerUnit), channel,
                                              static_cast<std::uint8_t>(n.midi_pitch), 90});
  }
  return file;
}

void write_music_file(const MusicEventTrack& track, const std::string& path) { midi::write_file(to_midi(track), path); }

double SimulationSummary::buy_fraction() const {
  return events() == 0 ? 0.0 : static_cast<double>(buy_events) / static_cast<double>(events());
}

SimulationRun simulate(const AgentSimConfig& cfg) {
  AgentSimulator sim(cfg);
  SimulationRun run;
  std::uint64_t tick = 0;
  for (const auto& seg : cfg.schedule) {
    std::size_t count = 0;
    for (std::uint64_t t = 0; t < seg.duration_ticks; ++t, ++tick) {
      for (auto& e : sim.step(seg, tick)) {
        ++count;
        (e.side == Side::Buy ? run.summary.buy_events : run.summary.sell_events) += 1;
        run.events.push_back(std::move(e));
      }
    }
    run.summary.events_per_segment.push_back(count);
  }
  run.track = render_track(run.events, cfg);
  run.summary.notes = run.track.notes.size();
  return run;
}

SimulationSummary run_simulation(const AgentSimConfig& cfg, const std::string& path) {
  auto run = simulate(cfg);
  write_music_file(run.track, path);
  return run.summary;
}

}  // namespace outcry
