// outcry: compose trading tunes, audition them, simulate the market, serve or
// replay a live performance.

#include <chrono>
#include <csignal>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "outcry/agents.hpp"
#include "outcry/ga.hpp"
#include "outcry/monte_carlo.hpp"
#include "outcry/performance.hpp"
#include "outcry/service.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 2017;
volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int compose(std::uint64_t seed, std::size_t pop, std::size_t gens, int workers, const std::string& out,
            const std::string& table_path) {
  outcry::GaConfig cfg;
  cfg.seed = seed;
  cfg.population_size = pop;
  cfg.generations = gens;
  cfg.workers = workers;
  if (!table_path.empty()) cfg.score_table = outcry::IntervalScoreTable::load(table_path);
  const auto result = outcry::run_ga(cfg);
  outcry::export_tunes(result.best, out);

  const auto buys = result.best.buys();
  const auto sells = result.best.sells();
  std::cout << "best fitness " << std::fixed << std::setprecision(4) << result.best_fitness << "\n"
            << "  buy/sell  " << outcry::set_consonance(buys, sells, cfg.score_table) << "\n"
            << "  buy/buy   " << outcry::set_consonance(buys, buys, cfg.score_table) << "\n"
            << "  sell/sell " << outcry::set_consonance(sells, sells, cfg.score_table) << "\n"
            << "wrote " << out << "\n";
  return 0;
}

int simulate_sound(const std::string& tunes, const std::string& schedule, std::uint64_t seed, std::size_t agents,
                   double tempo, const std::string& out) {
  outcry::AgentSimConfig cfg;
  cfg.tunes = outcry::import_tunes(tunes);
  cfg.schedule = outcry::load_schedule(schedule);
  cfg.seed = seed;
  cfg.n_agents = agents;
  cfg.base_tempo_bpm = tempo;
  const auto summary = outcry::run_simulation(cfg, out);
  std::cout << "segment  events\n";
  for (std::size_t i = 0; i < summary.events_per_segment.size(); ++i) {
    std::cout << std::setw(7) << i + 1 << std::setw(8) << summary.events_per_segment[i] << "\n";
  }
  std::cout << "buy " << summary.buy_events << ", sell " << summary.sell_events << ", buy fraction " << std::fixed
            << std::setprecision(3) << summary.buy_fraction() << ", notes " << summary.notes << "\n"
            << "wrote " << out << "\n";
  return 0;
}

int simulate_market(const std::string& config, std::size_t paths, std::size_t ticks, std::uint64_t seed,
                    double inflation, int workers) {
  const auto cfg = config.empty() ? outcry::default_market_config() : outcry::load_market_config(config);
  outcry::print_summary(outcry::run_market_monte_carlo(cfg, paths, ticks, seed, inflation, workers), std::cout);
  return 0;
}

int serve(const std::string& config, const std::string& host, int port, const std::string& log, int tick_ms) {
  auto cfg = config.empty() ? outcry::PerformanceConfig{} : outcry::load_performance_config(config);
  outcry::ServiceOptions options;
  if (!log.empty()) options.log_path = log;
  if (tick_ms > 0) options.tick_period = std::chrono::milliseconds(tick_ms);
  outcry::Service service(std::move(cfg), options);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int bound = service.start(host, port);
  std::cout << "serving on http://" << host << ":" << bound << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  return 0;
}

int replay(const std::string& log) {
  const auto records = outcry::read_event_log(log);
  const auto state = outcry::replay(records);
  const auto snap = outcry::make_snapshot(state);
  std::cout << "records " << records.size() << ", tick " << snap.tick << "\n" << std::fixed << std::setprecision(2);
  for (auto stock : outcry::kAllStocks) {
    std::cout << std::left << std::setw(12) << outcry::to_string(stock) << std::right
              << snap.prices[static_cast<std::size_t>(stock)] << "\n";
  }
  std::cout << "\ntrader       value    share\n";
  for (const auto& view : snap.portfolios) {
    std::cout << std::setw(6) << view.trader << std::setw(12) << view.value;
    const auto i = static_cast<std::size_t>(view.trader - 1);
    if (i < state.payout_shares.size()) std::cout << std::setw(8) << std::setprecision(1) << 100.0 * state.payout_shares[i] << "%" << std::setprecision(2);
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-outcry opera engine: tune composition, sound-world simulation, market and live performance"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  int workers = 0;

  auto* compose_cmd = app.add_subcommand("compose", "Evolve a buy/sell tune set and export it");
  std::size_t pop = 120;
  std::size_t gens = 4000;
  std::string tunes_out;
  std::string table_path;
  compose_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  compose_cmd->add_option("--pop", pop, "Population size")->capture_default_str()->check(CLI::PositiveNumber);
  compose_cmd->add_option("--gens", gens, "Generations")->capture_default_str()->check(CLI::PositiveNumber);
  compose_cmd->add_option("--workers", workers, "Fitness threads (0 = all)")->capture_default_str();
  compose_cmd->add_option("--out", tunes_out, "Tune set output file")->required();
  compose_cmd->add_option("--score-table", table_path, "Interval score table (12 integers)")->check(CLI::ExistingFile);

  auto* sound_cmd = app.add_subcommand("simulate-sound", "Render a multi-agent sound world to a MIDI file");
  std::string tunes_in;
  std::string schedule;
  std::string midi_out;
  std::size_t agents = 12;
  double tempo = 120.0;
  sound_cmd->add_option("--tunes", tunes_in, "Tune set file")->required()->check(CLI::ExistingFile);
  sound_cmd->add_option("--schedule", schedule, "Schedule file")->required()->check(CLI::ExistingFile);
  sound_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  sound_cmd->add_option("--agents", agents, "Number of agents")->capture_default_str()->check(CLI::PositiveNumber);
  sound_cmd->add_option("--tempo", tempo, "Base tempo in BPM")->capture_default_str()->check(CLI::PositiveNumber);
  sound_cmd->add_option("--out", midi_out, "MIDI output file")->required();

  auto* market_cmd = app.add_subcommand("simulate-market", "Monte Carlo summary of the market model");
  std::string market_config;
  std::size_t paths = 1000;
  std::size_t ticks = 120;
  double inflation = 0.002;
  market_cmd->add_option("--config", market_config, "Market config (JSON)")->check(CLI::ExistingFile);
  market_cmd->add_option("--paths", paths, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
  market_cmd->add_option("--ticks", ticks, "Ticks per path")->capture_default_str();
  market_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  market_cmd->add_option("--inflation", inflation, "Cash inflation per tick")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  market_cmd->add_option("--workers", workers, "Threads (0 = all)")->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the live performance service");
  std::string perf_config;
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string log_path;
  int tick_ms = 0;
  serve_cmd->add_option("--config", perf_config, "Performance config (JSON)")->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--log", log_path, "Event log output (NDJSON)");
  serve_cmd->add_option("--tick-ms", tick_ms, "Override the tick period in milliseconds");

  auto* replay_cmd = app.add_subcommand("replay", "Rebuild a performance from its event log");
  std::string replay_log;
  replay_cmd->add_option("--log", replay_log, "Event log (NDJSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (argc <= 1) std::cout << app.help();
    return 1;
  }

  try {
    if (*compose_cmd) return compose(seed, pop, gens, workers, tunes_out, table_path);
    if (*sound_cmd) return simulate_sound(tunes_in, schedule, seed, agents, tempo, midi_out);
    if (*market_cmd) return simulate_market(market_config, paths, ticks, seed, inflation, workers);
    if (*serve_cmd) return serve(perf_config, host, port, log_path, tick_ms);
    if (*replay_cmd) return replay(replay_log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
