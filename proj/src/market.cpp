#include "outcry/market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace outcry {

namespace {

using nlohmann::json;

constexpr double kFactorTolerance = 1e-12;

Matrix3 covariance_from(const Vector3& vol, const Matrix3& corr) {
  Matrix3 cov{};
  for (std::size_t i = 0; i < kStockCount; ++i) {
    for (std::size_t j = 0; j < kStockCount; ++j) cov[i][j] = vol[i] * vol[j] * corr[i][j];
  }
  return cov;
}

void check_ordering(const Vector3& v, Regime r, const char* what) {
  const auto w = static_cast<std::size_t>(Stock::Wealth);
  const auto p = static_cast<std::size_t>(Stock::Protection);
  const auto c = static_cast<std::size_t>(Stock::Comfort);
  if (!(v[w] > v[p] && v[p] > v[c])) {
    throw ConfigError(std::string(to_string(r)) + " " + what +
                      " must be ordered Wealth > Protection > Comfort");
  }
}

Vector3 read_vector(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("market config: missing '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_array()) {
    if (v.size() != kStockCount) throw ConfigError("market config: '" + key + "' needs 3 entries");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }
  Vector3 out{};
  for (auto stock : kAllStocks) out[static_cast<std::size_t>(stock)] = v.at(to_string(stock)).get<double>();
  return out;
}

Matrix3 read_matrix(const json& j) {
  if (!j.is_array() || j.size() != kStockCount) throw ConfigError("market config: matrices must be 3x3");
  Matrix3 m{};
  for (std::size_t i = 0; i < kStockCount; ++i) {
    if (!j[i].is_array() || j[i].size() != kStockCount) throw ConfigError("market config: matrices must be 3x3");
    for (std::size_t k = 0; k < kStockCount; ++k) m[i][k] = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Boom:
      return "boom";
    case Regime::Normal:
      return "normal";
    case Regime::Bust:
      return "bust";
  }
  return "?";
}

Regime parse_regime(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "boom") return Regime::Boom;
  if (t == "normal") return Regime::Normal;
  if (t == "bust") return Regime::Bust;
  throw std::invalid_argument("unknown regime '" + text + "'");
}

Matrix3 cholesky_psd(const Matrix3& cov) {
  double scale = 0.0;
  for (std::size_t i = 0; i < kStockCount; ++i) {
    for (std::size_t j = 0; j < kStockCount; ++j) {
      if (!std::isfinite(cov[i][j])) throw ConfigError("covariance has non-finite entries");
      if (std::abs(cov[i][j] - cov[j][i]) > kFactorTolerance * std::max(1.0, std::abs(cov[i][j]))) {
        throw ConfigError("covariance is not symmetric");
      }
    }
    scale = std::max(scale, std::abs(cov[i][i]));
  }
  const double tol = kFactorTolerance * std::max(scale, 1e-300);

  Matrix3 l{};
  for (std::size_t j = 0; j < kStockCount; ++j) {
    double d = cov[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -tol) throw ConfigError("covariance is not positive semi-definite");
    if (d <= tol) {
      for (std::size_t i = j + 1; i < kStockCount; ++i) {
        double r = cov[i][j];
        for (std::size_t k = 0; k < j; ++k) r -= l[i][k] * l[j][k];
        if (std::abs(r) > 1e3 * tol) throw ConfigError("covariance is not positive semi-definite");
      }
      continue;
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < kStockCount; ++i) {
      double r = cov[i][j];
      for (std::size_t k = 0; k < j; ++k) r -= l[i][k] * l[j][k];
      l[i][j] = r / l[j][j];
    }
  }
  return l;
}

MarketParams MarketParams::create(const std::array<RegimeParams, kRegimeCount>& regimes, bool enforce_orderings) {
  MarketParams params;
  params.regimes_ = regimes;
  for (auto r : kAllRegimes) {
    const auto idx = static_cast<std::size_t>(r);
    for (double m : regimes[idx].mu) {
      if (!std::isfinite(m)) throw ConfigError(std::string(to_string(r)) + " drift is not finite");
    }
    params.factors_[idx] = cholesky_psd(regimes[idx].cov);
  }
  if (enforce_orderings) {
    for (auto r : {Regime::Normal, Regime::Boom}) {
      const auto& rp = params.regime(r);
      check_ordering(rp.mu, r, "drift");
      check_ordering({rp.cov[0][0], rp.cov[1][1], rp.cov[2][2]}, r, "variance");
    }
    for (double m : params.regime(Regime::Boom).mu) {
      if (m <= 0.0) throw ConfigError("boom drifts must all be positive");
    }
    for (double m : params.regime(Regime::Bust).mu) {
      if (m >= 0.0) throw ConfigError("bust drifts must all be negative");
    }
  }
  return params;
}

void HazardParams::validate() const {
  if (!(p0 >= 0.0 && p0 <= cap && cap <= 1.0)) throw ConfigError("hazard needs 0 <= p0 <= cap <= 1");
  if (!(lambda >= 0.0)) throw ConfigError("hazard growth must be nonnegative");
}

double HazardParams::switch_probability(std::uint64_t ticks_in_regime) const {
  return std::min(cap, p0 + lambda * static_cast<double>(ticks_in_regime));
}

MarketState MarketConfig::initial_state() const {
  MarketState s;
  s.prices = initial_prices;
  s.regime = initial_regime;
  return s;
}

MarketConfig default_market_config() {
  const Matrix3 corr = {{{1.0, 0.5, 0.3}, {0.5, 1.0, 0.4}, {0.3, 0.4, 1.0}}};
  const Vector3 vol = {0.030, 0.020, 0.010};
  const Vector3 bust_vol = {0.045, 0.030, 0.015};

  std::array<RegimeParams, kRegimeCount> regimes;
  regimes[static_cast<std::size_t>(Regime::Boom)] = {{0.004, 0.0025, 0.001}, covariance_from(vol, corr)};
  regimes[static_cast<std::size_t>(Regime::Normal)] = {{0.0005, 0.0003, 0.0001}, covariance_from(vol, corr)};
  regimes[static_cast<std::size_t>(Regime::Bust)] = {{-0.006, -0.004, -0.0015}, covariance_from(bust_vol, corr)};

  MarketConfig cfg{MarketParams::create(regimes), HazardParams{}, {100.0, 100.0, 100.0}, Regime::Normal, {}, 15.0, 1};
  cfg.news[static_cast<std::size_t>(Regime::Boom)] = {
      "Investors increase allocation to risky assets",
      "Consumer confidence hits a five-year high",
      "Record order books reported across manufacturing",
  };
  cfg.news[static_cast<std::size_t>(Regime::Normal)] = {
      "Investment sentiment balanced as GDP expectations unchanged",
      "Central bank holds rates steady",
      "Analysts see a quiet quarter ahead",
  };
  cfg.news[static_cast<std::size_t>(Regime::Bust)] = {
      "Global demand slumps, sharply reducing asset price expectations",
      "Credit markets seize up as lenders retreat",
      "Layoffs spread as earnings warnings multiply",
  };
  return cfg;
}

// Schema: {"tick_seconds", "seed", "initial_prices", "initial_regime",
// "hazard": {"p0","lambda","cap"}, "correlation": 3x3,
// "regimes": {"boom"|"normal"|"bust": {"mu", "vol" | "cov"}},
// "news": {"boom"|"normal"|"bust": [...]}, "enforce_orderings"}
// Missing keys fall back to the defaults.
MarketConfig market_config_from_json(const json& j) {
  MarketConfig cfg = default_market_config();
  try {
    cfg.tick_seconds = j.value("tick_seconds", cfg.tick_seconds);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("initial_prices")) cfg.initial_prices = read_vector(j, "initial_prices");
    if (j.contains("initial_regime")) cfg.initial_regime = parse_regime(j.at("initial_regime").get<std::string>());
    if (j.contains("hazard")) {
      const auto& h = j.at("hazard");
      cfg.hazard.p0 = h.value("p0", cfg.hazard.p0);
      cfg.hazard.lambda = h.value("lambda", cfg.hazard.lambda);
      cfg.hazard.cap = h.value("cap", cfg.hazard.cap);
    }
    if (j.contains("regimes")) {
      Matrix3 corr = {{{1.0, 0.5, 0.3}, {0.5, 1.0, 0.4}, {0.3, 0.4, 1.0}}};
      if (j.contains("correlation")) corr = read_matrix(j.at("correlation"));
      std::array<RegimeParams, kRegimeCount> regimes;
      for (auto r : kAllRegimes) {
        regimes[static_cast<std::size_t>(r)] = cfg.params.regime(r);
      }
      for (const auto& [name, rj] : j.at("regimes").items()) {
        auto& rp = regimes[static_cast<std::size_t>(parse_regime(name))];
        if (rj.contains("mu")) rp.mu = read_vector(rj, "mu");
        if (rj.contains("cov")) {
          rp.cov = read_matrix(rj.at("cov"));
        } else if (rj.contains("vol")) {
          rp.cov = covariance_from(read_vector(rj, "vol"), corr);
        }
      }
      cfg.params = MarketParams::create(regimes, j.value("enforce_orderings", true));
    }
    if (j.contains("news")) {
      for (const auto& [name, items] : j.at("news").items()) {
        cfg.news[static_cast<std::size_t>(parse_regime(name))] = items.get<std::vector<std::string>>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("market config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("market config: ") + e.what());
  }
  cfg.hazard.validate();
  if (!(cfg.tick_seconds > 0.0)) throw ConfigError("market config: tick_seconds must be positive");
  for (double p : cfg.initial_prices) {
    if (!(p > 0.0)) throw ConfigError("market config: initial prices must be positive");
  }
  for (auto r : kAllRegimes) {
    if (cfg.news[static_cast<std::size_t>(r)].empty()) {
      throw ConfigError(std::string("market config: news pool for ") + to_string(r) + " is empty");
    }
  }
  return cfg;
}

json market_config_to_json(const MarketConfig& cfg) {
  json j;
  j["tick_seconds"] = cfg.tick_seconds;
  j["seed"] = cfg.seed;
  j["initial_prices"] = cfg.initial_prices;
  j["initial_regime"] = to_string(cfg.initial_regime);
  j["hazard"] = {{"p0", cfg.hazard.p0}, {"lambda", cfg.hazard.lambda}, {"cap", cfg.hazard.cap}};
  for (auto r : kAllRegimes) {
    j["regimes"][to_string(r)] = {{"mu", cfg.params.regime(r).mu}, {"cov", cfg.params.regime(r).cov}};
    j["news"][to_string(r)] = cfg.news[static_cast<std::size_t>(r)];
  }
  return j;
}

MarketConfig load_market_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open market config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("market config '" + path + "': " + e.what());
  }
  return market_config_from_json(j);
}

MarketState step_prices(const MarketState& state, const MarketParams& params, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector3 z{};
  for (auto& v : z) v = normal(rng);
  const auto& mu = params.regime(state.regime).mu;
  const auto& l = params.factor(state.regime);

  MarketState next = state;
  for (std::size_t i = 0; i < kStockCount; ++i) {
    double r = mu[i];
    for (std::size_t k = 0; k <= i; ++k) r += l[i][k] * z[k];
    next.prices[i] = state.prices[i] * std::exp(r);
  }
  ++next.tick;
  ++next.ticks_in_regime;
  return next;
}

MarketState advance_regime(const MarketState& state, const HazardParams& hazard, Rng& rng) {
  MarketState next = state;
  if (state.forced) {
    if (*state.forced != state.regime) {
      next.regime = *state.forced;
      next.ticks_in_regime = 0;
    }
    return next;
  }
  const double p = hazard.switch_probability(state.ticks_in_regime);
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p) {
    const auto offset = std::uniform_int_distribution<std::size_t>(1, kRegimeCount - 1)(rng);
    next.regime = kAllRegimes[(static_cast<std::size_t>(state.regime) + offset) % kRegimeCount];
    next.ticks_in_regime = 0;
  }
  return next;
}

NewsItem pick_news(Regime next_regime, const NewsPools& pools, Rng& rng) {
  const auto& pool = pools[static_cast<std::size_t>(next_regime)];
  if (pool.empty()) throw ConfigError(std::string("news pool for ") + to_string(next_regime) + " is empty");
  const auto idx = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
  return {pool[idx], next_regime};
}

}  // namespace outcry
