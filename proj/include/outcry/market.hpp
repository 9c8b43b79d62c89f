// Regime-switching correlated log-normal price model for the three stocks.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "outcry/harmony.hpp"

namespace outcry {

using Rng = std::mt19937_64;
using Vector3 = std::array<double, kStockCount>;
using Matrix3 = std::array<Vector3, kStockCount>;

enum class Regime : std::uint8_t { Boom = 0, Normal = 1, Bust = 2 };
inline constexpr std::size_t kRegimeCount = 3;
inline constexpr std::array<Regime, kRegimeCount> kAllRegimes = {Regime::Boom, Regime::Normal, Regime::Bust};

const char* to_string(Regime regime);  // "boom", "normal", "bust"
Regime parse_regime(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-tick drift and covariance of log-returns.
struct RegimeParams {
  Vector3 mu{};
  Matrix3 cov{};
};

/// Lower-triangular L with L * L^T = cov. Accepts positive semi-definite input
/// (zero-variance directions give zero columns); throws ConfigError otherwise.
Matrix3 cholesky_psd(const Matrix3& cov);

/// Regime parameters with their covariance factors, validated once at load.
class MarketParams {
 public:
  static MarketParams create(const std::array<RegimeParams, kRegimeCount>& regimes,
                             bool enforce_orderings = true);

  const RegimeParams& regime(Regime r) const { return regimes_[static_cast<std::size_t>(r)]; }
  const Matrix3& factor(Regime r) const { return factors_[static_cast<std::size_t>(r)]; }

 private:
  std::array<RegimeParams, kRegimeCount> regimes_{};
  std::array<Matrix3, kRegimeCount> factors_{};
};

/// Regime switch hazard: min(cap, p0 + lambda * ticks_in_regime).
struct HazardParams {
  double p0 = 0.02;
  double lambda = 0.004;
  double cap = 0.5;

  void validate() const;
  double switch_probability(std::uint64_t ticks_in_regime) const;
};

struct MarketState {
  Vector3 prices{100.0, 100.0, 100.0};
  Regime regime = Regime::Normal;
  std::uint64_t ticks_in_regime = 0;
  std::uint64_t tick = 0;
  std::optional<Regime> forced;  // sticky conductor override

  friend bool operator==(const MarketState&, const MarketState&) = default;
};

struct NewsItem {
  std::string text;
  Regime regime = Regime::Normal;

  friend bool operator==(const NewsItem&, const NewsItem&) = default;
};

using NewsPools = std::array<std::vector<std::string>, kRegimeCount>;

struct MarketConfig {
  MarketParams params;
  HazardParams hazard;
  Vector3 initial_prices{100.0, 100.0, 100.0};
  Regime initial_regime = Regime::Normal;
  NewsPools news;
  double tick_seconds = 15.0;
  std::uint64_t seed = 1;

  MarketState initial_state() const;
};

/// Shipped defaults; orderings Wealth > Protection > Comfort in drift and volatility.
MarketConfig default_market_config();
MarketConfig market_config_from_json(const nlohmann::json& j);
nlohmann::json market_config_to_json(const MarketConfig& cfg);
MarketConfig load_market_config(const std::string& path);

/// One price tick: r = mu + L z, price *= exp(r).
MarketState step_prices(const MarketState& state, const MarketParams& params, Rng& rng);

/// Honors a conductor force; otherwise switches to one of the two other
/// regimes with the hazard probability.
MarketState advance_regime(const MarketState& state, const HazardParams& hazard, Rng& rng);

NewsItem pick_news(Regime next_regime, const NewsPools& pools, Rng& rng);

}  // namespace outcry
