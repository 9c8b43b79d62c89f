#include "outcry/market.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>

namespace outcry {
namespace {

MarketParams flat_params(const Vector3& mu) {
  std::array<RegimeParams, kRegimeCount> regimes;
  for (auto& r : regimes) r = {mu, Matrix3{}};
  return MarketParams::create(regimes, false);
}

// 99% two-sided binomial interval half-width (normal approximation).
double ci99(double p, double n) { return 2.5758 * std::sqrt(p * (1.0 - p) / n); }

TEST(CholeskyTest, ReproducesCovariance) {
  const auto cfg = default_market_config();
  for (auto r : kAllRegimes) {
    const auto& cov = cfg.params.regime(r).cov;
    const auto& l = cfg.params.factor(r);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < 3; ++k) v += l[i][k] * l[j][k];
        EXPECT_NEAR(v, cov[i][j], 1e-15);
        if (j > i) {
          EXPECT_EQ(l[i][j], 0.0);
        }
      }
    }
  }
}

TEST(CholeskyTest, SemiDefiniteAndRejections) {
  EXPECT_NO_THROW(cholesky_psd(Matrix3{}));
  // Perfectly correlated pair: rank 2.
  const Matrix3 rank2 = {{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, {0.0, 0.0, 2.0}}};
  const auto l = cholesky_psd(rank2);
  EXPECT_DOUBLE_EQ(l[1][0], 1.0);
  EXPECT_DOUBLE_EQ(l[1][1], 0.0);
  const Matrix3 indefinite = {{{1.0, 2.0, 0.0}, {2.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  EXPECT_THROW(cholesky_psd(indefinite), ConfigError);
  const Matrix3 asymmetric = {{{1.0, 0.1, 0.0}, {0.2, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  EXPECT_THROW(cholesky_psd(asymmetric), ConfigError);
}

TEST(MarketParamsTest, OrderingValidation) {
  auto cfg = default_market_config();
  std::array<RegimeParams, kRegimeCount> regimes;
  for (auto r : kAllRegimes) regimes[static_cast<std::size_t>(r)] = cfg.params.regime(r);
  EXPECT_NO_THROW(MarketParams::create(regimes));

  auto bad = regimes;
  bad[static_cast<std::size_t>(Regime::Boom)].mu[2] = -0.001;
  EXPECT_THROW(MarketParams::create(bad), ConfigError);
  bad = regimes;
  bad[static_cast<std::size_t>(Regime::Bust)].mu[0] = 0.001;
  EXPECT_THROW(MarketParams::create(bad), ConfigError);
  bad = regimes;
  std::swap(bad[static_cast<std::size_t>(Regime::Normal)].mu[0], bad[static_cast<std::size_t>(Regime::Normal)].mu[1]);
  EXPECT_THROW(MarketParams::create(bad), ConfigError);
  bad = regimes;
  bad[static_cast<std::size_t>(Regime::Normal)].cov[2][2] = 1.0;
  EXPECT_THROW(MarketParams::create(bad), ConfigError);
}

TEST(StepPricesTest, DeterministicCases) {
  Rng rng(1);
  MarketState s;
  const auto zero = flat_params({0.0, 0.0, 0.0});
  const auto next = step_prices(s, zero, rng);
  EXPECT_EQ(next.prices, s.prices);
  EXPECT_EQ(next.tick, 1u);
  EXPECT_EQ(next.ticks_in_regime, 1u);

  const Vector3 mu = {0.01, 0.005, 0.001};
  const auto drift = step_prices(s, flat_params(mu), rng);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(drift.prices[i], s.prices[i] * std::exp(mu[i]));
}

TEST(StepPricesTest, MonteCarloMeanLogReturn) {
  const auto cfg = default_market_config();
  Rng rng(77);
  MarketState s;
  constexpr int kTicks = 10000;
  Vector3 sum{};
  for (int t = 0; t < kTicks; ++t) {
    const auto next = step_prices(s, cfg.params, rng);
    for (std::size_t i = 0; i < 3; ++i) sum[i] += std::log(next.prices[i] / s.prices[i]);
    s = next;
    s.prices = {100.0, 100.0, 100.0};
  }
  const auto& normal = cfg.params.regime(Regime::Normal);
  for (std::size_t i = 0; i < 3; ++i) {
    const double se = std::sqrt(normal.cov[i][i] / kTicks);
    EXPECT_NEAR(sum[i] / kTicks, normal.mu[i], 3.0 * se) << "stock " << i;
  }
}

TEST(StepPricesTest, PricesStayPositiveAndReproducible) {
  std::array<RegimeParams, kRegimeCount> harsh;
  for (auto& r : harsh) r = {{-5.0, -5.0, -5.0}, {{{4.0, 0.0, 0.0}, {0.0, 4.0, 0.0}, {0.0, 0.0, 4.0}}}};
  const auto params = MarketParams::create(harsh, false);
  Rng a(3);
  Rng b(3);
  MarketState sa;
  MarketState sb;
  for (int t = 0; t < 50; ++t) {
    sa = step_prices(sa, params, a);
    sb = step_prices(sb, params, b);
    for (double p : sa.prices) EXPECT_GT(p, 0.0);
  }
  EXPECT_EQ(sa, sb);
}

TEST(AdvanceRegimeTest, HazardShape) {
  const HazardParams h;
  EXPECT_DOUBLE_EQ(h.switch_probability(0), h.p0);
  EXPECT_DOUBLE_EQ(h.switch_probability(10), 0.02 + 0.04);
  EXPECT_DOUBLE_EQ(h.switch_probability(1000), h.cap);
  EXPECT_THROW((HazardParams{0.6, 0.0, 0.5}.validate()), ConfigError);
  EXPECT_THROW((HazardParams{0.1, -1.0, 0.5}.validate()), ConfigError);
}

TEST(AdvanceRegimeTest, ForcedRegimeIsSticky) {
  const HazardParams always{1.0, 0.0, 1.0};
  Rng rng(2);
  MarketState s;
  s.forced = Regime::Bust;
  s.ticks_in_regime = 9;
  for (int t = 0; t < 20; ++t) {
    const auto next = advance_regime(s, always, rng);
    EXPECT_EQ(next.regime, Regime::Bust);
    EXPECT_EQ(next.forced, Regime::Bust);
    if (s.regime != Regime::Bust) {
      EXPECT_EQ(next.ticks_in_regime, 0u);
    }
    s = next;
    ++s.ticks_in_regime;
  }
}

TEST(AdvanceRegimeTest, EmpiricalSwitchFrequency) {
  const HazardParams h;
  Rng rng(99);
  constexpr int kTrials = 10000;
  for (std::uint64_t t : {0u, 10u, 50u, 200u}) {
    MarketState s;
    s.ticks_in_regime = t;
    int switches = 0;
    std::map<Regime, int> targets;
    for (int i = 0; i < kTrials; ++i) {
      const auto next = advance_regime(s, h, rng);
      if (next.regime != s.regime) {
        ++switches;
        ++targets[next.regime];
        EXPECT_EQ(next.ticks_in_regime, 0u);
      } else {
        EXPECT_EQ(next.ticks_in_regime, t);
      }
    }
    const double p = h.switch_probability(t);
    EXPECT_NEAR(static_cast<double>(switches) / kTrials, p, ci99(p, kTrials)) << "t=" << t;
    EXPECT_EQ(targets.count(Regime::Normal), 0u);
  }
}

TEST(PickNewsTest, DrawsFromRegimePool) {
  const auto cfg = default_market_config();
  Rng rng(4);
  EXPECT_EQ(cfg.news[0].front(), "Investors increase allocation to risky assets");
  EXPECT_EQ(cfg.news[1].front(), "Investment sentiment balanced as GDP expectations unchanged");
  EXPECT_EQ(cfg.news[2].front(), "Global demand slumps, sharply reducing asset price expectations");
  for (auto r : kAllRegimes) {
    for (int i = 0; i < 50; ++i) {
      const auto item = pick_news(r, cfg.news, rng);
      EXPECT_EQ(item.regime, r);
      const auto& pool = cfg.news[static_cast<std::size_t>(r)];
      EXPECT_NE(std::find(pool.begin(), pool.end(), item.text), pool.end());
    }
  }
  NewsPools empty;
  EXPECT_THROW(pick_news(Regime::Boom, empty, rng), ConfigError);
}

TEST(MarketConfigTest, JsonRoundTripAndOverrides) {
  const auto cfg = default_market_config();
  const auto again = market_config_from_json(market_config_to_json(cfg));
  for (auto r : kAllRegimes) {
    EXPECT_EQ(again.params.regime(r).mu, cfg.params.regime(r).mu);
    EXPECT_EQ(again.params.regime(r).cov, cfg.params.regime(r).cov);
  }
  EXPECT_EQ(again.news, cfg.news);
  EXPECT_DOUBLE_EQ(again.tick_seconds, 15.0);

  const auto custom = market_config_from_json(nlohmann::json::parse(R"({
    "initial_prices": {"Wealth": 50, "Protection": 60, "Comfort": 70},
    "hazard": {"p0": 0.1},
    "regimes": {"bust": {"mu": [-0.01, -0.02, -0.03], "vol": [0.05, 0.04, 0.03]}}
  })"));
  EXPECT_EQ(custom.initial_prices, (Vector3{50, 60, 70}));
  EXPECT_DOUBLE_EQ(custom.hazard.p0, 0.1);
  EXPECT_DOUBLE_EQ(custom.params.regime(Regime::Bust).mu[2], -0.03);
  EXPECT_NEAR(custom.params.regime(Regime::Bust).cov[0][1], 0.05 * 0.04 * 0.5, 1e-15);

  EXPECT_THROW(market_config_from_json(nlohmann::json::parse(R"({"regimes": {"boom": {"mu": [-1, -2, -3]}}})")),
               ConfigError);
  EXPECT_THROW(market_config_from_json(nlohmann::json::parse(R"({"news": {"boom": []}})")), ConfigError);
  EXPECT_THROW(market_config_from_json(nlohmann::json::parse(R"({"hazard": {"cap": 2}})")), ConfigError);
  EXPECT_THROW(load_market_config("/nonexistent/market.json"), ConfigError);
}

}  // namespace
}  // namespace outcry
