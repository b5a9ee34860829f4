#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coingame/equilibria.hpp"
#include "coingame/error.hpp"
#include "oracle.hpp"

namespace coingame {
namespace {

using testing::random_configuration;
using testing::random_game;
using testing::two_by_two;

bool oracle_never_alone(const Game& game, const Configuration& s) {
  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    std::size_t count = 0;
    for (MinerIndex p = 0; p < game.miner_count(); ++p) count += s[p] == c;
    if (count > 1) continue;
    bool attracts = false;
    for (MinerIndex p = 0; p < game.miner_count(); ++p) {
      attracts = attracts || oracle::improves(game, s, p, c);
    }
    if (!attracts) return false;
  }
  return true;
}

// Brute force over every pair of nonempty subsets on two different coins.
bool oracle_generic(const Game& game) {
  const std::size_t n = game.miner_count();
  std::vector<Rational> sums(std::size_t{1} << n);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    for (MinerIndex p = 0; p < n; ++p) {
      if (mask >> p & 1) sums[mask] += game.power(p);
    }
  }
  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    for (CoinIndex d = 0; d < game.coin_count(); ++d) {
      if (c == d) continue;
      for (std::size_t a = 1; a < sums.size(); ++a) {
        for (std::size_t b = 1; b < sums.size(); ++b) {
          if (game.reward(c) * sums[b] == game.reward(d) * sums[a]) return false;
        }
      }
    }
  }
  return true;
}

Rational ratio(const Game& game, CoinIndex c, const std::vector<MinerIndex>& miners) {
  Rational m;
  for (MinerIndex p : miners) m += game.power(p);
  return game.reward(c) / m;
}

TEST(Enumeration, ConfigurationCountSaturates) {
  EXPECT_EQ(configuration_count(two_by_two()), 4u);
  const Game big = Game::from_values(std::vector<Rational>(70, Rational(1)),
                                     {Rational(1), Rational(2)});
  EXPECT_EQ(configuration_count(big), UINT64_MAX);
}

TEST(Enumeration, VisitsEveryConfigurationWithLoads) {
  const Game game = Game::from_values({Rational(3), Rational(1), Rational(2)},
                                      {Rational(1), Rational(1), Rational(1)});
  std::vector<Configuration> seen;
  for_each_configuration(game, 100, [&](const Configuration& s, std::span<const Rational> loads) {
    for (CoinIndex c = 0; c < 3; ++c) EXPECT_EQ(loads[c], oracle::load(game, s, c));
    seen.push_back(s);
    return true;
  });
  EXPECT_EQ(seen.size(), 27u);
  std::vector<Configuration> expected;
  oracle::all_configurations(game, [&](const Configuration& s) { expected.push_back(s); });
  std::sort(seen.begin(), seen.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(seen, expected);
}

TEST(Enumeration, BudgetIsEnforced) {
  const Game game = Game::from_values(std::vector<Rational>(5, Rational(1)),
                                      {Rational(1), Rational(1)});
  EXPECT_THROW(enumerate_stable(game, 31), BudgetExceeded);
  EXPECT_NO_THROW(enumerate_stable(game, 32));
}

TEST(Enumeration, TwoByTwoHasTheTwoSplits) {
  const StableSet set = enumerate_stable(two_by_two());
  EXPECT_EQ(set.scanned, 4u);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_TRUE(set.contains(Configuration({0, 1})));
  EXPECT_TRUE(set.contains(Configuration({1, 0})));
  EXPECT_FALSE(set.contains(Configuration({0, 0})));
}

TEST(Enumeration, MatchesOracleOnRandomGames) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 150; ++trial) {
    const Game game = random_game(rng, 1 + rng() % 6, 1 + rng() % 3, 1, 10);
    auto expected = oracle::stable_set(game);
    auto got = enumerate_stable(game).configurations;
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);
    EXPECT_FALSE(got.empty());
  }
}

TEST(Ordering, PowerAndRewardOrdersAreStable) {
  const Game game = Game::from_values({Rational(1), Rational(3), Rational(1), Rational(2)},
                                      {Rational(2), Rational(5), Rational(2)});
  EXPECT_EQ(miners_by_power(game), (std::vector<MinerIndex>{1, 3, 0, 2}));
  EXPECT_EQ(coins_by_reward(game), (std::vector<CoinIndex>{1, 0, 2}));
}

TEST(Construct, SingleMinerTakesTheRichestCoin) {
  const Game game = Game::from_values({Rational(1)}, {Rational(3), Rational(5)});
  EXPECT_EQ(construct_equilibrium(game), Configuration({1}));
}

TEST(Construct, TwoByTwo) {
  EXPECT_EQ(construct_equilibrium(two_by_two()), Configuration({0, 1}));
}

TEST(Construct, AlwaysOracleStable) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const Game game = random_game(rng, 1 + rng() % 7, 1 + rng() % 4, 1, 20, trial % 2 == 0);
    EXPECT_TRUE(oracle::stable(game, construct_equilibrium(game)));
  }
}

TEST(NeverAlone, FailsWhenMinersCannotFillTwoPerCoin) {
  const AssumptionReport report = check_never_alone_all(two_by_two());
  ASSERT_TRUE(report.never_alone.has_value());
  EXPECT_FALSE(report.never_alone->holds);
  ASSERT_TRUE(report.never_alone->witness.has_value());
  EXPECT_FALSE(check_never_alone(two_by_two(), report.never_alone->witness->configuration));
  EXPECT_FALSE(report.holds());
}

TEST(NeverAlone, SingleCoinIsNeverAloneWithTwoMiners) {
  const Game game = Game::from_values({Rational(1), Rational(2)}, {Rational(4)});
  EXPECT_TRUE(check_never_alone_all(game).holds());
}

TEST(NeverAlone, MatchesOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Game game = random_game(rng, 2 + rng() % 5, 1 + rng() % 3, 1, 9);
    bool all = true;
    oracle::all_configurations(game, [&](const Configuration& s) {
      const bool expected = oracle_never_alone(game, s);
      EXPECT_EQ(check_never_alone(game, s), expected);
      all = all && expected;
    });
    EXPECT_EQ(check_never_alone_all(game).holds(), all);
  }
}

TEST(Generic, EqualPowersOnEqualRewardsFail) {
  const Game game = Game::from_values({Rational(1), Rational(1)}, {Rational(1), Rational(1)});
  for (const auto mode : {GenericityMode::exhaustive(), GenericityMode::sampled(1000, 3)}) {
    const GenericResult r = *check_generic(game, mode).generic;
    EXPECT_FALSE(r.holds);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_NE(r.witness->coin, r.witness->other_coin);
    EXPECT_EQ(ratio(game, r.witness->coin, r.witness->miners),
              ratio(game, r.witness->other_coin, r.witness->other_miners));
  }
  const GenericResult r = *check_generic(game, GenericityMode::exhaustive()).generic;
  EXPECT_EQ(r.witness->miners.size(), 1u);
  EXPECT_EQ(r.witness->other_miners.size(), 1u);
  EXPECT_NE(r.witness->miners, r.witness->other_miners);
}

TEST(Generic, EqualRewardsShareAnySubset) {
  // With only one subset per side available no disjoint witness exists, so the
  // same miners on the two coins are reported.
  const Game game = two_by_two();
  const GenericResult r = *check_generic(game, GenericityMode::exhaustive()).generic;
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(ratio(game, r.witness->coin, r.witness->miners),
            ratio(game, r.witness->other_coin, r.witness->other_miners));
}

TEST(Generic, LargeCoprimeInstanceHolds) {
  const Game game = Game::from_values(
      {Rational(1000003), Rational(1000033), Rational(1000037), Rational(1000039)},
      {Rational(999999937), Rational(999999929)});
  EXPECT_TRUE(check_generic(game, GenericityMode::exhaustive()).holds());
  EXPECT_TRUE(check_generic(game, GenericityMode::sampled(20000, 1)).holds());
}

TEST(Generic, ExhaustiveMatchesOracle) {
  std::mt19937_64 rng(21);
  int failing = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Game game = random_game(rng, 1 + rng() % 5, 2 + rng() % 2, 1, 12);
    const bool expected = oracle_generic(game);
    const GenericResult r = *check_generic(game, GenericityMode::exhaustive()).generic;
    EXPECT_EQ(r.holds, expected);
    if (!r.holds) {
      ++failing;
      ASSERT_TRUE(r.witness.has_value());
      EXPECT_EQ(ratio(game, r.witness->coin, r.witness->miners),
                ratio(game, r.witness->other_coin, r.witness->other_miners));
    }
    // Sampling can miss a collision but never invents one.
    if (expected) EXPECT_TRUE(check_generic(game, GenericityMode::sampled(500, trial)).holds());
  }
  EXPECT_GT(failing, 10);
}

TEST(Generic, ExhaustiveRefusesLargeRosters) {
  const Game game = Game::from_values(std::vector<Rational>(13, Rational(1)), {Rational(1)});
  EXPECT_THROW(check_generic(game, GenericityMode::exhaustive()), BudgetExceeded);
}

TEST(BetterEquilibrium, RejectsUnstableInput) {
  EXPECT_THROW(find_better_equilibrium(two_by_two(), Configuration({0, 0})), PreconditionError);
}

TEST(BetterEquilibrium, NonGenericTwoByTwoReportsTheAssumption) {
  const auto r = find_better_equilibrium(two_by_two(), Configuration({0, 1}),
                                         GenericityMode::exhaustive());
  EXPECT_EQ(r.status, BetterEquilibrium::Status::kAssumptionFailed);
  EXPECT_EQ(r.stable_count, 2u);
}

TEST(BetterEquilibrium, UniqueEquilibriumIsNotApplicable) {
  const Game game = Game::from_values({Rational(1)}, {Rational(3), Rational(5)});
  const auto r = find_better_equilibrium(game, Configuration({1}));
  EXPECT_EQ(r.status, BetterEquilibrium::Status::kNotApplicable);
  EXPECT_EQ(r.stable_count, 1u);
}

TEST(BetterEquilibrium, GenericTwoByTwoFindsAGain) {
  const Game game = Game::from_values({Rational(2), Rational(1)}, {Rational(1), Rational(9, 8)});
  const auto stable = oracle::stable_set(game);
  ASSERT_GE(stable.size(), 2u);
  for (const Configuration& s : stable) {
    const auto r = find_better_equilibrium(game, s, GenericityMode::exhaustive());
    ASSERT_EQ(r.status, BetterEquilibrium::Status::kFound) << s.to_string();
    ASSERT_TRUE(r.miner && r.configuration);
    EXPECT_NE(*r.configuration, s);
    EXPECT_TRUE(oracle::stable(game, *r.configuration));
    EXPECT_GT(oracle::payoff(game, *r.configuration, *r.miner), oracle::payoff(game, s, *r.miner));
  }
}

TEST(TwoEquilibria, NotApplicableWithOneCoin) {
  const Game game = Game::from_values({Rational(1), Rational(2)}, {Rational(4)});
  EXPECT_EQ(two_equilibria(game).status, TwoEquilibria::Status::kNotApplicable);
}

TEST(TwoEquilibria, AssumptionFailureIsReported) {
  const auto r = two_equilibria(two_by_two());
  EXPECT_EQ(r.status, TwoEquilibria::Status::kAssumptionFailed);
  EXPECT_FALSE(r.assumptions.holds());
}

TEST(TwoEquilibria, ConstructedPairsAreDistinctAndStable) {
  std::mt19937_64 rng(2024);
  int constructed = 0;
  for (int trial = 0; trial < 300 && constructed < 20; ++trial) {
    const std::size_t k = 2 + rng() % 2;
    const std::size_t n = 2 * k + rng() % 3;
    const Game game = random_game(rng, n, k, 1'000'000, 1'000'000'000, true);
    const auto r = two_equilibria(game, GenericityMode::sampled(2000, trial));
    if (r.status != TwoEquilibria::Status::kConstructed) continue;
    ++constructed;
    ASSERT_TRUE(r.configurations.has_value());
    EXPECT_NE(r.configurations->first, r.configurations->second);
    EXPECT_TRUE(oracle::stable(game, r.configurations->first));
    EXPECT_TRUE(oracle::stable(game, r.configurations->second));
  }
  EXPECT_GT(constructed, 0);
}

// When every coin attracts somebody whenever it holds at most one miner, a
// stable configuration leaves no coin empty, so the rewards are paid in full.
TEST(Equilibria, FullPayoutUnderNeverAlone) {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Game game = random_game(rng, 2 + rng() % 6, 1 + rng() % 3, 1, 15);
    Rational rewards;
    for (CoinIndex c = 0; c < game.coin_count(); ++c) rewards += game.reward(c);
    for (const Configuration& s : enumerate_stable(game).configurations) {
      if (!check_never_alone(game, s)) continue;
      ++checked;
      Rational paid;
      for (MinerIndex p = 0; p < game.miner_count(); ++p) paid += oracle::payoff(game, s, p);
      EXPECT_EQ(paid, rewards);
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace coingame
