#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coingame/dynamics.hpp"
#include "coingame/error.hpp"
#include "oracle.hpp"

namespace coingame {
namespace {

using testing::random_configuration;
using testing::random_game;
using testing::two_by_two;

TEST(PotentialList, TwoByTwoBothOnFirstCoin) {
  const PotentialList list = potential_list(two_by_two(), Configuration({0, 0}));
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0], (PotentialEntry{Rational(1, 3), 0}));
  EXPECT_EQ(list[1], (PotentialEntry{ExtendedRational::infinity(), 1}));
}

TEST(PotentialList, EqualRpusOrderByCoinIndex) {
  const Game game = Game::from_values({Rational(1), Rational(1), Rational(1)},
                                      {Rational(5), Rational(5), Rational(5)});
  const PotentialList list = potential_list(game, Configuration({2, 0, 1}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(list[i].rpu, ExtendedRational(Rational(5)));
    EXPECT_EQ(list[i].coin, i);
  }
}

TEST(PotentialList, EmptyCoinsTieBreakByIndex) {
  const Game game = Game::from_values({Rational(1)}, {Rational(1), Rational(1), Rational(1)});
  const PotentialList list = potential_list(game, Configuration({1}));
  EXPECT_EQ(list[0].coin, 1u);
  EXPECT_EQ(list[1].coin, 0u);
  EXPECT_EQ(list[2].coin, 2u);
}

TEST(PotentialList, MatchesSortOfShuffledPairs) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Game game = random_game(rng, 1 + rng() % 6, 1 + rng() % 5, 1, 9);
    const Configuration s = random_configuration(rng, game);
    std::vector<PotentialEntry> pairs;
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      const Rational m = oracle::load(game, s, c);
      pairs.push_back({m.is_zero() ? ExtendedRational::infinity()
                                   : ExtendedRational(game.reward(c) / m),
                       c});
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::sort(pairs.begin(), pairs.end());
    const PotentialList list = potential_list(game, s);
    ASSERT_EQ(list.size(), pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(list[i], pairs[i]);
  }
}

TEST(ComparePotential, Basics) {
  const Game game = two_by_two();
  const auto a = potential_list(game, Configuration({0, 0}));
  const auto b = potential_list(game, Configuration({0, 1}));
  EXPECT_EQ(compare_potential(a, a), std::strong_ordering::equal);
  EXPECT_EQ(compare_potential(a, b), std::strong_ordering::less);
  EXPECT_EQ(compare_potential(b, a), std::strong_ordering::greater);
  const auto other = potential_list(Game::from_values({Rational(1)}, {Rational(1)}),
                                    Configuration({0}));
  EXPECT_THROW(compare_potential(a, other), PreconditionError);
}

TEST(Step, StableConfigurationHasNoStep) {
  Scheduler scheduler({SchedulerKind::kFirstIndex, 0});
  EXPECT_FALSE(step(two_by_two(), Configuration({0, 1}), scheduler).has_value());
}

TEST(Step, FirstIndexMovesTheStrongMinerFirst) {
  Scheduler scheduler({SchedulerKind::kFirstIndex, 0});
  const auto next = step(two_by_two(), Configuration({0, 0}), scheduler);
  ASSERT_TRUE(next.has_value());
  EXPECT_EQ(next->first, Configuration({1, 0}));
  EXPECT_EQ(next->second.miner, 0u);
  EXPECT_EQ(next->second.from, 0u);
  EXPECT_EQ(next->second.to, 1u);
  EXPECT_EQ(next->second.payoff_before, Rational(2, 3));
  EXPECT_EQ(next->second.payoff_after, Rational(1));
}

TEST(Step, RandomPolicyReplaysFromSeed) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Game game = random_game(rng, 3 + rng() % 5, 2 + rng() % 3, 1, 30);
    const Configuration s = random_configuration(rng, game);
    const std::uint64_t seed = rng();
    Scheduler a({SchedulerKind::kRandom, seed});
    Scheduler b({SchedulerKind::kRandom, seed});
    const Trace ta = converge(game, s, a, default_max_steps(game));
    const Trace tb = converge(game, s, b, default_max_steps(game));
    ASSERT_EQ(ta.steps.size(), tb.steps.size());
    for (std::size_t i = 0; i < ta.steps.size(); ++i) {
      EXPECT_EQ(ta.steps[i].miner, tb.steps[i].miner);
      EXPECT_EQ(ta.steps[i].to, tb.steps[i].to);
    }
    EXPECT_EQ(ta.final, tb.final);
  }
}

TEST(Scheduler, BestImprovementAndAdversarialPickTheExtremes) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Game game = random_game(rng, 2 + rng() % 5, 2 + rng() % 3, 1, 12);
    const Configuration s = random_configuration(rng, game);
    const auto moves = better_response_steps(game, s);
    if (moves.size() < 2) continue;
    ++checked;

    Scheduler best({SchedulerKind::kBestImprovement, 0});
    const Move chosen = best.select(game, s, moves);
    auto gain = [&](const Move& m) {
      return oracle::payoff(game, oracle::moved(s, m.miner, m.to), m.miner) -
             oracle::payoff(game, s, m.miner);
    };
    for (const Move& m : moves) EXPECT_LE(gain(m), gain(chosen));

    Scheduler adversary({SchedulerKind::kAdversarial, 0});
    const Move low = adversary.select(game, s, moves);
    const auto low_list = potential_list(game, s.with_move(low.miner, low.to));
    for (const Move& m : moves) {
      EXPECT_NE(compare_potential(potential_list(game, s.with_move(m.miner, m.to)), low_list),
                std::strong_ordering::less);
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Converge, StableStartTakesNoSteps) {
  Scheduler scheduler({SchedulerKind::kFirstIndex, 0});
  const Trace trace = converge(two_by_two(), Configuration({1, 0}), scheduler, 10);
  EXPECT_TRUE(trace.converged);
  EXPECT_TRUE(trace.steps.empty());
  EXPECT_EQ(trace.final, Configuration({1, 0}));
}

TEST(Converge, TwoByTwoSplitsInOneStepUnderEveryPolicy) {
  for (SchedulerKind kind : kAllSchedulers) {
    Scheduler scheduler({kind, 3});
    const Trace trace = converge(two_by_two(), Configuration({0, 0}), scheduler, 100);
    EXPECT_TRUE(trace.converged) << to_string(kind);
    EXPECT_EQ(trace.steps.size(), 1u) << to_string(kind);
    EXPECT_TRUE(trace.final == Configuration({0, 1}) || trace.final == Configuration({1, 0}));
  }
}

TEST(Converge, StepCapIsReportedNotThrown) {
  // Three unit miners on one of three unit coins need two steps to spread.
  const Game game = Game::from_values({Rational(1), Rational(1), Rational(1)},
                                      {Rational(1), Rational(1), Rational(1)});
  Scheduler scheduler({SchedulerKind::kFirstIndex, 0});
  const Trace trace = converge(game, Configuration({0, 0, 0}), scheduler, 1);
  EXPECT_FALSE(trace.converged);
  EXPECT_EQ(trace.steps.size(), 1u);
  EXPECT_THROW(converge(game, Configuration({0, 0, 0}), scheduler, 0), PreconditionError);
}

TEST(Converge, ObserverCanStopTheRun) {
  const Game game = Game::from_values({Rational(1), Rational(1), Rational(1)},
                                      {Rational(1), Rational(1), Rational(1)});
  Scheduler scheduler({SchedulerKind::kFirstIndex, 0});
  int calls = 0;
  const Trace trace = converge(game, Configuration({0, 0, 0}), scheduler, 100,
                               [&](const StepRecord&, const Configuration&) {
                                 ++calls;
                                 return false;
                               });
  EXPECT_EQ(calls, 1);
  EXPECT_FALSE(trace.converged);
}

TEST(DefaultMaxSteps, PowerOfCoinsCapped) {
  EXPECT_EQ(default_max_steps(two_by_two()), 4u);
  const Game big = Game::from_values(std::vector<Rational>(30, Rational(1)),
                                     {Rational(1), Rational(2)});
  EXPECT_EQ(default_max_steps(big), 1'000'000u);
}

// Every step of every campaign run raises the potential list, moves the miner
// to a later list position, and ends in an oracle-certified stable state.
TEST(ConvergeProperties, OrdinalPotentialCampaign) {
  std::mt19937_64 rng(1234);
  std::size_t total_steps = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const std::size_t k = 1 + rng() % 4;
    const Game game = random_game(rng, n, k, 1, 40);
    const Configuration start = random_configuration(rng, game);
    for (SchedulerKind kind : kAllSchedulers) {
      Scheduler scheduler({kind, rng()});
      const Trace trace = converge(game, start, scheduler, default_max_steps(game));
      ASSERT_TRUE(trace.converged);
      EXPECT_TRUE(oracle::stable(game, trace.final));
      Configuration cur = start;
      for (const auto& rec : trace.steps) {
        EXPECT_EQ(rec.potential_before, potential_list(game, cur));
        EXPECT_EQ(compare_potential(rec.potential_before, rec.potential_after),
                  std::strong_ordering::less);
        EXPECT_GT(rec.potential_before.position_of(rec.to),
                  rec.potential_before.position_of(rec.from));
        EXPECT_GT(rec.payoff_after, rec.payoff_before);
        EXPECT_NE(rec.from, rec.to);
        cur = cur.with_move(rec.miner, rec.to);
      }
      EXPECT_EQ(cur, trace.final);
      total_steps += trace.steps.size();
    }
  }
  EXPECT_GT(total_steps, 1000u);
}

TEST(SymmetricPotential, SingleCoin) {
  const Game game = Game::from_values({Rational(2), Rational(1)}, {Rational(1)});
  const auto h = symmetric_potential(game, Configuration({0, 0}));
  EXPECT_EQ(h.empty_coins, 0u);
  EXPECT_EQ(h.occupied_sum, Rational(1, 3));
}

TEST(SymmetricPotential, RejectsUnequalRewards) {
  const Game game = Game::from_values({Rational(1)}, {Rational(1), Rational(2)});
  EXPECT_THROW(symmetric_potential(game, Configuration({0})), PreconditionError);
}

TEST(SymmetricPotential, EnteringAnEmptyCoinCountsAsADecrease) {
  // The finite sum over occupied coins rises (1/3 -> 1/2 + 1), but one fewer
  // coin is empty, which outranks any finite change.
  const Game game = two_by_two();
  const auto before = symmetric_potential(game, Configuration({0, 0}));
  const auto after = symmetric_potential(game, Configuration({0, 1}));
  EXPECT_GT(after.occupied_sum, before.occupied_sum);
  EXPECT_LT(after, before);
}

TEST(SymmetricPotential, StrictlyDecreasesAlongLearning) {
  std::mt19937_64 rng(99);
  std::size_t steps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const std::size_t k = 1 + rng() % 4;
    const Rational reward(static_cast<long>(1 + rng() % 9));
    std::vector<Rational> powers;
    for (std::size_t i = 0; i < n; ++i) powers.emplace_back(static_cast<long>(1 + rng() % 9));
    const Game game = Game::from_values(powers, std::vector<Rational>(k, reward));
    const Configuration start = random_configuration(rng, game);

    SymmetricPotential direct;
    for (CoinIndex c = 0; c < k; ++c) {
      const Rational m = oracle::load(game, start, c);
      if (m.is_zero()) {
        ++direct.empty_coins;
      } else {
        direct.occupied_sum += Rational(1) / m;
      }
    }
    EXPECT_EQ(symmetric_potential(game, start), direct);

    Scheduler scheduler({kAllSchedulers[trial % 4], rng()});
    SymmetricPotential last = direct;
    converge(game, start, scheduler, default_max_steps(game),
             [&](const StepRecord&, const Configuration& reached) {
               const auto now = symmetric_potential(game, reached);
               EXPECT_LT(now, last);
               last = now;
               ++steps;
               return true;
             });
  }
  EXPECT_GT(steps, 200u);
}

TEST(Counterexample, CycleSumIsTwoThirds) {
  const CounterexampleReport cx = exact_potential_counterexample();
  const std::array<std::array<Rational, 2>, 4> payoffs = {{{Rational(2, 3), Rational(1, 3)},
                                                           {Rational(1), Rational(1)},
                                                           {Rational(2, 3), Rational(1, 3)},
                                                           {Rational(1), Rational(1)}}};
  EXPECT_EQ(cx.payoffs, payoffs);
  const std::array<Rational, 4> deltas = {Rational(2, 3), Rational(-1, 3), Rational(2, 3),
                                          Rational(-1, 3)};
  EXPECT_EQ(cx.deltas, deltas);
  EXPECT_EQ(cx.cycle_sum, Rational(2, 3));
}

}  // namespace
}  // namespace coingame
