#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coingame/game.hpp"

namespace coingame {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// |C|^n, saturating at UINT64_MAX.
std::uint64_t configuration_count(const Game& game);

/// Visits every configuration in mixed-radix order (miner 0 fastest) together
/// with its coin loads until `visit` returns false. Throws BudgetExceeded when
/// |C|^n > budget.
void for_each_configuration(
    const Game& game, std::uint64_t budget,
    const std::function<bool(const Configuration&, std::span<const Rational>)>& visit);

/// Miners by non-increasing power; equal powers keep declaration order.
std::vector<MinerIndex> miners_by_power(const Game& game);

/// Coins by non-increasing reward; equal rewards keep declaration order.
std::vector<CoinIndex> coins_by_reward(const Game& game);

struct StableSet {
  std::vector<Configuration> configurations;  // enumeration order
  std::uint64_t scanned = 0;

  bool contains(const Configuration& s) const;
  std::size_t size() const { return configurations.size(); }
};

/// Every stable configuration, by exhaustive scan.
StableSet enumerate_stable(const Game& game,
                           std::uint64_t budget = kDefaultEnumerationBudget);

/// Greedy construction: miners placed strongest first, each on the coin that
/// maximises its payoff given the miners already placed (lowest index on ties).
Configuration construct_equilibrium(const Game& game);

// ---------------------------------------------------------------------------
// Modelling assumptions
// ---------------------------------------------------------------------------

enum class CheckMethod { kExhaustive, kSampled };

struct NeverAloneWitness {
  Configuration configuration;
  CoinIndex coin = 0;  // a coin with <= 1 miner that attracts nobody
};

struct NeverAloneResult {
  bool holds = true;
  std::optional<NeverAloneWitness> witness;
  std::uint64_t configurations_checked = 0;
};

struct GenericWitness {
  CoinIndex coin = 0;
  std::vector<MinerIndex> miners;
  CoinIndex other_coin = 0;
  std::vector<MinerIndex> other_miners;
};

struct GenericResult {
  bool holds = true;
  std::optional<GenericWitness> witness;
  CheckMethod method = CheckMethod::kSampled;
  std::uint64_t comparisons = 0;  // subset pairs (sampled) or ratios compared (exhaustive)
};

struct AssumptionReport {
  std::optional<NeverAloneResult> never_alone;
  std::optional<GenericResult> generic;

  /// Every assumption that was checked holds.
  bool holds() const;
};

/// Every coin with at most one miner gives some other miner a better response.
bool check_never_alone(const Game& game, const Configuration& s);

AssumptionReport check_never_alone_all(const Game& game,
                                       std::uint64_t budget = kDefaultEnumerationBudget);

struct GenericityMode {
  CheckMethod method = CheckMethod::kSampled;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;

  static GenericityMode exhaustive() { return {CheckMethod::kExhaustive, 0, 0}; }
  static GenericityMode sampled(std::uint64_t samples, std::uint64_t seed = 0) {
    return {CheckMethod::kSampled, samples, seed};
  }
};

inline constexpr std::size_t kMaxExhaustiveGenericMiners = 12;

/// No two (coin, miner subset) pairs on different coins share a reward/power
/// ratio. Exhaustive mode requires n <= 12 (BudgetExceeded otherwise).
/// Witnesses with disjoint subsets are preferred when any exist.
AssumptionReport check_generic(const Game& game, GenericityMode mode = {});

// ---------------------------------------------------------------------------
// Better equilibria
// ---------------------------------------------------------------------------

struct BetterEquilibrium {
  enum class Status {
    kFound,             // miner and configuration set
    kNotApplicable,     // fewer than two stable configurations
    kAssumptionFailed,  // genericity failed; see assumptions
    kNoneFound,         // assumptions held yet no miner gains: a finding
  };

  Status status = Status::kNotApplicable;
  std::optional<MinerIndex> miner;
  std::optional<Configuration> configuration;
  AssumptionReport assumptions;
  std::size_t stable_count = 0;
};

std::string_view to_string(BetterEquilibrium::Status status);

/// A miner p and a stable s' != s with u_p(s') > u_p(s). s must be stable
/// (PreconditionError otherwise).
BetterEquilibrium find_better_equilibrium(const Game& game, const Configuration& s,
                                          GenericityMode mode = {},
                                          std::uint64_t budget = kDefaultEnumerationBudget);

struct TwoEquilibria {
  enum class Status {
    kConstructed,       // both configurations stable and distinct
    kAssumptionFailed,  // never-alone or genericity failed
    kNotApplicable,     // fewer than two miners or two coins
    kUnstable,          // construction finished but a result is unstable: a finding
  };

  Status status = Status::kNotApplicable;
  std::optional<std::pair<Configuration, Configuration>> configurations;
  AssumptionReport assumptions;
  std::vector<std::string> findings;  // per-extension stability audit failures
};

std::string_view to_string(TwoEquilibria::Status status);

/// Seeds the two strongest miners on the two richest coins in both orders,
/// then adds the remaining miners one at a time at their best coin.
TwoEquilibria two_equilibria(const Game& game, GenericityMode mode = {},
                             std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace coingame
