#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "coingame/game.hpp"
#include "coingame/rational.hpp"

namespace coingame {

// ---------------------------------------------------------------------------
// Ordinal potential: the coins' (RPU, coin) pairs sorted ascending. A better
// response step always yields a lexicographically larger list, so comparing
// lists directly stands in for their rank among all reachable lists.
// ---------------------------------------------------------------------------

struct PotentialEntry {
  ExtendedRational rpu;
  CoinIndex coin = 0;

  friend bool operator==(const PotentialEntry&, const PotentialEntry&) = default;
  friend std::strong_ordering operator<=>(const PotentialEntry& a, const PotentialEntry& b) {
    if (auto c = a.rpu <=> b.rpu; c != 0) return c;
    return a.coin <=> b.coin;
  }
};

class PotentialList {
 public:
  PotentialList() = default;
  explicit PotentialList(std::vector<PotentialEntry> entries);

  std::span<const PotentialEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const PotentialEntry& operator[](std::size_t i) const { return entries_[i]; }

  /// 0-based position of coin c in the list.
  std::size_t position_of(CoinIndex c) const;

  friend bool operator==(const PotentialList&, const PotentialList&) = default;

 private:
  std::vector<PotentialEntry> entries_;
};

PotentialList potential_list(const Game& game, const Configuration& s);

/// Lexicographic comparison; throws PreconditionError on length mismatch.
std::strong_ordering compare_potential(const PotentialList& a, const PotentialList& b);

// ---------------------------------------------------------------------------
// Schedulers: which better-response step is taken when several exist.
// ---------------------------------------------------------------------------

enum class SchedulerKind {
  kFirstIndex,       // lowest miner, then lowest target coin
  kRandom,           // seeded uniform over all available steps
  kBestImprovement,  // largest payoff gain, ties by index
  kAdversarial,      // smallest resulting potential list, ties by index
};

inline constexpr std::array<SchedulerKind, 4> kAllSchedulers = {
    SchedulerKind::kFirstIndex, SchedulerKind::kRandom, SchedulerKind::kBestImprovement,
    SchedulerKind::kAdversarial};

std::string_view to_string(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name);

struct SchedulerPolicy {
  SchedulerKind kind = SchedulerKind::kFirstIndex;
  std::uint64_t seed = 0;

  friend bool operator==(const SchedulerPolicy&, const SchedulerPolicy&) = default;
};

struct Move {
  MinerIndex miner = 0;
  CoinIndex to = 0;

  friend bool operator==(const Move&, const Move&) = default;
};

/// All better-response steps in s, ordered by miner then target coin.
std::vector<Move> better_response_steps(const Game& game, const Configuration& s);

class Scheduler {
 public:
  explicit Scheduler(SchedulerPolicy policy);

  const SchedulerPolicy& policy() const { return policy_; }

  /// Picks one of `candidates` (non-empty, as produced by better_response_steps).
  Move select(const Game& game, const Configuration& s, std::span<const Move> candidates);

 private:
  SchedulerPolicy policy_;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Learning engine
// ---------------------------------------------------------------------------

struct StepRecord {
  std::size_t step = 0;  // 1-based within its trace
  MinerIndex miner = 0;
  CoinIndex from = 0;
  CoinIndex to = 0;
  Rational payoff_before;
  Rational payoff_after;
  PotentialList potential_before;
  PotentialList potential_after;
};

struct Trace {
  Configuration initial;
  std::vector<StepRecord> steps;
  Configuration final;
  bool converged = false;
};

/// Takes one scheduler-selected better-response step; nullopt iff s is stable.
std::optional<std::pair<Configuration, StepRecord>> step(const Game& game,
                                                         const Configuration& s,
                                                         Scheduler& scheduler,
                                                         std::size_t step_number = 1);

/// Called after each step with the record and the configuration it produced.
/// Returning false stops the run (converged stays false).
using StepObserver = std::function<bool(const StepRecord&, const Configuration&)>;

/// |C|^n capped at 10^6.
std::size_t default_max_steps(const Game& game);

/// Better-response learning until stable or `max_steps` steps were taken.
Trace converge(const Game& game, const Configuration& start, Scheduler& scheduler,
               std::size_t max_steps, const StepObserver& observer = {});

// ---------------------------------------------------------------------------
// Symmetric-reward potential: sum over coins of 1 / M_c. An empty coin
// contributes an infinite term, so the value is ordered first by the number
// of empty coins and then by the finite sum over occupied coins.
// ---------------------------------------------------------------------------

struct SymmetricPotential {
  std::size_t empty_coins = 0;
  Rational occupied_sum;

  friend bool operator==(const SymmetricPotential&, const SymmetricPotential&) = default;
  friend std::strong_ordering operator<=>(const SymmetricPotential& a,
                                          const SymmetricPotential& b) {
    if (auto c = a.empty_coins <=> b.empty_coins; c != 0) return c;
    return a.occupied_sum <=> b.occupied_sum;
  }
};

/// Throws PreconditionError when rewards are not all equal.
SymmetricPotential symmetric_potential(const Game& game, const Configuration& s);

// ---------------------------------------------------------------------------
// The 2-miner / 2-coin game without an exact potential.
// ---------------------------------------------------------------------------

struct CounterexampleReport {
  Game game;
  std::array<Configuration, 4> cycle;                  // s1 -> s2 -> s3 -> s4 -> s1
  std::array<std::array<Rational, 2>, 4> payoffs;      // per configuration, per miner
  std::array<MinerIndex, 4> movers;                    // miner moving out of cycle[i]
  std::array<Rational, 4> deltas;                      // mover's payoff change
  Rational cycle_sum;
};

CounterexampleReport exact_potential_counterexample();

}  // namespace coingame
