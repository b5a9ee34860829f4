#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coingame/rational.hpp"

namespace coingame {

using MinerIndex = std::size_t;
using CoinIndex = std::size_t;

struct Miner {
  std::string id;
  MinerIndex index = 0;
  Rational power;

  friend bool operator==(const Miner&, const Miner&) = default;
};

struct Coin {
  std::string id;
  CoinIndex index = 0;

  friend bool operator==(const Coin&, const Coin&) = default;
};

/// Reward per coin, indexed by coin index.
class RewardFunction {
 public:
  RewardFunction() = default;
  explicit RewardFunction(std::vector<Rational> rewards) : rewards_(std::move(rewards)) {}

  const Rational& operator()(CoinIndex c) const { return rewards_.at(c); }
  std::size_t size() const { return rewards_.size(); }
  std::span<const Rational> values() const { return rewards_; }
  Rational max() const;

  friend bool operator==(const RewardFunction&, const RewardFunction&) = default;

 private:
  std::vector<Rational> rewards_;
};

/// Strategy profile: the coin chosen by every miner.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<CoinIndex> assignment)
      : assignment_(std::move(assignment)) {}

  static Configuration uniform(std::size_t miners, CoinIndex coin) {
    return Configuration(std::vector<CoinIndex>(miners, coin));
  }

  CoinIndex operator[](MinerIndex p) const { return assignment_[p]; }
  CoinIndex at(MinerIndex p) const { return assignment_.at(p); }
  std::size_t size() const { return assignment_.size(); }
  std::span<const CoinIndex> assignment() const { return assignment_; }

  /// Copy with miner p moved to coin c.
  Configuration with_move(MinerIndex p, CoinIndex c) const;

  /// Compact "<0,1,1>" rendering with coin indices.
  std::string to_string() const;

  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<CoinIndex> assignment_;
};

/// Miners, coins and a reward function. Immutable once built.
class Game {
 public:
  /// Validates unique ids, contiguous indices, positive powers and rewards.
  /// Throws PreconditionError.
  static Game create(std::vector<Miner> miners, std::vector<Coin> coins,
                     RewardFunction rewards);

  /// Convenience: ids "p1".."pn" and "c1".."ck".
  static Game from_values(std::vector<Rational> powers, std::vector<Rational> rewards);

  /// Same system with a designed reward function. Zero rewards are allowed
  /// here (reward design leaves unoccupied coins at zero); negatives are not.
  Game with_rewards(RewardFunction rewards) const;

  const std::vector<Miner>& miners() const { return miners_; }
  const std::vector<Coin>& coins() const { return coins_; }
  const RewardFunction& rewards() const { return rewards_; }

  std::size_t miner_count() const { return miners_.size(); }
  std::size_t coin_count() const { return coins_.size(); }
  const Rational& power(MinerIndex p) const { return miners_.at(p).power; }
  const Rational& reward(CoinIndex c) const { return rewards_(c); }
  Rational total_power() const;
  bool is_symmetric() const;

  /// Throws PreconditionError unless s assigns every miner a valid coin.
  void validate(const Configuration& s) const;

 private:
  Game() = default;

  std::vector<Miner> miners_;
  std::vector<Coin> coins_;
  RewardFunction rewards_;
};

/// Total power on every coin, indexed by coin.
std::vector<Rational> coin_loads(const Game& game, const Configuration& s);

/// M_c(s): total power of the miners on coin c.
Rational coin_power(const Game& game, const Configuration& s, CoinIndex c);

/// P_c(s), ascending miner index.
std::vector<MinerIndex> miner_set(const Game& game, const Configuration& s, CoinIndex c);

/// F(c) / M_c(s); +infinity when nobody mines c.
ExtendedRational rpu(const Game& game, const Configuration& s, CoinIndex c);

/// u_p(s) = m_p * F(s.p) / M_{s.p}(s).
Rational payoff(const Game& game, const Configuration& s, MinerIndex p);

/// True iff p strictly gains by switching to c. Always false for c == s.p.
bool is_better_response(const Game& game, const Configuration& s, MinerIndex p,
                        CoinIndex c);

/// Every coin p strictly gains by moving to, ascending.
std::vector<CoinIndex> better_response_targets(const Game& game, const Configuration& s,
                                               MinerIndex p);

bool is_stable_miner(const Game& game, const Configuration& s, MinerIndex p);
bool is_stable(const Game& game, const Configuration& s);

/// Stability test against precomputed coin loads; used by the enumerators.
bool is_stable_with_loads(const Game& game, const Configuration& s,
                          std::span<const Rational> loads);

inline Configuration apply_move(const Configuration& s, MinerIndex p, CoinIndex c) {
  return s.with_move(p, c);
}

}  // namespace coingame
