#pragma once

// Test-only brute-force oracles. They recompute everything from the raw
// definitions (membership scans, exhaustive deviation checks, recursive
// enumeration) and share no code paths with the library beyond Rational.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "coingame/game.hpp"

namespace coingame::oracle {

inline Rational load(const Game& game, const Configuration& s, CoinIndex c) {
  Rational total;
  for (MinerIndex p = 0; p < game.miner_count(); ++p) {
    if (s[p] == c) total = total + game.power(p);
  }
  return total;
}

inline Rational payoff(const Game& game, const Configuration& s, MinerIndex p) {
  return game.power(p) * game.reward(s[p]) / oracle::load(game, s, s[p]);
}

inline Configuration moved(const Configuration& s, MinerIndex p, CoinIndex c) {
  std::vector<CoinIndex> v(s.assignment().begin(), s.assignment().end());
  v[p] = c;
  return Configuration(std::move(v));
}

inline bool improves(const Game& game, const Configuration& s, MinerIndex p, CoinIndex c) {
  if (c == s[p]) return false;
  return oracle::payoff(game, moved(s, p, c), p) > oracle::payoff(game, s, p);
}

inline bool stable(const Game& game, const Configuration& s) {
  for (MinerIndex p = 0; p < game.miner_count(); ++p) {
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      if (oracle::improves(game, s, p, c)) return false;
    }
  }
  return true;
}

inline void all_configurations(const Game& game,
                               const std::function<void(const Configuration&)>& visit) {
  std::vector<CoinIndex> v(game.miner_count(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t p) {
    if (p == v.size()) {
      visit(Configuration(v));
      return;
    }
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      v[p] = c;
      rec(p + 1);
    }
  };
  rec(0);
}

inline std::vector<Configuration> stable_set(const Game& game) {
  std::vector<Configuration> out;
  all_configurations(game, [&](const Configuration& s) {
    if (oracle::stable(game, s)) out.push_back(s);
  });
  return out;
}

}  // namespace coingame::oracle

namespace coingame::testing {

inline std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

/// Small-integer game; distinct powers when requested.
inline Game random_game(std::mt19937_64& rng, std::size_t n, std::size_t k, std::uint64_t lo,
                        std::uint64_t hi, bool distinct_powers = false) {
  std::vector<Rational> powers;
  while (powers.size() < n) {
    Rational p(static_cast<long>(uniform(rng, lo, hi)));
    if (distinct_powers &&
        std::find(powers.begin(), powers.end(), p) != powers.end()) {
      continue;
    }
    powers.push_back(p);
  }
  std::vector<Rational> rewards;
  for (std::size_t c = 0; c < k; ++c) rewards.emplace_back(static_cast<long>(uniform(rng, lo, hi)));
  return Game::from_values(std::move(powers), std::move(rewards));
}

inline Configuration random_configuration(std::mt19937_64& rng, const Game& game) {
  std::vector<CoinIndex> v(game.miner_count());
  for (auto& c : v) c = rng() % game.coin_count();
  return Configuration(std::move(v));
}

/// The two-miner, two-coin game: powers 2 and 1, unit rewards.
inline Game two_by_two() {
  return Game::from_values({Rational(2), Rational(1)}, {Rational(1), Rational(1)});
}

}  // namespace coingame::testing
