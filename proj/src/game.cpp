#include "coingame/game.hpp"

#include <algorithm>
#include <set>

#include "coingame/error.hpp"

namespace coingame {

namespace {

// u_p(s) < u_p((s_-p, c)) with the common factor m_p divided out:
// F(s.p) / M_{s.p} < F(c) / (M_c + m_p).
bool gains(const Game& game, std::span<const Rational> loads, CoinIndex from, CoinIndex to,
           const Rational& power) {
  if (from == to) return false;
  // Cross-multiplied; all denominators are positive.
  const mpq_class lhs = game.reward(from).raw() * (loads[to].raw() + power.raw());
  const mpq_class rhs = game.reward(to).raw() * loads[from].raw();
  return lhs < rhs;
}

void check_rewards(const RewardFunction& rewards, std::size_t coins, bool allow_zero) {
  if (rewards.size() != coins) {
    throw PreconditionError("reward function covers " + std::to_string(rewards.size()) +
                            " coins, expected " + std::to_string(coins));
  }
  for (std::size_t c = 0; c < coins; ++c) {
    const int sign = rewards(c).sign();
    if (sign < 0 || (sign == 0 && !allow_zero)) {
      throw PreconditionError("reward of coin " + std::to_string(c) + " must be positive");
    }
  }
}

}  // namespace

Rational RewardFunction::max() const {
  if (rewards_.empty()) return Rational(0);
  return *std::max_element(rewards_.begin(), rewards_.end());
}

Configuration Configuration::with_move(MinerIndex p, CoinIndex c) const {
  Configuration out = *this;
  out.assignment_.at(p) = c;
  return out;
}

std::string Configuration::to_string() const {
  std::string out = "<";
  for (std::size_t p = 0; p < assignment_.size(); ++p) {
    if (p) out += ",";
    out += std::to_string(assignment_[p]);
  }
  return out + ">";
}

Game Game::create(std::vector<Miner> miners, std::vector<Coin> coins,
                  RewardFunction rewards) {
  if (miners.empty()) throw PreconditionError("a game needs at least one miner");
  if (coins.empty()) throw PreconditionError("a game needs at least one coin");
  std::set<std::string> ids;
  for (std::size_t p = 0; p < miners.size(); ++p) {
    if (miners[p].index != p) throw PreconditionError("miner indices must be 0..n-1 in order");
    if (miners[p].power.sign() <= 0) {
      throw PreconditionError("power of miner '" + miners[p].id + "' must be positive");
    }
    if (!ids.insert(miners[p].id).second) {
      throw PreconditionError("duplicate miner id '" + miners[p].id + "'");
    }
  }
  ids.clear();
  for (std::size_t c = 0; c < coins.size(); ++c) {
    if (coins[c].index != c) throw PreconditionError("coin indices must be 0..k-1 in order");
    if (!ids.insert(coins[c].id).second) {
      throw PreconditionError("duplicate coin id '" + coins[c].id + "'");
    }
  }
  check_rewards(rewards, coins.size(), /*allow_zero=*/false);

  Game game;
  game.miners_ = std::move(miners);
  game.coins_ = std::move(coins);
  game.rewards_ = std::move(rewards);
  return game;
}

Game Game::from_values(std::vector<Rational> powers, std::vector<Rational> rewards) {
  std::vector<Miner> miners;
  for (std::size_t p = 0; p < powers.size(); ++p) {
    miners.push_back({"p" + std::to_string(p + 1), p, std::move(powers[p])});
  }
  std::vector<Coin> coins;
  for (std::size_t c = 0; c < rewards.size(); ++c) {
    coins.push_back({"c" + std::to_string(c + 1), c});
  }
  return create(std::move(miners), std::move(coins), RewardFunction(std::move(rewards)));
}

Game Game::with_rewards(RewardFunction rewards) const {
  check_rewards(rewards, coins_.size(), /*allow_zero=*/true);
  Game game = *this;
  game.rewards_ = std::move(rewards);
  return game;
}

Rational Game::total_power() const {
  Rational total;
  for (const auto& m : miners_) total += m.power;
  return total;
}

bool Game::is_symmetric() const {
  const auto values = rewards_.values();
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) ==
         values.end();
}

void Game::validate(const Configuration& s) const {
  if (s.size() != miners_.size()) {
    throw PreconditionError("configuration has " + std::to_string(s.size()) +
                            " entries, game has " + std::to_string(miners_.size()) +
                            " miners");
  }
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (s[p] >= coins_.size()) {
      throw PreconditionError("miner " + std::to_string(p) + " assigned to unknown coin " +
                              std::to_string(s[p]));
    }
  }
}

std::vector<Rational> coin_loads(const Game& game, const Configuration& s) {
  std::vector<Rational> loads(game.coin_count());
  for (MinerIndex p = 0; p < s.size(); ++p) loads.at(s[p]) += game.power(p);
  return loads;
}

Rational coin_power(const Game& game, const Configuration& s, CoinIndex c) {
  Rational total;
  for (MinerIndex p = 0; p < s.size(); ++p) {
    if (s[p] == c) total += game.power(p);
  }
  return total;
}

std::vector<MinerIndex> miner_set(const Game& /*game*/, const Configuration& s, CoinIndex c) {
  std::vector<MinerIndex> out;
  for (MinerIndex p = 0; p < s.size(); ++p) {
    if (s[p] == c) out.push_back(p);
  }
  return out;
}

ExtendedRational rpu(const Game& game, const Configuration& s, CoinIndex c) {
  const Rational load = coin_power(game, s, c);
  if (load.is_zero()) return ExtendedRational::infinity();
  return game.reward(c) / load;
}

Rational payoff(const Game& game, const Configuration& s, MinerIndex p) {
  const CoinIndex c = s.at(p);
  return game.power(p) * game.reward(c) / coin_power(game, s, c);
}

bool is_better_response(const Game& game, const Configuration& s, MinerIndex p,
                        CoinIndex c) {
  if (c >= game.coin_count()) throw PreconditionError("unknown coin index");
  const auto loads = coin_loads(game, s);
  return gains(game, loads, s.at(p), c, game.power(p));
}

std::vector<CoinIndex> better_response_targets(const Game& game, const Configuration& s,
                                               MinerIndex p) {
  const auto loads = coin_loads(game, s);
  std::vector<CoinIndex> out;
  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    if (gains(game, loads, s.at(p), c, game.power(p))) out.push_back(c);
  }
  return out;
}

bool is_stable_miner(const Game& game, const Configuration& s, MinerIndex p) {
  return better_response_targets(game, s, p).empty();
}

bool is_stable_with_loads(const Game& game, const Configuration& s,
                          std::span<const Rational> loads) {
  for (MinerIndex p = 0; p < s.size(); ++p) {
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      if (gains(game, loads, s[p], c, game.power(p))) return false;
    }
  }
  return true;
}

bool is_stable(const Game& game, const Configuration& s) {
  const auto loads = coin_loads(game, s);
  return is_stable_with_loads(game, s, loads);
}

}  // namespace coingame
