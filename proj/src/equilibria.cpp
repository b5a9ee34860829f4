#include "coingame/equilibria.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include "coingame/error.hpp"

namespace coingame {

namespace {

// F(from)/M_from < F(to)/(M_to + m): moving strictly pays. Loads may cover a
// subset of the miners (partial constructions).
bool gains(const Game& game, std::span<const Rational> loads, CoinIndex from, CoinIndex to,
           const Rational& power) {
  if (from == to) return false;
  return game.reward(from).raw() * (loads[to].raw() + power.raw()) <
         game.reward(to).raw() * loads[from].raw();
}

// argmax_c F(c) * m / (M_c + m), lowest coin index on ties.
CoinIndex best_entry_coin(const Game& game, std::span<const Rational> loads,
                          const Rational& power) {
  CoinIndex best = 0;
  Rational best_value = game.reward(0) / (loads[0] + power);
  for (CoinIndex c = 1; c < game.coin_count(); ++c) {
    Rational value = game.reward(c) / (loads[c] + power);
    if (value > best_value) {
      best = c;
      best_value = std::move(value);
    }
  }
  return best;
}

std::vector<MinerIndex> mask_members(std::uint64_t mask) {
  std::vector<MinerIndex> out;
  for (MinerIndex p = 0; mask; ++p, mask >>= 1) {
    if (mask & 1U) out.push_back(p);
  }
  return out;
}

// Partial assignment used while building equilibria miner by miner.
struct PartialConfiguration {
  std::vector<CoinIndex> coin;
  std::vector<bool> placed;
  std::vector<Rational> loads;

  PartialConfiguration(std::size_t miners, std::size_t coins)
      : coin(miners, 0), placed(miners, false), loads(coins) {}

  void place(const Game& game, MinerIndex p, CoinIndex c) {
    coin[p] = c;
    placed[p] = true;
    loads[c] += game.power(p);
  }

  bool stable(const Game& game, MinerIndex p) const {
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      if (gains(game, loads, coin[p], c, game.power(p))) return false;
    }
    return true;
  }
};

GenericResult generic_exhaustive(const Game& game) {
  const std::size_t n = game.miner_count();
  if (n > kMaxExhaustiveGenericMiners) {
    throw BudgetExceeded("exhaustive genericity check needs n <= " +
                             std::to_string(kMaxExhaustiveGenericMiners) + ", got " +
                             std::to_string(n),
                         std::uint64_t{1} << std::min<std::size_t>(n, 63));
  }
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<Rational> sums(subsets);
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    const std::uint64_t low = mask & (~mask + 1);
    sums[mask] = sums[mask ^ low] + game.power(static_cast<MinerIndex>(std::countr_zero(low)));
  }

  struct Entry {
    Rational ratio;
    CoinIndex coin;
    std::uint64_t mask;
  };
  std::vector<Entry> entries;
  entries.reserve(game.coin_count() * (subsets - 1));
  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
      entries.push_back({game.reward(c) / sums[mask], c, mask});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.ratio, a.coin, a.mask) < std::tie(b.ratio, b.coin, b.mask);
  });

  GenericResult result;
  result.method = CheckMethod::kExhaustive;
  result.comparisons = entries.size();

  // Smallest witness key: disjoint subsets first, then (coin, other coin, masks).
  using Key = std::tuple<int, CoinIndex, CoinIndex, std::uint64_t, std::uint64_t>;
  std::optional<Key> best;
  for (std::size_t lo = 0; lo < entries.size();) {
    std::size_t hi = lo + 1;
    while (hi < entries.size() && entries[hi].ratio == entries[lo].ratio) ++hi;
    for (std::size_t a = lo; a < hi; ++a) {
      for (std::size_t b = lo; b < hi; ++b) {
        if (entries[a].coin >= entries[b].coin) continue;
        const int overlapping = (entries[a].mask & entries[b].mask) != 0 ? 1 : 0;
        Key key{overlapping, entries[a].coin, entries[b].coin, entries[a].mask,
                entries[b].mask};
        if (!best || key < *best) best = key;
      }
    }
    lo = hi;
  }
  if (best) {
    const auto& [overlap, c, c2, mask, mask2] = *best;
    result.holds = false;
    result.witness = GenericWitness{c, mask_members(mask), c2, mask_members(mask2)};
  }
  return result;
}

GenericResult generic_sampled(const Game& game, std::uint64_t samples, std::uint64_t seed) {
  GenericResult result;
  result.method = CheckMethod::kSampled;
  const std::size_t n = game.miner_count();
  const std::size_t k = game.coin_count();
  if (k < 2) return result;

  std::mt19937_64 rng(seed);
  auto draw_subset = [&](std::vector<MinerIndex>& members, Rational& sum) {
    do {
      members.clear();
      sum = Rational(0);
      for (MinerIndex p = 0; p < n; ++p) {
        if (rng() & 1U) {
          members.push_back(p);
          sum += game.power(p);
        }
      }
    } while (members.empty());
  };

  std::vector<MinerIndex> first, second;
  Rational first_sum, second_sum;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const CoinIndex c = rng() % k;
    CoinIndex c2 = rng() % (k - 1);
    if (c2 >= c) ++c2;
    draw_subset(first, first_sum);
    draw_subset(second, second_sum);
    ++result.comparisons;
    if (game.reward(c) * second_sum == game.reward(c2) * first_sum) {
      result.holds = false;
      result.witness = GenericWitness{c, first, c2, second};
      break;
    }
  }
  return result;
}

}  // namespace

std::uint64_t configuration_count(const Game& game) {
  std::uint64_t count = 1;
  const std::uint64_t k = game.coin_count();
  for (std::size_t i = 0; i < game.miner_count(); ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / k) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= k;
  }
  return count;
}

void for_each_configuration(
    const Game& game, std::uint64_t budget,
    const std::function<bool(const Configuration&, std::span<const Rational>)>& visit) {
  const std::uint64_t total = configuration_count(game);
  if (total > budget) {
    throw BudgetExceeded("enumeration needs " + std::to_string(total) +
                             " configurations, budget is " + std::to_string(budget),
                         total);
  }
  const std::size_t n = game.miner_count();
  const std::size_t k = game.coin_count();
  std::vector<CoinIndex> digits(n, 0);
  std::vector<Rational> loads(k);
  loads[0] = game.total_power();

  for (std::uint64_t index = 0; index < total; ++index) {
    if (!visit(Configuration(digits), loads)) return;
    for (MinerIndex p = 0; p < n; ++p) {
      const CoinIndex from = digits[p];
      const CoinIndex to = from + 1 == k ? 0 : from + 1;
      loads[from] -= game.power(p);
      loads[to] += game.power(p);
      digits[p] = to;
      if (to != 0) break;
    }
  }
}

std::vector<MinerIndex> miners_by_power(const Game& game) {
  std::vector<MinerIndex> order(game.miner_count());
  std::iota(order.begin(), order.end(), MinerIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](MinerIndex a, MinerIndex b) {
    return game.power(a) > game.power(b);
  });
  return order;
}

std::vector<CoinIndex> coins_by_reward(const Game& game) {
  std::vector<CoinIndex> order(game.coin_count());
  std::iota(order.begin(), order.end(), CoinIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](CoinIndex a, CoinIndex b) {
    return game.reward(a) > game.reward(b);
  });
  return order;
}

bool StableSet::contains(const Configuration& s) const {
  return std::find(configurations.begin(), configurations.end(), s) != configurations.end();
}

StableSet enumerate_stable(const Game& game, std::uint64_t budget) {
  StableSet out;
  for_each_configuration(game, budget,
                         [&](const Configuration& s, std::span<const Rational> loads) {
                           ++out.scanned;
                           if (is_stable_with_loads(game, s, loads)) {
                             out.configurations.push_back(s);
                           }
                           return true;
                         });
  return out;
}

Configuration construct_equilibrium(const Game& game) {
  PartialConfiguration partial(game.miner_count(), game.coin_count());
  for (MinerIndex p : miners_by_power(game)) {
    partial.place(game, p, best_entry_coin(game, partial.loads, game.power(p)));
  }
  return Configuration(std::move(partial.coin));
}

bool AssumptionReport::holds() const {
  return (!never_alone || never_alone->holds) && (!generic || generic->holds);
}

namespace {

std::optional<CoinIndex> lonely_unattractive_coin(const Game& game, const Configuration& s,
                                                  std::span<const Rational> loads) {
  std::vector<std::size_t> counts(game.coin_count(), 0);
  for (MinerIndex p = 0; p < s.size(); ++p) ++counts[s[p]];
  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    if (counts[c] > 1) continue;
    bool attracts = false;
    for (MinerIndex p = 0; p < s.size() && !attracts; ++p) {
      attracts = gains(game, loads, s[p], c, game.power(p));
    }
    if (!attracts) return c;
  }
  return std::nullopt;
}

}  // namespace

bool check_never_alone(const Game& game, const Configuration& s) {
  game.validate(s);
  const auto loads = coin_loads(game, s);
  return !lonely_unattractive_coin(game, s, loads).has_value();
}

AssumptionReport check_never_alone_all(const Game& game, std::uint64_t budget) {
  NeverAloneResult result;
  for_each_configuration(game, budget,
                         [&](const Configuration& s, std::span<const Rational> loads) {
                           ++result.configurations_checked;
                           if (auto c = lonely_unattractive_coin(game, s, loads)) {
                             result.holds = false;
                             result.witness = NeverAloneWitness{s, *c};
                             return false;
                           }
                           return true;
                         });
  AssumptionReport report;
  report.never_alone = std::move(result);
  return report;
}

AssumptionReport check_generic(const Game& game, GenericityMode mode) {
  AssumptionReport report;
  report.generic = mode.method == CheckMethod::kExhaustive
                       ? generic_exhaustive(game)
                       : generic_sampled(game, mode.samples, mode.seed);
  return report;
}

std::string_view to_string(BetterEquilibrium::Status status) {
  switch (status) {
    case BetterEquilibrium::Status::kFound: return "found";
    case BetterEquilibrium::Status::kNotApplicable: return "not-applicable";
    case BetterEquilibrium::Status::kAssumptionFailed: return "assumption-failed";
    case BetterEquilibrium::Status::kNoneFound: return "none-found";
  }
  return "unknown";
}

BetterEquilibrium find_better_equilibrium(const Game& game, const Configuration& s,
                                          GenericityMode mode, std::uint64_t budget) {
  game.validate(s);
  if (!is_stable(game, s)) {
    throw PreconditionError("find_better_equilibrium needs a stable configuration, got " +
                            s.to_string());
  }
  BetterEquilibrium out;
  const StableSet stable = enumerate_stable(game, budget);
  out.stable_count = stable.size();
  if (stable.size() < 2) {
    out.status = BetterEquilibrium::Status::kNotApplicable;
    return out;
  }
  out.assumptions = check_generic(game, mode);
  if (!out.assumptions.holds()) {
    out.status = BetterEquilibrium::Status::kAssumptionFailed;
    return out;
  }
  for (const Configuration& other : stable.configurations) {
    if (other == s) continue;
    for (MinerIndex p = 0; p < game.miner_count(); ++p) {
      if (payoff(game, other, p) > payoff(game, s, p)) {
        out.status = BetterEquilibrium::Status::kFound;
        out.miner = p;
        out.configuration = other;
        return out;
      }
    }
  }
  out.status = BetterEquilibrium::Status::kNoneFound;
  return out;
}

std::string_view to_string(TwoEquilibria::Status status) {
  switch (status) {
    case TwoEquilibria::Status::kConstructed: return "constructed";
    case TwoEquilibria::Status::kAssumptionFailed: return "assumption-failed";
    case TwoEquilibria::Status::kNotApplicable: return "not-applicable";
    case TwoEquilibria::Status::kUnstable: return "unstable";
  }
  return "unknown";
}

TwoEquilibria two_equilibria(const Game& game, GenericityMode mode, std::uint64_t budget) {
  TwoEquilibria out;
  if (game.miner_count() < 2 || game.coin_count() < 2) {
    out.status = TwoEquilibria::Status::kNotApplicable;
    return out;
  }
  out.assumptions = check_never_alone_all(game, budget);
  out.assumptions.generic = check_generic(game, mode).generic;
  if (!out.assumptions.holds()) {
    out.status = TwoEquilibria::Status::kAssumptionFailed;
    return out;
  }

  const auto miners = miners_by_power(game);
  const auto coins = coins_by_reward(game);
  std::array<PartialConfiguration, 2> builds = {
      PartialConfiguration(game.miner_count(), game.coin_count()),
      PartialConfiguration(game.miner_count(), game.coin_count())};
  builds[0].place(game, miners[0], coins[0]);
  builds[0].place(game, miners[1], coins[1]);
  builds[1].place(game, miners[0], coins[1]);
  builds[1].place(game, miners[1], coins[0]);

  for (std::size_t b = 0; b < builds.size(); ++b) {
    auto& build = builds[b];
    for (std::size_t k = 2; k < miners.size(); ++k) {
      // Miners stable before the extension must stay stable after it.
      std::vector<MinerIndex> stable_before;
      for (std::size_t j = 0; j < k; ++j) {
        if (build.stable(game, miners[j])) stable_before.push_back(miners[j]);
      }
      const MinerIndex newcomer = miners[k];
      build.place(game, newcomer, best_entry_coin(game, build.loads, game.power(newcomer)));
      if (!build.stable(game, newcomer)) {
        out.findings.push_back("construction " + std::to_string(b + 1) + ": new miner " +
                               game.miners()[newcomer].id + " unstable after placement");
      }
      for (MinerIndex q : stable_before) {
        if (!build.stable(game, q)) {
          out.findings.push_back("construction " + std::to_string(b + 1) + ": miner " +
                                 game.miners()[q].id + " destabilised by adding " +
                                 game.miners()[newcomer].id);
        }
      }
    }
  }

  Configuration first(std::move(builds[0].coin));
  Configuration second(std::move(builds[1].coin));
  const bool ok = is_stable(game, first) && is_stable(game, second) && first != second;
  out.status = ok && out.findings.empty() ? TwoEquilibria::Status::kConstructed
                                          : TwoEquilibria::Status::kUnstable;
  out.configurations = std::make_pair(std::move(first), std::move(second));
  return out;
}

}  // namespace coingame
