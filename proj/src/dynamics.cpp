#include "coingame/dynamics.hpp"

#include <algorithm>
#include <limits>

#include "coingame/error.hpp"

namespace coingame {

PotentialList::PotentialList(std::vector<PotentialEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
}

std::size_t PotentialList::position_of(CoinIndex c) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].coin == c) return i;
  }
  throw PreconditionError("coin " + std::to_string(c) + " not in potential list");
}

PotentialList potential_list(const Game& game, const Configuration& s) {
  const auto loads = coin_loads(game, s);
  std::vector<PotentialEntry> entries;
  entries.reserve(loads.size());
  for (CoinIndex c = 0; c < loads.size(); ++c) {
    if (loads[c].is_zero()) {
      entries.push_back({ExtendedRational::infinity(), c});
    } else {
      entries.push_back({game.reward(c) / loads[c], c});
    }
  }
  return PotentialList(std::move(entries));
}

std::strong_ordering compare_potential(const PotentialList& a, const PotentialList& b) {
  if (a.size() != b.size()) {
    throw PreconditionError("potential lists of different length: " +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  return std::lexicographical_compare_three_way(a.entries().begin(), a.entries().end(),
                                                b.entries().begin(), b.entries().end());
}

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kFirstIndex: return "first-index";
    case SchedulerKind::kRandom: return "random";
    case SchedulerKind::kBestImprovement: return "best-improvement";
    case SchedulerKind::kAdversarial: return "adversarial";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name) {
  for (SchedulerKind kind : kAllSchedulers) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<Move> better_response_steps(const Game& game, const Configuration& s) {
  std::vector<Move> moves;
  for (MinerIndex p = 0; p < game.miner_count(); ++p) {
    for (CoinIndex c : better_response_targets(game, s, p)) moves.push_back({p, c});
  }
  return moves;
}

Scheduler::Scheduler(SchedulerPolicy policy) : policy_(policy), rng_(policy.seed) {}

Move Scheduler::select(const Game& game, const Configuration& s,
                       std::span<const Move> candidates) {
  if (candidates.empty()) throw PreconditionError("scheduler called without candidate steps");
  switch (policy_.kind) {
    case SchedulerKind::kFirstIndex:
      return candidates.front();

    case SchedulerKind::kRandom:
      // Modulo reduction keeps the draw identical across standard libraries.
      return candidates[rng_() % candidates.size()];

    case SchedulerKind::kBestImprovement: {
      std::size_t best = 0;
      Rational best_gain;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& m = candidates[i];
        const Rational gain = payoff(game, s.with_move(m.miner, m.to), m.miner) -
                              payoff(game, s, m.miner);
        if (i == 0 || gain > best_gain) {
          best = i;
          best_gain = gain;
        }
      }
      return candidates[best];
    }

    case SchedulerKind::kAdversarial: {
      std::size_t best = 0;
      PotentialList best_list;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& m = candidates[i];
        PotentialList list = potential_list(game, s.with_move(m.miner, m.to));
        if (i == 0 || compare_potential(list, best_list) < 0) {
          best = i;
          best_list = std::move(list);
        }
      }
      return candidates[best];
    }
  }
  return candidates.front();
}

std::optional<std::pair<Configuration, StepRecord>> step(const Game& game,
                                                         const Configuration& s,
                                                         Scheduler& scheduler,
                                                         std::size_t step_number) {
  const auto moves = better_response_steps(game, s);
  if (moves.empty()) return std::nullopt;
  const Move chosen = scheduler.select(game, s, moves);

  Configuration next = s.with_move(chosen.miner, chosen.to);
  StepRecord record;
  record.step = step_number;
  record.miner = chosen.miner;
  record.from = s[chosen.miner];
  record.to = chosen.to;
  record.payoff_before = payoff(game, s, chosen.miner);
  record.payoff_after = payoff(game, next, chosen.miner);
  record.potential_before = potential_list(game, s);
  record.potential_after = potential_list(game, next);
  return std::make_pair(std::move(next), std::move(record));
}

std::size_t default_max_steps(const Game& game) {
  constexpr std::size_t kCap = 1'000'000;
  std::size_t bound = 1;
  for (std::size_t i = 0; i < game.miner_count(); ++i) {
    if (bound > kCap / std::max<std::size_t>(game.coin_count(), 1)) return kCap;
    bound *= game.coin_count();
  }
  return std::min(bound, kCap);
}

Trace converge(const Game& game, const Configuration& start, Scheduler& scheduler,
               std::size_t max_steps, const StepObserver& observer) {
  if (max_steps == 0) throw PreconditionError("max_steps must be positive");
  game.validate(start);

  Trace trace;
  trace.initial = start;
  Configuration current = start;
  while (true) {
    auto next = step(game, current, scheduler, trace.steps.size() + 1);
    if (!next) {
      trace.converged = true;
      break;
    }
    if (trace.steps.size() == max_steps) break;
    current = std::move(next->first);
    trace.steps.push_back(std::move(next->second));
    if (observer && !observer(trace.steps.back(), current)) break;
  }
  trace.final = std::move(current);
  return trace;
}

SymmetricPotential symmetric_potential(const Game& game, const Configuration& s) {
  if (!game.is_symmetric()) {
    throw PreconditionError("symmetric potential needs equal rewards on every coin");
  }
  SymmetricPotential out;
  for (const Rational& load : coin_loads(game, s)) {
    if (load.is_zero()) {
      ++out.empty_coins;
    } else {
      out.occupied_sum += Rational(1) / load;
    }
  }
  return out;
}

CounterexampleReport exact_potential_counterexample() {
  Game game = Game::from_values({Rational(2), Rational(1)}, {Rational(1), Rational(1)});
  const std::array<Configuration, 4> cycle = {
      Configuration({0, 0}), Configuration({0, 1}), Configuration({1, 1}),
      Configuration({1, 0})};

  CounterexampleReport report{std::move(game), cycle, {}, {}, {}, Rational(0)};
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    for (MinerIndex p = 0; p < 2; ++p) report.payoffs[i][p] = payoff(report.game, cycle[i], p);
  }
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Configuration& from = cycle[i];
    const Configuration& to = cycle[(i + 1) % cycle.size()];
    const MinerIndex mover = from[0] != to[0] ? 0 : 1;
    report.movers[i] = mover;
    report.deltas[i] = payoff(report.game, to, mover) - payoff(report.game, from, mover);
    report.cycle_sum += report.deltas[i];
  }
  return report;
}

}  // namespace coingame
