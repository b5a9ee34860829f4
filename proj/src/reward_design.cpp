#include "coingame/reward_design.hpp"

#include <algorithm>
#include <set>

#include "coingame/equilibria.hpp"

namespace coingame {

namespace {

void check_stage(const DesignProblem& problem, std::size_t stage) {
  if (stage < 1 || stage > problem.miner_count()) {
    throw PreconditionError("stage " + std::to_string(stage) + " outside 1.." +
                            std::to_string(problem.miner_count()));
  }
}

InvariantFinding finding(std::size_t stage, std::size_t iteration, std::size_t step,
                         std::string property, std::string detail,
                         const Configuration& s, ErrorKind kind = ErrorKind::kInvariant) {
  return {kind, stage, iteration, step, std::move(property), std::move(detail), s};
}

// Per-step audit of a stage-i learning phase that started at `start` with
// mover rank m. Checks the five step invariants and stage-set membership.
class PhaseAuditor {
 public:
  PhaseAuditor(const DesignProblem& problem, std::size_t stage, std::size_t iteration,
               const Configuration& start, std::size_t mover)
      : problem_(problem),
        stage_(stage),
        iteration_(iteration),
        start_(start),
        mover_(mover),
        from_(problem.final_coin(stage - 1)),
        to_(problem.final_coin(stage)) {
    const Configuration after_first = start.with_move(problem.miner_at_rank(mover), to_);
    const Game& game = problem.game();
    from_start_ = coin_power(game, start, from_);
    to_start_ = coin_power(game, start, to_);
    from_after_first_ = coin_power(game, after_first, from_);
    to_after_first_ = coin_power(game, after_first, to_);
  }

  std::optional<InvariantFinding> audit(std::size_t step, const Configuration& s) const {
    const std::size_t n = problem_.miner_count();
    for (std::size_t k = 1; k < mover_; ++k) {
      const MinerIndex p = problem_.miner_at_rank(k);
      if (s[p] != start_[p]) {
        return fail(step, "psi1", "rank " + std::to_string(k) + " left its coin", s);
      }
    }
    if (s[problem_.miner_at_rank(mover_)] != to_) {
      return fail(step, "psi2", "mover rank " + std::to_string(mover_) + " off the stage coin",
                  s);
    }
    for (std::size_t k = mover_ + 1; k <= n; ++k) {
      const CoinIndex c = s[problem_.miner_at_rank(k)];
      if (c != from_ && c != to_) {
        return fail(step, "psi3", "rank " + std::to_string(k) + " outside the stage coins", s);
      }
    }
    const Rational from_load = coin_power(problem_.game(), s, from_);
    if (from_load < from_after_first_ || from_load > from_start_) {
      return fail(step, "psi4", "load " + from_load.to_string() + " on the source coin", s);
    }
    const Rational to_load = coin_power(problem_.game(), s, to_);
    if (to_load < to_start_ || to_load > to_after_first_) {
      return fail(step, "psi5", "load " + to_load.to_string() + " on the stage coin", s);
    }
    if (!in_stage_set(problem_, stage_, s)) {
      return fail(step, "stage-set", "configuration left the stage set", s);
    }
    return std::nullopt;
  }

 private:
  InvariantFinding fail(std::size_t step, std::string property, std::string detail,
                        const Configuration& s) const {
    return finding(stage_, iteration_, step, std::move(property), std::move(detail), s);
  }

  const DesignProblem& problem_;
  std::size_t stage_;
  std::size_t iteration_;
  Configuration start_;
  std::size_t mover_;
  CoinIndex from_;
  CoinIndex to_;
  Rational from_start_, to_start_, from_after_first_, to_after_first_;
};

}  // namespace

DesignProblem::DesignProblem(Game game, Configuration initial, Configuration target,
                             SchedulerPolicy policy, DesignOptions options)
    : game_(std::move(game)),
      initial_(std::move(initial)),
      target_(std::move(target)),
      policy_(policy),
      options_(options) {
  game_.validate(initial_);
  game_.validate(target_);
  if (!is_stable(game_, initial_)) {
    throw PreconditionError("initial configuration " + initial_.to_string() + " is not stable");
  }
  if (!is_stable(game_, target_)) {
    throw PreconditionError("target configuration " + target_.to_string() + " is not stable");
  }
  by_rank_ = miners_by_power(game_);
  for (std::size_t r = 1; r < by_rank_.size(); ++r) {
    if (game_.power(by_rank_[r - 1]) == game_.power(by_rank_[r])) {
      throw PreconditionError("miners '" + game_.miners()[by_rank_[r - 1]].id + "' and '" +
                              game_.miners()[by_rank_[r]].id +
                              "' have equal power; reward design needs distinct powers");
    }
  }
  rank_of_.resize(by_rank_.size());
  for (std::size_t r = 0; r < by_rank_.size(); ++r) rank_of_[by_rank_[r]] = r + 1;
}

Configuration stage_target(const DesignProblem& problem, std::size_t stage) {
  check_stage(problem, stage);
  const std::size_t n = problem.miner_count();
  std::vector<CoinIndex> assignment(n);
  for (std::size_t k = 1; k <= n; ++k) {
    assignment[problem.miner_at_rank(k)] =
        k <= stage ? problem.final_coin(k) : problem.final_coin(stage);
  }
  return Configuration(std::move(assignment));
}

bool in_stage_set(const DesignProblem& problem, std::size_t stage, const Configuration& s) {
  check_stage(problem, stage);
  if (stage < 2) throw PreconditionError("the stage set is defined for stages >= 2");
  problem.game().validate(s);
  const CoinIndex to = problem.final_coin(stage);
  const CoinIndex from = problem.final_coin(stage - 1);
  for (std::size_t k = 1; k <= problem.miner_count(); ++k) {
    const CoinIndex c = s[problem.miner_at_rank(k)];
    if (k < stage ? c != problem.final_coin(k) : (c != to && c != from)) return false;
  }
  return true;
}

std::size_t mover_rank(const DesignProblem& problem, std::size_t stage, const Configuration& s) {
  if (!in_stage_set(problem, stage, s)) {
    throw PreconditionError("configuration " + s.to_string() + " is not in the stage-" +
                            std::to_string(stage) + " set");
  }
  const CoinIndex to = problem.final_coin(stage);
  std::size_t rank = problem.miner_count();
  while (rank >= stage && s[problem.miner_at_rank(rank)] == to) --rank;
  if (rank < stage) {
    throw PreconditionError("configuration is the stage target; there is no mover");
  }
  return rank;
}

MinerIndex mover_index(const DesignProblem& problem, std::size_t stage,
                       const Configuration& s) {
  return problem.miner_at_rank(mover_rank(problem, stage, s));
}

DesignedRewards design_rewards(const DesignProblem& problem, std::size_t stage,
                               const Configuration& s) {
  check_stage(problem, stage);
  const Game& game = problem.game();
  game.validate(s);

  DesignedRewards out;
  out.configuration = s;
  out.stage = stage;
  std::vector<Rational> designed(game.coin_count());

  if (stage == 1) {
    Rational weakest = game.power(problem.miner_at_rank(problem.miner_count()));
    const Rational boosted = game.rewards().max() * (game.total_power() / weakest) * Rational(2);
    const CoinIndex target = problem.final_coin(1);
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      designed[c] = c == target ? boosted : game.reward(c);
    }
  } else {
    const std::size_t mover = mover_rank(problem, stage, s);
    const std::size_t anchor = mover - 1;
    const auto loads = coin_loads(game, s);
    Rational level;
    bool any = false;
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      if (loads[c].is_zero()) continue;
      Rational value = game.reward(c) / loads[c];
      if (!any || value > level) level = std::move(value);
      any = true;
    }
    const CoinIndex target = problem.final_coin(stage);
    const Rational& anchor_power = game.power(problem.miner_at_rank(anchor));
    for (CoinIndex c = 0; c < game.coin_count(); ++c) {
      designed[c] = c == target ? level * (loads[c] + anchor_power) : level * loads[c];
    }
    out.mover_rank = mover;
    out.anchor_rank = anchor;
    out.level = std::move(level);
  }

  for (CoinIndex c = 0; c < game.coin_count(); ++c) {
    if (designed[c] < game.reward(c)) out.below_base.push_back(c);
  }
  out.rewards = RewardFunction(std::move(designed));
  return out;
}

std::vector<std::uint8_t> progress_vector(const DesignProblem& problem, std::size_t stage,
                                          const Configuration& s) {
  check_stage(problem, stage);
  const CoinIndex to = problem.final_coin(stage);
  std::vector<std::uint8_t> bits;
  for (std::size_t k = stage; k <= problem.miner_count(); ++k) {
    bits.push_back(s[problem.miner_at_rank(k)] == to ? 1 : 0);
  }
  return bits;
}

std::uint64_t progress_rank(const DesignProblem& problem, std::size_t stage,
                            const Configuration& s) {
  const auto bits = progress_vector(problem, stage, s);
  if (bits.size() > 63) throw BudgetExceeded("progress vector longer than 63 entries", 0);
  std::uint64_t value = 0;
  for (std::uint8_t b : bits) value = (value << 1) | b;
  return value + 1;
}

void InvariantReport::merge(const InvariantReport& other) {
  steps_audited += other.steps_audited;
  phases_audited += other.phases_audited;
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  protocol.insert(protocol.end(), other.protocol.begin(), other.protocol.end());
}

void CostLedger::add(const Rational& extra) {
  phase_extras.push_back(extra);
  total += extra;
}

void CostLedger::merge(const CostLedger& other) {
  for (const Rational& extra : other.phase_extras) add(extra);
}

Rational phase_cost(const RewardFunction& designed, const RewardFunction& base) {
  Rational extra;
  for (CoinIndex c = 0; c < base.size(); ++c) {
    if (designed(c) > base(c)) extra += designed(c) - base(c);
  }
  return extra;
}

StageResult run_stage(const DesignProblem& problem, std::size_t stage,
                      const Configuration& entry, Scheduler& scheduler) {
  check_stage(problem, stage);
  const Game& game = problem.game();
  game.validate(entry);
  if (stage >= 2 && !in_stage_set(problem, stage, entry)) {
    throw PreconditionError("stage " + std::to_string(stage) + " entry " + entry.to_string() +
                            " is not in the stage set");
  }

  StageResult result;
  result.stage = stage;
  result.entry = entry;
  const Configuration target = stage_target(problem, stage);
  const std::size_t max_steps = problem.options().max_steps_per_phase
                                    ? problem.options().max_steps_per_phase
                                    : default_max_steps(game);
  // Progress ranks live in {1..2^(n-stage+1)}, so that many phases at most.
  const std::size_t width = problem.miner_count() - stage + 1;
  const std::uint64_t phase_bound =
      stage == 1 ? 1 : (width >= 63 ? UINT64_MAX : std::uint64_t{1} << width);

  auto& report = result.report;
  Configuration s = entry;
  if (stage >= 2) result.progress.push_back(progress_rank(problem, stage, s));

  while (s != target) {
    const std::size_t iteration = result.phases.size() + 1;
    if (result.phases.size() >= phase_bound) {
      report.violations.push_back(finding(stage, iteration, 0, "phase-bound",
                                          "stage did not finish within " +
                                              std::to_string(phase_bound) + " phases",
                                          s));
      break;
    }

    DesignedRewards designed = design_rewards(problem, stage, s);
    for (CoinIndex c : designed.below_base) {
      report.protocol.push_back({stage, iteration, c, designed.rewards(c), game.reward(c)});
    }
    if (problem.options().strict_protocol && !designed.below_base.empty()) {
      report.violations.push_back(finding(
          stage, iteration, 0, "protocol",
          "designed reward below base reward on coin " +
              game.coins()[designed.below_base.front()].id,
          s, ErrorKind::kPrecondition));
      break;
    }
    result.cost.add(phase_cost(designed.rewards, game.rewards()));
    const Game designed_game = game.with_rewards(designed.rewards);
    ++report.phases_audited;

    std::optional<PhaseAuditor> auditor;
    std::size_t mover = 0;
    if (stage >= 2) {
      mover = *designed.mover_rank;
      const std::vector<Move> expected = {
          Move{problem.miner_at_rank(mover), problem.final_coin(stage)}};
      if (better_response_steps(designed_game, s) != expected) {
        report.violations.push_back(finding(stage, iteration, 0, "first-step",
                                            "mover's step is not the only better response",
                                            s));
        break;
      }
      auditor.emplace(problem, stage, iteration, s, mover);
    }

    std::optional<InvariantFinding> broken;
    auto observer = [&](const StepRecord& record, const Configuration& reached) {
      ++report.steps_audited;
      if (auditor) broken = auditor->audit(record.step, reached);
      return !broken.has_value();
    };
    Trace trace = converge(designed_game, s, scheduler, max_steps, observer);
    const Configuration reached = trace.final;
    result.phases.push_back({std::move(designed), std::move(trace)});

    if (broken) {
      report.violations.push_back(std::move(*broken));
      break;
    }
    if (!result.phases.back().trace.converged) {
      report.violations.push_back(finding(stage, iteration, 0, "budget",
                                          "learning did not converge within " +
                                              std::to_string(max_steps) + " steps",
                                          reached, ErrorKind::kBudget));
      break;
    }

    if (stage >= 2) {
      // Phase outcome: stronger miners untouched, mover on the stage coin,
      // progress strictly up.
      bool lemma = in_stage_set(problem, stage, reached) &&
                   reached[problem.miner_at_rank(mover)] == problem.final_coin(stage);
      for (std::size_t k = 1; k < mover && lemma; ++k) {
        const MinerIndex p = problem.miner_at_rank(k);
        lemma = reached[p] == s[p];
      }
      if (!lemma) {
        report.violations.push_back(
            finding(stage, iteration, 0, "lemma", "phase outcome violates the stage lemma",
                    reached));
        break;
      }
      const std::uint64_t rank = progress_rank(problem, stage, reached);
      if (rank <= result.progress.back()) {
        report.violations.push_back(finding(
            stage, iteration, 0, "progress",
            "progress rank " + std::to_string(result.progress.back()) + " -> " +
                std::to_string(rank),
            reached));
        break;
      }
      result.progress.push_back(rank);
    }
    s = reached;
  }

  result.exit = s;
  result.completed = report.ok() && s == target;
  return result;
}

StageResult run_stage(const DesignProblem& problem, std::size_t stage,
                      const Configuration& entry) {
  Scheduler scheduler(problem.policy());
  return run_stage(problem, stage, entry, scheduler);
}

DesignResult run_design(const DesignProblem& problem) {
  DesignResult result;
  Scheduler scheduler(problem.policy());
  Configuration s = problem.initial();
  for (std::size_t stage = 1; stage <= problem.miner_count(); ++stage) {
    StageResult stage_result = run_stage(problem, stage, s, scheduler);
    s = stage_result.exit;
    result.cost.merge(stage_result.cost);
    result.report.merge(stage_result.report);
    const bool completed = stage_result.completed;
    result.stages.push_back(std::move(stage_result));
    if (!completed) break;
  }
  result.final = s;
  result.reached_target = s == problem.target();
  result.final_stable_under_base = is_stable(problem.game(), s);
  return result;
}

}  // namespace coingame
