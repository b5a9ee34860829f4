#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coingame/dynamics.hpp"
#include "coingame/error.hpp"
#include "coingame/game.hpp"

namespace coingame {

struct DesignOptions {
  /// Abort when a designed reward falls below the base reward of some coin.
  bool strict_protocol = false;
  /// Step cap for every learning phase; 0 means default_max_steps(game).
  std::size_t max_steps_per_phase = 0;
};

/// Move a system from stable s0 to stable sf by temporarily raising rewards.
///
/// Miners are addressed by power rank: rank 1 is the strongest miner. Powers
/// must be pairwise distinct so that ranks are unambiguous. Stages are
/// numbered 1..n; stage i ends with ranks 1..i at their final coins and every
/// weaker miner stacked on the final coin of rank i.
class DesignProblem {
 public:
  /// Throws PreconditionError if s0 or sf is not stable under the base
  /// rewards or if two miners have equal power.
  DesignProblem(Game game, Configuration initial, Configuration target,
                SchedulerPolicy policy = {}, DesignOptions options = {});

  const Game& game() const { return game_; }
  const Configuration& initial() const { return initial_; }
  const Configuration& target() const { return target_; }
  const SchedulerPolicy& policy() const { return policy_; }
  const DesignOptions& options() const { return options_; }
  std::size_t miner_count() const { return game_.miner_count(); }

  /// Miner holding the given 1-based power rank.
  MinerIndex miner_at_rank(std::size_t rank) const { return by_rank_.at(rank - 1); }
  /// 1-based power rank of miner p.
  std::size_t rank_of(MinerIndex p) const { return rank_of_.at(p); }
  /// Final coin of the miner at `rank`.
  CoinIndex final_coin(std::size_t rank) const { return target_[miner_at_rank(rank)]; }

 private:
  Game game_;
  Configuration initial_;
  Configuration target_;
  SchedulerPolicy policy_;
  DesignOptions options_;
  std::vector<MinerIndex> by_rank_;
  std::vector<std::size_t> rank_of_;
};

/// s_i: ranks <= i at their final coins, the rest on the final coin of rank i.
Configuration stage_target(const DesignProblem& problem, std::size_t stage);

/// Membership in the stage's safe set (stage >= 2): ranks < stage at their
/// final coins, every other miner on the final coin of rank stage or stage-1.
bool in_stage_set(const DesignProblem& problem, std::size_t stage, const Configuration& s);

/// Rank of the weakest miner not yet on the stage coin, i.e. the smallest j
/// such that every rank above j already sits there. Requires s in the stage
/// set and s != stage_target.
std::size_t mover_rank(const DesignProblem& problem, std::size_t stage, const Configuration& s);

/// Miner index of the mover.
MinerIndex mover_index(const DesignProblem& problem, std::size_t stage, const Configuration& s);

struct DesignedRewards {
  RewardFunction rewards;
  Configuration configuration;  // the configuration the rewards were designed for
  std::size_t stage = 0;
  std::optional<std::size_t> mover_rank;   // stage >= 2
  std::optional<std::size_t> anchor_rank;  // mover_rank - 1
  std::optional<Rational> level;           // R(s): highest RPU among occupied coins
  std::vector<CoinIndex> below_base;       // coins where designed < base reward
};

/// Stage 1 lifts the final coin of rank 1 to maxF * (sum m / min m) * 2 and
/// keeps every other reward. Stage i >= 2 gives the stage coin
/// R(s) * (M + m_anchor) and every other coin R(s) * M, so all other occupied
/// coins share the RPU R(s) and unoccupied coins get zero.
DesignedRewards design_rewards(const DesignProblem& problem, std::size_t stage,
                               const Configuration& s);

/// Entry j is 1 iff the miner of rank stage+j sits on the stage coin.
std::vector<std::uint8_t> progress_vector(const DesignProblem& problem, std::size_t stage,
                                          const Configuration& s);

/// 1-based lexicographic rank of progress_vector among all binary vectors of
/// that length (first entry most significant).
std::uint64_t progress_rank(const DesignProblem& problem, std::size_t stage,
                            const Configuration& s);

struct InvariantFinding {
  ErrorKind kind = ErrorKind::kInvariant;
  std::size_t stage = 0;
  std::size_t iteration = 0;  // 1-based learning phase within the stage
  std::size_t step = 0;       // 1-based step within the phase; 0 for phase-level checks
  std::string property;       // "psi1".."psi5", "stage-set", "first-step", "lemma", ...
  std::string detail;
  Configuration configuration;
};

struct ProtocolDiagnostic {
  std::size_t stage = 0;
  std::size_t iteration = 0;
  CoinIndex coin = 0;
  Rational designed;
  Rational base;
};

struct InvariantReport {
  std::uint64_t steps_audited = 0;
  std::uint64_t phases_audited = 0;
  std::vector<InvariantFinding> violations;
  std::vector<ProtocolDiagnostic> protocol;

  bool ok() const { return violations.empty(); }
  void merge(const InvariantReport& other);
};

/// Extra budget per learning phase: sum over coins of max(0, H(c) - F(c)).
struct CostLedger {
  std::vector<Rational> phase_extras;
  Rational total;

  std::size_t phases() const { return phase_extras.size(); }
  void add(const Rational& extra);
  void merge(const CostLedger& other);
};

Rational phase_cost(const RewardFunction& designed, const RewardFunction& base);

struct PhaseRecord {
  DesignedRewards rewards;
  Trace trace;
};

struct StageResult {
  std::size_t stage = 0;
  Configuration entry;
  Configuration exit;
  std::vector<PhaseRecord> phases;
  std::vector<std::uint64_t> progress;  // stage >= 2: rank at entry and after each phase
  InvariantReport report;
  CostLedger cost;
  bool completed = false;  // exit == stage_target and no violation

  std::size_t iterations() const { return phases.size(); }
};

/// Design / learn / audit loop of one stage, until the stage target is reached
/// or an audit fails. Audit failures are returned in the report, not thrown.
StageResult run_stage(const DesignProblem& problem, std::size_t stage,
                      const Configuration& entry, Scheduler& scheduler);
StageResult run_stage(const DesignProblem& problem, std::size_t stage,
                      const Configuration& entry);

struct DesignResult {
  std::vector<StageResult> stages;
  CostLedger cost;
  InvariantReport report;
  Configuration final;
  bool reached_target = false;
  bool final_stable_under_base = false;

  bool succeeded() const { return reached_target && final_stable_under_base && report.ok(); }
};

DesignResult run_design(const DesignProblem& problem);

}  // namespace coingame
