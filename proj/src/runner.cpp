#include "coingame/runner.hpp"

#include <sstream>

#include "coingame/dynamics.hpp"
#include "coingame/equilibria.hpp"
#include "coingame/reward_design.hpp"

namespace coingame {

using nlohmann::json;

namespace {

json configuration_json(const Game& game, const Configuration& s) {
  json out = json::object();
  for (const auto& m : game.miners()) out[m.id] = game.coins()[s[m.index]].id;
  return out;
}

json miner_list(const Game& game, const std::vector<MinerIndex>& miners) {
  json out = json::array();
  for (MinerIndex p : miners) out.push_back(game.miners()[p].id);
  return out;
}

json potential_json(const Game& game, const PotentialList& list) {
  json out = json::array();
  for (const auto& e : list.entries()) {
    out.push_back({{"coin", game.coins()[e.coin].id}, {"rpu", e.rpu.to_string()}});
  }
  return out;
}

// Trace line for one step. A step whose payoff does not strictly rise is not
// a better response, so it is never written.
std::string trace_line(const Game& game, const StepRecord& record, json extra = json::object()) {
  if (!(record.payoff_after > record.payoff_before)) {
    throw InvariantError("step " + std::to_string(record.step) +
                         " does not raise the mover's payoff");
  }
  json line = std::move(extra);
  line["step"] = record.step;
  line["miner"] = game.miners()[record.miner].id;
  line["from"] = game.coins()[record.from].id;
  line["to"] = game.coins()[record.to].id;
  line["payoff_before"] = record.payoff_before.to_string();
  line["payoff_after"] = record.payoff_after.to_string();
  return line.dump();
}

json generic_json(const Game& game, const GenericResult& result) {
  json out = {{"holds", result.holds},
              {"method", result.method == CheckMethod::kExhaustive ? "exhaustive" : "sampled"},
              {"comparisons", result.comparisons}};
  if (result.witness) {
    const auto& w = *result.witness;
    out["witness"] = {{"coin", game.coins()[w.coin].id},
                      {"miners", miner_list(game, w.miners)},
                      {"other_coin", game.coins()[w.other_coin].id},
                      {"other_miners", miner_list(game, w.other_miners)}};
  }
  return out;
}

json never_alone_json(const Game& game, const NeverAloneResult& result) {
  json out = {{"holds", result.holds}, {"configurations_checked", result.configurations_checked}};
  if (result.witness) {
    out["witness"] = {{"configuration", configuration_json(game, result.witness->configuration)},
                      {"coin", game.coins()[result.witness->coin].id}};
  }
  return out;
}

void run_learn(const Scenario& scenario, RunReport& report) {
  const Game game = scenario.game();
  const Configuration start =
      scenario.initial.value_or(Configuration::uniform(game.miner_count(), 0));
  Scheduler scheduler(scenario.scheduler);
  const std::size_t max_steps = scenario.options.max_steps.value_or(default_max_steps(game));
  const Trace trace = converge(game, start, scheduler, max_steps);

  for (const auto& record : trace.steps) report.trace.push_back(trace_line(game, record));
  const bool stable = is_stable(game, trace.final);
  report.success = trace.converged && stable;
  report.exit_code = trace.converged ? 0 : static_cast<int>(ErrorKind::kBudget);
  report.machine["initial"] = configuration_json(game, trace.initial);
  report.machine["final"] = configuration_json(game, trace.final);
  report.machine["steps"] = trace.steps.size();
  report.machine["max_steps"] = max_steps;
  report.machine["converged"] = trace.converged;
  report.machine["stable"] = stable;
  report.machine["potential_final"] = potential_json(game, potential_list(game, trace.final));

  std::ostringstream human;
  human << "learn: " << trace.steps.size() << " step(s), "
        << (trace.converged ? "converged" : "step cap reached") << ", final "
        << trace.final.to_string() << (stable ? " (stable)" : " (not stable)") << "\n";
  report.human = human.str();
}

void run_design_mode(const Scenario& scenario, RunReport& report) {
  const Game game = scenario.game();
  DesignOptions options;
  options.strict_protocol = scenario.options.strict_protocol;
  options.max_steps_per_phase = scenario.options.max_steps.value_or(0);
  const DesignProblem problem(game, *scenario.initial, *scenario.target, scenario.scheduler,
                              options);
  const DesignResult result = run_design(problem);

  json stages = json::array();
  for (const auto& stage : result.stages) {
    json phases = json::array();
    for (std::size_t i = 0; i < stage.phases.size(); ++i) {
      const auto& phase = stage.phases[i];
      json rewards = json::object();
      for (CoinIndex c = 0; c < game.coin_count(); ++c) {
        rewards[game.coins()[c].id] = phase.rewards.rewards(c).to_string();
      }
      json entry = {{"rewards", rewards},
                    {"steps", phase.trace.steps.size()},
                    {"start", configuration_json(game, phase.trace.initial)},
                    {"end", configuration_json(game, phase.trace.final)},
                    {"cost", stage.cost.phase_extras.at(i).to_string()}};
      if (phase.rewards.mover_rank) {
        entry["mover"] = game.miners()[problem.miner_at_rank(*phase.rewards.mover_rank)].id;
        entry["anchor"] = game.miners()[problem.miner_at_rank(*phase.rewards.anchor_rank)].id;
        entry["level"] = phase.rewards.level->to_string();
      }
      phases.push_back(std::move(entry));
      for (const auto& record : phase.trace.steps) {
        report.trace.push_back(
            trace_line(game, record, {{"stage", stage.stage}, {"phase", i + 1}}));
      }
    }
    stages.push_back({{"stage", stage.stage},
                      {"iterations", stage.iterations()},
                      {"progress", stage.progress},
                      {"completed", stage.completed},
                      {"entry", configuration_json(game, stage.entry)},
                      {"exit", configuration_json(game, stage.exit)},
                      {"cost", stage.cost.total.to_string()},
                      {"phases", std::move(phases)}});
  }

  json violations = json::array();
  for (const auto& v : result.report.violations) {
    violations.push_back({{"stage", v.stage},
                          {"iteration", v.iteration},
                          {"step", v.step},
                          {"property", v.property},
                          {"detail", v.detail},
                          {"configuration", configuration_json(game, v.configuration)}});
  }
  json protocol = json::array();
  for (const auto& d : result.report.protocol) {
    protocol.push_back({{"stage", d.stage},
                        {"iteration", d.iteration},
                        {"coin", game.coins()[d.coin].id},
                        {"designed", d.designed.to_string()},
                        {"base", d.base.to_string()}});
  }
  json per_phase = json::array();
  for (const auto& extra : result.cost.phase_extras) per_phase.push_back(extra.to_string());

  report.success = result.succeeded();
  if (!result.report.violations.empty()) {
    report.exit_code = static_cast<int>(result.report.violations.front().kind);
  } else if (!report.success) {
    report.exit_code = static_cast<int>(ErrorKind::kInvariant);
  }
  report.machine["initial"] = configuration_json(game, problem.initial());
  report.machine["target"] = configuration_json(game, problem.target());
  report.machine["final"] = configuration_json(game, result.final);
  report.machine["reached_target"] = result.reached_target;
  report.machine["final_stable_under_base"] = result.final_stable_under_base;
  report.machine["stages"] = std::move(stages);
  report.machine["cost"] = {{"total", result.cost.total.to_string()},
                            {"phases", result.cost.phases()},
                            {"per_phase", std::move(per_phase)}};
  report.machine["invariants"] = {{"steps_audited", result.report.steps_audited},
                                  {"phases_audited", result.report.phases_audited},
                                  {"violations", std::move(violations)}};
  report.machine["protocol_diagnostics"] = std::move(protocol);

  std::ostringstream human;
  human << "design: " << (report.success ? "reached target " : "FAILED at ")
        << result.final.to_string() << " after " << result.cost.phases()
        << " learning phase(s); cost " << result.cost.total.to_string() << "; "
        << result.report.steps_audited << " step(s) audited, "
        << result.report.violations.size() << " violation(s), "
        << result.report.protocol.size() << " protocol diagnostic(s)\n";
  report.human = human.str();
}

void run_enumerate(const Scenario& scenario, RunReport& report) {
  const Game game = scenario.game();
  const StableSet stable = enumerate_stable(game, scenario.options.enumeration_budget);
  json list = json::array();
  for (const auto& s : stable.configurations) list.push_back(configuration_json(game, s));
  report.success = true;
  report.machine["configurations_scanned"] = stable.scanned;
  report.machine["stable_count"] = stable.size();
  report.machine["stable"] = std::move(list);
  report.human = "enumerate: " + std::to_string(stable.size()) + " stable of " +
                 std::to_string(stable.scanned) + " configurations\n";
}

void run_construct(const Scenario& scenario, RunReport& report) {
  const Game game = scenario.game();
  const Configuration s = construct_equilibrium(game);
  const bool stable = is_stable(game, s);
  report.success = stable;
  report.exit_code = stable ? 0 : static_cast<int>(ErrorKind::kInvariant);
  report.machine["configuration"] = configuration_json(game, s);
  report.machine["stable"] = stable;
  report.human = "construct: " + s.to_string() + (stable ? " (stable)\n" : " (NOT stable)\n");
}

void run_check(const Scenario& scenario, RunReport& report) {
  const Game game = scenario.game();
  const AssumptionReport alone =
      check_never_alone_all(game, scenario.options.enumeration_budget);
  const AssumptionReport generic = check_generic(game, scenario.options.genericity);
  report.success = alone.holds() && generic.holds();
  report.exit_code = report.success ? 0 : static_cast<int>(ErrorKind::kPrecondition);
  report.machine["never_alone"] = never_alone_json(game, *alone.never_alone);
  report.machine["generic"] = generic_json(game, *generic.generic);
  report.human = std::string("check: never-alone ") +
                 (alone.holds() ? "holds" : "fails") + ", generic " +
                 (generic.holds() ? "holds" : "fails") + "\n";
}

void run_counterexample(RunReport& report) {
  const CounterexampleReport cx = exact_potential_counterexample();
  json cycle = json::array();
  for (std::size_t i = 0; i < cx.cycle.size(); ++i) {
    cycle.push_back({{"configuration", configuration_json(cx.game, cx.cycle[i])},
                     {"payoffs", {cx.payoffs[i][0].to_string(), cx.payoffs[i][1].to_string()}},
                     {"mover", cx.game.miners()[cx.movers[i]].id},
                     {"delta", cx.deltas[i].to_string()}});
  }
  report.success = !cx.cycle_sum.is_zero();
  report.machine["cycle"] = std::move(cycle);
  report.machine["cycle_sum"] = cx.cycle_sum.to_string();
  report.human = "counterexample: payoff deltas around the 4-cycle sum to " +
                 cx.cycle_sum.to_string() + " (an exact potential would give 0)\n";
}

}  // namespace

RunReport run(const Scenario& scenario) {
  RunReport report;
  report.mode = scenario.mode;
  report.machine["mode"] = std::string(to_string(scenario.mode));
  report.machine["scenario_digest"] = scenario_digest(scenario);
  report.machine["seed"] = scenario.scheduler.seed;
  report.machine["scheduler"] = std::string(to_string(scenario.scheduler.kind));

  switch (scenario.mode) {
    case Mode::kLearn: run_learn(scenario, report); break;
    case Mode::kDesign: run_design_mode(scenario, report); break;
    case Mode::kEnumerate: run_enumerate(scenario, report); break;
    case Mode::kConstruct: run_construct(scenario, report); break;
    case Mode::kCheck: run_check(scenario, report); break;
    case Mode::kCounterexample: run_counterexample(report); break;
  }
  report.machine["success"] = report.success;
  report.machine["exit_code"] = report.exit_code;
  return report;
}

std::string render_machine(const RunReport& report) { return report.machine.dump(2) + "\n"; }

std::string render_trace(const RunReport& report) {
  std::string out;
  for (const auto& line : report.trace) out += line + "\n";
  return out;
}

}  // namespace coingame
