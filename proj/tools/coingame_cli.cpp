// coingame: command-line front end for the mining game library.
//
//   coingame learn scenario.json [--seed N] [--max-steps N] [--out r.json] [--trace t.jsonl]
//   coingame design scenario.json [--strict-protocol]
//   coingame equilibria | construct | check scenario.json
//   coingame counterexample
//   coingame gen --miners 4 --coins 2 --seed 7 [--mode design] [--out s.json]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coingame/runner.hpp"
#include "coingame/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coingame::UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw coingame::UsageError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-coin mining game: learning dynamics, equilibria, reward design"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;
  bool strict_protocol = false;
  std::string out_path;
  std::string trace_path;
  app.add_option("--seed", seed, "Scheduler seed (overrides the scenario)");
  app.add_option("--max-steps", max_steps, "Step cap per learning run")->check(CLI::PositiveNumber);
  app.add_flag("--strict-protocol", strict_protocol,
               "Abort reward design when a designed reward drops below the base reward");
  app.add_option("--out", out_path, "Write the machine-readable report here");
  app.add_option("--trace", trace_path, "Write the step trace (JSON lines) here");

  std::string scenario_path;
  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"learn", "Run better-response learning from the initial configuration"},
      {"design", "Steer the system from initial to target via reward design"},
      {"equilibria", "Enumerate all stable configurations"},
      {"construct", "Build one stable configuration greedily"},
      {"check", "Check the never-alone and genericity assumptions"},
  };
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    sub->fallthrough();
  }
  app.add_subcommand("counterexample", "Show the game without an exact potential")
      ->fallthrough();

  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  std::size_t gen_miners = 4;
  std::size_t gen_coins = 2;
  std::uint64_t gen_seed = 0;
  std::string gen_mode = "learn";
  bool gen_symmetric = false;
  bool gen_near_equal = false;
  gen->add_option("--miners", gen_miners, "Number of miners")->check(CLI::PositiveNumber);
  gen->add_option("--coins", gen_coins, "Number of coins")->check(CLI::PositiveNumber);
  gen->add_option("--instance-seed", gen_seed, "Generator seed");
  gen->add_option("--mode", gen_mode, "Scenario mode (design picks two equilibria)");
  gen->add_flag("--symmetric", gen_symmetric, "Equal rewards on every coin");
  gen->add_flag("--near-equal", gen_near_equal, "Powers and rewards within 0.1%");
  gen->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::string verb = app.get_subcommands().front()->get_name();
    if (verb == "gen") {
      auto mode = coingame::parse_mode(gen_mode);
      if (!mode) throw coingame::UsageError("unknown mode '" + gen_mode + "'");
      coingame::Scenario scenario = coingame::generate_instance(
          gen_miners, gen_coins, gen_seed, {gen_symmetric, gen_near_equal});
      if (seed) scenario.scheduler.seed = *seed;
      if (*mode == coingame::Mode::kDesign) {
        coingame::attach_design_endpoints(scenario, gen_seed);
      }
      scenario.mode = *mode;
      const std::string text = coingame::serialize_scenario(scenario);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, text);
      }
      return 0;
    }

    coingame::Scenario scenario;
    if (verb == "counterexample") {
      scenario = coingame::parse_scenario(
          R"({"miners":[{"id":"p1","power":2},{"id":"p2","power":1}],)"
          R"("coins":[{"id":"c1","reward":1},{"id":"c2","reward":1}]})");
    } else {
      scenario = coingame::parse_scenario(read_file(scenario_path));
    }
    scenario.mode = *coingame::parse_mode(verb);
    if (seed) scenario.scheduler.seed = *seed;
    if (max_steps) scenario.options.max_steps = *max_steps;
    if (strict_protocol) scenario.options.strict_protocol = true;
    if (scenario.mode == coingame::Mode::kDesign && (!scenario.initial || !scenario.target)) {
      throw coingame::UsageError("design needs both initial and target configurations");
    }

    const coingame::RunReport report = coingame::run(scenario);
    if (out_path.empty()) {
      std::cout << coingame::render_machine(report);
    } else {
      write_file(out_path, coingame::render_machine(report));
      std::cout << report.human;
    }
    if (!trace_path.empty()) write_file(trace_path, coingame::render_trace(report));
    return report.exit_code;
  } catch (const coingame::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
