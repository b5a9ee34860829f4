#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coingame/dynamics.hpp"
#include "coingame/equilibria.hpp"
#include "coingame/error.hpp"
#include "coingame/game.hpp"

namespace coingame {

enum class Mode { kLearn, kDesign, kEnumerate, kConstruct, kCheck, kCounterexample };

std::string_view to_string(Mode mode);
/// Accepts the mode names plus "equilibria" as an alias of "enumerate".
std::optional<Mode> parse_mode(std::string_view name);

struct ScenarioOptions {
  std::optional<std::size_t> max_steps;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  bool strict_protocol = false;
  GenericityMode genericity;

  friend bool operator==(const ScenarioOptions& a, const ScenarioOptions& b) {
    return a.max_steps == b.max_steps && a.enumeration_budget == b.enumeration_budget &&
           a.strict_protocol == b.strict_protocol &&
           a.genericity.method == b.genericity.method &&
           a.genericity.samples == b.genericity.samples &&
           a.genericity.seed == b.genericity.seed;
  }
};

/// One run: the game plus what to do with it.
struct Scenario {
  std::vector<Miner> miners;
  std::vector<Coin> coins;
  std::vector<Rational> rewards;
  std::optional<Configuration> initial;
  std::optional<Configuration> target;
  SchedulerPolicy scheduler;
  Mode mode = Mode::kLearn;
  ScenarioOptions options;

  Game game() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse failure; `path` points at the offending field, e.g. "miners[0].power".
class ParseError : public UsageError {
 public:
  ParseError(std::string path, const std::string& message)
      : UsageError(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// JSON scenario text to a validated Scenario. Throws ParseError.
Scenario parse_scenario(std::string_view text);

/// Canonical JSON (sorted keys, rationals as "num/den").
std::string serialize_scenario(const Scenario& scenario);

/// 16 hex digits identifying the canonical serialization.
std::string scenario_digest(const Scenario& scenario);

struct GeneratorOptions {
  bool symmetric = false;   // one reward for every coin
  bool near_equal = false;  // powers and rewards within 0.1% of each other
};

/// n miners with pairwise-distinct integer powers and k coins with integer
/// rewards, drawn from [10^6, 10^9]; random initial configuration. Fully
/// determined by (n, k, seed, options).
Scenario generate_instance(std::size_t miners, std::size_t coins, std::uint64_t seed,
                           GeneratorOptions options = {});

/// Turns a generated scenario into a design scenario: initial and target are
/// drawn (distinct when possible) from the enumerated stable configurations.
void attach_design_endpoints(Scenario& scenario, std::uint64_t seed);

}  // namespace coingame
