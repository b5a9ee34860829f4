#include "coingame/scenario.hpp"

#include <cstdio>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

namespace coingame {

using nlohmann::json;

namespace {

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::string field_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& base) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(field_path(base, key), "missing field");
  return *it;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& base) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto name : allowed) known = known || it.key() == name;
    if (!known) throw ParseError(field_path(base, it.key()), "unknown field");
  }
}

std::string parse_id(const json& value, const std::string& path) {
  if (!value.is_string() || value.get<std::string>().empty()) {
    throw ParseError(path, "id must be a non-empty string");
  }
  return value.get<std::string>();
}

Rational parse_positive(const json& value, const std::string& path) {
  Rational out;
  if (value.is_number_integer()) {
    out = value.is_number_unsigned() ? Rational::parse(std::to_string(value.get<std::uint64_t>()))
                                     : Rational::parse(std::to_string(value.get<std::int64_t>()));
  } else if (value.is_string()) {
    try {
      out = Rational::parse(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, e.what());
    }
  } else {
    throw ParseError(path, "expected an integer or a \"num/den\" string");
  }
  if (out.sign() <= 0) throw ParseError(path, "must be positive, got " + out.to_string());
  return out;
}

std::uint64_t parse_count(const json& value, const std::string& path) {
  if (!value.is_number_unsigned()) throw ParseError(path, "expected a non-negative integer");
  return value.get<std::uint64_t>();
}

Configuration parse_configuration(const json& value, const std::string& path,
                                  const std::vector<Miner>& miners,
                                  const std::vector<Coin>& coins) {
  if (!value.is_object()) throw ParseError(path, "expected an object mapping miner id to coin id");
  std::map<std::string, MinerIndex> miner_ids;
  for (const auto& m : miners) miner_ids[m.id] = m.index;
  std::map<std::string, CoinIndex> coin_ids;
  for (const auto& c : coins) coin_ids[c.id] = c.index;

  std::vector<CoinIndex> assignment(miners.size(), 0);
  std::vector<bool> seen(miners.size(), false);
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string entry = field_path(path, it.key());
    auto miner = miner_ids.find(it.key());
    if (miner == miner_ids.end()) throw ParseError(entry, "unknown miner id");
    if (!it->is_string()) throw ParseError(entry, "expected a coin id");
    auto coin = coin_ids.find(it->get<std::string>());
    if (coin == coin_ids.end()) {
      throw ParseError(entry, "unknown coin id '" + it->get<std::string>() + "'");
    }
    assignment[miner->second] = coin->second;
    seen[miner->second] = true;
  }
  for (const auto& m : miners) {
    if (!seen[m.index]) throw ParseError(field_path(path, m.id), "miner has no coin");
  }
  return Configuration(std::move(assignment));
}

json configuration_json(const Configuration& s, const std::vector<Miner>& miners,
                        const std::vector<Coin>& coins) {
  json out = json::object();
  for (const auto& m : miners) out[m.id] = coins[s[m.index]].id;
  return out;
}

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kLearn: return "learn";
    case Mode::kDesign: return "design";
    case Mode::kEnumerate: return "enumerate";
    case Mode::kConstruct: return "construct";
    case Mode::kCheck: return "check";
    case Mode::kCounterexample: return "counterexample";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "equilibria") return Mode::kEnumerate;
  for (Mode m : {Mode::kLearn, Mode::kDesign, Mode::kEnumerate, Mode::kConstruct, Mode::kCheck,
                 Mode::kCounterexample}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

Game Scenario::game() const { return Game::create(miners, coins, RewardFunction(rewards)); }

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed scenario: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "scenario must be a JSON object");
  reject_unknown(doc, {"miners", "coins", "initial", "target", "scheduler", "mode", "options"},
                 "");

  Scenario out;
  const json& miners = require(doc, "miners", "");
  if (!miners.is_array() || miners.empty()) {
    throw ParseError("miners", "expected a non-empty array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < miners.size(); ++i) {
    const std::string path = index_path("miners", i);
    if (!miners[i].is_object()) throw ParseError(path, "expected an object");
    reject_unknown(miners[i], {"id", "power"}, path);
    Miner m;
    m.index = i;
    m.id = parse_id(require(miners[i], "id", path), field_path(path, "id"));
    if (!ids.insert(m.id).second) throw ParseError(field_path(path, "id"), "duplicate miner id");
    m.power = parse_positive(require(miners[i], "power", path), field_path(path, "power"));
    out.miners.push_back(std::move(m));
  }

  const json& coins = require(doc, "coins", "");
  if (!coins.is_array() || coins.empty()) throw ParseError("coins", "expected a non-empty array");
  ids.clear();
  for (std::size_t i = 0; i < coins.size(); ++i) {
    const std::string path = index_path("coins", i);
    if (!coins[i].is_object()) throw ParseError(path, "expected an object");
    reject_unknown(coins[i], {"id", "reward"}, path);
    Coin c;
    c.index = i;
    c.id = parse_id(require(coins[i], "id", path), field_path(path, "id"));
    if (!ids.insert(c.id).second) throw ParseError(field_path(path, "id"), "duplicate coin id");
    out.rewards.push_back(
        parse_positive(require(coins[i], "reward", path), field_path(path, "reward")));
    out.coins.push_back(std::move(c));
  }

  if (doc.contains("mode")) {
    const json& mode = doc["mode"];
    auto parsed = mode.is_string() ? parse_mode(mode.get<std::string>()) : std::nullopt;
    if (!parsed) throw ParseError("mode", "unknown mode");
    out.mode = *parsed;
  }
  if (doc.contains("initial")) {
    out.initial = parse_configuration(doc["initial"], "initial", out.miners, out.coins);
  }
  if (doc.contains("target")) {
    out.target = parse_configuration(doc["target"], "target", out.miners, out.coins);
  }
  if (doc.contains("scheduler")) {
    const json& sched = doc["scheduler"];
    if (!sched.is_object()) throw ParseError("scheduler", "expected an object");
    reject_unknown(sched, {"kind", "seed"}, "scheduler");
    if (sched.contains("kind")) {
      const json& kind = sched["kind"];
      auto parsed = kind.is_string() ? parse_scheduler_kind(kind.get<std::string>())
                                     : std::nullopt;
      if (!parsed) throw ParseError("scheduler.kind", "unknown scheduler kind");
      out.scheduler.kind = *parsed;
    }
    if (sched.contains("seed")) out.scheduler.seed = parse_count(sched["seed"], "scheduler.seed");
  }
  if (doc.contains("options")) {
    const json& opts = doc["options"];
    if (!opts.is_object()) throw ParseError("options", "expected an object");
    reject_unknown(opts, {"max_steps", "enumeration_budget", "strict_protocol", "genericity"},
                   "options");
    if (opts.contains("max_steps")) {
      const auto steps = parse_count(opts["max_steps"], "options.max_steps");
      if (steps == 0) throw ParseError("options.max_steps", "must be positive");
      out.options.max_steps = steps;
    }
    if (opts.contains("enumeration_budget")) {
      out.options.enumeration_budget =
          parse_count(opts["enumeration_budget"], "options.enumeration_budget");
    }
    if (opts.contains("strict_protocol")) {
      if (!opts["strict_protocol"].is_boolean()) {
        throw ParseError("options.strict_protocol", "expected a boolean");
      }
      out.options.strict_protocol = opts["strict_protocol"].get<bool>();
    }
    if (opts.contains("genericity")) {
      const json& gen = opts["genericity"];
      const std::string path = "options.genericity";
      if (!gen.is_object()) throw ParseError(path, "expected an object");
      reject_unknown(gen, {"method", "samples", "seed"}, path);
      if (gen.contains("method")) {
        const json& method = gen["method"];
        if (method == "exhaustive") {
          out.options.genericity.method = CheckMethod::kExhaustive;
        } else if (method == "sampled") {
          out.options.genericity.method = CheckMethod::kSampled;
        } else {
          throw ParseError(path + ".method", "expected \"sampled\" or \"exhaustive\"");
        }
      }
      if (gen.contains("samples")) {
        out.options.genericity.samples = parse_count(gen["samples"], path + ".samples");
      }
      if (gen.contains("seed")) out.options.genericity.seed = parse_count(gen["seed"], path + ".seed");
    }
  }
  if (out.mode == Mode::kDesign && (!out.initial || !out.target)) {
    throw ParseError(out.initial ? "target" : "initial", "design mode needs initial and target");
  }
  return out;
}

std::string serialize_scenario(const Scenario& scenario) {
  json doc;
  doc["miners"] = json::array();
  for (const auto& m : scenario.miners) {
    doc["miners"].push_back({{"id", m.id}, {"power", m.power.to_string()}});
  }
  doc["coins"] = json::array();
  for (std::size_t c = 0; c < scenario.coins.size(); ++c) {
    doc["coins"].push_back(
        {{"id", scenario.coins[c].id}, {"reward", scenario.rewards[c].to_string()}});
  }
  if (scenario.initial) {
    doc["initial"] = configuration_json(*scenario.initial, scenario.miners, scenario.coins);
  }
  if (scenario.target) {
    doc["target"] = configuration_json(*scenario.target, scenario.miners, scenario.coins);
  }
  doc["mode"] = std::string(to_string(scenario.mode));
  doc["scheduler"] = {{"kind", std::string(to_string(scenario.scheduler.kind))},
                      {"seed", scenario.scheduler.seed}};
  json opts;
  if (scenario.options.max_steps) opts["max_steps"] = *scenario.options.max_steps;
  opts["enumeration_budget"] = scenario.options.enumeration_budget;
  opts["strict_protocol"] = scenario.options.strict_protocol;
  opts["genericity"] = {
      {"method", scenario.options.genericity.method == CheckMethod::kExhaustive ? "exhaustive"
                                                                                : "sampled"},
      {"samples", scenario.options.genericity.samples},
      {"seed", scenario.options.genericity.seed}};
  doc["options"] = std::move(opts);
  return doc.dump(2) + "\n";
}

std::string scenario_digest(const Scenario& scenario) {
  // FNV-1a, 64 bit.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_scenario(scenario)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Scenario generate_instance(std::size_t miners, std::size_t coins, std::uint64_t seed,
                           GeneratorOptions options) {
  if (miners == 0 || coins == 0) {
    throw PreconditionError("generate_instance needs at least one miner and one coin");
  }
  constexpr std::uint64_t kLow = 1'000'000;
  constexpr std::uint64_t kHigh = 1'000'000'000;
  std::mt19937_64 rng(seed);

  auto draw_value = [&]() {
    return options.near_equal ? kHigh + draw(rng, 0, kLow - 1) : draw(rng, kLow, kHigh);
  };

  Scenario out;
  std::set<std::uint64_t> used;
  while (out.miners.size() < miners) {
    const std::uint64_t power = draw_value();
    if (!used.insert(power).second) continue;
    const std::size_t i = out.miners.size();
    out.miners.push_back({"p" + std::to_string(i + 1), i, Rational::parse(std::to_string(power))});
  }
  const std::uint64_t shared = draw_value();
  for (std::size_t c = 0; c < coins; ++c) {
    out.coins.push_back({"c" + std::to_string(c + 1), c});
    const std::uint64_t reward = options.symmetric ? shared : draw_value();
    out.rewards.push_back(Rational::parse(std::to_string(reward)));
  }
  std::vector<CoinIndex> start(miners);
  for (auto& c : start) c = rng() % coins;
  out.initial = Configuration(std::move(start));
  out.scheduler = {SchedulerKind::kFirstIndex, seed};
  out.mode = Mode::kLearn;
  return out;
}

void attach_design_endpoints(Scenario& scenario, std::uint64_t seed) {
  const Game game = scenario.game();
  const StableSet stable = enumerate_stable(game, scenario.options.enumeration_budget);
  if (stable.configurations.empty()) {
    throw InvariantError("no stable configuration found by enumeration");
  }
  std::mt19937_64 rng(seed);
  const std::size_t count = stable.size();
  const std::size_t first = rng() % count;
  std::size_t second = first;
  if (count > 1) {
    second = rng() % (count - 1);
    if (second >= first) ++second;
  }
  scenario.initial = stable.configurations[first];
  scenario.target = stable.configurations[second];
  scenario.mode = Mode::kDesign;
}

}  // namespace coingame
