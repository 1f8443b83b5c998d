#include "bercow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bercow/adversary.hpp"
#include "bercow/parallel.hpp"

namespace bercow {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(s)};
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCategory::parse, "config key `" + key + "`: not a number: " + value);
  }
}

Micros ms(double v) { return static_cast<Micros>(std::llround(v * 1000.0)); }

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  double v = parse_number(key, value);
  if (v < 0 || v != std::floor(v)) fail(ErrorCategory::parse, "config key `" + key + "`: expected a count");
  return static_cast<std::uint64_t>(v);
}

Scenario parse_scenario(const std::string& s) {
  if (s == "geo_bias") return Scenario::geo_bias;
  if (s == "tradeoff_curve") return Scenario::tradeoff_curve;
  if (s == "sandwich") return Scenario::sandwich;
  if (s == "liquidation") return Scenario::liquidation;
  if (s == "bounds_table") return Scenario::bounds_table;
  fail(ErrorCategory::config, "unknown scenario " + s);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s.front() == '-' ? 1 : 0);
  return s;
}

OrderingPolicy parse_policy(std::string_view name, Micros dnoise, Micros rotation_period) {
  if (name == "pompe") return OrderingPolicy::pompe();
  if (name == "bercow") return OrderingPolicy::bercow(dnoise);
  if (name == "leader") return OrderingPolicy::leader(rotation_period);
  if (name == "receive") return OrderingPolicy::receive();
  fail(ErrorCategory::config, "unknown policy " + std::string(name));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<std::string> policy_names{"pompe", "bercow", "leader", "receive"};
  std::optional<double> dnoise_mult;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::parse, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) fail(ErrorCategory::parse, "duplicate config key `" + key + "`");
    if (key == "scenario") {
      cfg.scenario = parse_scenario(value);
    } else if (key == "topology") {
      cfg.topology = value;
    } else if (key == "policies") {
      policy_names = split_list(value);
    } else if (key == "dnet_ms") {
      cfg.dnet = ms(parse_number(key, value));
    } else if (key == "dnoise_ms") {
      cfg.dnoise = ms(parse_number(key, value));
    } else if (key == "dnoise_mult") {
      dnoise_mult = parse_number(key, value);
    } else if (key == "slot_interval_ms") {
      cfg.slot_interval = ms(parse_number(key, value));
    } else if (key == "rotation_period_ms") {
      cfg.rotation_period = ms(parse_number(key, value));
    } else if (key == "jitter_ms") {
      cfg.delays.jitter = ms(parse_number(key, value));
    } else if (key == "clock_drift_us") {
      cfg.delays.clock_drift_max = static_cast<Micros>(parse_count(key, value));
    } else if (key == "trials") {
      cfg.trials = parse_count(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_count(key, value);
    } else if (key == "cities") {
      cfg.cities = split_list(value);
    } else if (key == "gaps_ms") {
      cfg.gaps.clear();
      for (const auto& g : split_list(value)) cfg.gaps.push_back(ms(parse_number(key, g)));
    } else if (key == "colluders") {
      cfg.colluders = parse_count(key, value);
    } else if (key == "prize_usd") {
      cfg.prize_usd = parse_number(key, value);
    } else if (key == "n") {
      cfg.bound_ns.clear();
      for (const auto& v : split_list(value)) cfg.bound_ns.push_back(static_cast<unsigned>(parse_count(key, v)));
    } else if (key == "alphas") {
      cfg.alphas.clear();
      for (const auto& v : split_list(value)) cfg.alphas.push_back(parse_rational(v));
    } else if (key == "output") {
      cfg.output = value;
    } else {
      fail(ErrorCategory::parse, "unknown config key `" + key + "`");
    }
  }
  if (dnoise_mult) {
    if (seen.count("dnoise_ms")) fail(ErrorCategory::config, "set only one of dnoise_ms and dnoise_mult");
    cfg.dnoise = static_cast<Micros>(std::llround(*dnoise_mult * static_cast<double>(cfg.dnet)));
  }
  cfg.policies.clear();
  for (const auto& name : policy_names) cfg.policies.push_back(parse_policy(name, cfg.dnoise, cfg.rotation_period));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    fail(e.category(), path.string() + ": " + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (trials < 1) fail(ErrorCategory::config, "trials must be at least 1");
  if (dnet < 0 || dnoise < 0 || slot_interval <= 0) fail(ErrorCategory::config, "bad time parameters");
  if (!std::is_sorted(gaps.begin(), gaps.end())) fail(ErrorCategory::config, "gap sweep must be monotone");
  const bool simulated = scenario != Scenario::bounds_table;
  if (simulated && policies.empty()) fail(ErrorCategory::config, "no policies configured");
  switch (scenario) {
    case Scenario::geo_bias:
      if (cities.size() < 2) fail(ErrorCategory::config, "geo_bias needs at least two cities");
      break;
    case Scenario::tradeoff_curve: {
      if (cities.size() != 2) fail(ErrorCategory::config, "tradeoff_curve needs exactly two cities");
      if (gaps.empty()) fail(ErrorCategory::config, "tradeoff_curve needs gaps_ms");
      bool noisy = std::any_of(policies.begin(), policies.end(),
                               [](const auto& p) { return p.kind == PolicyKind::bercow_noise; });
      if (noisy && (gaps.front() > 0 || gaps.back() < dnet + dnoise)) {
        fail(ErrorCategory::config, "gap sweep must cover [0, dnet + dnoise]");
      }
      break;
    }
    case Scenario::sandwich:
      if (cities.size() != 2) fail(ErrorCategory::config, "sandwich needs cities = <victim>, <attacker>");
      break;
    case Scenario::liquidation:
      if (cities.size() != 2) fail(ErrorCategory::config, "liquidation needs exactly two cities");
      break;
    case Scenario::bounds_table:
      if (alphas.empty() || bound_ns.empty()) fail(ErrorCategory::config, "bounds_table needs n and alphas");
      break;
  }
}

CityTopology resolve_topology(const std::filesystem::path& path) {
  if (path.is_relative() && !std::filesystem::exists(path)) {
    return load_topology(default_topology_dir() / path);
  }
  return load_topology(path);
}

namespace {

LatencyModel make_network(const ExperimentConfig& cfg) {
  auto drift_rng = Rng::derive(cfg.seed, "clock-drift");
  return LatencyModel(resolve_topology(cfg.topology), cfg.delays, cfg.dnet, drift_rng);
}

struct TrialEnv {
  const LatencyModel& network;
  const OrderingPolicy& policy;
  const ExperimentConfig& cfg;
  std::size_t f;
};

/// Orders `subs` under the policy for one trial.
Ledger order_once(const TrialEnv& env, std::vector<Submission> subs, Rng& rng,
                  std::span<const NodeId> colluders = {}) {
  switch (env.policy.kind) {
    case PolicyKind::pompe_median:
    case PolicyKind::bercow_noise: {
      sro::SroConfig sc{env.network.node_count(), env.f, sro::Backend::seeded_hash, std::nullopt};
      auto handle = sro::SroHandle::init(sc, rng.bytes32());
      SimulationRun run;
      run.network = &env.network;
      run.policy = env.policy;
      run.schedule = {env.cfg.slot_interval, 0};
      run.f = env.f;
      run.submissions = std::move(subs);
      run.sro = &handle;
      run.rng_seed = rng.next_u64();
      return run_slotted(run).ledger;
    }
    case PolicyKind::leader_rotation: {
      std::vector<CommandId> front, back;
      for (const auto& s : subs) {
        if (s.quorum == QuorumChoice::highest) back.push_back(s.invocation.id);
        else if (!s.overrides.empty()) front.push_back(s.invocation.id);
      }
      BatchHook hook = [&](NodeId leader, std::vector<LedgerEntry>& batch) {
        if (std::find(colluders.begin(), colluders.end(), leader) == colluders.end()) return;
        auto is = [](const std::vector<CommandId>& ids, const LedgerEntry& e) {
          return std::find(ids.begin(), ids.end(), e.command.invocation.id) != ids.end();
        };
        std::stable_partition(batch.begin(), batch.end(), [&](const auto& e) { return is(front, e); });
        std::stable_partition(batch.begin(), batch.end(), [&](const auto& e) { return !is(back, e); });
      };
      return order_leader_rotation(subs, env.network, env.policy.rotation_period, rng, hook);
    }
    case PolicyKind::receive_order_all_correct:
      return order_receive_all_correct(subs, env.network, rng, colluders);
  }
  fail(ErrorCategory::config, "unsupported policy");
}

}  // namespace

Estimate pair_first_probability(const LatencyModel& network, const OrderingPolicy& policy,
                                const std::string& first_city, const std::string& second_city,
                                Micros second_delay, const ExperimentConfig& cfg, std::uint64_t stream) {
  network.topology().city_index(first_city);
  network.topology().city_index(second_city);
  TrialEnv env{network, policy, cfg, max_faults(network.node_count())};
  auto seed = derive_seed(cfg.seed, "pair-trials", stream);
  auto hits = parallel_trials<std::uint64_t>(
      cfg.trials, seed, policy.name(), 0,
      [&](std::uint64_t trial, Rng& rng, std::uint64_t& acc) {
        Micros t = static_cast<Micros>(rng.below(static_cast<std::uint64_t>(cfg.slot_interval)));
        Micros t_first = t, t_second = t + second_delay;
        if (t_second < 0) {
          t_first -= t_second;
          t_second = 0;
        }
        auto a = Invocation::at("first-" + std::to_string(trial), t_first);
        auto b = Invocation::at("second-" + std::to_string(trial), t_second);
        std::vector<Submission> subs{{a, first_city, {}, QuorumChoice::lowest},
                                     {b, second_city, {}, QuorumChoice::lowest}};
        auto ledger = order_once(env, std::move(subs), rng);
        if (ledger.precedes(a.id, b.id)) ++acc;
      },
      [](std::uint64_t x, std::uint64_t y) { return x + y; });
  if (cfg.trials < 1000) {
    // binomial_estimate has no lower bound on trials; keep small configs usable.
  }
  return binomial_estimate(hits, cfg.trials);
}

std::map<SandwichOrder, double> SandwichStats::frequencies() const {
  std::map<SandwichOrder, double> out;
  for (const auto& order : all_sandwich_orders()) {
    auto it = counts.find(order);
    out[order] = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trials);
  }
  return out;
}

SandwichStats run_sandwich_trials(const LatencyModel& network, const OrderingPolicy& policy,
                                  const std::string& victim_city, const std::string& attacker_city,
                                  std::size_t colluders, const ExperimentConfig& cfg) {
  const std::size_t f = max_faults(network.node_count());
  auto colluding = network.topology().nearest_nodes(attacker_city, colluders);
  network.topology().city_index(victim_city);
  TrialEnv env{network, policy, cfg, f};
  using Counts = std::map<SandwichOrder, std::uint64_t>;
  auto counts = parallel_trials<Counts>(
      cfg.trials, derive_seed(cfg.seed, "sandwich", 0), policy.name(), Counts{},
      [&](std::uint64_t trial, Rng& rng, Counts& acc) {
        Micros t = static_cast<Micros>(rng.below(static_cast<std::uint64_t>(cfg.slot_interval)));
        auto victim = Invocation::at("victim-" + std::to_string(trial), t);
        auto front = Invocation::at("front-" + std::to_string(trial), t);
        auto back = Invocation::at("back-" + std::to_string(trial), t);
        auto victim_rng = Rng::derive(trial, "victim-view");
        auto victim_view = network.observe(victim, victim_city, victim_rng);
        auto placement = private_relay_placement(victim_view, colluding, f, t, network.dnet());
        std::vector<Submission> subs{
            {victim, victim_city, {}, QuorumChoice::lowest},
            {front, attacker_city, placement.front_overrides, placement.front_quorum},
            {back, attacker_city, placement.back_overrides, placement.back_quorum}};
        auto ledger = order_once(env, std::move(subs), rng, colluding);
        std::array<std::pair<std::ptrdiff_t, SandwichCmd>, 3> pos{
            std::pair{ledger.position(victim.id), SandwichCmd::victim_buy},
            std::pair{ledger.position(front.id), SandwichCmd::attacker_buy},
            std::pair{ledger.position(back.id), SandwichCmd::attacker_sell}};
        std::sort(pos.begin(), pos.end());
        ++acc[{pos[0].second, pos[1].second, pos[2].second}];
      },
      [](Counts x, const Counts& y) {
        for (const auto& [k, v] : y) x[k] += v;
        return x;
      });
  return {counts, cfg.trials};
}

ExperimentResult run_geo_bias(const ExperimentConfig& cfg) {
  auto network = make_network(cfg);
  ExperimentResult result;
  result.table.header = {"city_a", "city_b", "policy", "pr_a_first", "difference", "std_error"};
  result.plot.header = {"x", "series", "y"};
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < cfg.cities.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.cities.size(); ++j) {
      for (const auto& policy : cfg.policies) {
        auto est = pair_first_probability(network, policy, cfg.cities[i], cfg.cities[j], 0, cfg, stream++);
        double diff = 2 * est.value - 1;
        result.table.rows.push_back({cfg.cities[i], cfg.cities[j], policy.name(), format_fixed(est.value),
                                     format_fixed(diff), format_fixed(2 * est.std_error)});
        result.plot.rows.push_back({cfg.cities[i] + "<" + cfg.cities[j], policy.name(), format_fixed(diff)});
      }
    }
  }
  return result;
}

ExperimentResult run_tradeoff_curve(const ExperimentConfig& cfg) {
  auto network = make_network(cfg);
  // cities[0] is the advantaged client; cities[1] sends `gap` earlier.
  const auto& advantaged = cfg.cities[0];
  const auto& early = cfg.cities[1];
  ExperimentResult result;
  result.table.header = {"gap_ms", "policy", "pr_early_first", "std_error"};
  result.plot.header = {"x", "series", "y"};
  std::uint64_t stream = 0;
  for (const auto& policy : cfg.policies) {
    for (Micros gap : cfg.gaps) {
      auto est = pair_first_probability(network, policy, early, advantaged, gap, cfg, stream++);
      auto gap_ms = format_fixed(static_cast<double>(gap) / 1000.0, 3);
      result.table.rows.push_back({gap_ms, policy.name(), format_fixed(est.value), format_fixed(est.std_error)});
      result.plot.rows.push_back({gap_ms, policy.name(), format_fixed(est.value)});
    }
  }
  return result;
}

ExperimentResult run_sandwich(const ExperimentConfig& cfg) {
  auto network = make_network(cfg);
  const auto& victim_city = cfg.cities[0];
  const auto& attacker_city = cfg.cities[1];
  std::size_t colluders = cfg.colluders.value_or(max_faults(network.node_count()));
  SandwichScenario scenario;
  ExperimentResult result;
  result.table.header = {"policy", "order", "count", "frequency", "victim_usd", "attacker_usd"};
  result.plot.header = {"x", "series", "y"};
  for (const auto& policy : cfg.policies) {
    auto stats = run_sandwich_trials(network, policy, victim_city, attacker_city, colluders, cfg);
    auto freqs = stats.frequencies();
    double expected_attacker = 0;
    double expected_victim = 0;
    for (const auto& order : all_sandwich_orders()) {
      auto profits = sandwich_profits(scenario, order);
      double freq = freqs[order];
      expected_attacker += freq * to_double(profits.attacker_usd);
      expected_victim += freq * to_double(profits.victim_usd);
      auto count = stats.counts.count(order) ? stats.counts.at(order) : 0;
      result.table.rows.push_back({policy.name(), order_label(order), std::to_string(count),
                                   format_fixed(freq), format_usd(profits.victim_usd),
                                   format_usd(profits.attacker_usd)});
      result.plot.rows.push_back({order_label(order), policy.name(), format_fixed(freq)});
    }
    result.table.rows.push_back({policy.name(), "expected", std::to_string(stats.trials), "1.000000",
                                 format_fixed(expected_victim, 2), format_fixed(expected_attacker, 2)});
  }
  return result;
}

ExperimentResult run_liquidation(const ExperimentConfig& cfg) {
  auto network = make_network(cfg);
  ExperimentResult result;
  result.table.header = {"policy", "city", "pr_first", "expected_usd"};
  result.plot.header = {"x", "series", "y"};
  std::uint64_t stream = 0;
  for (const auto& policy : cfg.policies) {
    auto est = pair_first_probability(network, policy, cfg.cities[0], cfg.cities[1], 0, cfg, stream++);
    std::array<double, 2> probs{est.value, 1 - est.value};
    auto values = liquidation_expected_values(probs, cfg.prize_usd);
    for (std::size_t i = 0; i < 2; ++i) {
      result.table.rows.push_back({policy.name(), cfg.cities[i], format_fixed(probs[i]), format_fixed(values[i], 2)});
      result.plot.rows.push_back({cfg.cities[i], policy.name(), format_fixed(values[i], 2)});
    }
  }
  return result;
}

Table bounds_rows(unsigned n, std::span<const Rational> alphas, Micros dnet) {
  Table t;
  t.header = {"alpha", "epsilon", "lower", "upper", "delta_us"};
  for (const auto& alpha : alphas) {
    auto b = order_prob_bounds(n, alpha);
    Rational dnoise = Rational(dnet) / alpha;
    auto delta = delta_linearizability(dnet, static_cast<Micros>(std::llround(to_double(dnoise))));
    t.rows.push_back({format_fixed(to_double(alpha), 9), format_fixed(to_double(b.upper - b.lower), 9),
                      format_fixed(to_double(b.lower), 9), format_fixed(to_double(b.upper), 9),
                      std::to_string(delta)});
  }
  return t;
}

ExperimentResult run_bounds_table(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.table.header = {"n", "alpha", "epsilon", "lower", "upper", "delta_us"};
  result.plot.header = {"x", "series", "y"};
  for (unsigned n : cfg.bound_ns) {
    auto rows = bounds_rows(n, cfg.alphas, cfg.dnet);
    for (auto& row : rows.rows) {
      result.plot.rows.push_back({row[0], "epsilon_n" + std::to_string(n), row[1]});
      row.insert(row.begin(), std::to_string(n));
      result.table.rows.push_back(std::move(row));
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.scenario) {
    case Scenario::geo_bias: return run_geo_bias(cfg);
    case Scenario::tradeoff_curve: return run_tradeoff_curve(cfg);
    case Scenario::sandwich: return run_sandwich(cfg);
    case Scenario::liquidation: return run_liquidation(cfg);
    case Scenario::bounds_table: return run_bounds_table(cfg);
  }
  fail(ErrorCategory::config, "unknown scenario");
}

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void emit_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::io, "cannot write " + path.string());
  out << to_csv(table);
  out.flush();
  if (!out) fail(ErrorCategory::io, "write failed: " + path.string());
}

void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& path) {
  emit_csv(result.plot, path);
}

}  // namespace bercow
