// Experiment runner: seed-pinned configs in, CSV tables and long-format plot
// data out.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bercow/attacks.hpp"
#include "bercow/consensus_sim.hpp"

namespace bercow {

enum class Scenario { geo_bias, tradeoff_curve, sandwich, liquidation, bounds_table };

struct ExperimentConfig {
  Scenario scenario = Scenario::geo_bias;
  std::filesystem::path topology = "ethereum80.topo";
  std::vector<OrderingPolicy> policies;
  Micros dnet = 300'000;
  Micros dnoise = 1'500'000;
  Micros slot_interval = kDefaultSlotInterval;
  Micros rotation_period = kDefaultSlotInterval;
  DelayModel delays;
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::vector<std::string> cities;
  std::vector<Micros> gaps;  // tradeoff_curve, in microseconds
  std::optional<std::size_t> colluders;  // sandwich; default f
  double prize_usd = 200'000;            // liquidation
  std::vector<unsigned> bound_ns{2, 3};  // bounds_table
  std::vector<Rational> alphas;          // bounds_table
  std::filesystem::path output;          // CSV path; plot data goes next to it

  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

OrderingPolicy parse_policy(std::string_view name, Micros dnoise, Micros rotation_period);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  Table table;
  Table plot;  // (x, series, y)
};

/// Topology from the config, resolved against default_topology_dir() when
/// the path is relative and does not exist as given.
CityTopology resolve_topology(const std::filesystem::path& path);

/// Probability that the command from `first_city` (sent at T) is ordered
/// before the one from `second_city` (sent at T + second_delay).
Estimate pair_first_probability(const LatencyModel& network, const OrderingPolicy& policy,
                                const std::string& first_city, const std::string& second_city,
                                Micros second_delay, const ExperimentConfig& cfg, std::uint64_t stream);

struct SandwichStats {
  std::map<SandwichOrder, std::uint64_t> counts;
  std::uint64_t trials = 0;
  std::map<SandwichOrder, double> frequencies() const;
};

/// Victim buy from `victim_city` and the attacker's buy and sell from
/// `attacker_city`, all sent at the same instant, with `colluders` of the
/// nodes nearest the attacker relaying privately.
SandwichStats run_sandwich_trials(const LatencyModel& network, const OrderingPolicy& policy,
                                  const std::string& victim_city, const std::string& attacker_city,
                                  std::size_t colluders, const ExperimentConfig& cfg);

ExperimentResult run_geo_bias(const ExperimentConfig& cfg);
ExperimentResult run_tradeoff_curve(const ExperimentConfig& cfg);
ExperimentResult run_sandwich(const ExperimentConfig& cfg);
ExperimentResult run_liquidation(const ExperimentConfig& cfg);
ExperimentResult run_bounds_table(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Rows of (alpha, epsilon, lower, upper, delta_us) for the given n.
Table bounds_rows(unsigned n, std::span<const Rational> alphas, Micros dnet);

std::string to_csv(const Table& table);
void emit_csv(const Table& table, const std::filesystem::path& path);
void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& path);

std::string format_fixed(double value, int decimals = 6);

}  // namespace bercow
