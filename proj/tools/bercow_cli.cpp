// bercow: run experiments, print bounds, replay attacks and exercise the SRO.
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bercow/analysis.hpp"
#include "bercow/harness.hpp"
#include "bercow/sro.hpp"

using namespace bercow;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::contract: return 2;
    case ErrorCategory::config: return 3;
    case ErrorCategory::parse: return 4;
    case ErrorCategory::io: return 5;
    case ErrorCategory::sro: return 6;
  }
  return 1;
}

void write_result(const ExperimentResult& result, const std::filesystem::path& output) {
  if (output.empty()) {
    std::cout << to_csv(result.table);
    return;
  }
  emit_csv(result.table, output);
  auto plot = output;
  plot.replace_extension(".plot.csv");
  emit_plot_data(result, plot);
}

int cmd_simulate(const std::string& config_path, const std::string& output_override) {
  auto cfg = load_config(config_path);
  if (!output_override.empty()) cfg.output = output_override;
  write_result(run_experiment(cfg), cfg.output);
  return 0;
}

int cmd_bounds(unsigned n, const std::string& alpha_text, bool curve, double dnet_ms) {
  auto alpha = parse_rational(alpha_text);
  std::vector<Rational> alphas;
  if (curve) {
    for (int i = 1; i <= 20; ++i) alphas.push_back(alpha * i / 20);
  } else {
    alphas.push_back(alpha);
  }
  std::cout << to_csv(bounds_rows(n, alphas, static_cast<Micros>(dnet_ms * 1000)));
  return 0;
}

int cmd_sandwich(const std::string& policy_name, double mult, std::uint64_t trials, std::uint64_t seed,
                 const std::string& output) {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::sandwich;
  cfg.dnoise = static_cast<Micros>(mult * static_cast<double>(cfg.dnet));
  cfg.policies = {parse_policy(policy_name, cfg.dnoise, cfg.rotation_period)};
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.cities = {"Munich", "London"};
  write_result(run_experiment(cfg), output);
  return 0;
}

int cmd_sro_demo(const std::string& backend, std::size_t n, std::size_t f, std::uint64_t k,
                 std::optional<std::uint64_t> test_field) {
  sro::SroConfig cfg;
  cfg.n = n;
  cfg.f = f;
  if (backend == "seeded") {
    cfg.backend = sro::Backend::seeded_hash;
  } else if (backend == "threshold") {
    cfg.backend = sro::Backend::threshold_dprf;
  } else {
    fail(ErrorCategory::config, "unknown backend " + backend);
  }
  if (test_field) cfg.test_field = *test_field;
  sro::Seed seed{};
  seed[0] = 1;
  auto handle = sro::SroHandle::init(cfg, seed);
  auto cert = handle.quorum_certificate(k);
  auto r = handle.reveal({k, cert});
  auto proof = handle.generate_proof(k, cert);
  auto text = sro::describe(proof);
  while (!text.empty() && text.back() == '\n') text.pop_back();
  std::cout << "slot: " << k << "\n"
            << "value: " << to_hex(r) << "\n"
            << "proof: " << text << "\n"
            << "verified: " << (sro::verify(k, proof, r) ? "true" : "false") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ordered consensus with equal opportunity: simulator and analysis"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment config");
  simulate->add_option("config", config_path)->required();
  simulate->add_option("-o,--output", output, "Override the config's output path");

  unsigned n = 2;
  std::string alpha = "0.2";
  bool curve = false;
  double dnet_ms = 300;
  auto* bounds = app.add_subcommand("bounds", "Ordering-equality bounds for n commands");
  bounds->add_option("--n", n)->required()->check(CLI::Range(1u, 64u));
  bounds->add_option("--alpha", alpha, "dnet/dnoise as decimal or a/b")->required();
  bounds->add_flag("--curve", curve, "Sweep alpha/20 .. alpha");
  bounds->add_option("--dnet-ms", dnet_ms, "Network bound used for the delta column");

  std::string policy = "bercow";
  double mult = 5;
  std::uint64_t trials = 10'000, seed = 1;
  auto* attack = app.add_subcommand("attack", "Attack scenarios");
  attack->require_subcommand(1);
  auto* sandwich = attack->add_subcommand("sandwich", "AMM sandwich with private relay");
  sandwich->add_option("--policy", policy)->check(CLI::IsMember({"pompe", "bercow", "leader", "receive"}));
  sandwich->add_option("--dnoise", mult, "Noise bound as a multiple of dnet");
  sandwich->add_option("--trials", trials);
  sandwich->add_option("--seed", seed);
  sandwich->add_option("-o,--output", output);

  std::string backend = "seeded";
  std::size_t sro_n = 4, sro_f = 1;
  std::uint64_t k = 0;
  std::optional<std::uint64_t> test_field;
  auto* demo = app.add_subcommand("sro-demo", "Reveal and verify one slot value");
  demo->add_option("--backend", backend)->check(CLI::IsMember({"seeded", "threshold"}));
  demo->add_option("--n", sro_n);
  demo->add_option("--f", sro_f);
  demo->add_option("--k", k);
  demo->add_option("--test-field", test_field, "Small prime field for test mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) return cmd_simulate(config_path, output);
    if (*bounds) return cmd_bounds(n, alpha, curve, dnet_ms);
    if (*sandwich) return cmd_sandwich(policy, mult, trials, seed, output);
    if (*demo) return cmd_sro_demo(backend, sro_n, sro_f, k, test_field);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.category()) << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
