#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoisim/deadline.hpp"
#include "aoisim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int cmd_run(const std::string& config_path, const std::string& preset,
            std::uint64_t horizon_override, std::uint64_t seed_override,
            const std::string& output_override) {
  aoisim::ScenarioConfig cfg;
  if (!preset.empty())
    cfg = aoisim::make_preset(preset);
  else
    cfg = aoisim::load_scenario(config_path);
  if (horizon_override > 0) cfg.horizon = horizon_override;
  if (seed_override > 0) cfg.seed = seed_override;
  if (!output_override.empty()) cfg.output = output_override;

  const auto rows = aoisim::run_scenario(cfg);
  if (!cfg.output) {
    std::cout << aoisim::csv_header() << '\n';
    for (const auto& r : rows) std::cout << aoisim::to_csv_line(r) << '\n';
  } else {
    std::cout << "wrote " << rows.size() << " rows to " << *cfg.output << '\n';
  }
  return kExitOk;
}

int cmd_validate_indices(const std::string& lambdas_csv, int a_max, int d_max,
                         bool verbose) {
  std::vector<double> lambdas;
  std::stringstream ss(lambdas_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) lambdas.push_back(std::stod(tok));
  }
  std::vector<int> as, ds;
  for (int a = 1; a <= a_max; ++a) as.push_back(a);
  for (int d = 1; d <= d_max; ++d) ds.push_back(d);

  const auto rep = aoisim::validate_indices(lambdas, as, ds);
  int failures = 0;
  for (const auto& c : rep.checks) {
    if (!c.pass) ++failures;
    if (verbose || !c.pass)
      std::printf("%s lambda=%.3f a=%d d=%d closed=%.6f flip=%.6f bracket=[%.6f, %.6f]\n",
                  c.pass ? "[PASS]" : "[FAIL]", c.lambda, c.a, c.d,
                  c.closed_form, c.flip_charge, c.bracket_lo, c.bracket_hi);
  }
  std::printf("%zu states checked, %d failures\n", rep.checks.size(), failures);
  return rep.all_pass ? kExitOk : kExitValidation;
}

int cmd_admit(const std::string& config_path, const std::string& csv_path) {
  std::ifstream in(config_path);
  if (!in) throw aoisim::ConfigError("cannot open deadline config: " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw aoisim::ConfigError(std::string("invalid JSON: ") + e.what());
  }

  std::vector<aoisim::DeadlineSpec> specs;
  try {
    if (j.contains("terminals") && j.at("terminals").is_array()) {
      for (const auto& item : j.at("terminals")) {
        aoisim::DeadlineSpec s;
        s.lambda = item.at("lambda").get<double>();
        s.deadline = item.at("deadline").get<int>();
        s.epsilon = item.at("epsilon").get<double>();
        specs.push_back(s);
      }
    } else if (j.contains("count")) {
      aoisim::DeadlineSpec s;
      s.lambda = j.at("lambda").get<double>();
      s.deadline = j.at("deadline").get<int>();
      s.epsilon = j.at("epsilon").get<double>();
      specs.assign(j.at("count").get<std::size_t>(), s);
    } else {
      throw aoisim::ConfigError(
          "deadline config needs terminals[] or {count, lambda, deadline, epsilon}");
    }
    for (const auto& s : specs) s.validate();
  } catch (const aoisim::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw aoisim::ConfigError(std::string("deadline config: ") + e.what());
  }

  const auto rep = aoisim::admit(specs);
  std::printf("terminals: %zu\n", specs.size());
  std::printf("feasible: %s\n", rep.feasible ? "yes" : "no");
  std::printf("utilization: %.6f\n", rep.utilization);
  if (rep.n_mean_bound)
    std::printf("N_mean bound (symmetric): %.1f\n", *rep.n_mean_bound);
  if (rep.n_deadline_bound)
    std::printf("N_deadline bound (symmetric): %.3f\n", *rep.n_deadline_bound);
  for (std::size_t n = 0; n < specs.size(); ++n) {
    std::printf("terminal %zu: lambda=%.4f H=%d eps=%g gamma_max=%s lambert=%s\n",
                n, specs[n].lambda, specs[n].deadline, specs[n].epsilon,
                rep.intervals[n] ? std::to_string(*rep.intervals[n]).c_str()
                                 : "infeasible",
                rep.lambert_intervals[n]
                    ? std::to_string(*rep.lambert_intervals[n]).c_str()
                    : "n/a");
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << "terminal,lambda,deadline,epsilon,gamma_max,gamma_lambert,feasible,utilization\n";
    for (std::size_t n = 0; n < specs.size(); ++n) {
      out << n << ',' << specs[n].lambda << ',' << specs[n].deadline << ','
          << specs[n].epsilon << ','
          << (rep.intervals[n] ? std::to_string(*rep.intervals[n]) : "") << ','
          << (rep.lambert_intervals[n]
                  ? std::to_string(*rep.lambert_intervals[n])
                  : "")
          << ',' << (rep.feasible ? 1 : 0) << ',' << rep.utilization << '\n';
    }
    std::printf("wrote %s\n", csv_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aoisim: AoI scheduling policies, IPRA random access, and "
               "deadline admission"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario config or preset");
  std::string config_path, preset, output_override;
  std::uint64_t horizon_override = 0, seed_override = 0;
  run->add_option("config", config_path, "scenario JSON file");
  run->add_option("--preset", preset, "preset name (see list-presets)");
  run->add_option("--horizon", horizon_override, "override horizon");
  run->add_option("--seed", seed_override, "override seed");
  run->add_option("--output", output_override, "override output CSV path");

  auto* vi = app.add_subcommand("validate-indices",
                                "closed-form indices vs decoupled-model oracle");
  std::string lambdas_csv = "0.2,0.5,0.8,1.0";
  int vi_a_max = 5, vi_d_max = 10;
  bool vi_verbose = false;
  vi->add_option("--lambdas", lambdas_csv, "comma-separated arrival rates");
  vi->add_option("--a-max", vi_a_max, "check a in 1..a_max");
  vi->add_option("--d-max", vi_d_max, "check d in 1..d_max");
  vi->add_flag("--verbose", vi_verbose, "print every state, not only failures");

  auto* adm = app.add_subcommand("admit", "reliable-deadline admission report");
  std::string admit_config, admit_csv;
  adm->add_option("config", admit_config, "deadline JSON file")->required();
  adm->add_option("--csv", admit_csv, "also write a CSV report");

  auto* lp = app.add_subcommand("list-presets", "list built-in scenario presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_path.empty() && preset.empty()) {
        std::cerr << "error: run needs a config file or --preset\n";
        return kExitValidation;
      }
      return cmd_run(config_path, preset, horizon_override, seed_override,
                     output_override);
    }
    if (vi->parsed())
      return cmd_validate_indices(lambdas_csv, vi_a_max, vi_d_max, vi_verbose);
    if (adm->parsed()) return cmd_admit(admit_config, admit_csv);
    if (lp->parsed()) {
      for (const auto& p : aoisim::list_presets())
        std::printf("%-8s %s\n", p.name.c_str(), p.description.c_str());
      return kExitOk;
    }
  } catch (const aoisim::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
