#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fockwalk/commands.hpp"
#include "fockwalk/config.hpp"

using namespace fockwalk;

namespace {

struct Invocation {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_overrides(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_path, "key = value or JSON config file");
  for (const auto& key : known_keys()) {
    auto* opt = sub->add_option("--" + key, inv.overrides[key], "override '" + key + "'");
    if (key == "format") opt->check(CLI::IsMember({"csv", "json"}));
  }
}

int run(Mode mode, const Invocation& inv) {
  std::vector<Settings> layers;
  if (!inv.config_path.empty()) layers.push_back(read_settings_file(inv.config_path));
  Settings cli;
  for (const auto& [k, v] : inv.overrides)
    if (!v.empty()) cli[k] = v;
  layers.push_back(cli);
  const RunConfig config = resolve_config(mode, layers);

  CommandResult result;
  switch (mode) {
    case Mode::Walk: result = cmd_walk(config); break;
    case Mode::Protocol: result = cmd_protocol(config); break;
    case Mode::FidelityCurve: result = cmd_fidelity_curve(config); break;
    case Mode::Validate: break;
  }
  write_result(config, result, std::cout);
  return kExitOk;
}

int run_validate() {
  bool all = true;
  for (const auto& c : cmd_validate()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Jaynes-Cummings walk and Fock-state protocol simulator"};
  app.require_subcommand(1);

  Invocation walk, protocol, curve;
  add_overrides(app.add_subcommand("walk", "Fock distribution of the walk at every step"), walk);
  add_overrides(app.add_subcommand("protocol", "Noisy cavity protocol, per-step fidelity and populations"), protocol);
  add_overrides(app.add_subcommand("fidelity-curve", "Stationary fidelity against the closed-form budget"), curve);
  app.add_subcommand("validate", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("walk")) return run(Mode::Walk, walk);
    if (app.got_subcommand("protocol")) return run(Mode::Protocol, protocol);
    if (app.got_subcommand("fidelity-curve")) return run(Mode::FidelityCurve, curve);
    return run_validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationFault& e) {
    std::cerr << "truncation fault at step " << e.step() << ": P(n >= n_max - 2) = " << e.leak() << '\n';
    return kExitTruncation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
