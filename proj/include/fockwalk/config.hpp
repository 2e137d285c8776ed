#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockwalk/core.hpp"
#include "fockwalk/protocol.hpp"

namespace fockwalk {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Mode { Walk, Protocol, FidelityCurve, Validate };
enum class OutputFormat { Csv, Json };

struct WalkSettings {
  std::string variant = "damped";  // hadamard | flip | damped
  double eta = 0.0;
  double g = 1.0;
  std::optional<double> tau;       // default: trapping time for (g, n_T, k)
  int n_target = 16;
  int k = 1;
  std::optional<int> n_max;        // default: n_T + 10, or enough for a spreading unitary walk
  int steps = 600;

  int resolved_n_max() const;
  double resolved_tau() const;
};

struct CurveSettings {
  std::vector<int> n_targets{2, 4, 6, 8, 10};
  double alpha = 0.5;
  double wait_multiple = 5.0;
  double rate_ratio = 1e-5;
};

struct RunConfig {
  Mode mode = Mode::Protocol;
  ProtocolParams protocol;
  WalkSettings walk;
  CurveSettings curve;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::Csv;
};

// Flat key -> value settings, as read from a config file or command-line overrides.
using Settings = std::map<std::string, std::string>;

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

// Keys accepted in config files and as --<key> overrides.
const std::vector<std::string>& known_keys();

// Reads a JSON object (optionally wrapped under "config") or `key = value` lines.
Settings read_settings_file(const std::string& path);
Settings parse_settings_text(const std::string& text);

// Builds and validates the configuration for `mode`; later entries in `layers` win.
RunConfig resolve_config(Mode mode, const std::vector<Settings>& layers);

// Every resolved field, defaults included; feeding it back reproduces the run.
nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace fockwalk
