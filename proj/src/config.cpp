#include "fockwalk/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fockwalk/jc_walk.hpp"

namespace fockwalk {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

std::vector<int> to_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_integer<int>(key, item));
  }
  return out;
}

std::string json_scalar_to_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& x : v) {
      if (!out.empty()) out += ",";
      out += json_scalar_to_text(x);
    }
    return out;
  }
  return v.dump();
}

JcPhaseModel parse_jc_phase(const std::string& s) {
  if (s == "unitary") return JcPhaseModel::Unitary;
  if (s == "lindblad") return JcPhaseModel::Lindblad;
  throw ConfigError("jc_phase must be 'unitary' or 'lindblad'");
}

DecayCoupling parse_decay_coupling(const std::string& s) {
  if (s == "off") return DecayCoupling::Off;
  if (s == "detuned") return DecayCoupling::Detuned;
  throw ConfigError("decay_coupling must be 'off' or 'detuned'");
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "walk") return Mode::Walk;
  if (name == "protocol") return Mode::Protocol;
  if (name == "fidelity-curve") return Mode::FidelityCurve;
  if (name == "validate") return Mode::Validate;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::Walk: return "walk";
    case Mode::Protocol: return "protocol";
    case Mode::FidelityCurve: return "fidelity-curve";
    case Mode::Validate: return "validate";
  }
  return "protocol";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "g",       "delta_g", "gamma",  "gamma_c",   "gamma_sted",     "sigma_n", "n_T",   "k",
      "n_max",   "steps",   "trajectories", "seed", "tau_gamma",     "jc_phase", "decay_coupling",
      "threads", "variant", "eta",    "tau",       "targets",        "alpha",   "M",     "rate_ratio",
      "out",     "format"};
  return keys;
}

Settings parse_settings_text(const std::string& text) {
  Settings out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key == "mode" || value.is_null()) continue;
      out[key] = json_scalar_to_text(value);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_settings_text(ss.str());
}

int WalkSettings::resolved_n_max() const {
  if (n_max) return *n_max;
  if (variant == "damped") return n_target + 10;
  return std::max(n_target + 10, steps + 3);
}

double WalkSettings::resolved_tau() const { return tau.value_or(trapping_time(g, n_target, k)); }

RunConfig resolve_config(Mode mode, const std::vector<Settings>& layers) {
  Settings merged;
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) merged[k] = v;
  const auto& keys = known_keys();
  for (const auto& [k, v] : merged)
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key '" + k + "'");

  RunConfig cfg;
  cfg.mode = mode;
  auto has = [&](const char* k) { return merged.count(k) != 0; };
  auto str = [&](const char* k) { return merged.at(k); };
  auto num = [&](const char* k) { return to_double(k, merged.at(k)); };
  auto integer = [&](const char* k) { return to_integer<int>(k, merged.at(k)); };

  if (has("out")) cfg.output_path = str("out");
  if (has("format")) {
    const auto f = str("format");
    if (f == "csv") cfg.format = OutputFormat::Csv;
    else if (f == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("format must be 'csv' or 'json'");
  }

  if (mode == Mode::Walk) {
    WalkSettings& w = cfg.walk;
    if (has("variant")) w.variant = str("variant");
    if (w.variant != "hadamard" && w.variant != "flip" && w.variant != "damped")
      throw ConfigError("variant must be one of hadamard, flip, damped");
    if (has("eta")) w.eta = num("eta");
    if (has("g")) w.g = num("g");
    if (has("tau")) w.tau = num("tau");
    if (has("n_T")) w.n_target = integer("n_T");
    if (has("k")) w.k = integer("k");
    if (has("n_max")) w.n_max = integer("n_max");
    if (has("steps")) w.steps = integer("steps");
    if (w.n_target < 0 || w.k < 1 || w.steps < 0) throw ConfigError("walk: n_T >= 0, k >= 1, steps >= 0 required");
    if (!(w.g > 0.0)) throw ConfigError("walk: g must be positive");
    if (w.tau && !(*w.tau >= 0.0)) throw ConfigError("walk: tau must be non-negative");
    if (!(w.eta >= 0.0 && w.eta <= 1.0)) throw ConfigError("walk: eta must lie in [0, 1]");
    if (w.resolved_n_max() < 1) throw ConfigError("walk: n_max must be at least 1");
    return cfg;
  }

  ProtocolParams& p = cfg.protocol;
  if (mode == Mode::FidelityCurve) {
    p.sigma_n = 0.0;
    p.steps = 400;
  }
  try {
    if (has("g")) p.g = num("g");
    if (has("delta_g")) p.delta_g = num("delta_g");
    if (has("gamma")) p.gamma = num("gamma");
    if (has("gamma_c")) p.gamma_c = num("gamma_c");
    if (has("gamma_sted")) p.gamma_sted = num("gamma_sted");
    if (has("sigma_n")) p.sigma_n = num("sigma_n");
    if (has("k")) p.k = integer("k");
    if (has("steps")) p.steps = integer("steps");
    if (has("trajectories")) p.trajectories = integer("trajectories");
    if (has("seed")) p.seed = to_integer<std::uint64_t>("seed", str("seed"));
    if (has("tau_gamma")) p.tau_gamma = num("tau_gamma");
    if (has("jc_phase")) p.jc_phase = parse_jc_phase(str("jc_phase"));
    if (has("decay_coupling")) p.decay_coupling = parse_decay_coupling(str("decay_coupling"));
    if (has("threads")) p.threads = integer("threads");
    if (mode == Mode::FidelityCurve) {
      if (has("n_T") || has("n_max")) throw ConfigError("fidelity-curve sets n_T and n_max per target; use 'targets'");
      CurveSettings& c = cfg.curve;
      if (has("targets")) c.n_targets = to_int_list("targets", str("targets"));
      if (has("alpha")) c.alpha = num("alpha");
      if (has("M")) c.wait_multiple = num("M");
      if (has("rate_ratio")) c.rate_ratio = num("rate_ratio");
      if (c.n_targets.empty()) throw ConfigError("no targets");
      for (int n : c.n_targets) {
        if (n < 1) throw ConfigError("targets must be at least 1");
        ProtocolParams q = p;
        q.n_target = n;
        q.validate();
      }
      if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
      if (!(c.wait_multiple > 0.0)) throw ConfigError("M must be positive");
      if (!(c.rate_ratio >= 0.0)) throw ConfigError("rate_ratio must be non-negative");
    } else {
      if (has("n_T")) p.n_target = integer("n_T");
      if (has("n_max")) p.n_max = integer("n_max");
      p.validate();
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  p = p.resolved();
  return cfg;
}

nlohmann::ordered_json config_to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(config.mode);
  if (config.mode == Mode::Walk) {
    const auto& w = config.walk;
    j["variant"] = w.variant;
    j["eta"] = w.eta;
    j["g"] = w.g;
    j["tau"] = w.resolved_tau();
    j["n_T"] = w.n_target;
    j["k"] = w.k;
    j["n_max"] = w.resolved_n_max();
    j["steps"] = w.steps;
  } else if (config.mode != Mode::Validate) {
    const auto p = config.protocol.resolved();
    j["g"] = p.g;
    j["delta_g"] = p.delta_g;
    j["gamma"] = p.gamma;
    j["gamma_c"] = p.gamma_c;
    j["gamma_sted"] = p.gamma_sted;
    j["sigma_n"] = p.sigma_n;
    if (config.mode == Mode::Protocol) {
      j["n_T"] = p.n_target;
      j["n_max"] = *p.n_max;
    }
    j["k"] = p.k;
    j["steps"] = p.steps;
    j["trajectories"] = p.trajectories;
    j["seed"] = p.seed;
    j["tau_gamma"] = *p.tau_gamma;
    j["jc_phase"] = p.jc_phase == JcPhaseModel::Unitary ? "unitary" : "lindblad";
    j["decay_coupling"] = p.decay_coupling == DecayCoupling::Off ? "off" : "detuned";
    j["threads"] = p.threads;
    if (config.mode == Mode::FidelityCurve) {
      j["targets"] = config.curve.n_targets;
      j["alpha"] = config.curve.alpha;
      j["M"] = config.curve.wait_multiple;
      j["rate_ratio"] = config.curve.rate_ratio;
    }
  }
  j["format"] = config.format == OutputFormat::Csv ? "csv" : "json";
  if (config.output_path) j["out"] = *config.output_path;
  return j;
}

}  // namespace fockwalk
