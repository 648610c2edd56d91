#pragma once
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <homsim/constants.hpp>
#include <homsim/errors.hpp>
#include <homsim/spectral.hpp>

namespace homsim {

enum class Scenario { Ideal, Polarization, DelayDensity, DelayScan, MonteCarlo, Oracle };

inline const char *to_string(Scenario s) {
  switch (s) {
    case Scenario::Ideal: return "ideal";
    case Scenario::Polarization: return "polarization";
    case Scenario::DelayDensity: return "delay_density";
    case Scenario::DelayScan: return "delay_scan";
    case Scenario::MonteCarlo: return "monte_carlo";
    default: return "oracle";
  }
}

/// Command-line overrides merged into a parsed config before semantic
/// validation; flags win over file keys.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_path;
  std::optional<int> float_precision;
};

/// A fully resolved scenario description. All times are seconds, angles
/// radians; unit suffixes and the eta / delta_l spellings of the delay are
/// converted at parse time and not retained.
struct ScenarioConfig {
  Scenario scenario = Scenario::Ideal;

  // source parameters (defaults: 10 ps pump, 100 fs dispersion time)
  double tau_p = 10e-12;
  double tau_L = 100e-15;
  double delta_t = 0.0;
  double omega_0 = 0.0;          // 0 = unspecified
  double crystal_length = 0.0;   // 0 = unspecified
  double k1_second_deriv = 0.0;  // 0 = unspecified

  std::optional<double> alpha;  // polarization scenario only
  std::optional<double> beta;

  double delta_t_max = 0.0;      // delay_scan sweep end
  int n_points = 0;              // sweep length (per-scenario default)
  double x_max = 0.0;            // delay_density half-range

  long long n_pairs = 0;
  std::optional<std::uint64_t> seed;
  double temporal_resolution = 0.0;
  double coincidence_window = 0.0;

  std::string output_path = ".";
  int float_precision = 9;

  bool operator==(const ScenarioConfig &) const = default;

  SpectralParams spectral() const {
    SpectralParams p;
    p.tau_p = tau_p;
    p.tau_L = tau_L;
    p.delta_t = delta_t;
    p.omega_0 = omega_0;
    p.crystal_length = crystal_length;
    p.k1_second_deriv = k1_second_deriv;
    return p;
  }

  bool uses_spectral() const {
    return scenario == Scenario::DelayDensity || scenario == Scenario::DelayScan ||
           scenario == Scenario::MonteCarlo || scenario == Scenario::Oracle;
  }
  bool uses_monte_carlo() const {
    return scenario == Scenario::MonteCarlo ||
           (scenario == Scenario::DelayScan && n_pairs > 0);
  }

  /// Canonical `key = value` rendering; re-parsing it reproduces this
  /// config exactly. Doubles carry 17 significant digits so the round trip
  /// is bit-exact.
  std::string normalized_text() const {
    std::ostringstream out;
    auto g17 = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    out << "scenario = " << to_string(scenario) << '\n';
    if (scenario == Scenario::Polarization) {
      if (alpha) out << "alpha = " << g17(*alpha) << '\n';
      if (beta) out << "beta = " << g17(*beta) << '\n';
      out << "n_points = " << n_points << '\n';
    }
    if (uses_spectral()) {
      out << "tau_p = " << g17(tau_p) << '\n';
      out << "tau_L = " << g17(tau_L) << '\n';
      if (crystal_length > 0.0) out << "crystal_length = " << g17(crystal_length) << '\n';
      if (k1_second_deriv > 0.0) out << "k1_second_deriv = " << g17(k1_second_deriv) << '\n';
      if (omega_0 > 0.0) out << "omega_0 = " << g17(omega_0) << '\n';
    }
    if (scenario == Scenario::DelayDensity || scenario == Scenario::MonteCarlo ||
        scenario == Scenario::Oracle) {
      out << "delta_t = " << g17(delta_t) << '\n';
    }
    if (scenario == Scenario::DelayDensity) {
      out << "x_max = " << g17(x_max) << '\n';
      out << "n_points = " << n_points << '\n';
    }
    if (scenario == Scenario::DelayScan) {
      out << "delta_t_max = " << g17(delta_t_max) << '\n';
      out << "n_points = " << n_points << '\n';
      if (n_pairs > 0) out << "n_pairs = " << n_pairs << '\n';
    }
    if (scenario == Scenario::MonteCarlo) out << "n_pairs = " << n_pairs << '\n';
    if (uses_monte_carlo()) {
      if (seed) out << "seed = " << *seed << '\n';
      out << "temporal_resolution = " << g17(temporal_resolution) << '\n';
      out << "coincidence_window = " << g17(coincidence_window) << '\n';
    }
    out << "output_path = " << output_path << '\n';
    out << "float_precision = " << float_precision << '\n';
    return out.str();
  }
};

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct NumberToken {
  double value;
  std::string suffix;
};

inline NumberToken split_number(const std::string &key, const std::string &raw) {
  const std::string text = trim(raw);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr == text.data())
    throw ConfigError("malformed number for key '" + key + "': '" + raw + "'");
  return NumberToken{value, trim(std::string(res.ptr, text.data() + text.size()))};
}

inline double parse_time(const std::string &key, const std::string &raw) {
  const NumberToken tok = split_number(key, raw);
  double scale = 1.0;
  if (tok.suffix.empty() || tok.suffix == "s") scale = 1.0;
  else if (tok.suffix == "fs") scale = 1e-15;
  else if (tok.suffix == "ps") scale = 1e-12;
  else if (tok.suffix == "ns") scale = 1e-9;
  else throw ConfigError("unknown time unit '" + tok.suffix + "' for key '" + key +
                         "' (use fs, ps, ns or s)");
  return tok.value * scale;
}

inline double parse_angle(const std::string &key, const std::string &raw) {
  const NumberToken tok = split_number(key, raw);
  if (tok.suffix.empty() || tok.suffix == "rad") return tok.value;
  if (tok.suffix == "deg") return tok.value * pi / 180.0;
  throw ConfigError("unknown angle unit '" + tok.suffix + "' for key '" + key +
                    "' (use deg or rad)");
}

inline double parse_plain(const std::string &key, const std::string &raw) {
  const NumberToken tok = split_number(key, raw);
  if (!tok.suffix.empty())
    throw ConfigError("key '" + key + "' takes a bare number, got suffix '" + tok.suffix + "'");
  return tok.value;
}

inline long long parse_integer(const std::string &key, const std::string &raw) {
  const std::string text = trim(raw);
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "' needs an integer, got '" + raw + "'");
  return value;
}

inline std::uint64_t parse_seed_value(const std::string &key, const std::string &raw) {
  const std::string text = trim(raw);
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "' needs an unsigned integer, got '" + raw + "'");
  return value;
}

}  // namespace detail

/// Parses the line-oriented `key = value` configuration format. Blank
/// lines and lines starting with '#' are skipped; duplicate, unknown and
/// scenario-inapplicable keys are errors, as are unknown unit suffixes.
inline ScenarioConfig parse_config(const std::string &text,
                                   const ConfigOverrides &overrides = {}) {
  using detail::trim;
  std::map<std::string, std::string> raw;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    if (!raw.emplace(key, value).second)
      throw ConfigError("duplicate key '" + key + "'");
  }

  static const std::set<std::string> vocabulary = {
      "scenario", "alpha", "beta", "tau_p", "tau_L", "crystal_length",
      "k1_second_deriv", "omega_0", "delta_t", "eta", "delta_l", "delta_t_max",
      "x_max", "n_points", "n_pairs", "seed", "temporal_resolution",
      "coincidence_window", "output_path", "float_precision"};

  const auto it_scenario = raw.find("scenario");
  if (it_scenario == raw.end()) throw ConfigError("missing required key 'scenario'");
  ScenarioConfig cfg;
  const std::string &sname = it_scenario->second;
  if (sname == "ideal") cfg.scenario = Scenario::Ideal;
  else if (sname == "polarization") cfg.scenario = Scenario::Polarization;
  else if (sname == "delay_density") cfg.scenario = Scenario::DelayDensity;
  else if (sname == "delay_scan") cfg.scenario = Scenario::DelayScan;
  else if (sname == "monte_carlo") cfg.scenario = Scenario::MonteCarlo;
  else if (sname == "oracle") cfg.scenario = Scenario::Oracle;
  else throw ConfigError("unknown scenario '" + sname +
                         "' (ideal, polarization, delay_density, delay_scan, monte_carlo, oracle)");

  std::set<std::string> allowed = {"scenario", "output_path", "float_precision"};
  const std::set<std::string> spectral_keys = {"tau_p", "tau_L", "crystal_length",
                                               "k1_second_deriv", "omega_0"};
  const std::set<std::string> delay_keys = {"delta_t", "eta", "delta_l"};
  const std::set<std::string> mc_keys = {"n_pairs", "seed", "temporal_resolution",
                                         "coincidence_window"};
  switch (cfg.scenario) {
    case Scenario::Ideal:
      break;
    case Scenario::Polarization:
      allowed.insert({"alpha", "beta", "n_points"});
      break;
    case Scenario::DelayDensity:
      allowed.insert(spectral_keys.begin(), spectral_keys.end());
      allowed.insert(delay_keys.begin(), delay_keys.end());
      allowed.insert({"x_max", "n_points"});
      break;
    case Scenario::DelayScan:
      allowed.insert(spectral_keys.begin(), spectral_keys.end());
      allowed.insert(mc_keys.begin(), mc_keys.end());
      allowed.insert({"delta_t_max", "n_points"});
      break;
    case Scenario::MonteCarlo:
      allowed.insert(spectral_keys.begin(), spectral_keys.end());
      allowed.insert(delay_keys.begin(), delay_keys.end());
      allowed.insert(mc_keys.begin(), mc_keys.end());
      break;
    case Scenario::Oracle:
      allowed.insert(spectral_keys.begin(), spectral_keys.end());
      allowed.insert(delay_keys.begin(), delay_keys.end());
      break;
  }
  for (const auto &[key, value] : raw) {
    if (!vocabulary.count(key)) throw ConfigError("unknown key '" + key + "'");
    if (!allowed.count(key))
      throw ConfigError("key '" + key + "' does not apply to scenario '" +
                        to_string(cfg.scenario) + "'");
  }

  auto get = [&raw](const char *key) -> const std::string * {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  using namespace detail;
  if (const auto *v = get("tau_p")) cfg.tau_p = parse_time("tau_p", *v);
  if (const auto *v = get("crystal_length")) cfg.crystal_length = parse_plain("crystal_length", *v);
  if (const auto *v = get("k1_second_deriv")) cfg.k1_second_deriv = parse_plain("k1_second_deriv", *v);
  if (const auto *v = get("omega_0")) cfg.omega_0 = parse_plain("omega_0", *v);
  if ((cfg.crystal_length > 0.0) != (cfg.k1_second_deriv > 0.0))
    throw ConfigError("crystal_length and k1_second_deriv must be given together");
  if (const auto *v = get("tau_L")) {
    cfg.tau_L = parse_time("tau_L", *v);
    if (cfg.crystal_length > 0.0) {
      const double derived = tau_L_from_crystal(cfg.crystal_length, cfg.k1_second_deriv);
      if (std::abs(cfg.tau_L - derived) > 1e-12 * derived)
        throw ConfigError("tau_L disagrees with the value derived from crystal data");
    }
  } else if (cfg.crystal_length > 0.0) {
    cfg.tau_L = tau_L_from_crystal(cfg.crystal_length, cfg.k1_second_deriv);
  }
  if (cfg.uses_spectral() && !(cfg.tau_L > 0.0))
    throw ConfigError("tau_L must be positive");
  if (cfg.uses_spectral() && !(cfg.tau_p > 0.0))
    throw ConfigError("tau_p must be positive");

  {
    int delay_spellings = 0;
    if (const auto *v = get("delta_t")) {
      cfg.delta_t = parse_time("delta_t", *v);
      ++delay_spellings;
    }
    if (const auto *v = get("eta")) {
      cfg.delta_t = delta_t_for_eta(parse_plain("eta", *v), cfg.tau_L);
      ++delay_spellings;
    }
    if (const auto *v = get("delta_l")) {
      cfg.delta_t = delay_from_path(parse_plain("delta_l", *v));
      ++delay_spellings;
    }
    if (delay_spellings > 1)
      throw ConfigError("give the delay as exactly one of delta_t, eta, delta_l");
    if (cfg.delta_t < 0.0) throw ConfigError("the delay must be non-negative");
  }

  if (const auto *v = get("alpha")) cfg.alpha = parse_angle("alpha", *v);
  if (const auto *v = get("beta")) cfg.beta = parse_angle("beta", *v);
  if (cfg.alpha.has_value() != cfg.beta.has_value())
    throw ConfigError("alpha and beta must be given together");
  if ((cfg.alpha && !std::isfinite(*cfg.alpha)) || (cfg.beta && !std::isfinite(*cfg.beta)))
    throw ConfigError("angles must be finite");

  if (const auto *v = get("delta_t_max")) {
    cfg.delta_t_max = parse_time("delta_t_max", *v);
    if (!(cfg.delta_t_max > 0.0) || !std::isfinite(cfg.delta_t_max))
      throw ConfigError("delta_t_max must be positive");
  }
  if (const auto *v = get("x_max")) {
    cfg.x_max = parse_time("x_max", *v);
    if (!(cfg.x_max > 0.0) || !std::isfinite(cfg.x_max))
      throw ConfigError("x_max must be positive");
  }
  if (const auto *v = get("n_points")) {
    const long long n = parse_integer("n_points", *v);
    if (n < 2 || n > 100000000) throw ConfigError("n_points out of range [2, 1e8]");
    cfg.n_points = static_cast<int>(n);
  } else {
    switch (cfg.scenario) {
      case Scenario::Polarization: cfg.n_points = 181; break;
      case Scenario::DelayDensity: cfg.n_points = 601; break;
      case Scenario::DelayScan: cfg.n_points = 81; break;
      default: cfg.n_points = 0; break;
    }
  }
  if (const auto *v = get("n_pairs")) {
    cfg.n_pairs = parse_integer("n_pairs", *v);
    if (cfg.n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
    if (cfg.n_pairs > 10000000)
      throw ConfigError("n_pairs capped at 1e7 (per-event storage)");
  }
  if (const auto *v = get("seed")) cfg.seed = parse_seed_value("seed", *v);
  if (const auto *v = get("temporal_resolution")) {
    cfg.temporal_resolution = parse_time("temporal_resolution", *v);
    if (cfg.temporal_resolution < 0.0) throw ConfigError("temporal_resolution must be >= 0");
  }
  if (const auto *v = get("coincidence_window")) {
    cfg.coincidence_window = parse_time("coincidence_window", *v);
    if (!(cfg.coincidence_window > 0.0)) throw ConfigError("coincidence_window must be > 0");
  }
  if (const auto *v = get("output_path")) cfg.output_path = *v;
  if (const auto *v = get("float_precision")) {
    const long long p = parse_integer("float_precision", *v);
    if (p < 1 || p > 17) throw ConfigError("float_precision out of range [1, 17]");
    cfg.float_precision = static_cast<int>(p);
  }

  // command-line overrides win over file keys
  if (overrides.seed) cfg.seed = overrides.seed;
  if (overrides.output_path) cfg.output_path = *overrides.output_path;
  if (overrides.float_precision) {
    if (*overrides.float_precision < 1 || *overrides.float_precision > 17)
      throw ConfigError("--precision out of range [1, 17]");
    cfg.float_precision = *overrides.float_precision;
  }

  // resolved defaults and per-scenario requirements
  if (cfg.scenario == Scenario::DelayDensity && cfg.x_max == 0.0)
    cfg.x_max = cfg.delta_t + 6.0 * cfg.tau_L;
  if (cfg.scenario == Scenario::DelayScan && !(cfg.delta_t_max > 0.0))
    throw ConfigError("delay_scan requires delta_t_max > 0");
  if (cfg.scenario == Scenario::MonteCarlo && cfg.n_pairs < 1)
    throw ConfigError("monte_carlo requires n_pairs >= 1");
  if (cfg.uses_monte_carlo()) {
    if (!cfg.seed) throw ConfigError("a seed is required when sampling (file key or --seed)");
    if (cfg.coincidence_window == 0.0) {
      const double max_delay = std::max(cfg.delta_t, cfg.delta_t_max);
      cfg.coincidence_window =
          max_delay + 10.0 * cfg.tau_L + 6.0 * cfg.temporal_resolution;
    }
  }
  if (cfg.uses_spectral()) {
    try {
      cfg.spectral().validate();
    } catch (const ValidationError &err) {
      throw ConfigError(err.what());
    }
  }
  return cfg;
}

}  // namespace homsim
