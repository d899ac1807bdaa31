#pragma once

#include "sip/core.hpp"
#include "sip/schedules.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace sip {

/// Everything one benchmark execution needs. Defaults are overridden first by
/// a config file, then by command-line flags.
struct RunConfig {
  // problem
  std::string problem = "toy1";
  std::uint64_t seed = 12345;
  double noise_std_f = 0.0;
  double noise_std_g = 0.0;
  double noise_std_gprime = 0.0;

  // method + schedule
  std::string method = "agsip";  // agsip | sgsip | exchange | sipcom
  std::string regime = "auto";   // auto picks from the instance constants
  long k0 = -1;                  // -1: regime lower bound (practical: 100)
  long K = 1000;
  double tau = -1.0;
  double tau_prime = -1.0;
  double lambda_bound = 10.0;

  // execution
  long record_every = 10;
  int repetitions = 1;
  bool six_sample = false;
  bool timing = true;  // false zeroes the wall_seconds column (byte-reproducible output)
  std::string out = ".";
  std::string label;

  // baselines
  int exchange_init_samples = 100;
  double exchange_tol = 1e-3;
  int exchange_max_rounds = 50;
  long inner_iterations = 200'000;
  double inner_rho = 10.0;
  double inner_step = 0.5;
  double sipcom_c = 0.1;
  double sipcom_delta = 0.002;
  std::string sipcom_step_rule = "auto";   // constant | inv_k | inv_sqrt_k
  std::string sipcom_delta_rule = "auto";  // constant | inv_sqrt_k
};

namespace cfg {

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// Flat `key = value` file with optional [section] headers; a section prefixes
/// its keys as section.key. Lines starting with # or ; are comments.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line, section;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) throw config_error("config: expected 'key = value': " + t);
    std::string key = trim(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

inline KeyValues parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  return parse_key_values(in);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("config: boolean expected for " + key + ", got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
  std::istringstream is(v);
  T out;
  is >> out;
  if (is.fail() || !is.eof())
    throw config_error("config: numeric value expected for " + key + ", got '" + v + "'");
  return out;
}

}  // namespace cfg

/// Applies key/value pairs onto a RunConfig. Unknown keys are rejected.
inline void apply_key_values(RunConfig& rc, const cfg::KeyValues& kv) {
  for (const auto& [raw_key, value] : kv) {
    // section prefixes are cosmetic: problem.name and name both work
    std::string key = raw_key;
    for (const char* prefix : {"problem.", "schedule.", "method.", "run.", "exchange.",
                               "sipcom.", "inner."}) {
      if (key.rfind(prefix, 0) == 0) {
        key = key.substr(std::string(prefix).size());
        break;
      }
    }
    if (key == "name" || key == "problem") rc.problem = value;
    else if (key == "seed") rc.seed = cfg::parse_num<std::uint64_t>(value, key);
    else if (key == "noise_std_f") rc.noise_std_f = cfg::parse_num<double>(value, key);
    else if (key == "noise_std_g") rc.noise_std_g = cfg::parse_num<double>(value, key);
    else if (key == "noise_std_gprime") rc.noise_std_gprime = cfg::parse_num<double>(value, key);
    else if (key == "noise") {
      const double v = cfg::parse_num<double>(value, key);
      rc.noise_std_f = rc.noise_std_g = rc.noise_std_gprime = v;
    } else if (key == "method") rc.method = value;
    else if (key == "regime") rc.regime = value;
    else if (key == "k0") rc.k0 = cfg::parse_num<long>(value, key);
    else if (key == "K") rc.K = cfg::parse_num<long>(value, key);
    else if (key == "tau") rc.tau = cfg::parse_num<double>(value, key);
    else if (key == "tau_prime") rc.tau_prime = cfg::parse_num<double>(value, key);
    else if (key == "lambda_bound") rc.lambda_bound = cfg::parse_num<double>(value, key);
    else if (key == "record_every") rc.record_every = cfg::parse_num<long>(value, key);
    else if (key == "repetitions") rc.repetitions = cfg::parse_num<int>(value, key);
    else if (key == "six_sample") rc.six_sample = cfg::parse_bool(value, key);
    else if (key == "timing") {
      if (value == "wall") rc.timing = true;
      else if (value == "none") rc.timing = false;
      else throw config_error("config: timing must be 'wall' or 'none'");
    } else if (key == "out") rc.out = value;
    else if (key == "label") rc.label = value;
    else if (key == "init_samples") rc.exchange_init_samples = cfg::parse_num<int>(value, key);
    else if (key == "tol") rc.exchange_tol = cfg::parse_num<double>(value, key);
    else if (key == "max_rounds") rc.exchange_max_rounds = cfg::parse_num<int>(value, key);
    else if (key == "iterations") rc.inner_iterations = cfg::parse_num<long>(value, key);
    else if (key == "rho") rc.inner_rho = cfg::parse_num<double>(value, key);
    else if (key == "step") rc.inner_step = cfg::parse_num<double>(value, key);
    else if (key == "C" || key == "c") rc.sipcom_c = cfg::parse_num<double>(value, key);
    else if (key == "delta") rc.sipcom_delta = cfg::parse_num<double>(value, key);
    else if (key == "step_rule") rc.sipcom_step_rule = value;
    else if (key == "delta_rule") rc.sipcom_delta_rule = value;
    else throw config_error("config: unknown key '" + raw_key + "'");
  }
}

inline RunConfig load_config(const std::string& path) {
  RunConfig rc;
  apply_key_values(rc, cfg::parse_file(path));
  return rc;
}

}  // namespace sip
