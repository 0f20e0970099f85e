#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "obsched/beams.hpp"
#include "obsched/dual.hpp"
#include "obsched/multipath.hpp"
#include "obsched/scheduling.hpp"

namespace obsched {

// Transmission schemes.
//   alg1_waterfill    greedy disposition scan, water-filled powers, both dual
//                     variables adapt (the full balancing loop)
//   alg1_uniform      greedy disposition scan, uniform power V on the active
//                     beams, only the rate weights adapt
//   fixed_tbar        every subcarrier runs exactly t_bar beams chosen by the
//                     fed-back per-user selections
//   classic_ob        fixed_tbar with all t beams active (classic
//                     opportunistic beamforming)
//   exhaustive_oracle reference search over every user row
enum class Scheme {
  alg1_waterfill,
  alg1_uniform,
  fixed_tbar,
  classic_ob,
  exhaustive_oracle,
};

inline const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::alg1_waterfill: return "alg1-waterfill";
    case Scheme::alg1_uniform: return "alg1-uniform";
    case Scheme::fixed_tbar: return "fixed-tbar";
    case Scheme::classic_ob: return "classic-ob";
    case Scheme::exhaustive_oracle: return "exhaustive-oracle";
  }
  return "?";
}

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Full description of one simulation run. Field defaults reproduce the
// reference scenario except for phi, which defaults to uniform shares.
struct SimConfig {
  int num_users = 5;        // K
  int num_antennas = 4;     // t, also the number of beams
  int num_subcarriers = 72; // M
  double subcarrier_spacing_hz = 15e3;
  double slot_duration_s = 1e-3;
  double power_budget_w = 1.0;
  double snr_db = 20.0;
  std::vector<double> phi;  // empty = uniform 1/K
  Scheme scheme = Scheme::alg1_waterfill;
  int t_bar = 2;
  std::optional<double> uniform_power;  // V; empty = budget spread evenly
  StepSchedule schedule;
  std::optional<double> rho_lambda_scale;  // empty = auto
  std::optional<double> rho_mu_scale;      // empty = auto
  double epsilon = 1e-6;
  std::optional<double> lambda0;  // empty = auto
  double subgradient_clip_budgets = 10.0;  // clip for g_lambda, in budgets
  std::uint64_t seed = 1;
  long n_slots = 20000;
  BeamMode beam_mode = BeamMode::random_orthonormal;
  int frame_len = 1;  // slots between fresh random beam draws
  MultipathProfile profile = MultipathProfile::pedestrian(6.0);
  int oscillators_per_tap = 32;
  PowerMode exhaustive_power = PowerMode::optimal;
  double power_tol = 1e-6;
  int power_max_iterations = 100;
  bool channel_trace = false;
  bool phi_explicit = false;  // set when phi came from config text

  void validate() const {
    if (num_users < 1) throw ConfigError("K must be at least 1");
    if (num_antennas < 1) throw ConfigError("t must be at least 1");
    if (num_antennas > 16) throw ConfigError("t above 16 is not supported");
    if (num_subcarriers < 1) throw ConfigError("M must be at least 1");
    if (!(subcarrier_spacing_hz > 0.0))
      throw ConfigError("subcarrier_spacing_hz must be positive");
    if (!(slot_duration_s > 0.0))
      throw ConfigError("slot_duration_s must be positive");
    if (!(power_budget_w > 0.0))
      throw ConfigError("power_budget_w must be positive");
    if (!phi.empty()) {
      if (static_cast<int>(phi.size()) != num_users)
        throw ConfigError("phi length must equal K");
      RateTargets targets{phi};
      try {
        targets.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (scheme == Scheme::fixed_tbar && (t_bar < 1 || t_bar > num_antennas))
      throw ConfigError("t_bar must lie in [1, t]");
    if (scheme == Scheme::exhaustive_oracle) {
      double candidates = 1.0;
      for (int q = 0; q < num_antennas; ++q) candidates *= num_users + 1;
      if (candidates > 1e6)
        throw ConfigError("exhaustive scheme refused: over 1e6 candidates");
    }
    if (uniform_power && !(*uniform_power > 0.0))
      throw ConfigError("V must be positive");
    if (rho_lambda_scale && !(*rho_lambda_scale > 0.0))
      throw ConfigError("rho_lambda_scale must be positive");
    if (rho_mu_scale && !(*rho_mu_scale > 0.0))
      throw ConfigError("rho_mu_scale must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (lambda0 && !(*lambda0 > 0.0))
      throw ConfigError("lambda0 must be positive");
    if (!(subgradient_clip_budgets > 0.0))
      throw ConfigError("subgradient_clip must be positive");
    if (n_slots < 0) throw ConfigError("n_slots must be non-negative");
    if (frame_len < 1) throw ConfigError("frame_len must be at least 1");
    if (oscillators_per_tap < 1)
      throw ConfigError("oscillators_per_tap must be at least 1");
    if (!(power_tol > 0.0)) throw ConfigError("power_tol must be positive");
    if (power_max_iterations < 1)
      throw ConfigError("power_max_iterations must be at least 1");
    try {
      schedule.validate();
      profile.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  // Noise variance per subcarrier from the average-SNR definition
  // SNR = budget / (M * noise_var).
  double noise_var() const {
    return power_budget_w /
           (num_subcarriers * std::pow(10.0, snr_db / 10.0));
  }

  // Beam count the uniform level V is referenced to. Schemes that transmit
  // exactly V per active beam spread the budget over their active count
  // (t_bar, or all t for the all-beam and uniform-power schemes). The
  // adaptive water-filled schemes concentrate a subcarrier's budget share on
  // the few beams worth running, so their interference estimate references
  // the single-beam share; spreading it over all t understates interference
  // and overcommits multi-beam dispositions.
  int nominal_active_beams() const {
    switch (scheme) {
      case Scheme::fixed_tbar: return t_bar;
      case Scheme::alg1_waterfill:
      case Scheme::exhaustive_oracle: return 1;
      default: return num_antennas;  // classic_ob, alg1_uniform
    }
  }

  // Uniform power level V. Auto spreads the budget over the nominal active
  // beams of all subcarriers, so fixed-beam schemes spend the whole budget.
  double resolved_v() const {
    if (uniform_power) return *uniform_power;
    return power_budget_w / (static_cast<double>(num_subcarriers) *
                             nominal_active_beams());
  }

  bool lambda_adaptive() const {
    return scheme == Scheme::alg1_waterfill ||
           scheme == Scheme::exhaustive_oracle;
  }

  // Price scale of the scenario: a subcarrier's budget share P/M all spent
  // on one beam sits at water-filling level mu/(lambda ln2) ~ P/M + noise,
  // so the equilibrium price is near 1 / (ln2 * (P/M + noise_var)). Used to
  // seed lambda and to scale its step.
  double lambda_scale() const {
    return 1.0 / (k_ln2 * (power_budget_w / num_subcarriers + noise_var()));
  }

  double resolved_lambda0() const {
    if (lambda0) return *lambda0;
    return lambda_adaptive() ? lambda_scale() : epsilon;
  }

  // Dual step scales. The price moves in units of its natural scale; the
  // weight step is normalized by the rate magnitude, which grows with the
  // subcarrier count.
  double resolved_rho_lambda_scale() const {
    if (rho_lambda_scale) return *rho_lambda_scale;
    return 2.5 * lambda_scale();
  }

  double resolved_rho_mu_scale() const {
    if (rho_mu_scale) return *rho_mu_scale;
    return 2.0 / num_subcarriers;
  }

  std::vector<double> resolved_phi() const {
    if (!phi.empty()) return phi;
    return std::vector<double>(num_users, 1.0 / num_users);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

inline long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long parsed = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value +
                      "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key,
                               const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" +
                      value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + value + "'");
}

inline std::vector<double> parse_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("key '" + key + "': empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace detail

// Applies one key=value setting. Every configuration key is listed here;
// unknown keys are rejected with the full key list in the message.
inline void apply_setting(SimConfig& config, const std::string& key,
                          const std::string& raw_value) {
  using namespace detail;
  const std::string value = trim(raw_value);
  if (value.empty()) throw ConfigError("key '" + key + "' has an empty value");

  if (key == "K") config.num_users = static_cast<int>(parse_long(key, value));
  else if (key == "t") config.num_antennas = static_cast<int>(parse_long(key, value));
  else if (key == "M") config.num_subcarriers = static_cast<int>(parse_long(key, value));
  else if (key == "subcarrier_spacing_hz") config.subcarrier_spacing_hz = parse_double(key, value);
  else if (key == "slot_duration_s") config.slot_duration_s = parse_double(key, value);
  else if (key == "power_budget_w") config.power_budget_w = parse_double(key, value);
  else if (key == "snr_db") config.snr_db = parse_double(key, value);
  else if (key == "phi") {
    if (value == "uniform") {
      config.phi.clear();
      config.phi_explicit = false;
    } else {
      config.phi = parse_list(key, value);
      config.phi_explicit = true;
    }
  } else if (key == "scheme") {
    if (value == "alg1-waterfill") config.scheme = Scheme::alg1_waterfill;
    else if (value == "alg1-uniform") config.scheme = Scheme::alg1_uniform;
    else if (value == "fixed-tbar") config.scheme = Scheme::fixed_tbar;
    else if (value == "classic-ob") config.scheme = Scheme::classic_ob;
    else if (value == "exhaustive-oracle") config.scheme = Scheme::exhaustive_oracle;
    else throw ConfigError("unknown scheme '" + value + "'");
  } else if (key == "t_bar") config.t_bar = static_cast<int>(parse_long(key, value));
  else if (key == "V") {
    if (value == "auto") config.uniform_power.reset();
    else config.uniform_power = parse_double(key, value);
  } else if (key == "step_mode") {
    if (value == "diminishing") config.schedule.mode = StepMode::diminishing;
    else if (value == "constant") config.schedule.mode = StepMode::constant;
    else throw ConfigError("unknown step_mode '" + value + "'");
  } else if (key == "beta0") config.schedule.beta0 = parse_double(key, value);
  else if (key == "alpha0") config.schedule.alpha0 = parse_double(key, value);
  else if (key == "beta_exponent") config.schedule.beta_exponent = parse_double(key, value);
  else if (key == "alpha_exponent") config.schedule.alpha_exponent = parse_double(key, value);
  else if (key == "rho_lambda_scale") {
    if (value == "auto") config.rho_lambda_scale.reset();
    else config.rho_lambda_scale = parse_double(key, value);
  } else if (key == "rho_mu_scale") {
    if (value == "auto") config.rho_mu_scale.reset();
    else config.rho_mu_scale = parse_double(key, value);
  } else if (key == "epsilon") config.epsilon = parse_double(key, value);
  else if (key == "lambda0") {
    if (value == "auto") config.lambda0.reset();
    else config.lambda0 = parse_double(key, value);
  } else if (key == "subgradient_clip") config.subgradient_clip_budgets = parse_double(key, value);
  else if (key == "seed") config.seed = parse_u64(key, value);
  else if (key == "n_slots") config.n_slots = parse_long(key, value);
  else if (key == "beam_mode") {
    if (value == "random") config.beam_mode = BeamMode::random_orthonormal;
    else if (value == "ula") config.beam_mode = BeamMode::ula_halfwave;
    else throw ConfigError("unknown beam_mode '" + value + "'");
  } else if (key == "frame_len") config.frame_len = static_cast<int>(parse_long(key, value));
  else if (key == "doppler_hz") config.profile.doppler_hz = parse_double(key, value);
  else if (key == "tap_delays_s") {
    const auto delays = parse_list(key, value);
    std::vector<Tap> taps(delays.size());
    for (std::size_t l = 0; l < delays.size(); ++l) {
      taps[l].delay_s = delays[l];
      taps[l].power_gain = l < config.profile.taps.size()
                               ? config.profile.taps[l].power_gain
                               : 0.0;
    }
    config.profile.taps = std::move(taps);
  } else if (key == "tap_gains") {
    const auto gains = parse_list(key, value);
    if (gains.size() != config.profile.taps.size())
      throw ConfigError("tap_gains length must match tap_delays_s");
    for (std::size_t l = 0; l < gains.size(); ++l)
      config.profile.taps[l].power_gain = gains[l];
  } else if (key == "oscillators_per_tap") config.oscillators_per_tap = static_cast<int>(parse_long(key, value));
  else if (key == "exhaustive_power_mode") {
    if (value == "uniform-v") config.exhaustive_power = PowerMode::uniform;
    else if (value == "optimal") config.exhaustive_power = PowerMode::optimal;
    else throw ConfigError("unknown exhaustive_power_mode '" + value + "'");
  } else if (key == "power_tol") config.power_tol = parse_double(key, value);
  else if (key == "power_max_iterations") config.power_max_iterations = static_cast<int>(parse_long(key, value));
  else if (key == "channel_trace") config.channel_trace = parse_bool(key, value);
  else {
    throw ConfigError(
        "unknown key '" + key +
        "'; valid keys: K, t, M, subcarrier_spacing_hz, slot_duration_s, "
        "power_budget_w, snr_db, phi, scheme, t_bar, V, step_mode, beta0, "
        "alpha0, beta_exponent, alpha_exponent, rho_lambda_scale, "
        "rho_mu_scale, epsilon, lambda0, subgradient_clip, seed, n_slots, "
        "beam_mode, frame_len, doppler_hz, tap_delays_s, tap_gains, "
        "oscillators_per_tap, exhaustive_power_mode, power_tol, "
        "power_max_iterations, channel_trace");
  }
}

// key=value override as given on a command line.
inline void apply_override(SimConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  apply_setting(config, detail::trim(assignment.substr(0, eq)),
                assignment.substr(eq + 1));
}

// Plain text config: one key = value per line, # comments, optional
// [section] headers that group lines but carry no meaning of their own.
// Keys are globally unique; redefining one is an error.
inline SimConfig parse_config_text(std::istream& stream,
                                   const std::string& source_name) {
  static const std::array<const char*, 5> known_sections = {
      "system", "channel", "dual", "run", "output"};
  SimConfig config;
  std::vector<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": malformed section header");
      const std::string section = detail::trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const char* name : known_sections) known |= section == name;
      if (!known)
        throw ConfigError(where + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (const std::string& previous : seen)
      if (previous == key)
        throw ConfigError(where + ": key '" + key + "' set twice");
    seen.push_back(key);
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return config;
}

inline SimConfig parse_config_file(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config_text(stream, path);
}

}  // namespace obsched
