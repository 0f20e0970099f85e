#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "obsched/sim.hpp"

namespace obsched {

// All numeric text is written with round-trip precision through one
// formatter so that identical runs produce byte-identical files.
inline std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

// Trace CSV: n, lambda, mu_1..mu_K, P_inst, R_1..R_K, sum_rate,
// t_active_mean. One row per slot.
inline void write_trace_csv(std::ostream& out, const TraceLog& log) {
  const int K = log.config.num_users;
  out << "n,lambda";
  for (int k = 1; k <= K; ++k) out << ",mu_" << k;
  out << ",P_inst";
  for (int k = 1; k <= K; ++k) out << ",R_" << k;
  out << ",sum_rate,t_active_mean\n";
  for (const TraceRow& row : log.rows) {
    out << row.n << ',' << format_double(row.lambda);
    for (double mu : row.mu) out << ',' << format_double(mu);
    out << ',' << format_double(row.total_power);
    for (double rate : row.user_rates) out << ',' << format_double(rate);
    out << ',' << format_double(row.sum_rate) << ','
        << format_double(row.t_active_mean) << '\n';
  }
}

inline nlohmann::json config_to_json(const SimConfig& config) {
  nlohmann::json j;
  j["K"] = config.num_users;
  j["t"] = config.num_antennas;
  j["M"] = config.num_subcarriers;
  j["subcarrier_spacing_hz"] = config.subcarrier_spacing_hz;
  j["slot_duration_s"] = config.slot_duration_s;
  j["power_budget_w"] = config.power_budget_w;
  j["snr_db"] = config.snr_db;
  j["noise_var"] = config.noise_var();
  j["phi"] = config.resolved_phi();
  j["scheme"] = to_string(config.scheme);
  j["t_bar"] = config.t_bar;
  j["V"] = config.resolved_v();
  j["step_mode"] =
      config.schedule.mode == StepMode::diminishing ? "diminishing" : "constant";
  j["beta0"] = config.schedule.beta0;
  j["alpha0"] = config.schedule.alpha0;
  j["beta_exponent"] = config.schedule.beta_exponent;
  j["alpha_exponent"] = config.schedule.alpha_exponent;
  j["rho_lambda_scale"] = config.resolved_rho_lambda_scale();
  j["rho_mu_scale"] = config.resolved_rho_mu_scale();
  j["epsilon"] = config.epsilon;
  j["lambda0"] = config.resolved_lambda0();
  j["subgradient_clip"] = config.subgradient_clip_budgets;
  j["seed"] = config.seed;
  j["n_slots"] = config.n_slots;
  j["beam_mode"] =
      config.beam_mode == BeamMode::random_orthonormal ? "random" : "ula";
  j["frame_len"] = config.frame_len;
  j["doppler_hz"] = config.profile.doppler_hz;
  nlohmann::json delays = nlohmann::json::array();
  nlohmann::json gains = nlohmann::json::array();
  for (const Tap& tap : config.profile.taps) {
    delays.push_back(tap.delay_s);
    gains.push_back(tap.power_gain);
  }
  j["tap_delays_s"] = delays;
  j["tap_gains"] = gains;
  j["oscillators_per_tap"] = config.oscillators_per_tap;
  j["exhaustive_power_mode"] =
      config.exhaustive_power == PowerMode::uniform ? "uniform-v" : "optimal";
  j["power_tol"] = config.power_tol;
  j["power_max_iterations"] = config.power_max_iterations;
  j["channel_trace"] = config.channel_trace;
  return j;
}

inline nlohmann::json summary_to_json(const RunSummary& summary) {
  nlohmann::json j;
  j["slots"] = summary.slots;
  j["mean_user_rates"] = summary.mean_user_rates;
  j["mean_total_power"] = summary.mean_total_power;
  j["mean_sum_rate"] = summary.mean_sum_rate;
  j["rate_fractions"] = summary.rate_fractions;
  j["last_half_mean_power"] = summary.last_half_mean_power;
  j["last_half_mean_sum_rate"] = summary.last_half_mean_sum_rate;
  j["mean_t_active"] = summary.mean_t_active;
  j["t_active_histogram"] = summary.t_active_histogram;
  j["lambda_final"] = summary.lambda_final;
  j["mu_final"] = summary.mu_final;
  j["mu_resets"] = summary.mu_resets;
  j["feedback_per_user_per_slot"] = summary.feedback_per_user_per_slot;
  j["jain_mean_rates"] = summary.jain_mean_rates;
  j["modified_jain_vs_targets"] = summary.modified_jain_vs_targets;
  nlohmann::json ledger;
  ledger["slots"] = summary.ledger.slots;
  ledger["pooling_ops"] = summary.ledger.pooling_ops;
  ledger["feedback_params"] = summary.ledger.feedback_params;
  ledger["allocation_rate_evals"] = summary.ledger.allocation_rate_evals;
  ledger["allocation_snir_evals"] = summary.ledger.allocation_snir_evals;
  ledger["power_ops"] = summary.ledger.power_ops;
  ledger["update_ops"] = summary.ledger.update_ops;
  j["ledger"] = ledger;
  return j;
}

// Summary JSON: the resolved configuration echo plus ergodic means and the
// cost ledger of the run.
inline void write_summary_json(std::ostream& out, const TraceLog& log) {
  nlohmann::json j;
  j["config"] = config_to_json(log.config);
  j["summary"] = summary_to_json(log.summary);
  out << j.dump(2) << '\n';
}

// Channel trace CSV: slot, k, m, antenna, re, im (indices 1-based except the
// slot counter, matching the user numbering in allocations).
inline void write_channel_header(std::ostream& out) {
  out << "slot,k,m,antenna,re,im\n";
}

inline void write_channel_rows(std::ostream& out,
                               const ChannelRealization& channel) {
  for (int k = 0; k < channel.num_users; ++k)
    for (int m = 0; m < channel.num_subcarriers; ++m)
      for (int a = 0; a < channel.num_antennas; ++a) {
        const cxd value = channel.at(k, m, a);
        out << channel.slot_index << ',' << (k + 1) << ',' << (m + 1) << ','
            << (a + 1) << ',' << format_double(value.real()) << ','
            << format_double(value.imag()) << '\n';
      }
}

inline void write_sweep_csv(std::ostream& out, SweepAxis axis,
                            const std::vector<SweepPoint>& points) {
  out << "axis,value,mean_sum_rate,mean_total_power,mean_t_active,"
         "allocation_rate_evals_per_slot,allocation_snir_evals_per_slot,"
         "feedback_per_user_per_slot\n";
  for (const SweepPoint& point : points) {
    const CostLedger& ledger = point.summary.ledger;
    const double slots = std::max(1L, ledger.slots);
    out << to_string(axis) << ',' << format_double(point.value) << ','
        << format_double(point.summary.mean_sum_rate) << ','
        << format_double(point.summary.mean_total_power) << ','
        << format_double(point.summary.mean_t_active) << ','
        << format_double(ledger.allocation_rate_evals / slots) << ','
        << format_double(ledger.allocation_snir_evals / slots) << ','
        << point.summary.feedback_per_user_per_slot << '\n';
  }
}

inline nlohmann::json sweep_to_json(SweepAxis axis,
                                    const std::vector<SweepPoint>& points) {
  nlohmann::json j;
  j["axis"] = to_string(axis);
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepPoint& point : points) {
    nlohmann::json row;
    row["value"] = point.value;
    row["summary"] = summary_to_json(point.summary);
    rows.push_back(std::move(row));
  }
  j["points"] = rows;
  return j;
}

inline void write_rate_region_csv(
    std::ostream& out, const std::vector<std::array<double, 2>>& phi_pairs,
    const std::vector<std::array<double, 2>>& region) {
  out << "phi_1,phi_2,R_1,R_2\n";
  for (std::size_t i = 0; i < region.size(); ++i) {
    out << format_double(phi_pairs[i][0]) << ',' << format_double(phi_pairs[i][1])
        << ',' << format_double(region[i][0]) << ','
        << format_double(region[i][1]) << '\n';
  }
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace obsched
