#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obsched/accounting.hpp"
#include "obsched/allocation.hpp"
#include "obsched/beams.hpp"
#include "obsched/config.hpp"
#include "obsched/dual.hpp"
#include "obsched/fading.hpp"
#include "obsched/fairness.hpp"
#include "obsched/gains.hpp"
#include "obsched/scheduling.hpp"

namespace obsched {

// One trace line per slot, holding the dual variables the slot was scheduled
// with and the outcomes it produced.
struct TraceRow {
  long n = 0;
  double lambda = 0.0;
  std::vector<double> mu;
  double total_power = 0.0;
  std::vector<double> user_rates;
  double sum_rate = 0.0;
  double t_active_mean = 0.0;
};

struct RunSummary {
  long slots = 0;
  std::vector<double> mean_user_rates;
  double mean_total_power = 0.0;
  double mean_sum_rate = 0.0;
  std::vector<double> rate_fractions;
  double last_half_mean_power = 0.0;
  double last_half_mean_sum_rate = 0.0;
  double mean_t_active = 0.0;
  std::vector<long> t_active_histogram;  // index = active beams, per (slot, m)
  double lambda_final = 0.0;
  std::vector<double> mu_final;
  long mu_resets = 0;
  CostLedger ledger;
  long feedback_per_user_per_slot = 0;
  double jain_mean_rates = 0.0;
  double modified_jain_vs_targets = 0.0;
};

struct TraceLog {
  SimConfig config;
  std::vector<TraceRow> rows;
  RunSummary summary;
};

// Optional per-slot channel observer (used for channel trace dumps).
using ChannelSink = std::function<void(const ChannelRealization&)>;

// Optional per-slot allocation observer. Fires once per slot after every
// subcarrier is assigned but before the dual update, so `dual` holds exactly
// the variables the slot was scheduled with. The references are only valid
// during the call.
struct SlotView {
  long n = 0;
  const Allocation& alloc;
  const GainTable& gains;
  const DualState& dual;
};
using SlotSink = std::function<void(const SlotView&)>;

inline FeedbackScheme feedback_class(const SimConfig& config) {
  switch (config.scheme) {
    case Scheme::alg1_waterfill:
    case Scheme::alg1_uniform:
    case Scheme::exhaustive_oracle:
      return FeedbackScheme::adaptive;
    case Scheme::fixed_tbar:
      return config.t_bar == config.num_antennas ? FeedbackScheme::classic
                                                 : FeedbackScheme::fixed_subset;
    case Scheme::classic_ob:
      return FeedbackScheme::classic;
  }
  throw std::invalid_argument("unknown scheme");
}

// Runs one simulation. Per slot: advance the fader, refresh beams when the
// frame rolls over, pool the equivalent gains, allocate every subcarrier
// under the scheme, measure power and rates, filter the subgradients, and
// step the dual variables. The trace records the dual variables each slot
// was scheduled with. Identical configs give identical traces.
inline TraceLog run(const SimConfig& config, const ChannelSink& channel_sink = {},
                    const SlotSink& slot_sink = {}) {
  config.validate();

  const int K = config.num_users;
  const int t = config.num_antennas;
  const int M = config.num_subcarriers;
  const double noise_var = config.noise_var();
  const double V = config.resolved_v();
  const double budget = config.power_budget_w;
  const int t_bar =
      config.scheme == Scheme::classic_ob ? t : config.t_bar;
  const RateTargets targets{config.resolved_phi()};
  targets.validate();

  ChannelFader fader(config.profile, K, t, M, config.subcarrier_spacing_hz,
                     derive_seed(config.seed, 1), config.oscillators_per_tap);
  Rng beam_rng(derive_seed(config.seed, 2));
  BeamSet beams;
  if (config.beam_mode == BeamMode::ula_halfwave)
    beams = generate_beam_set(t, M, BeamMode::ula_halfwave, 0);

  DualState dual = make_dual_state(targets, config.resolved_lambda0());
  const double rho_lambda_scale =
      config.lambda_adaptive() ? config.resolved_rho_lambda_scale() : 0.0;
  const double rho_mu_scale = config.resolved_rho_mu_scale();
  const double clip = config.subgradient_clip_budgets * budget;
  const FeedbackScheme fb_class = feedback_class(config);
  const long fb_per_user = feedback_count(fb_class, M, t);

  TraceLog log;
  log.config = config;
  log.rows.reserve(static_cast<std::size_t>(config.n_slots));
  RunningStats stats(K, std::max(1L, config.n_slots / 2));
  CostLedger ledger;
  std::vector<long> histogram(static_cast<std::size_t>(t) + 1, 0);
  double active_total = 0.0;

  Allocation alloc(M, t);
  std::vector<UserSelection> picks(K);
  UserRow uniform_users;
  PowerRow uniform_powers(t, 0.0);

  for (long n = 0; n < config.n_slots; ++n) {
    const ChannelRealization channel = fader.step(config.slot_duration_s);
    if (channel_sink) channel_sink(channel);
    if (config.beam_mode == BeamMode::random_orthonormal &&
        n % config.frame_len == 0)
      beams = generate_beam_set(t, M, BeamMode::random_orthonormal,
                                beam_rng.next());
    const GainTable gains = equivalent_gains(channel, beams, noise_var);
    ledger.pooling_ops += static_cast<long>(K) * M * t;
    ledger.feedback_params += static_cast<long>(K) * fb_per_user;

    int active_count = 0;
    for (int m = 0; m < M; ++m) {
      const GainView view = gains.slice(m);
      switch (config.scheme) {
        case Scheme::alg1_waterfill: {
          const BeamAllocation chosen = allocate_alg1(view, dual.mu, V);
          ledger.allocation_rate_evals += chosen.rate_evaluations;
          const PowerResult power = optimal_power(
              chosen.users, dual.mu, dual.lambda, view, config.power_tol, 100, V);
          ledger.power_ops += static_cast<long>(power.iterations + 1) * t;
          alloc.set_row(m, chosen.users, power.p);
          break;
        }
        case Scheme::alg1_uniform: {
          const BeamAllocation chosen = allocate_alg1(view, dual.mu, V);
          ledger.allocation_rate_evals += chosen.rate_evaluations;
          uniform_users = chosen.users;
          for (int q = 0; q < t; ++q)
            uniform_powers[q] = uniform_users[q] != 0 ? V : 0.0;
          alloc.set_row(m, uniform_users, uniform_powers);
          break;
        }
        case Scheme::fixed_tbar:
        case Scheme::classic_ob: {
          for (int k = 0; k < K; ++k)
            picks[k] = user_select({gains.user_row(k, m),
                                    static_cast<std::size_t>(t)},
                                   t_bar, V, &ledger.allocation_snir_evals);
          const BeamAllocation chosen = allocate_alg2(picks, dual.mu, t, t_bar);
          ledger.allocation_rate_evals += chosen.rate_evaluations;
          uniform_users = chosen.users;
          for (int q = 0; q < t; ++q)
            uniform_powers[q] = uniform_users[q] != 0 ? V : 0.0;
          alloc.set_row(m, uniform_users, uniform_powers);
          break;
        }
        case Scheme::exhaustive_oracle: {
          const ExhaustiveAllocation chosen = allocate_exhaustive(
              view, dual.mu, dual.lambda, V, config.exhaustive_power,
              config.power_tol);
          ledger.allocation_rate_evals += chosen.rate_evaluations;
          ledger.power_ops += static_cast<long>(t);
          alloc.set_row(m, chosen.users, chosen.powers);
          break;
        }
      }
      const int active = alloc.active_beams(m);
      ++histogram[active];
      active_count += active;
    }
    if (slot_sink) slot_sink(SlotView{n, alloc, gains, dual});

    const SlotMetrics metrics = instantaneous_metrics(alloc, gains);
    ledger.update_ops += static_cast<long>(M) * t + K;
    ++ledger.slots;

    TraceRow row;
    row.n = n;
    row.lambda = dual.lambda;
    row.mu = dual.mu;
    row.total_power = metrics.total_power;
    row.user_rates = metrics.user_rates;
    row.sum_rate = metrics.sum_rate();
    row.t_active_mean = static_cast<double>(active_count) / M;
    log.rows.push_back(std::move(row));
    stats.record(metrics);
    active_total += static_cast<double>(active_count) / M;

    const auto [beta, alpha] = config.schedule.at(n);
    filter_subgradients(dual, metrics, targets, budget, alpha);
    update_dual(dual, targets, rho_lambda_scale * beta, rho_mu_scale * beta,
                config.epsilon, clip);
  }

  RunSummary& summary = log.summary;
  summary.slots = config.n_slots;
  summary.lambda_final = dual.lambda;
  summary.mu_final = dual.mu;
  summary.mu_resets = dual.mu_resets;
  summary.ledger = ledger;
  summary.feedback_per_user_per_slot = fb_per_user;
  summary.t_active_histogram = histogram;
  if (config.n_slots > 0) {
    summary.mean_user_rates = stats.mean_user_rates();
    summary.mean_total_power = stats.mean_total_power();
    summary.mean_sum_rate = stats.mean_sum_rate();
    summary.rate_fractions = stats.rate_fractions();
    summary.last_half_mean_power = stats.window_mean_power();
    summary.last_half_mean_sum_rate = stats.window_mean_sum_rate();
    summary.mean_t_active = active_total / static_cast<double>(config.n_slots);
    summary.jain_mean_rates = jain_index(summary.mean_user_rates);
    summary.modified_jain_vs_targets =
        modified_jain(summary.rate_fractions, targets.phi);
  }
  return log;
}

enum class SweepAxis { users, antennas, active_beams, snr };

inline const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::users: return "K";
    case SweepAxis::antennas: return "t";
    case SweepAxis::active_beams: return "t_bar";
    case SweepAxis::snr: return "snr_db";
  }
  return "?";
}

struct SweepPoint {
  double value = 0.0;
  RunSummary summary;
};

// Applies one axis value to a copy of the base config. Explicit phi vectors
// cannot follow a user-count sweep, so those runs are refused; a defaulted
// phi stays uniform at each K.
inline SimConfig sweep_config(const SimConfig& base, SweepAxis axis,
                              double value) {
  SimConfig config = base;
  switch (axis) {
    case SweepAxis::users: {
      const int K = static_cast<int>(value);
      if (K != value) throw ConfigError("K axis values must be integers");
      if (base.phi_explicit && K != base.num_users)
        throw ConfigError("cannot sweep K with an explicit phi vector");
      config.num_users = K;
      if (!base.phi_explicit) config.phi.clear();
      break;
    }
    case SweepAxis::antennas: {
      const int t = static_cast<int>(value);
      if (t != value) throw ConfigError("t axis values must be integers");
      config.num_antennas = t;
      if (config.scheme == Scheme::fixed_tbar && config.t_bar > t)
        throw ConfigError("t axis value below t_bar");
      break;
    }
    case SweepAxis::active_beams: {
      const int t_bar = static_cast<int>(value);
      if (t_bar != value)
        throw ConfigError("t_bar axis values must be integers");
      config.t_bar = t_bar;
      config.scheme = Scheme::fixed_tbar;
      break;
    }
    case SweepAxis::snr:
      config.snr_db = value;
      break;
  }
  config.validate();
  return config;
}

// Runs the base scenario at every axis value. Points are independent runs
// (each re-seeded from the base config), so they execute concurrently.
inline std::vector<SweepPoint> sweep(const SimConfig& base, SweepAxis axis,
                                     const std::vector<double>& values,
                                     bool parallel = true) {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  std::vector<SimConfig> configs;
  configs.reserve(values.size());
  for (double value : values) configs.push_back(sweep_config(base, axis, value));

  std::vector<SweepPoint> points(values.size());
  if (parallel && values.size() > 1) {
    std::vector<std::future<RunSummary>> futures;
    futures.reserve(values.size());
    for (const SimConfig& config : configs)
      futures.push_back(std::async(std::launch::async, [&config] {
        return run(config).summary;
      }));
    for (std::size_t i = 0; i < values.size(); ++i)
      points[i] = {values[i], futures[i].get()};
  } else {
    for (std::size_t i = 0; i < values.size(); ++i)
      points[i] = {values[i], run(configs[i]).summary};
  }
  return points;
}

// Two-user rate region: one balanced run per target pair, reporting the
// mean per-user rates. Pairs must each sum to 1.
inline std::vector<std::array<double, 2>> rate_region(
    const SimConfig& base, const std::vector<std::array<double, 2>>& phi_pairs,
    bool parallel = true) {
  if (base.num_users != 2)
    throw ConfigError("rate region is defined for K = 2");
  if (phi_pairs.empty()) throw ConfigError("rate region needs target pairs");
  std::vector<SimConfig> configs;
  configs.reserve(phi_pairs.size());
  for (const auto& pair : phi_pairs) {
    SimConfig config = base;
    config.phi = {pair[0], pair[1]};
    config.phi_explicit = true;
    config.validate();
    configs.push_back(std::move(config));
  }

  std::vector<std::array<double, 2>> region(phi_pairs.size());
  const auto point = [](const SimConfig& config) -> std::array<double, 2> {
    const RunSummary summary = run(config).summary;
    return {summary.mean_user_rates[0], summary.mean_user_rates[1]};
  };
  if (parallel && configs.size() > 1) {
    std::vector<std::future<std::array<double, 2>>> futures;
    futures.reserve(configs.size());
    for (const SimConfig& config : configs)
      futures.push_back(std::async(std::launch::async,
                                   [&config, &point] { return point(config); }));
    for (std::size_t i = 0; i < configs.size(); ++i) region[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) region[i] = point(configs[i]);
  }
  return region;
}

}  // namespace obsched
