#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "obsched/allocation.hpp"
#include "obsched/beams.hpp"
#include "obsched/dual.hpp"
#include "obsched/fading.hpp"
#include "obsched/fairness.hpp"
#include "obsched/gains.hpp"
#include "obsched/rng.hpp"
#include "obsched/scheduling.hpp"

namespace obsched {

struct VerifyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Fast structural self-checks over freshly drawn random instances: beam
// orthonormality, gain normalization, allocation invariants, oracle
// dominance, water-filling stationarity, the per-beam power bound, and the
// fairness identities. Used by the command-line verify entry point.
inline std::vector<VerifyResult> run_verification(std::uint64_t seed = 1) {
  std::vector<VerifyResult> results;
  Rng rng(derive_seed(seed, 77));

  const auto push = [&results](const std::string& name, bool pass,
                               const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  // Beam bases stay orthonormal in both modes.
  {
    double worst = 0.0;
    for (int t : {1, 2, 4, 8}) {
      worst = std::max(worst, orthonormality_error(generate_beam_set(
                                  t, 3, BeamMode::random_orthonormal,
                                  rng.next())));
      worst = std::max(worst, orthonormality_error(generate_beam_set(
                                  t, 1, BeamMode::ula_halfwave, 0)));
    }
    std::ostringstream detail;
    detail << "max Gram deviation " << worst;
    push("beam-orthonormality", worst < 1e-10, detail.str());
  }

  // Summing a user's gains over a full orthonormal basis reproduces its
  // channel norm (the basis is square, so projections preserve energy).
  {
    const int K = 3, t = 4, M = 5;
    ChannelRealization channel;
    channel.num_users = K;
    channel.num_subcarriers = M;
    channel.num_antennas = t;
    channel.h.resize(static_cast<std::size_t>(K) * M * t);
    for (auto& value : channel.h) value = rng.complex_gaussian();
    const BeamSet beams =
        generate_beam_set(t, M, BeamMode::random_orthonormal, rng.next());
    const double noise_var = 0.37;
    const GainTable gains = equivalent_gains(channel, beams, noise_var);
    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
      for (int m = 0; m < M; ++m) {
        double total = 0.0;
        for (int q = 0; q < t; ++q) total += gains.at(k, m, q);
        double norm = 0.0;
        for (int a = 0; a < t; ++a) norm += std::norm(channel.at(k, m, a));
        worst = std::max(worst, std::abs(total * noise_var - norm));
      }
    }
    std::ostringstream detail;
    detail << "max energy mismatch " << worst;
    push("gain-normalization", worst < 1e-9, detail.str());
  }

  // Random instances: dominance of the reference search, the user-pairing
  // invariant, and the per-beam power cap of water-filling.
  {
    bool dominance = true;
    bool pairing = true;
    bool capped = true;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int K = 1 + static_cast<int>(rng.uniform() * 4);
      const int t = 1 + static_cast<int>(rng.uniform() * 3);
      std::vector<double> c(static_cast<std::size_t>(K) * t);
      for (auto& value : c) value = -std::log(rng.uniform()) * 50.0;
      const GainView view{c.data(), K, t, static_cast<std::size_t>(t)};
      std::vector<double> mu(K);
      for (auto& w : mu) w = rng.uniform(0.2, 2.0);
      const double V = rng.uniform(0.05, 0.5);
      const double lambda = rng.uniform(0.2, 2.0);

      const BeamAllocation greedy = allocate_alg1(view, mu, V);
      PowerRow greedy_powers(t, 0.0);
      for (int q = 0; q < t; ++q)
        greedy_powers[q] = greedy.users[q] != 0 ? V : 0.0;
      const double greedy_metric =
          weighted_metric(greedy.users, greedy_powers, mu, lambda, view);
      const ExhaustiveAllocation reference = allocate_exhaustive(
          view, mu, lambda, V, PowerMode::uniform);
      if (greedy_metric > reference.metric + 1e-9) dominance = false;
      worst_gap = std::max(worst_gap, greedy_metric - reference.metric);
      try {
        check_user_row(greedy.users, K, t);
        check_user_row(reference.users, K, t);
      } catch (const std::invalid_argument&) {
        pairing = false;
      }

      const PowerRow filled = waterfill(greedy.users, mu, lambda, V, view);
      double max_mu = 0.0;
      for (double w : mu) max_mu = std::max(max_mu, w);
      const double bound = max_mu / (lambda * k_ln2) + 1e-12;
      for (double p : filled)
        if (p > bound) capped = false;
    }
    std::ostringstream detail;
    detail << "largest greedy-minus-reference gap " << worst_gap;
    push("oracle-dominance", dominance, detail.str());
    push("user-pairing", pairing, "duplicate-free rows on all instances");
    push("power-cap", capped, "per-beam power within mu_max/(lambda ln2)");
  }

  // An isolated active beam has no cross-beam coupling, so its converged
  // power must be a stationary point of the metric: central finite
  // differences vanish at interior powers.
  {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int K = 2, t = 2;
      std::vector<double> c(static_cast<std::size_t>(K) * t);
      for (auto& value : c) value = -std::log(rng.uniform()) * 30.0;
      const GainView view{c.data(), K, t, static_cast<std::size_t>(t)};
      const std::vector<double> mu{1.0, 1.0};
      const double lambda = 0.8;
      const UserRow u{1, 0};
      const PowerResult result = optimal_power(u, mu, lambda, view, 1e-12, 500);
      if (!result.converged || result.p[0] <= 1e-7) continue;
      const double h =
          std::min(1e-6 * std::max(1.0, result.p[0]), 0.5 * result.p[0]);
      PowerRow up = result.p, down = result.p;
      up[0] += h;
      down[0] -= h;
      const double slope = (weighted_metric(u, up, mu, lambda, view) -
                            weighted_metric(u, down, mu, lambda, view)) /
                           (2.0 * h);
      worst = std::max(worst, std::abs(slope));
    }
    std::ostringstream detail;
    detail << "max |d metric / d p| " << worst;
    push("power-stationarity", worst < 1e-9, detail.str());
  }

  // Fairness identities.
  {
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> constant{2.5, 2.5, 2.5};
    const std::vector<double> targets{0.25, 0.5, 0.25};
    const std::vector<double> matched{1.0, 2.0, 1.0};
    const bool pass =
        std::abs(jain_index(constant) - 1.0) < 1e-12 &&
        std::abs(jain_index(x) - 6.0 / 7.0) < 1e-12 &&
        std::abs(modified_jain(matched, targets) - 1.0) < 1e-12;
    push("fairness-identities", pass, "constant, 1..3, and matched-target cases");
  }

  // Dual updates stay on the feasibility plane mu . phi = 1.
  {
    RateTargets targets{{0.3, 0.25, 0.2, 0.15, 0.1}};
    DualState state = make_dual_state(targets, 5.0);
    bool on_plane = true;
    for (int n = 0; n < 200; ++n) {
      SlotMetrics metrics;
      metrics.total_power = rng.uniform(0.0, 2.0);
      metrics.user_rates.resize(5);
      for (auto& r : metrics.user_rates) r = rng.uniform(0.0, 10.0);
      filter_subgradients(state, metrics, targets, 1.0, 0.3);
      update_dual(state, targets, 0.05, 0.02, 1e-6);
      try {
        state.validate(targets);
      } catch (const std::invalid_argument&) {
        on_plane = false;
      }
    }
    push("dual-feasibility", on_plane, "plane constraint after 200 updates");
  }

  return results;
}

}  // namespace obsched
