#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "obsched/allocation.hpp"
#include "obsched/gains.hpp"

namespace obsched {

// Long-run rate proportions: phi[k] > 0, sum(phi) = 1. The balancing loop
// drives user k's share of the total rate toward phi[k].
struct RateTargets {
  std::vector<double> phi;

  void validate() const {
    if (phi.empty()) throw std::invalid_argument("rate targets are empty");
    double total = 0.0;
    for (double f : phi) {
      if (!(f > 0.0))
        throw std::invalid_argument("rate fractions must be positive");
      total += f;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("rate fractions must sum to 1");
  }
};

enum class StepMode { diminishing, constant };

// Step sizes of the stochastic dual loop. In diminishing mode the update
// step is beta0/(1+n)^beta_exponent and the subgradient forgetting factor is
// alpha0/(1+n)^alpha_exponent. Convergence of the averaged updates needs
// beta summable-squared but not summable (0.5 < beta_exponent <= 1) and the
// filter to forget slower than the step decays (0.5 < alpha_exponent <
// beta_exponent). Constant mode keeps both fixed for tracking nonstationary
// scenarios and is exempt from the exponent conditions.
struct StepSchedule {
  StepMode mode = StepMode::diminishing;
  double beta0 = 0.1;
  double alpha0 = 0.5;
  // A step decaying near n^-1 parks the price off equilibrium for thousands
  // of slots under correlated fading; 0.7 keeps enough late-run step mass to
  // close that bias while the squared steps stay summable.
  double beta_exponent = 0.7;
  double alpha_exponent = 0.6;

  void validate() const {
    if (!(beta0 > 0.0) || !(alpha0 > 0.0))
      throw std::invalid_argument("step constants must be positive");
    if (!(alpha0 <= 1.0))
      throw std::invalid_argument("forgetting factor must not exceed 1");
    if (mode == StepMode::constant) return;
    if (!(beta_exponent > 0.5) || !(beta_exponent <= 1.0))
      throw std::invalid_argument("step exponent must lie in (0.5, 1]");
    if (!(alpha_exponent > 0.5))
      throw std::invalid_argument("filter exponent must exceed 0.5");
    if (!(beta_exponent > alpha_exponent))
      throw std::invalid_argument("step must decay faster than the filter");
  }

  // (step, forgetting factor) for slot n.
  std::pair<double, double> at(long n) const {
    if (n < 0) throw std::invalid_argument("slot index must be non-negative");
    if (mode == StepMode::constant) return {beta0, alpha0};
    return {beta0 / std::pow(1.0 + n, beta_exponent),
            alpha0 / std::pow(1.0 + n, alpha_exponent)};
  }
};

// Dual variables of the balancing problem: the power price lambda, the rate
// weights mu (kept on the feasibility plane mu . phi = 1), and the filtered
// subgradients that drive them. mu_resets counts degenerate projections.
struct DualState {
  double lambda = 1.0;
  std::vector<double> mu;
  double g_lambda = 0.0;
  std::vector<double> g_mu;
  long slot = 0;
  long mu_resets = 0;

  void validate(const RateTargets& targets) const {
    if (mu.size() != targets.phi.size() || g_mu.size() != targets.phi.size())
      throw std::invalid_argument("dual state size mismatch");
    if (!(lambda > 0.0))
      throw std::invalid_argument("power price must be positive");
    double plane = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (!(mu[k] >= 0.0))
        throw std::invalid_argument("rate weights must be non-negative");
      plane += mu[k] * targets.phi[k];
    }
    if (std::abs(plane - 1.0) > 1e-9)
      throw std::invalid_argument("rate weights violate mu . phi = 1");
  }
};

// Fresh state: equal weights (mu = 1 satisfies the plane constraint since
// the fractions sum to one) and zeroed subgradient filters.
inline DualState make_dual_state(const RateTargets& targets, double lambda0) {
  targets.validate();
  if (!(lambda0 > 0.0))
    throw std::invalid_argument("initial power price must be positive");
  DualState state;
  state.lambda = lambda0;
  state.mu.assign(targets.phi.size(), 1.0);
  state.g_mu.assign(targets.phi.size(), 0.0);
  return state;
}

// Instantaneous totals of one allocated slot: transmit power summed over all
// beams and the per-user rate sum over the subcarriers each user holds.
struct SlotMetrics {
  double total_power = 0.0;
  std::vector<double> user_rates;

  double sum_rate() const {
    double total = 0.0;
    for (double r : user_rates) total += r;
    return total;
  }
};

inline SlotMetrics instantaneous_metrics(const Allocation& alloc,
                                         const GainTable& gains) {
  if (alloc.num_subcarriers() != gains.num_subcarriers ||
      alloc.num_beams() != gains.num_beams)
    throw std::invalid_argument("allocation and gain table shapes disagree");
  SlotMetrics metrics;
  metrics.user_rates.assign(gains.num_users, 0.0);
  const int t = gains.num_beams;
  for (int m = 0; m < alloc.num_subcarriers(); ++m) {
    for (int q = 0; q < t; ++q) {
      const int user = alloc.user(m, q);
      const double p = alloc.power(m, q);
      metrics.total_power += p;
      if (user == 0) continue;
      const int k = user - 1;
      double denom = 1.0;
      for (int s = 0; s < t; ++s)
        if (s != q) denom += alloc.power(m, s) * gains.at(k, m, s);
      const double gamma = p * gains.at(k, m, q) / denom;
      metrics.user_rates[k] += std::log2(1.0 + gamma);
    }
  }
  return metrics;
}

// Exponentially filtered subgradients. The power subgradient is the budget
// surplus (budget - measured power); the rate subgradient of user k is its
// measured rate minus its target share of the slot's total rate. alpha is
// the forgetting factor of the current slot.
inline void filter_subgradients(DualState& state, const SlotMetrics& metrics,
                                const RateTargets& targets, double power_budget,
                                double alpha) {
  const std::size_t K = targets.phi.size();
  if (metrics.user_rates.size() != K || state.g_mu.size() != K)
    throw std::invalid_argument("metric and target sizes disagree");
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("forgetting factor must lie in (0, 1]");
  if (!(power_budget > 0.0))
    throw std::invalid_argument("power budget must be positive");

  state.g_lambda =
      alpha * (power_budget - metrics.total_power) + (1.0 - alpha) * state.g_lambda;
  const double total_rate = metrics.sum_rate();
  for (std::size_t k = 0; k < K; ++k) {
    const double gap = metrics.user_rates[k] - targets.phi[k] * total_rate;
    state.g_mu[k] = alpha * gap + (1.0 - alpha) * state.g_mu[k];
  }
}

// Projected subgradient step on the filtered state:
//   lambda <- max(epsilon, lambda - rho_lambda * g_lambda)
//   mu     <- [mu - rho_mu * g_mu]+ renormalized onto mu . phi = 1.
// If the positive part degenerates to the zero vector, mu restarts at the
// target-proportional point and mu_resets is bumped. subgradient_clip bounds
// the filtered values fed into the step (infinite by default), which guards
// the price against runaway excursions during burn-in.
inline void update_dual(DualState& state, const RateTargets& targets,
                        double rho_lambda, double rho_mu, double epsilon,
                        double subgradient_clip =
                            std::numeric_limits<double>::infinity()) {
  const std::size_t K = targets.phi.size();
  if (state.mu.size() != K || state.g_mu.size() != K)
    throw std::invalid_argument("dual state and target sizes disagree");
  if (!(rho_lambda >= 0.0) || !(rho_mu >= 0.0))
    throw std::invalid_argument("step sizes must be non-negative");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("price floor must be positive");
  if (!(subgradient_clip > 0.0))
    throw std::invalid_argument("subgradient clip must be positive");

  const double g_l =
      std::clamp(state.g_lambda, -subgradient_clip, subgradient_clip);
  state.lambda = std::max(epsilon, state.lambda - rho_lambda * g_l);

  double plane = 0.0;
  std::vector<double> lifted(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double g =
        std::clamp(state.g_mu[k], -subgradient_clip, subgradient_clip);
    lifted[k] = std::max(0.0, state.mu[k] - rho_mu * g);
    plane += lifted[k] * targets.phi[k];
  }
  if (plane > 1e-12) {
    for (std::size_t k = 0; k < K; ++k) state.mu[k] = lifted[k] / plane;
  } else {
    double norm = 0.0;
    for (double f : targets.phi) norm += f * f;
    for (std::size_t k = 0; k < K; ++k) state.mu[k] = targets.phi[k] / norm;
    ++state.mu_resets;
  }
  ++state.slot;
}

}  // namespace obsched
