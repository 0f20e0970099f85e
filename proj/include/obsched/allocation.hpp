#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "obsched/gains.hpp"

namespace obsched {

inline constexpr double k_ln2 = 0.693147180559945309417232121458;

// Per-subcarrier assignment rows. Users are 1-based in UserRow; 0 marks an
// idle beam. Gain lookups therefore use (user - 1).
using UserRow = std::vector<int>;
using PowerRow = std::vector<double>;

inline void check_user_row(const UserRow& u, int num_users, int num_beams) {
  if (static_cast<int>(u.size()) != num_beams)
    throw std::invalid_argument("user row length must equal beam count");
  std::vector<char> seen(static_cast<std::size_t>(num_users) + 1, 0);
  for (int user : u) {
    if (user < 0 || user > num_users)
      throw std::invalid_argument("user index out of range");
    if (user != 0) {
      if (seen[user])
        throw std::invalid_argument("user assigned to two beams on one subcarrier");
      seen[user] = 1;
    }
  }
}

// Signal-to-noise-plus-interference ratio of user `user` on beam q when the
// subcarrier transmits with powers p on all beams:
//   p[q] * c(user,q) / (1 + sum_{s != q} p[s] * c(user,s)).
inline double snir(const GainView& c, const PowerRow& p, int user, int q) {
  if (user < 1 || user > c.num_users)
    throw std::invalid_argument("snir: user index out of range");
  if (q < 0 || q >= c.num_beams)
    throw std::invalid_argument("snir: beam index out of range");
  if (static_cast<int>(p.size()) != c.num_beams)
    throw std::invalid_argument("snir: power row length must equal beam count");
  const int k = user - 1;
  double denom = 1.0;
  for (int s = 0; s < c.num_beams; ++s) {
    if (!(p[s] >= 0.0))
      throw std::invalid_argument("snir: powers must be non-negative");
    if (s != q) denom += p[s] * c(k, s);
  }
  return p[q] * c(k, q) / denom;
}

// Weighted net utility of one subcarrier:
//   sum over active beams of mu[user] * log2(1 + snir) - lambda * p.
// Idle beams must carry zero power; an active beam may carry zero power (its
// term is then zero), which the fixed-point power search relies on.
inline double weighted_metric(const UserRow& u, const PowerRow& p,
                              const std::vector<double>& mu, double lambda,
                              const GainView& c) {
  check_user_row(u, c.num_users, c.num_beams);
  if (static_cast<int>(p.size()) != c.num_beams)
    throw std::invalid_argument("power row length must equal beam count");
  if (static_cast<int>(mu.size()) != c.num_users)
    throw std::invalid_argument("weight vector length must equal user count");
  for (int q = 0; q < c.num_beams; ++q) {
    if (!(p[q] >= 0.0))
      throw std::invalid_argument("powers must be non-negative");
    if (u[q] == 0 && p[q] != 0.0)
      throw std::invalid_argument("idle beam carries power");
  }
  double total = 0.0;
  for (int q = 0; q < c.num_beams; ++q) {
    if (u[q] == 0) continue;
    const int k = u[q] - 1;
    double denom = 1.0;
    for (int s = 0; s < c.num_beams; ++s)
      if (s != q) denom += p[s] * c(k, s);
    const double gamma = p[q] * c(k, q) / denom;
    total += mu[k] * std::log2(1.0 + gamma) - lambda * p[q];
  }
  return total;
}

// Power of one active beam that maximizes the subcarrier utility when every
// other active beam is held at a fixed reference level: the water-filling
// level mu/(lambda*ln2) minus the normalized noise-plus-interference floor,
// clamped at zero. Idle beams get exactly zero.
inline PowerRow waterfill(const UserRow& u, const std::vector<double>& mu,
                          double lambda, double reference_power,
                          const GainView& c) {
  check_user_row(u, c.num_users, c.num_beams);
  if (static_cast<int>(mu.size()) != c.num_users)
    throw std::invalid_argument("weight vector length must equal user count");
  if (!(lambda > 0.0))
    throw std::invalid_argument("power price must be positive");
  if (!(reference_power >= 0.0))
    throw std::invalid_argument("reference power must be non-negative");
  for (double w : mu)
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be non-negative");

  PowerRow p(c.num_beams, 0.0);
  for (int q = 0; q < c.num_beams; ++q) {
    if (u[q] == 0) continue;
    const int k = u[q] - 1;
    const double own = c(k, q);
    if (!(own > 0.0)) continue;
    double floor = 1.0;
    for (int s = 0; s < c.num_beams; ++s)
      if (s != q && u[s] != 0) floor += reference_power * c(k, s);
    p[q] = std::max(0.0, mu[k] / (lambda * k_ln2) - floor / own);
  }
  return p;
}

struct PowerResult {
  PowerRow p;
  double metric = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Successive-approximation power search: repeat the single-beam water-filling
// update with the interference term taken from the current iterate, sweeping
// beams in index order, until the largest power change drops below tol or the
// iteration cap is hit. Returns the best iterate by metric value, so the
// result is never worse than the seed water-filling solution. The seed uses
// reference_power as the interference level (zero by default).
inline PowerResult optimal_power(const UserRow& u, const std::vector<double>& mu,
                                 double lambda, const GainView& c,
                                 double tol = 1e-6, int max_iterations = 100,
                                 double reference_power = 0.0) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iterations < 1)
    throw std::invalid_argument("need at least one iteration");

  PowerResult result;
  PowerRow p = waterfill(u, mu, lambda, reference_power, c);
  result.metric = weighted_metric(u, p, mu, lambda, c);
  result.p = p;

  const double level_base = 1.0 / (lambda * k_ln2);
  for (int it = 1; it <= max_iterations; ++it) {
    result.iterations = it;
    double max_change = 0.0;
    for (int q = 0; q < c.num_beams; ++q) {
      if (u[q] == 0) continue;
      const int k = u[q] - 1;
      const double own = c(k, q);
      double next = 0.0;
      if (own > 0.0) {
        double floor = 1.0;
        for (int s = 0; s < c.num_beams; ++s)
          if (s != q) floor += p[s] * c(k, s);
        next = std::max(0.0, mu[k] * level_base - floor / own);
      }
      max_change = std::max(max_change, std::abs(next - p[q]));
      p[q] = next;
    }
    const double metric = weighted_metric(u, p, mu, lambda, c);
    if (metric > result.metric) {
      result.metric = metric;
      result.p = p;
    }
    if (max_change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// Full per-slot assignment across subcarriers. Maintains the pairing
// invariant that a beam is active exactly when it carries positive power:
// set_row records beams whose power underflows to zero as idle.
class Allocation {
 public:
  Allocation(int num_subcarriers, int num_beams)
      : num_subcarriers_(num_subcarriers),
        num_beams_(num_beams),
        users_(static_cast<std::size_t>(num_subcarriers) * num_beams, 0),
        powers_(static_cast<std::size_t>(num_subcarriers) * num_beams, 0.0) {
    if (num_subcarriers < 1 || num_beams < 1)
      throw std::invalid_argument("allocation dimensions must be positive");
  }

  int num_subcarriers() const { return num_subcarriers_; }
  int num_beams() const { return num_beams_; }

  int user(int m, int q) const { return users_[index(m, q)]; }
  double power(int m, int q) const { return powers_[index(m, q)]; }

  void set_row(int m, const UserRow& u, const PowerRow& p) {
    if (m < 0 || m >= num_subcarriers_)
      throw std::invalid_argument("subcarrier index out of range");
    if (static_cast<int>(u.size()) != num_beams_ ||
        static_cast<int>(p.size()) != num_beams_)
      throw std::invalid_argument("row length must equal beam count");
    for (int q = 0; q < num_beams_; ++q)
      for (int s = q + 1; s < num_beams_; ++s)
        if (u[q] != 0 && u[q] == u[s])
          throw std::invalid_argument(
              "user assigned to two beams on one subcarrier");
    for (int q = 0; q < num_beams_; ++q) {
      if (!(p[q] >= 0.0) || !std::isfinite(p[q]))
        throw std::invalid_argument("powers must be finite and non-negative");
      if (u[q] == 0 && p[q] > 0.0)
        throw std::invalid_argument("idle beam carries power");
      const bool active = u[q] != 0 && p[q] > 0.0;
      users_[index(m, q)] = active ? u[q] : 0;
      powers_[index(m, q)] = active ? p[q] : 0.0;
    }
  }

  double total_power() const {
    double sum = 0.0;
    for (double p : powers_) sum += p;
    return sum;
  }

  int active_beams(int m) const {
    int count = 0;
    for (int q = 0; q < num_beams_; ++q)
      if (users_[index(m, q)] != 0) ++count;
    return count;
  }

 private:
  std::size_t index(int m, int q) const {
    return static_cast<std::size_t>(m) * num_beams_ + q;
  }

  int num_subcarriers_;
  int num_beams_;
  std::vector<int> users_;
  std::vector<double> powers_;
};

}  // namespace obsched
