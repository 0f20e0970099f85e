#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "obsched/allocation.hpp"
#include "obsched/dispositions.hpp"
#include "obsched/gains.hpp"

namespace obsched {

struct BeamAllocation {
  UserRow users;
  double metric = 0.0;       // sum of mu-weighted rates of the chosen row
  long rate_evaluations = 0; // rate terms computed while searching
};

// Greedy disposition scan. For every candidate active-beam set, beams are
// filled in ascending index order with the still-unassigned user of largest
// mu-weighted rate under uniform power V on the candidate set; the set with
// the largest weighted rate sum wins. A beam stays idle when no remaining
// user has a positive contribution, and ties keep the earliest candidate
// (lowest user, then smallest set size, then lexicographic set order), so
// the result is deterministic.
//
// The scan evaluates at most K * t * 2^(t-1) rate terms, linear in the user
// count, versus the (K+1)^t candidates of the exhaustive search.
inline BeamAllocation allocate_alg1(const GainView& c,
                                    const std::vector<double>& mu, double V) {
  if (static_cast<int>(mu.size()) != c.num_users)
    throw std::invalid_argument("weight vector length must equal user count");
  if (!(V >= 0.0)) throw std::invalid_argument("uniform power must be non-negative");
  for (double w : mu)
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be non-negative");

  const int t = c.num_beams;
  const int K = c.num_users;
  BeamAllocation best;
  best.users.assign(t, 0);

  std::vector<double> interference(K);
  UserRow row(t);
  std::vector<char> taken(K);
  for (int t_active = 1; t_active <= t; ++t_active) {
    for (const auto& subset : beam_subsets(t, t_active)) {
      // 1 + V * sum of the candidate set's gains, per user; the own-beam
      // term is subtracted again inside the beam loop.
      for (int k = 0; k < K; ++k) {
        double sum = 1.0;
        for (int s : subset) sum += V * c(k, s);
        interference[k] = sum;
      }
      std::fill(row.begin(), row.end(), 0);
      std::fill(taken.begin(), taken.end(), 0);
      double metric = 0.0;
      for (int q : subset) {
        double best_value = 0.0;
        int best_user = -1;
        for (int k = 0; k < K; ++k) {
          if (taken[k]) continue;
          const double own = V * c(k, q);
          const double gamma = own / (interference[k] - own);
          const double value = mu[k] * std::log2(1.0 + gamma);
          ++best.rate_evaluations;
          if (value > best_value) {
            best_value = value;
            best_user = k;
          }
        }
        if (best_user >= 0 && best_value > 0.0) {
          taken[best_user] = 1;
          row[q] = best_user + 1;
          metric += best_value;
        }
      }
      if (metric > best.metric) {
        best.metric = metric;
        best.users = row;
      }
    }
  }
  return best;
}

// One user's feedback choice: the disposition and beam whose hypothetical
// SNIR under uniform power V is largest. Ties prefer the lowest beam index,
// then the lowest disposition index.
struct UserSelection {
  int disposition = -1;  // rank within beam_subsets(t, t_active)
  int beam = -1;
  double snir = 0.0;
};

inline UserSelection user_select(std::span<const double> user_gains,
                                 int t_active, double V,
                                 long* snir_evaluations = nullptr) {
  const int t = static_cast<int>(user_gains.size());
  if (t < 1) throw std::invalid_argument("need at least one beam gain");
  if (t_active < 1 || t_active > t)
    throw std::invalid_argument("active beam count out of range");
  if (!(V >= 0.0)) throw std::invalid_argument("uniform power must be non-negative");

  UserSelection best;
  long evals = 0;
  int j = 0;
  for (const auto& subset : beam_subsets(t, t_active)) {
    double sum = 1.0;
    for (int s : subset) sum += V * user_gains[s];
    for (int q : subset) {
      const double own = V * user_gains[q];
      const double gamma = own / (sum - own);
      ++evals;
      const bool better =
          gamma > best.snir ||
          (gamma == best.snir &&
           (best.beam < 0 || q < best.beam ||
            (q == best.beam && j < best.disposition)));
      if (better) {
        best.snir = gamma;
        best.beam = q;
        best.disposition = j;
      }
    }
    ++j;
  }
  if (snir_evaluations) *snir_evaluations += evals;
  return best;
}

// Competition stage over fed-back selections: for every disposition, each of
// its beams goes to the claimant of largest mu-weighted rate computed from
// the fed-back SNIR, and the disposition with the largest weighted rate sum
// wins. Beams nobody claimed stay idle. Rates are log2(1 + snir), so the
// scheduler never re-touches the gain table.
inline BeamAllocation allocate_alg2(const std::vector<UserSelection>& picks,
                                    const std::vector<double>& mu,
                                    int num_beams, int t_active) {
  const int K = static_cast<int>(picks.size());
  if (static_cast<int>(mu.size()) != K)
    throw std::invalid_argument("weight vector length must equal user count");
  const auto subsets = beam_subsets(num_beams, t_active);

  BeamAllocation best;
  best.users.assign(num_beams, 0);
  UserRow row(num_beams);
  for (int j = 0; j < static_cast<int>(subsets.size()); ++j) {
    std::fill(row.begin(), row.end(), 0);
    double metric = 0.0;
    for (int q : subsets[j]) {
      double best_value = 0.0;
      int best_user = -1;
      for (int k = 0; k < K; ++k) {
        if (picks[k].disposition != j || picks[k].beam != q) continue;
        if (!(picks[k].snir >= 0.0))
          throw std::invalid_argument("fed-back SNIR must be non-negative");
        const double value = mu[k] * std::log2(1.0 + picks[k].snir);
        ++best.rate_evaluations;
        if (value > best_value) {
          best_value = value;
          best_user = k;
        }
      }
      if (best_user >= 0 && best_value > 0.0) {
        row[q] = best_user + 1;
        metric += best_value;
      }
    }
    if (metric > best.metric) {
      best.metric = metric;
      best.users = row;
    }
  }
  return best;
}

enum class PowerMode { uniform, optimal };

struct ExhaustiveAllocation {
  UserRow users;
  PowerRow powers;
  double metric = 0.0;
  long candidates = 0;
  long rate_evaluations = 0;
};

// Reference search over every duplicate-free user row in {0..K}^t. Refuses
// instances with more than one million candidates. uniform mode puts power V
// on every active beam; optimal mode runs the successive power search per
// candidate. The first maximizer in odometer order (last beam fastest) wins,
// and beams whose power came out zero are recorded as idle.
inline ExhaustiveAllocation allocate_exhaustive(
    const GainView& c, const std::vector<double>& mu, double lambda, double V,
    PowerMode mode, double tol = 1e-6) {
  const int t = c.num_beams;
  const int K = c.num_users;
  if (static_cast<int>(mu.size()) != K)
    throw std::invalid_argument("weight vector length must equal user count");

  double candidate_count = 1.0;
  for (int q = 0; q < t; ++q) candidate_count *= K + 1;
  if (candidate_count > 1e6)
    throw std::length_error("exhaustive search refused: over 1e6 candidates");

  ExhaustiveAllocation best;
  best.users.assign(t, 0);
  best.powers.assign(t, 0.0);

  UserRow row(t, 0);
  PowerRow uniform_powers(t, 0.0);
  std::vector<char> seen(static_cast<std::size_t>(K) + 1);
  while (true) {
    ++best.candidates;
    std::fill(seen.begin(), seen.end(), 0);
    bool valid = true;
    int active = 0;
    for (int q = 0; q < t && valid; ++q) {
      if (row[q] != 0) {
        if (seen[row[q]]) valid = false;
        seen[row[q]] = 1;
        ++active;
      }
    }
    if (valid) {
      double metric;
      if (mode == PowerMode::uniform) {
        for (int q = 0; q < t; ++q) uniform_powers[q] = row[q] != 0 ? V : 0.0;
        metric = weighted_metric(row, uniform_powers, mu, lambda, c);
        best.rate_evaluations += active;
        if (metric > best.metric) {
          best.metric = metric;
          best.users = row;
          best.powers = uniform_powers;
        }
      } else {
        PowerResult power = optimal_power(row, mu, lambda, c, tol, 100, V);
        best.rate_evaluations +=
            static_cast<long>(power.iterations + 1) * active;
        metric = power.metric;
        if (metric > best.metric) {
          best.metric = metric;
          best.users = row;
          best.powers = power.p;
        }
      }
    }
    int q = t - 1;
    while (q >= 0 && row[q] == K) row[q--] = 0;
    if (q < 0) break;
    ++row[q];
  }

  // A zero-power beam is idle by convention; dropping it leaves the metric
  // unchanged because its rate and power terms are both zero.
  for (int q = 0; q < t; ++q)
    if (best.powers[q] == 0.0) best.users[q] = 0;
  return best;
}

}  // namespace obsched
