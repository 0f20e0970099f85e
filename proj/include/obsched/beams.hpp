#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "obsched/rng.hpp"

namespace obsched {

using cxd = std::complex<double>;

enum class BeamMode {
  random_orthonormal,  // fresh uniformly random unitary basis per subcarrier
  ula_halfwave,        // fixed uniform-linear-array grid, identical on all m
};

// Orthonormal transmit beam vectors, one t x t basis per subcarrier.
struct BeamSet {
  int num_subcarriers = 0;
  int num_beams = 0;
  int num_antennas = 0;
  std::vector<cxd> b;  // layout ((m * t + q) * t + a)

  cxd at(int m, int q, int a) const {
    return b[(static_cast<std::size_t>(m) * num_beams + q) * num_antennas + a];
  }
  const cxd* beam(int m, int q) const {
    return &b[(static_cast<std::size_t>(m) * num_beams + q) * num_antennas];
  }
};

// Largest deviation of the per-subcarrier Gram matrices from identity.
inline double orthonormality_error(const BeamSet& set) {
  double worst = 0.0;
  for (int m = 0; m < set.num_subcarriers; ++m) {
    for (int q = 0; q < set.num_beams; ++q) {
      for (int r = 0; r < set.num_beams; ++r) {
        cxd dot{};
        for (int a = 0; a < set.num_antennas; ++a)
          dot += std::conj(set.at(m, q, a)) * set.at(m, r, a);
        const double target = (q == r) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(dot - target));
      }
    }
  }
  return worst;
}

// Generates one orthonormal beam basis per subcarrier.
//
// random_orthonormal draws an i.i.d. complex Gaussian matrix per subcarrier
// and orthonormalizes its columns by modified Gram-Schmidt with a second
// re-orthogonalization pass, which keeps the Gram error near machine
// precision. ula_halfwave builds the deterministic half-wavelength array
// steering grid b_q[a] = exp(-j*pi*a*s_q)/sqrt(t) with s_q = -1 + 2q/t; the
// grid directions are mutually orthogonal by construction.
inline BeamSet generate_beam_set(int num_antennas, int num_subcarriers,
                                 BeamMode mode, std::uint64_t seed) {
  if (num_antennas < 1 || num_subcarriers < 1)
    throw std::invalid_argument("beam set dimensions must be positive");
  const int t = num_antennas;
  BeamSet set;
  set.num_subcarriers = num_subcarriers;
  set.num_beams = t;
  set.num_antennas = t;
  set.b.resize(static_cast<std::size_t>(num_subcarriers) * t * t);

  if (mode == BeamMode::ula_halfwave) {
    const double pi = 3.14159265358979323846;
    const double norm = 1.0 / std::sqrt(static_cast<double>(t));
    for (int q = 0; q < t; ++q) {
      const double dir = -1.0 + 2.0 * q / t;
      for (int a = 0; a < t; ++a) {
        const double arg = -pi * a * dir;
        const cxd value{norm * std::cos(arg), norm * std::sin(arg)};
        for (int m = 0; m < num_subcarriers; ++m)
          set.b[(static_cast<std::size_t>(m) * t + q) * t + a] = value;
      }
    }
    return set;
  }

  Rng rng(seed);
  std::vector<cxd> column(t);
  for (int m = 0; m < num_subcarriers; ++m) {
    cxd* basis = &set.b[static_cast<std::size_t>(m) * t * t];
    for (int q = 0; q < t; ++q) {
      for (int a = 0; a < t; ++a) column[a] = rng.complex_gaussian();
      for (int pass = 0; pass < 2; ++pass) {
        for (int r = 0; r < q; ++r) {
          const cxd* prev = basis + static_cast<std::size_t>(r) * t;
          cxd proj{};
          for (int a = 0; a < t; ++a) proj += std::conj(prev[a]) * column[a];
          for (int a = 0; a < t; ++a) column[a] -= proj * prev[a];
        }
      }
      double norm_sq = 0.0;
      for (int a = 0; a < t; ++a) norm_sq += std::norm(column[a]);
      if (!(norm_sq > 1e-24))
        throw std::runtime_error("degenerate random beam draw");
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (int a = 0; a < t; ++a)
        basis[static_cast<std::size_t>(q) * t + a] = column[a] * inv;
    }
  }
  return set;
}

}  // namespace obsched
