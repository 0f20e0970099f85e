#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "obsched/beams.hpp"
#include "obsched/fading.hpp"

namespace obsched {

// Non-owning K x t view of the equivalent gains on one subcarrier.
// user_stride is the element distance between consecutive users, which lets
// the view address both contiguous test matrices and GainTable storage.
struct GainView {
  const double* base = nullptr;
  int num_users = 0;
  int num_beams = 0;
  std::size_t user_stride = 0;

  double operator()(int k, int q) const {
    return base[static_cast<std::size_t>(k) * user_stride + q];
  }
};

// Equivalent per-beam power gains c[k][m][q] = |<h_km, b_mq>|^2 / noise_var.
// A beam's gain already folds in the noise normalization, so uniform power V
// on beam q gives the interference-free SNR V * c[k][m][q] directly.
struct GainTable {
  int num_users = 0;
  int num_subcarriers = 0;
  int num_beams = 0;
  double noise_var = 1.0;
  std::vector<double> c;  // layout ((k * M + m) * t + q)

  double at(int k, int m, int q) const {
    return c[(static_cast<std::size_t>(k) * num_subcarriers + m) * num_beams + q];
  }
  double& at(int k, int m, int q) {
    return c[(static_cast<std::size_t>(k) * num_subcarriers + m) * num_beams + q];
  }

  // Gains of one user on one subcarrier, contiguous, length num_beams.
  const double* user_row(int k, int m) const {
    return &c[(static_cast<std::size_t>(k) * num_subcarriers + m) * num_beams];
  }

  GainView slice(int m) const {
    return GainView{user_row(0, m), num_users, num_beams,
                    static_cast<std::size_t>(num_subcarriers) * num_beams};
  }
};

inline GainTable equivalent_gains(const ChannelRealization& channel,
                                  const BeamSet& beams, double noise_var) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument("noise variance must be positive");
  if (channel.num_antennas != beams.num_antennas ||
      channel.num_subcarriers != beams.num_subcarriers)
    throw std::invalid_argument("channel and beam set shapes disagree");

  GainTable table;
  table.num_users = channel.num_users;
  table.num_subcarriers = channel.num_subcarriers;
  table.num_beams = beams.num_beams;
  table.noise_var = noise_var;
  table.c.resize(static_cast<std::size_t>(table.num_users) *
                 table.num_subcarriers * table.num_beams);

  const int t = channel.num_antennas;
  const double inv_noise = 1.0 / noise_var;
  for (int k = 0; k < table.num_users; ++k) {
    for (int m = 0; m < table.num_subcarriers; ++m) {
      const cxd* h = &channel.h[(static_cast<std::size_t>(k) *
                                     table.num_subcarriers +
                                 m) *
                                t];
      for (int q = 0; q < table.num_beams; ++q) {
        const cxd* b = beams.beam(m, q);
        cxd dot{};
        for (int a = 0; a < t; ++a) dot += std::conj(h[a]) * b[a];
        table.at(k, m, q) = std::norm(dot) * inv_noise;
      }
    }
  }
  return table;
}

}  // namespace obsched
