#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "obsched/multipath.hpp"
#include "obsched/rng.hpp"

namespace obsched {

using cxd = std::complex<double>;

// Complex baseband channel for one slot: K users, M subcarriers, t antennas.
struct ChannelRealization {
  int num_users = 0;
  int num_subcarriers = 0;
  int num_antennas = 0;
  long slot_index = -1;
  std::vector<cxd> h;  // layout ((k * M + m) * t + a)

  cxd at(int k, int m, int a) const {
    return h[(static_cast<std::size_t>(k) * num_subcarriers + m) * num_antennas + a];
  }
  cxd& at(int k, int m, int a) {
    return h[(static_cast<std::size_t>(k) * num_subcarriers + m) * num_antennas + a];
  }
};

// Time-correlated Rayleigh fader.
//
// Every (user, antenna, tap) triple carries an independent complex process
// synthesized as a sum of sinusoids: N oscillators with arrival angles
// alpha_n = (2*pi*n - pi + theta) / (4N), theta drawn once per process, an
// in-phase component at frequencies 2*pi*fD*cos(alpha_n) and a quadrature
// component at 2*pi*fD*sin(alpha_n), each with independent initial phase.
// The process has unit power and autocorrelation J0(2*pi*fD*tau).
//
// The per-subcarrier response is the delay-profile Fourier sum
//   h[k][m][a] = sum_l sqrt(g_l) * s_{k,a,l}(t) * exp(-j*2*pi*f_m*d_l)
// with f_m = m * subcarrier_spacing.
//
// Each oscillator is advanced by one complex rotation per slot instead of
// re-evaluating trig functions, which keeps long runs cheap. Rotors are
// recomputed whenever the slot duration changes.
class ChannelFader {
 public:
  ChannelFader(const MultipathProfile& profile, int num_users, int num_antennas,
               int num_subcarriers, double subcarrier_spacing_hz,
               std::uint64_t seed, int oscillators_per_tap = 32)
      : profile_(profile),
        num_users_(num_users),
        num_antennas_(num_antennas),
        num_subcarriers_(num_subcarriers),
        spacing_hz_(subcarrier_spacing_hz),
        oscillators_(oscillators_per_tap) {
    profile_.validate();
    if (num_users_ < 1 || num_antennas_ < 1 || num_subcarriers_ < 1)
      throw std::invalid_argument("fader dimensions must be positive");
    if (!(spacing_hz_ > 0.0))
      throw std::invalid_argument("subcarrier spacing must be positive");
    if (oscillators_ < 1)
      throw std::invalid_argument("need at least one oscillator per tap");

    const int num_taps = static_cast<int>(profile_.taps.size());
    Rng rng(seed);
    osc_.resize(static_cast<std::size_t>(num_users_) * num_antennas_ *
                num_taps * oscillators_);
    const double pi = 3.14159265358979323846;
    std::size_t idx = 0;
    for (int k = 0; k < num_users_; ++k) {
      for (int a = 0; a < num_antennas_; ++a) {
        for (int l = 0; l < num_taps; ++l) {
          const double theta = rng.uniform(-pi, pi);
          for (int n = 1; n <= oscillators_; ++n) {
            Oscillator& o = osc_[idx++];
            const double angle = (2.0 * pi * n - pi + theta) / (4.0 * oscillators_);
            o.freq_i = 2.0 * pi * profile_.doppler_hz * std::cos(angle);
            o.freq_q = 2.0 * pi * profile_.doppler_hz * std::sin(angle);
            const double phase_i = rng.uniform(-pi, pi);
            const double phase_q = rng.uniform(-pi, pi);
            o.phasor_i = {std::cos(phase_i), std::sin(phase_i)};
            o.phasor_q = {std::cos(phase_q), std::sin(phase_q)};
          }
        }
      }
    }

    // exp(-j*2*pi*f_m*d_l) table, m-major.
    phase_table_.resize(static_cast<std::size_t>(num_subcarriers_) * num_taps);
    for (int m = 0; m < num_subcarriers_; ++m) {
      for (int l = 0; l < num_taps; ++l) {
        const double arg = -2.0 * pi * (m * spacing_hz_) * profile_.taps[l].delay_s;
        phase_table_[static_cast<std::size_t>(m) * num_taps + l] = {std::cos(arg),
                                                                    std::sin(arg)};
      }
    }
  }

  // Advances all processes by slot_duration_s and returns the new channel.
  ChannelRealization step(double slot_duration_s) {
    if (!(slot_duration_s > 0.0))
      throw std::invalid_argument("slot duration must be positive");
    if (slot_duration_s != rotor_dt_) rebuild_rotors(slot_duration_s);

    for (std::size_t i = 0; i < osc_.size(); ++i) {
      Oscillator& o = osc_[i];
      o.phasor_i *= rotor_i_[i];
      o.phasor_q *= rotor_q_[i];
    }
    ++slot_;

    const int num_taps = static_cast<int>(profile_.taps.size());
    ChannelRealization out;
    out.num_users = num_users_;
    out.num_subcarriers = num_subcarriers_;
    out.num_antennas = num_antennas_;
    out.slot_index = slot_;
    out.h.assign(static_cast<std::size_t>(num_users_) * num_subcarriers_ *
                     num_antennas_,
                 cxd{});
    std::vector<cxd> taps(num_taps);
    for (int k = 0; k < num_users_; ++k) {
      for (int a = 0; a < num_antennas_; ++a) {
        for (int l = 0; l < num_taps; ++l) taps[l] = tap_gain(k, a, l);
        for (int m = 0; m < num_subcarriers_; ++m) {
          const cxd* rot = &phase_table_[static_cast<std::size_t>(m) * num_taps];
          cxd sum{};
          for (int l = 0; l < num_taps; ++l) sum += taps[l] * rot[l];
          out.at(k, m, a) = sum;
        }
      }
    }
    return out;
  }

  // Current gain of one tap process, including its profile power weight.
  cxd tap_gain(int k, int a, int l) const {
    const int num_taps = static_cast<int>(profile_.taps.size());
    const std::size_t base =
        ((static_cast<std::size_t>(k) * num_antennas_ + a) * num_taps + l) *
        oscillators_;
    double sum_i = 0.0;
    double sum_q = 0.0;
    for (int n = 0; n < oscillators_; ++n) {
      sum_i += osc_[base + n].phasor_i.real();
      sum_q += osc_[base + n].phasor_q.real();
    }
    const double scale =
        std::sqrt(profile_.taps[l].power_gain / oscillators_);
    return {scale * sum_i, scale * sum_q};
  }

  const MultipathProfile& profile() const { return profile_; }
  int num_users() const { return num_users_; }
  int num_antennas() const { return num_antennas_; }
  int num_subcarriers() const { return num_subcarriers_; }
  int num_taps() const { return static_cast<int>(profile_.taps.size()); }
  long slot() const { return slot_; }

  friend bool operator==(const ChannelFader& x, const ChannelFader& y) {
    if (x.num_users_ != y.num_users_ || x.num_antennas_ != y.num_antennas_ ||
        x.num_subcarriers_ != y.num_subcarriers_ || x.slot_ != y.slot_ ||
        x.osc_.size() != y.osc_.size())
      return false;
    for (std::size_t i = 0; i < x.osc_.size(); ++i) {
      if (x.osc_[i].freq_i != y.osc_[i].freq_i ||
          x.osc_[i].freq_q != y.osc_[i].freq_q ||
          x.osc_[i].phasor_i != y.osc_[i].phasor_i ||
          x.osc_[i].phasor_q != y.osc_[i].phasor_q)
        return false;
    }
    return true;
  }

 private:
  struct Oscillator {
    double freq_i = 0.0;
    double freq_q = 0.0;
    cxd phasor_i;
    cxd phasor_q;
  };

  void rebuild_rotors(double dt) {
    rotor_i_.resize(osc_.size());
    rotor_q_.resize(osc_.size());
    for (std::size_t i = 0; i < osc_.size(); ++i) {
      rotor_i_[i] = {std::cos(osc_[i].freq_i * dt), std::sin(osc_[i].freq_i * dt)};
      rotor_q_[i] = {std::cos(osc_[i].freq_q * dt), std::sin(osc_[i].freq_q * dt)};
    }
    rotor_dt_ = dt;
  }

  MultipathProfile profile_;
  int num_users_;
  int num_antennas_;
  int num_subcarriers_;
  double spacing_hz_;
  int oscillators_;
  long slot_ = -1;
  double rotor_dt_ = -1.0;
  std::vector<Oscillator> osc_;
  std::vector<cxd> rotor_i_;
  std::vector<cxd> rotor_q_;
  std::vector<cxd> phase_table_;
};

inline ChannelFader make_fader(const MultipathProfile& profile, int num_users,
                               int num_antennas, int num_subcarriers,
                               double subcarrier_spacing_hz, std::uint64_t seed,
                               int oscillators_per_tap = 32) {
  return ChannelFader(profile, num_users, num_antennas, num_subcarriers,
                      subcarrier_spacing_hz, seed, oscillators_per_tap);
}

}  // namespace obsched
