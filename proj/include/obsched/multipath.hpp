#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace obsched {

// One resolvable multipath component: excess delay and average linear power.
struct Tap {
  double delay_s = 0.0;
  double power_gain = 0.0;
};

// Power-delay profile plus Doppler bandwidth of the mobile channel.
// Tap powers are linear and must sum to one so that the synthesized
// frequency response has unit average power per entry.
struct MultipathProfile {
  std::vector<Tap> taps;
  double doppler_hz = 0.0;

  void validate() const {
    if (taps.empty())
      throw std::invalid_argument("multipath profile needs at least one tap");
    if (!(doppler_hz >= 0.0))
      throw std::invalid_argument("doppler_hz must be non-negative");
    double total = 0.0;
    double prev = -1.0;
    for (const Tap& tap : taps) {
      if (!(tap.delay_s >= 0.0))
        throw std::invalid_argument("tap delays must be non-negative");
      if (tap.delay_s <= prev)
        throw std::invalid_argument("tap delays must be strictly increasing");
      if (!(tap.power_gain >= 0.0))
        throw std::invalid_argument("tap power gains must be non-negative");
      prev = tap.delay_s;
      total += tap.power_gain;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("tap power gains must sum to 1");
  }

  // Six-tap pedestrian-style profile with 2.3 us maximum excess delay.
  // Relative tap levels follow the usual pedestrian outdoor measurement set
  // and are renormalized to unit total power.
  static MultipathProfile pedestrian(double doppler_hz = 6.0) {
    const double delays_us[] = {0.0, 0.2, 0.8, 1.2, 1.7, 2.3};
    const double powers_db[] = {0.0, -0.9, -4.9, -8.0, -7.8, -23.9};
    MultipathProfile profile;
    profile.doppler_hz = doppler_hz;
    double total = 0.0;
    for (double level_db : powers_db) total += std::pow(10.0, level_db / 10.0);
    for (int l = 0; l < 6; ++l) {
      profile.taps.push_back(
          {delays_us[l] * 1e-6, std::pow(10.0, powers_db[l] / 10.0) / total});
    }
    return profile;
  }

  // Single-tap (frequency-flat) profile, mainly useful for tests.
  static MultipathProfile flat(double doppler_hz) {
    MultipathProfile profile;
    profile.doppler_hz = doppler_hz;
    profile.taps.push_back({0.0, 1.0});
    return profile;
  }
};

}  // namespace obsched
