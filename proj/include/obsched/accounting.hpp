#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include "obsched/dual.hpp"

namespace obsched {

// Feedback load classes. A scheme that adapts the number of active beams
// needs every equivalent gain (t per subcarrier); a fixed smaller beam count
// needs the chosen disposition, beam, and SNIR (3 per subcarrier); classic
// opportunistic beamforming with all beams active needs beam and SNIR only
// (2 per subcarrier).
enum class FeedbackScheme { adaptive, fixed_subset, classic };

// Real parameters fed back per user per slot.
inline long feedback_count(FeedbackScheme scheme, int num_subcarriers,
                           int num_beams) {
  if (num_subcarriers < 1 || num_beams < 1)
    throw std::invalid_argument("feedback dimensions must be positive");
  switch (scheme) {
    case FeedbackScheme::adaptive:
      return static_cast<long>(num_beams) * num_subcarriers;
    case FeedbackScheme::fixed_subset:
      return 3L * num_subcarriers;
    case FeedbackScheme::classic:
      return 2L * num_subcarriers;
  }
  throw std::invalid_argument("unknown feedback scheme");
}

// Monotone operation counters, one per pipeline stage. Counts are exact
// operation tallies (gain computations, rate-term evaluations, SNIR
// evaluations, power updates, dual-update touches, fed-back parameters), so
// runs are comparable across schemes without timing noise.
struct CostLedger {
  long slots = 0;
  long pooling_ops = 0;            // equivalent-gain computations
  long feedback_params = 0;        // parameters fed back, all users
  long allocation_rate_evals = 0;  // rate terms inside the allocation search
  long allocation_snir_evals = 0;  // user-side SNIR evaluations
  long power_ops = 0;              // per-beam power updates
  long update_ops = 0;             // dual bookkeeping touches

  void merge(const CostLedger& other) {
    slots += other.slots;
    pooling_ops += other.pooling_ops;
    feedback_params += other.feedback_params;
    allocation_rate_evals += other.allocation_rate_evals;
    allocation_snir_evals += other.allocation_snir_evals;
    power_ops += other.power_ops;
    update_ops += other.update_ops;
  }
};

// Streaming slot statistics: cumulative means over the whole run plus
// sliding-window means over the most recent window_len slots (window
// disabled when window_len is zero).
class RunningStats {
 public:
  explicit RunningStats(int num_users, long window_len = 0)
      : rate_sum_(num_users, 0.0), window_len_(window_len) {
    if (num_users < 1) throw std::invalid_argument("need at least one user");
    if (window_len < 0) throw std::invalid_argument("window must be non-negative");
  }

  void record(const SlotMetrics& metrics) {
    if (metrics.user_rates.size() != rate_sum_.size())
      throw std::invalid_argument("metric size disagrees with user count");
    ++count_;
    power_sum_ += metrics.total_power;
    const double sum_rate = metrics.sum_rate();
    sum_rate_sum_ += sum_rate;
    for (std::size_t k = 0; k < rate_sum_.size(); ++k)
      rate_sum_[k] += metrics.user_rates[k];
    if (window_len_ > 0) {
      window_.push_back({metrics.total_power, sum_rate});
      window_power_sum_ += metrics.total_power;
      window_rate_sum_ += sum_rate;
      if (static_cast<long>(window_.size()) > window_len_) {
        window_power_sum_ -= window_.front().first;
        window_rate_sum_ -= window_.front().second;
        window_.pop_front();
      }
    }
  }

  long count() const { return count_; }

  double mean_total_power() const {
    require_data();
    return power_sum_ / static_cast<double>(count_);
  }

  double mean_sum_rate() const {
    require_data();
    return sum_rate_sum_ / static_cast<double>(count_);
  }

  std::vector<double> mean_user_rates() const {
    require_data();
    std::vector<double> means(rate_sum_.size());
    for (std::size_t k = 0; k < means.size(); ++k)
      means[k] = rate_sum_[k] / static_cast<double>(count_);
    return means;
  }

  // Share of the total mean rate each user holds.
  std::vector<double> rate_fractions() const {
    require_data();
    if (!(sum_rate_sum_ > 0.0))
      throw std::domain_error("rate fractions undefined: zero total rate");
    std::vector<double> fractions(rate_sum_.size());
    for (std::size_t k = 0; k < fractions.size(); ++k)
      fractions[k] = rate_sum_[k] / sum_rate_sum_;
    return fractions;
  }

  double window_mean_power() const {
    if (window_.empty()) throw std::domain_error("window is empty");
    return window_power_sum_ / static_cast<double>(window_.size());
  }

  double window_mean_sum_rate() const {
    if (window_.empty()) throw std::domain_error("window is empty");
    return window_rate_sum_ / static_cast<double>(window_.size());
  }

 private:
  void require_data() const {
    if (count_ == 0) throw std::domain_error("no slots recorded");
  }

  long count_ = 0;
  double power_sum_ = 0.0;
  double sum_rate_sum_ = 0.0;
  std::vector<double> rate_sum_;
  long window_len_;
  std::deque<std::pair<double, double>> window_;
  double window_power_sum_ = 0.0;
  double window_rate_sum_ = 0.0;
};

}  // namespace obsched
