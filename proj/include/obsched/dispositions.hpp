#pragma once

#include <stdexcept>
#include <vector>

namespace obsched {

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long value = 1;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

// All size-t_active subsets of {0, ..., t-1} in lexicographic order. This
// ordering is the canonical disposition enumeration shared by the scheduler,
// the per-user selection rule, and any index recorded in outputs.
inline std::vector<std::vector<int>> beam_subsets(int num_beams, int t_active) {
  if (num_beams < 1) throw std::invalid_argument("need at least one beam");
  if (t_active < 1 || t_active > num_beams)
    throw std::invalid_argument("active beam count out of range");
  std::vector<std::vector<int>> subsets;
  std::vector<int> current(t_active);
  for (int i = 0; i < t_active; ++i) current[i] = i;
  while (true) {
    subsets.push_back(current);
    int i = t_active - 1;
    while (i >= 0 && current[i] == num_beams - t_active + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < t_active; ++j) current[j] = current[j - 1] + 1;
  }
  return subsets;
}

// A set of simultaneously active beams: its size, its rank within the
// canonical enumeration of same-size subsets, and the beam indices.
struct Disposition {
  int t_active = 0;
  int index = 0;  // 0-based rank in lexicographic order
  std::vector<int> beams;
};

inline Disposition make_disposition(int num_beams, int t_active, int index) {
  const auto subsets = beam_subsets(num_beams, t_active);
  if (index < 0 || index >= static_cast<int>(subsets.size()))
    throw std::invalid_argument("disposition index out of range");
  return Disposition{t_active, index, subsets[index]};
}

// Every disposition for a t-antenna array: sizes 1..t, lexicographic within
// each size.
inline std::vector<Disposition> all_dispositions(int num_beams) {
  std::vector<Disposition> all;
  for (int t_active = 1; t_active <= num_beams; ++t_active) {
    int index = 0;
    for (auto& subset : beam_subsets(num_beams, t_active))
      all.push_back(Disposition{t_active, index++, std::move(subset)});
  }
  return all;
}

}  // namespace obsched
