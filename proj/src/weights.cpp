#include "atypia/weights.hpp"

namespace atypia {

double log_sum_exp(const std::vector<double>& xs) {
  LogSumExp acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

double effective_sample_size(const std::vector<double>& log_weights) {
  WeightSums s;
  for (double x : log_weights) s.add(x);
  return s.ess();
}

}  // namespace atypia
