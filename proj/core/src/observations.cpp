#include "floc/observations.hpp"

#include <cmath>

#include "floc/error.hpp"

namespace floc {

void ObservationSet::validate() const {
  if (n_bins == 0 || n_times == 0) throw InvalidInput("observation set is empty");
  if (counts.size() != n_bins * n_times) {
    throw InvalidInput("observation matrix does not have N_x * N_t entries");
  }
  if (bin_edges.size() != n_bins + 1) throw InvalidInput("need N_x + 1 bin edges");
  if (times.size() != n_times) throw InvalidInput("need N_t observation times");
  for (double c : counts) {
    if (!std::isfinite(c)) throw InvalidInput("observation counts must be finite");
  }
  for (std::size_t j = 1; j < bin_edges.size(); ++j) {
    if (!(bin_edges[j] > bin_edges[j - 1])) throw InvalidInput("bin edges must increase");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidInput("observation times must be finite and increasing");
    }
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidInput("noise sigma must be finite and nonnegative");
  }
}

}  // namespace floc
