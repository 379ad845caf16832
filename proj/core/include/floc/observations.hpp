#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace floc {

/// Binned counts n_ji: N_x bins by N_t sample times, stored bin-major.
struct ObservationSet {
  std::size_t n_bins = 0;
  std::size_t n_times = 0;
  std::vector<double> counts;  // counts[j * n_times + i]
  std::vector<double> bin_edges;
  std::vector<double> times;
  double noise_sigma = 0.0;
  std::optional<std::uint64_t> rng_seed;

  double operator()(std::size_t bin, std::size_t time) const {
    return counts[bin * n_times + time];
  }
  double& operator()(std::size_t bin, std::size_t time) {
    return counts[bin * n_times + time];
  }

  /// Shape consistency, finite entries, increasing edges and times, sigma >= 0.
  void validate() const;
};

}  // namespace floc
