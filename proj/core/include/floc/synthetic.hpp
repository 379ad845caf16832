#pragma once

// Pseudo-data for the identification experiments: the two Beta-shaped
// post-fragmentation truths, the model geometry shared by data generation
// and inversion, and seeded Gaussian observation noise.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "floc/domain.hpp"
#include "floc/forward.hpp"
#include "floc/measure.hpp"
#include "floc/observations.hpp"

namespace floc {

enum class TruthKind { beta22, arcsine };

TruthKind truth_kind_from_string(const std::string& s);
const char* to_string(TruthKind k) noexcept;

/// Gamma(x; y): 6x(y-x)/y^3 (Beta(2,2) on [0, y]) or 1/(pi sqrt(x(y-x)))
/// (Beta(1/2,1/2)), zero for x > y. The arcsine density is infinite at
/// x = 0 and x = y.
double truth_density(TruthKind kind, double x, double y);

/// F(x, y) = integral_0^x Gamma(s; y) ds, 1 for x >= y.
double truth_cdf(TruthKind kind, double x, double y);

/// F^{ML} projection of a truth family on the given grids.
ConditionalMeasure truth_measure(TruthKind kind, const Grid& daughter, const Grid& parent);

/// Model coefficients; defaults are the reference flocculation configuration.
struct ModelParameters {
  double c_a = 1e-6;
  double c_f = 1e-1;
  double c_mu = 1e-1;
  double x_max = 1.0;
  double t_f = 1.0;
  std::size_t n_steps = 200;
  double b0_amplitude = 1e3;  // b0(x) = amplitude * exp(-rate * x)
  double b0_rate = 1.0;
};

/// Everything about an experiment except the measure and the data.
struct ExperimentGeometry {
  Discretization disc;
  SizeDistribution b0;
  double t_f;
  std::size_t n_steps;
  std::vector<double> bin_edges;
  std::vector<double> sample_times;
};

/// N cells, bins aligned to the cells, N_t sample times t_i = i t_f / N_t,
/// i = 1..N_t.
ExperimentGeometry make_geometry(const ModelParameters& params, std::size_t n_cells,
                                 std::size_t n_times,
                                 DiagonalGain diagonal = DiagonalGain::include);

/// Standard normal deviates from std::mt19937_64 via the Marsaglia polar
/// method. Uniforms are (engine() >> 11) * 2^-53, so the stream depends only
/// on the seed, not on the standard library's distribution implementations.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  double uniform();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Forward solve with the truth, bin the solution, add i.i.d. N(0, sigma^2)
/// noise in bin-major order. The seed is recorded even when sigma = 0.
ObservationSet generate_data(const ConditionalMeasure& truth, const ExperimentGeometry& geometry,
                             double sigma, std::uint64_t rng_seed);

/// splitmix64 finalizer; used to derive per-leg seeds from a study seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace floc
