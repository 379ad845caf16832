#include "floc/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "floc/error.hpp"

namespace floc {

TruthKind truth_kind_from_string(const std::string& s) {
  if (s == "beta22") return TruthKind::beta22;
  if (s == "arcsine") return TruthKind::arcsine;
  throw InvalidInput("unknown truth family '" + s + "' (expected beta22 or arcsine)");
}

const char* to_string(TruthKind k) noexcept {
  return k == TruthKind::beta22 ? "beta22" : "arcsine";
}

double truth_density(TruthKind kind, double x, double y) {
  if (!(y > 0.0)) throw InvalidInput("truth density needs a positive parent size");
  if (!(x >= 0.0)) throw InvalidInput("truth density needs a nonnegative daughter size");
  if (x > y) return 0.0;
  switch (kind) {
    case TruthKind::beta22: return 6.0 * x * (y - x) / (y * y * y);
    case TruthKind::arcsine: return 1.0 / (std::numbers::pi * std::sqrt(x * (y - x)));
  }
  return 0.0;
}

double truth_cdf(TruthKind kind, double x, double y) {
  if (x >= y) return 1.0;
  if (x <= 0.0) return 0.0;
  const double u = x / y;
  switch (kind) {
    case TruthKind::beta22: return u * u * (3.0 - 2.0 * u);
    case TruthKind::arcsine: return 2.0 / std::numbers::pi * std::asin(std::sqrt(u));
  }
  return 0.0;
}

ConditionalMeasure truth_measure(TruthKind kind, const Grid& daughter, const Grid& parent) {
  return from_cdf([kind](double x, double y) { return truth_cdf(kind, x, y); }, daughter,
                  parent);
}

ExperimentGeometry make_geometry(const ModelParameters& p, std::size_t n_cells,
                                 std::size_t n_times, DiagonalGain diagonal) {
  if (!(p.t_f > 0.0)) throw InvalidInput("final time must be positive");
  if (p.n_steps == 0) throw InvalidInput("n_steps must be positive");
  if (n_times == 0) throw InvalidInput("need at least one observation time");
  Grid grid(n_cells, p.x_max);
  const KernelSet kernels = builtin_kernels(p.c_a, p.c_f, p.c_mu, p.x_max);
  const double amplitude = p.b0_amplitude;
  const double rate = p.b0_rate;
  const SizeDistribution projected =
      project([=](double x) { return amplitude * std::exp(-rate * x); }, grid);
  SizeDistribution b0(grid, {projected.alpha().begin(), projected.alpha().end()});
  std::vector<double> times(n_times);
  for (std::size_t i = 0; i < n_times; ++i) {
    times[i] = p.t_f * static_cast<double>(i + 1) / static_cast<double>(n_times);
  }
  return ExperimentGeometry{Discretization(grid, kernels, diagonal), std::move(b0), p.t_f,
                            p.n_steps, grid.nodes(), std::move(times)};
}

double NormalStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

ObservationSet generate_data(const ConditionalMeasure& truth, const ExperimentGeometry& geometry,
                             double sigma, std::uint64_t rng_seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be >= 0");
  const Trajectory traj =
      integrate(geometry.disc, geometry.b0, truth, geometry.t_f, geometry.n_steps);
  ObservationSet obs = partial_moments(traj, geometry.bin_edges, geometry.sample_times);
  obs.noise_sigma = sigma;
  obs.rng_seed = rng_seed;
  if (sigma > 0.0) {
    NormalStream noise(rng_seed);
    for (double& c : obs.counts) c += sigma * noise();
  }
  return obs;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace floc
