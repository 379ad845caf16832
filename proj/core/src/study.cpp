#include "floc/study.hpp"

#include <cmath>
#include <limits>

#include "floc/error.hpp"
#include "floc/metrics.hpp"

namespace floc {

std::vector<bool> flag_decreasing(const std::vector<double>& errors) {
  std::vector<bool> flagged(errors.size(), false);
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (std::isfinite(errors[k]) && errors[k] < last) {
      flagged[k] = true;
      last = errors[k];
    }
  }
  return flagged;
}

double uniform_error(const ConditionalMeasure& estimate, const ConditionalMeasure& truth,
                     const Grid& reference) {
  return kolmogorov(resample(estimate, reference, reference), resample(truth, reference, reference));
}

std::uint64_t leg_seed(std::uint64_t rng_seed, std::size_t n) noexcept {
  return mix_seed(rng_seed, n);
}

StudyResult refinement_study(const TruthGenerator& truth, const StudyOptions& options) {
  if (options.n_values.empty()) throw InvalidInput("study needs at least one N");
  if (options.reference_atoms == 0) throw InvalidInput("reference grid needs atoms");
  if (!truth) throw InvalidInput("study needs a truth generator");

  StudyResult result{{}, {}, Grid(options.reference_atoms, options.model.x_max)};
  for (std::size_t n : options.n_values) {
    StudyLeg leg;
    leg.n = n;
    leg.data_seed = leg_seed(options.rng_seed, n);
    leg.error = std::numeric_limits<double>::quiet_NaN();
    leg.seed_error = std::numeric_limits<double>::quiet_NaN();
    double leg_cost = std::numeric_limits<double>::quiet_NaN();
    try {
      const ExperimentGeometry geometry =
          make_geometry(options.model, n, n + options.extra_times, options.diagonal);
      const Grid& grid = geometry.disc.grid();
      leg.truth = truth(grid, grid);
      leg.observations = generate_data(*leg.truth, geometry, options.sigma, leg.data_seed);
      leg.seed_measure = uniform_measure(grid, grid);
      const InverseSetup setup{geometry, *leg.observations};
      leg.estimate = minimize(setup, *leg.seed_measure, options.minimize);
      leg.error = uniform_error(leg.estimate->measure, *leg.truth, result.reference);
      leg.seed_error = uniform_error(*leg.seed_measure, *leg.truth, result.reference);
      leg_cost = leg.estimate->cost;
    } catch (const std::exception& e) {
      leg.failure = e.what();
      leg.error = std::numeric_limits<double>::quiet_NaN();
    }
    result.curve.n_values.push_back(n);
    result.curve.errors.push_back(leg.error);
    result.curve.costs.push_back(leg_cost);
    result.legs.push_back(std::move(leg));
  }
  result.curve.flagged = flag_decreasing(result.curve.errors);
  return result;
}

}  // namespace floc
