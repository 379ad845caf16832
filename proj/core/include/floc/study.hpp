#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floc/inverse.hpp"
#include "floc/measure.hpp"
#include "floc/synthetic.hpp"

namespace floc {

/// Produces the truth on an N x N grid pair.
using TruthGenerator = std::function<ConditionalMeasure(const Grid& daughter, const Grid& parent)>;

struct StudyOptions {
  ModelParameters model;
  std::vector<std::size_t> n_values;
  double sigma = 0.0;
  std::uint64_t rng_seed = 0;
  std::size_t extra_times = 40;  // N_t = N + extra_times
  std::size_t reference_atoms = 240;
  MinimizeOptions minimize;
  DiagonalGain diagonal = DiagonalGain::include;
};

struct StudyLeg {
  std::size_t n = 0;
  std::uint64_t data_seed = 0;
  std::optional<ConditionalMeasure> truth;
  std::optional<ConditionalMeasure> seed_measure;
  std::optional<ObservationSet> observations;
  std::optional<Estimate> estimate;
  double error = 0.0;       // uniform error of the estimate
  double seed_error = 0.0;  // same quantity for the uniform seed
  std::string failure;      // empty on success
};

struct ErrorCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> errors;
  std::vector<double> costs;
  std::vector<bool> flagged;
};

struct StudyResult {
  ErrorCurve curve;
  std::vector<StudyLeg> legs;
  Grid reference;
};

/// Greedy scan keeping each finite error strictly below the last kept one.
std::vector<bool> flag_decreasing(const std::vector<double>& errors);

/// Uniform error between an estimate and the truth it was fitted to: both
/// are lifted onto the reference grid (reference_atoms atoms and rows) and
/// compared with the conditional Kolmogorov distance.
double uniform_error(const ConditionalMeasure& estimate, const ConditionalMeasure& truth,
                     const Grid& reference);

/// Data seed for leg N: mix_seed(rng_seed, N).
std::uint64_t leg_seed(std::uint64_t rng_seed, std::size_t n) noexcept;

/// For each N: M = L = N_x = N, N_t = N + extra_times, data from the truth on
/// that grid, minimize from the uniform seed, record the uniform error. A
/// failing leg is recorded (error NaN) and the study continues.
StudyResult refinement_study(const TruthGenerator& truth, const StudyOptions& options);

}  // namespace floc
