#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "floc/study.hpp"

namespace floc {

struct ExperimentConfig {
  /// "beta22", "arcsine", or a path to a measure JSON file (resampled onto
  /// each study grid).
  std::string truth = "beta22";
  ModelParameters model;
  std::vector<std::size_t> n_values{5, 10, 15, 20};
  std::size_t n_cells = 8;  // single-N commands
  double sigma = 0.0;
  std::uint64_t rng_seed = 0;
  std::string output_dir = "out";
  std::size_t extra_times = 40;
  std::size_t reference_atoms = 240;
  MinimizeOptions minimize;
  DiagonalGain diagonal = DiagonalGain::include;

  /// n_values nonempty and increasing (each >= 2), rates >= 0, t_f > 0.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
/// Every field, including solver options; readable by config_from_json.
std::string config_to_json(const ExperimentConfig& config);

TruthGenerator make_truth_generator(const std::string& truth);

struct ExperimentReport {
  StudyResult result;
  std::vector<std::filesystem::path> files;
  bool all_legs_ok = true;
};

/// Runs the refinement study and writes into config.output_dir:
///   manifest.json                 full configuration (re-runnable)
///   error_curve.csv               N,error,cost,flagged
///   estimate_N<N>.json            fitted measure
///   estimate_N<N>_history.csv     iter,cost
///   abs_error_N<N>.csv            |F0 - F_N| on the reference grid
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace floc
