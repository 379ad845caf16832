#pragma once

// File formats. Measures and metadata are JSON; tabular output is CSV with
// every number printed "%.17g".

#include <filesystem>
#include <iosfwd>
#include <string>

#include "floc/inverse.hpp"
#include "floc/measure.hpp"
#include "floc/observations.hpp"
#include "floc/study.hpp"

namespace floc {

std::string format_double(double v);

/// {"x_max", "M", "L", "representation", "weights"}; weights is the list of
/// rows, row l holding its admissible entries.
std::string measure_to_json(const ConditionalMeasure& F);
ConditionalMeasure measure_from_json(const std::string& text);
void save_measure(const std::filesystem::path& path, const ConditionalMeasure& F);
ConditionalMeasure load_measure(const std::filesystem::path& path);

/// Counts CSV (header `t,n_1,...,n_Nx`, one row per sample time) plus a JSON
/// sidecar with edges, times, sigma, seed and the CSV file name.
void save_observations(const std::filesystem::path& json_path, const ObservationSet& obs);
ObservationSet load_observations(const std::filesystem::path& json_path);

/// `iter,cost`.
void write_history_csv(std::ostream& os, const Estimate& estimate);
/// `N,error,cost,flagged`.
void write_error_curve_csv(std::ostream& os, const ErrorCurve& curve);
ErrorCurve read_error_curve_csv(std::istream& is);
/// |F0 - F| at the reference atoms: header `y,<x_1>,...,<x_M>`, one row per
/// reference parent node. Both measures must already live on the reference.
void write_abs_error_surface(std::ostream& os, const ConditionalMeasure& estimate,
                             const ConditionalMeasure& truth);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace floc
