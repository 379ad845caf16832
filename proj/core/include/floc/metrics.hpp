#pragma once

#include <span>
#include <string>

#include "floc/measure.hpp"

namespace floc {

enum class MetricMode { prohorov, levy, kolmogorov };
enum class SetDistanceMode { pairwise_inf, hausdorff };

MetricMode metric_mode_from_string(const std::string& s);
const char* to_string(MetricMode m) noexcept;

inline constexpr double kDefaultProhorovTolerance = 1e-6;

/// Prohorov distance between finite-support probability measures on the
/// line.
///
/// Bisection on eps over [0, 1]. For fixed eps, Strassen's theorem reduces
/// the two-sided eps-condition to the existence of a coupling that moves at
/// most eps of the mass farther than eps; that is decided by a max-flow on
/// the bipartite graph linking atoms at distance <= eps (feasible iff the
/// flow reaches 1 - eps). Returns the upper end of the final bracket, so the
/// result overestimates the true distance by at most `tol`.
double prohorov(const FiniteMeasure& mu, const FiniteMeasure& nu,
                double tol = kDefaultProhorovTolerance);

/// Levy distance, exact from the two step CDFs.
double levy(const FiniteMeasure& mu, const FiniteMeasure& nu);

/// sup_x |F_mu(x) - F_nu(x)|.
double kolmogorov(const FiniteMeasure& mu, const FiniteMeasure& nu);

/// sup_A |mu(A) - nu(A)|.
double total_variation(const FiniteMeasure& mu, const FiniteMeasure& nu);

/// sup over (x, y) of |F(x, y) - G(x, y)| over the common refinement of both
/// measures' atom and parent grids.
double kolmogorov(const ConditionalMeasure& F, const ConditionalMeasure& G);

/// max over the rows of the common parent refinement of the chosen per-row
/// metric.
double conditional_distance(const ConditionalMeasure& F, const ConditionalMeasure& G,
                            MetricMode mode, double tol = kDefaultProhorovTolerance);

/// pairwise_inf: min over pairs; hausdorff: max of the two directed sup-inf
/// distances.
double set_distance(std::span<const ConditionalMeasure> a,
                    std::span<const ConditionalMeasure> b, SetDistanceMode mode,
                    MetricMode metric = MetricMode::prohorov,
                    double tol = kDefaultProhorovTolerance);

}  // namespace floc
