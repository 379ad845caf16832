#pragma once

// Least-squares identification of the conditional measure over the product
// of row simplices.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "floc/measure.hpp"
#include "floc/observations.hpp"
#include "floc/synthetic.hpp"

namespace floc {

struct InverseSetup {
  ExperimentGeometry geometry;
  ObservationSet observations;

  /// Observation shape matches the geometry's bins and times; edges and
  /// times are in range.
  void validate() const;
};

/// Model counts for `gamma` under the setup geometry, bin-major.
std::vector<double> model_counts(const ConditionalMeasure& gamma, const InverseSetup& setup);

/// J(F) = sum_i sum_j (model_ji - n_ji)^2.
double cost(const ConditionalMeasure& gamma, const InverseSetup& setup);

inline constexpr double kDefaultGradientStep = 1e-5;

/// Central differences in every admissible weight. Each perturbed row is
/// projected back onto its simplex before the forward solve, so the result
/// is the derivative along the feasible set. Forward solves run on up to
/// `threads` threads (0 = hardware concurrency).
TriangularArray cost_gradient(const ConditionalMeasure& gamma, const InverseSetup& setup,
                              double h = kDefaultGradientStep, std::size_t threads = 0);

/// Euclidean projection onto {p >= 0, sum p = 1} (sort-and-threshold).
std::vector<double> simplex_project(std::span<const double> v);

/// Exact derivative of model_counts with respect to the raw weights, by
/// forward-mode differentiation of the RK4 steps. Row-major: entry
/// [k * n_weights + w] is d count_k / d weight_w, counts bin-major and
/// weights in flatten() order.
std::vector<double> model_jacobian(const ConditionalMeasure& gamma, const InverseSetup& setup);

enum class Method {
  projected_gradient,  // Armijo backtracking along the projected gradient
  gauss_newton,        // damped Gauss-Newton, simplex-constrained subproblem
};

const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& s);

enum class StepRule {
  fixed,              // every iteration starts from initial_step
  barzilai_borwein,   // BB1 step from the last two iterates, clamped
};

struct MinimizeOptions {
  Method method = Method::gauss_newton;
  std::size_t max_iters = 500;
  double tol_cost = 1e-8;       // relative decrease between iterations
  double tol_grad = 1e-6;       // sup norm of x - P(x - g)
  double tol_abs_cost = 1e-20;  // cost considered zero
  double initial_step = 0.0;    // <= 0: 0.1 / |g|_inf on the first iteration
  StepRule step_rule = StepRule::barzilai_borwein;
  double armijo = 1e-4;
  std::size_t max_backtracks = 60;
  double gradient_step = kDefaultGradientStep;
  std::size_t threads = 0;
  double damping = 1e-8;  // gauss_newton: initial Levenberg parameter, relative to max diag(J'J)
};

struct Estimate {
  ConditionalMeasure measure;
  double cost = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> history;  // cost of each accepted iterate, starting at the seed
};

/// Minimizes J over the product of row simplices from a feasible seed.
/// projected_gradient: Armijo backtracking (halving) along the projected
/// finite-difference gradient. gauss_newton: each step solves the damped
/// linearized least-squares problem exactly over the simplices (primal
/// active set) and is accepted only if J decreases. Either way the history
/// is nonincreasing and every iterate is feasible.
Estimate minimize(const InverseSetup& setup, const ConditionalMeasure& seed,
                  const MinimizeOptions& options = {});

/// Flattens / unflattens the admissible weights row by row.
std::vector<double> flatten(const TriangularArray& rows);
TriangularArray unflatten(std::span<const double> flat, const ConditionalMeasure& shape);

}  // namespace floc
