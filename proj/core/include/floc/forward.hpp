#pragma once

// Semi-discrete flocculation model: b_t = pi^N (A[b] + B[b; F] + R[b]) on
// the uniform grid, with kernels evaluated at the right cell nodes.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "floc/domain.hpp"
#include "floc/measure.hpp"
#include "floc/observations.hpp"

namespace floc {

/// Whether the breakage gain into cell i includes parents from cell i itself
/// (weight p_ii). Excluding it transcribes the displayed scheme literally but
/// loses the daughters of every cell-1 parent, so count production is no
/// longer (1/2) int k_f b.
enum class DiagonalGain { include, exclude };

/// Kernel values at the grid nodes, computed once per (grid, kernels).
class Discretization {
 public:
  Discretization(Grid grid, const KernelSet& kernels,
                 DiagonalGain diagonal = DiagonalGain::include);

  const Grid& grid() const noexcept { return grid_; }
  const KernelSupNorms& sup_norms() const noexcept { return sup_; }
  DiagonalGain diagonal_gain() const noexcept { return diagonal_; }

  double aggregation(std::size_t i, std::size_t j) const noexcept {
    return aggregation_[i * grid_.n_cells() + j];
  }
  double fragmentation(std::size_t i) const noexcept { return fragmentation_[i]; }
  double removal(std::size_t i) const noexcept { return removal_[i]; }

  void aggregation_rhs(std::span<const double> alpha, std::span<double> out) const;
  /// Accumulates into `out` when `accumulate` is set.
  void breakage_removal_rhs(std::span<const double> alpha, const ConditionalMeasure& gamma,
                            std::span<double> out, bool accumulate = false) const;
  void rhs(std::span<const double> alpha, const ConditionalMeasure& gamma,
           std::span<double> out) const;

  /// Raw-weight variants: rows need the admissible lengths but are not
  /// required to be probability vectors (used for sensitivities).
  void breakage_removal_rhs(std::span<const double> alpha, const TriangularArray& rows,
                            std::span<double> out, bool accumulate = false) const;
  void rhs(std::span<const double> alpha, const TriangularArray& rows,
           std::span<double> out) const;

  /// Throws InvalidInput unless gamma's daughter and parent grids are this grid.
  void check_compatible(const ConditionalMeasure& gamma) const;

 private:
  Grid grid_;
  KernelSupNorms sup_;
  DiagonalGain diagonal_;
  std::vector<double> aggregation_;
  std::vector<double> fragmentation_;
  std::vector<double> removal_;
};

std::vector<double> aggregation_rhs(const SizeDistribution& b, const KernelSet& k);
std::vector<double> breakage_removal_rhs(const SizeDistribution& b,
                                         const ConditionalMeasure& gamma, const KernelSet& k,
                                         DiagonalGain diagonal = DiagonalGain::include);
std::vector<double> rhs(const SizeDistribution& b, const ConditionalMeasure& gamma,
                        const KernelSet& k, DiagonalGain diagonal = DiagonalGain::include);

struct IntegrationOptions {
  /// Keep every `stride`-th step (the final state is always kept).
  std::size_t stride = 1;
  /// Negativity warning fires when some alpha < -floor * max alpha.
  double negativity_floor = 1e-10;
};

struct Trajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  double min_coefficient = 0.0;
  bool negativity_warning = false;

  std::size_t size() const noexcept { return times.size(); }
  double final_time() const { return times.back(); }
  SizeDistribution state(std::size_t k) const {
    return SizeDistribution::unchecked(grid, states[k]);
  }
  /// Linear interpolation between stored steps.
  std::vector<double> state_at(double t) const;
};

/// Classical RK4 with fixed step t_f / n_steps. t_f == 0 returns [b0].
Trajectory integrate(const Discretization& disc, const SizeDistribution& b0,
                     const ConditionalMeasure& gamma, double t_f, std::size_t n_steps,
                     const IntegrationOptions& options = {});
Trajectory integrate(const SizeDistribution& b0, const ConditionalMeasure& gamma,
                     const KernelSet& k, double t_f, std::size_t n_steps,
                     const IntegrationOptions& options = {});
/// integrate with raw weights (row lengths checked, row sums not).
Trajectory integrate_weights(const Discretization& disc, const SizeDistribution& b0,
                             const TriangularArray& rows, double t_f, std::size_t n_steps,
                             const IntegrationOptions& options = {});

/// Lipschitz constants of the discrete right-hand side along a trajectory.
struct DiagnosticBounds {
  double c0 = 0.0;      // sup |b^N(t, x)|
  double c1 = 0.0;      // 3 x_max c0 |k_a| + |mu|
  double c_frag = 0.0;  // |k_f|
  double lipschitz_c = 0.0;
};

DiagnosticBounds diagnostic_bounds(const Trajectory& traj, const KernelSupNorms& sup,
                                   const ConditionalMeasure& gamma);
/// Same constants with c0 supplied directly.
DiagnosticBounds diagnostic_bounds(double c0, double x_max, const KernelSupNorms& sup,
                                   const ConditionalMeasure& gamma);

/// n_ji = integral of b(t_i, .) over bin j. Bin edges must lie in [0, x_max]
/// and sample times in the trajectory span.
ObservationSet partial_moments(const Trajectory& traj, std::span<const double> bin_edges,
                               std::span<const double> sample_times);

/// Header `t,x_1,...,x_N` (x_j the right nodes), one row per stored step,
/// "%.17g".
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace floc
