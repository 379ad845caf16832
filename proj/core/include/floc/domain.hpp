#pragma once

// Size-domain discretization: the uniform grid on Q = [0, x_max], piecewise
// constant size distributions on it, the cell-average projection, and the
// rate kernels that drive the population balance.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace floc {

/// Uniform partition 0 = x_0 < x_1 < ... < x_N = x_max.
///
/// Cells are indexed 0..N-1 in code; cell c covers [x_c, x_{c+1}] and its
/// representative node is the right endpoint x_{c+1}.
class Grid {
 public:
  Grid(std::size_t n_cells, double x_max);

  std::size_t n_cells() const noexcept { return n_cells_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return x_max_ / static_cast<double>(n_cells_); }

  /// x_j for j in [0, N]. Computed as x_max * j / N so that equal rationals
  /// on different grids give bit-identical nodes.
  double node(std::size_t j) const noexcept {
    return x_max_ * static_cast<double>(j) / static_cast<double>(n_cells_);
  }
  double right_node(std::size_t cell) const noexcept { return node(cell + 1); }
  double midpoint(std::size_t cell) const noexcept {
    return 0.5 * (node(cell) + node(cell + 1));
  }
  std::vector<double> nodes() const;

  /// Cell whose half-open interval (x_c, x_{c+1}] contains y; y = 0 maps to
  /// cell 0. Values within 1e-9 relative of a node snap to it.
  std::size_t cell_containing(double y) const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_cells_;
  double x_max_;
};

Grid make_grid(std::size_t n_cells, double x_max);

/// b(t, .) in H^N as cell densities alpha_c (number per unit volume per unit
/// size).
class SizeDistribution {
 public:
  /// Checked: rejects negative or non-finite coefficients.
  SizeDistribution(Grid grid, std::vector<double> alpha);

  /// For solver output, where small negative excursions are monitored but
  /// tolerated.
  static SizeDistribution unchecked(Grid grid, std::vector<double> alpha);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double operator[](std::size_t c) const { return alpha_[c]; }

  /// Piecewise-constant evaluation; points on an interior node take the left
  /// cell.
  double operator()(double x) const;

 private:
  struct NoCheck {};
  SizeDistribution(Grid grid, std::vector<double> alpha, NoCheck);

  Grid grid_;
  std::vector<double> alpha_;
};

/// Cell averages by composite midpoint quadrature with `subsamples` points
/// per cell.
SizeDistribution project(const std::function<double(double)>& f, const Grid& grid,
                         std::size_t subsamples = 16);

double zeroth_moment(const SizeDistribution& b);
/// Exact integral of x * b(x) for the piecewise-constant b.
double first_moment(const SizeDistribution& b);
/// dx * sum x_{c+1} alpha_c, the moment the scheme's node evaluation conserves.
double nodal_first_moment(const SizeDistribution& b);

/// L1 distance between two piecewise-constant functions on grids sharing
/// x_max (integrated over the common refinement).
double l1_distance(const SizeDistribution& a, const SizeDistribution& b);
double l1_norm(const SizeDistribution& b);

struct KernelSupNorms {
  double aggregation = 0.0;
  double fragmentation = 0.0;
  double removal = 0.0;
};

/// k_a(x, y), k_f(x), mu(x) on Q together with cached sup norms.
struct KernelSet {
  std::function<double(double, double)> aggregation;
  std::function<double(double)> fragmentation;
  std::function<double(double)> removal;
  double x_max = 1.0;
  KernelSupNorms sup;
};

/// Wraps user kernels. Sup norms are estimated on a (resolution+1)^2 sample of
/// Q x Q; symmetry, truncation above x + y > x_max, nonnegativity and
/// finiteness are checked on the same sample.
KernelSet make_kernels(std::function<double(double, double)> aggregation,
                       std::function<double(double)> fragmentation,
                       std::function<double(double)> removal, double x_max,
                       std::size_t resolution = 64);

/// Orthokinetic aggregation c_a (x^{1/3} + y^{1/3})^3, zero on x + y >= x_max;
/// k_f = c_f x^{1/3}; mu = c_mu x^{1/3}.
KernelSet builtin_kernels(double c_a, double c_f, double c_mu, double x_max);

}  // namespace floc
