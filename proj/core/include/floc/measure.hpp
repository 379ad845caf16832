#pragma once

// Conditional probability measures F(x, y) on the atom grids F^{ML}: for
// each parent interval (q_{l-1}, q_l] a probability vector over the daughter
// atoms q_1..q_M that do not exceed q_l.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "floc/domain.hpp"

namespace floc {

enum class Representation {
  atomic_cdf,  // weights are point masses of the step CDF
  density,     // weights came from cell densities (density * dq = weight)
};

const char* to_string(Representation r) noexcept;
Representation representation_from_string(const std::string& s);

/// Ragged lower-triangular array: row r holds the entries for daughter atoms
/// 0..row_length(r)-1.
using TriangularArray = std::vector<std::vector<double>>;

struct Atom {
  double location;
  double weight;
};

/// Probability measure with finite support, atoms sorted by location and
/// coincident locations merged.
class FiniteMeasure {
 public:
  explicit FiniteMeasure(std::vector<Atom> atoms);

  static FiniteMeasure dirac(double location) { return FiniteMeasure({{location, 1.0}}); }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Right-continuous CDF.
  double cdf(double x) const;

 private:
  std::vector<Atom> atoms_;
};

class ConditionalMeasure {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  /// `rows` must have L entries; row r must have row_length(r) entries.
  /// Violations are reported with the first offending row (1-based).
  ConditionalMeasure(Grid daughter, Grid parent, TriangularArray rows,
                     Representation representation = Representation::atomic_cdf);

  const Grid& daughter_grid() const noexcept { return daughter_; }
  const Grid& parent_grid() const noexcept { return parent_; }
  std::size_t n_atoms() const noexcept { return daughter_.n_cells(); }
  std::size_t n_rows() const noexcept { return parent_.n_cells(); }
  Representation representation() const noexcept { return representation_; }

  /// Number of daughter atoms q_m <= q_l for parent row r (0-based).
  std::size_t row_length(std::size_t r) const noexcept { return rows_[r].size(); }
  std::span<const double> row(std::size_t r) const noexcept { return rows_[r]; }
  double weight(std::size_t r, std::size_t m) const noexcept {
    return m < rows_[r].size() ? rows_[r][m] : 0.0;
  }
  const TriangularArray& rows() const noexcept { return rows_; }

  /// Location of daughter atom m (0-based), the right node q_{m+1}.
  double atom(std::size_t m) const noexcept { return daughter_.right_node(m); }

  /// max_{l,m} p_{lm} / dq, the sup norm of the induced density.
  double max_density() const;

  /// Number of free weights, sum over rows of row_length.
  std::size_t n_weights() const;

  ConditionalMeasure with_rows(TriangularArray rows) const {
    return ConditionalMeasure(daughter_, parent_, std::move(rows), representation_);
  }

  bool operator==(const ConditionalMeasure&) const = default;

 private:
  Grid daughter_;
  Grid parent_;
  TriangularArray rows_;
  Representation representation_;
};

/// Admissible atom count for parent row r: #{m : q_m <= q_l}.
std::size_t admissible_atoms(const Grid& daughter, const Grid& parent, std::size_t r);

/// Throws InvalidInput naming the first violated row; used by constructors
/// and loaders.
void validate_rows(const Grid& daughter, const Grid& parent, const TriangularArray& rows);

/// Weights gamma_{lm} * dq, renormalized per row. `gamma` is L x M (entries
/// above the admissible triangle must be zero).
ConditionalMeasure from_density(const std::vector<std::vector<double>>& gamma,
                                const Grid& daughter, const Grid& parent);

/// Samples a density Gamma(x; y) at daughter cell midpoints for parent
/// y = q_l, then calls from_density.
ConditionalMeasure sample_density(const std::function<double(double, double)>& density,
                                  const Grid& daughter, const Grid& parent);

/// Exact F^{ML} projection of a continuous conditional CDF:
/// p_{lm} = F(q_m, q_l) - F(q_{m-1}, q_l), with F(q_l, q_l) = 1.
ConditionalMeasure from_cdf(const std::function<double(double, double)>& cdf,
                            const Grid& daughter, const Grid& parent);

/// Uniform in x for each parent: p_{lm} = 1 / row_length(l).
ConditionalMeasure uniform_measure(const Grid& daughter, const Grid& parent);

/// F(x, y): 1 for x >= y, otherwise the cumulative weight of the atoms of
/// the row containing y that lie at or below x.
double cdf(const ConditionalMeasure& F, double x, double y);

/// F(., y) as a finite measure; atoms of the row beyond y collapse onto y, so
/// the result agrees with cdf(F, ., y). y = 0 gives the Dirac mass at 0.
FiniteMeasure row_measure(const ConditionalMeasure& F, double y);

/// Re-expresses F on new grids by differencing cdf at the new atoms, parent
/// rows taken at their right nodes. Exact when the old atoms are new atoms.
ConditionalMeasure resample(const ConditionalMeasure& F, const Grid& daughter,
                            const Grid& parent);

}  // namespace floc
