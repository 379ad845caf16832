#include "floc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floc/error.hpp"

namespace floc {

namespace {

// Atom/parent comparisons allow for the last bit of node arithmetic.
bool at_or_below(double a, double b, double scale) { return a <= b + 1e-12 * scale; }

void check_same_domain(const Grid& a, const Grid& b, const char* what) {
  if (std::abs(a.x_max() - b.x_max()) > 1e-12 * a.x_max()) {
    throw InvalidInput(std::string(what) + ": grids cover different domains");
  }
}

}  // namespace

const char* to_string(Representation r) noexcept {
  return r == Representation::atomic_cdf ? "atomic-cdf" : "density";
}

Representation representation_from_string(const std::string& s) {
  if (s == "atomic-cdf") return Representation::atomic_cdf;
  if (s == "density") return Representation::density;
  throw InvalidInput("unknown representation '" + s + "'");
}

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.location)) throw InvalidInput("atom location is not finite");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw InvalidInput("atom weight must be finite and nonnegative");
    }
    total += a.weight;
    if (a.weight == 0.0) continue;
    if (!atoms_.empty() &&
        a.location - atoms_.back().location <= 1e-12 * std::max(1.0, std::abs(a.location))) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  if (std::abs(total - 1.0) > ConditionalMeasure::kRowSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "finite measure weights sum to " << total << ", not 1";
    throw InvalidInput(msg.str());
  }
}

double FiniteMeasure::cdf(double x) const {
  double sum = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location > x) break;
    sum += a.weight;
  }
  return std::min(sum, 1.0);
}

std::size_t admissible_atoms(const Grid& daughter, const Grid& parent, std::size_t r) {
  // q_m <= q_l  <=>  m * L <= l * M  on a shared domain.
  const std::size_t l = r + 1;
  return std::min(daughter.n_cells(), l * daughter.n_cells() / parent.n_cells());
}

void validate_rows(const Grid& daughter, const Grid& parent, const TriangularArray& rows) {
  check_same_domain(daughter, parent, "conditional measure");
  if (rows.size() != parent.n_cells()) {
    std::ostringstream msg;
    msg << "conditional measure has " << rows.size() << " rows, expected L = "
        << parent.n_cells();
    throw InvalidInput(msg.str());
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t len = admissible_atoms(daughter, parent, r);
    std::ostringstream where;
    where << "row " << r + 1 << ": ";
    if (len == 0) {
      throw InvalidInput(where.str() + "no daughter atom at or below the parent node (M < L)");
    }
    if (rows[r].size() != len) {
      std::ostringstream msg;
      msg << where.str() << "expected " << len << " lower-triangular entries, got "
          << rows[r].size();
      throw InvalidInput(msg.str());
    }
    double sum = 0.0;
    for (double w : rows[r]) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidInput(where.str() + "weights must be finite and nonnegative");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > ConditionalMeasure::kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << where.str() << "weights sum to " << sum << ", not 1";
      throw InvalidInput(msg.str());
    }
  }
}

ConditionalMeasure::ConditionalMeasure(Grid daughter, Grid parent, TriangularArray rows,
                                       Representation representation)
    : daughter_(std::move(daughter)),
      parent_(std::move(parent)),
      rows_(std::move(rows)),
      representation_(representation) {
  validate_rows(daughter_, parent_, rows_);
}

double ConditionalMeasure::max_density() const {
  double m = 0.0;
  for (const auto& row : rows_) {
    for (double w : row) m = std::max(m, w);
  }
  return m / daughter_.dx();
}

std::size_t ConditionalMeasure::n_weights() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.size();
  return n;
}

ConditionalMeasure from_density(const std::vector<std::vector<double>>& gamma,
                                const Grid& daughter, const Grid& parent) {
  check_same_domain(daughter, parent, "from_density");
  if (gamma.size() != parent.n_cells()) {
    throw InvalidInput("density array must have L rows");
  }
  const double dq = daughter.dx();
  TriangularArray rows(gamma.size());
  for (std::size_t r = 0; r < gamma.size(); ++r) {
    if (gamma[r].size() != daughter.n_cells()) {
      std::ostringstream msg;
      msg << "density row " << r + 1 << " must have M = " << daughter.n_cells() << " entries";
      throw InvalidInput(msg.str());
    }
    const std::size_t len = admissible_atoms(daughter, parent, r);
    double sum = 0.0;
    rows[r].resize(len);
    for (std::size_t m = 0; m < gamma[r].size(); ++m) {
      const double g = gamma[r][m];
      if (!(g >= 0.0) || !std::isfinite(g)) {
        std::ostringstream msg;
        msg << "density row " << r + 1 << " has a negative or non-finite value";
        throw InvalidInput(msg.str());
      }
      if (m >= len) {
        if (g != 0.0) {
          std::ostringstream msg;
          msg << "density row " << r + 1 << " has mass above the parent size";
          throw InvalidInput(msg.str());
        }
        continue;
      }
      rows[r][m] = g * dq;
      sum += rows[r][m];
    }
    if (!(sum > 0.0)) {
      std::ostringstream msg;
      msg << "density row " << r + 1 << " has no mass";
      throw InvalidInput(msg.str());
    }
    for (double& w : rows[r]) w /= sum;
  }
  return ConditionalMeasure(daughter, parent, std::move(rows), Representation::density);
}

ConditionalMeasure sample_density(const std::function<double(double, double)>& density,
                                  const Grid& daughter, const Grid& parent) {
  std::vector<std::vector<double>> gamma(parent.n_cells(),
                                         std::vector<double>(daughter.n_cells(), 0.0));
  for (std::size_t r = 0; r < parent.n_cells(); ++r) {
    const double y = parent.right_node(r);
    const std::size_t len = admissible_atoms(daughter, parent, r);
    for (std::size_t m = 0; m < len; ++m) gamma[r][m] = density(daughter.midpoint(m), y);
  }
  return from_density(gamma, daughter, parent);
}

ConditionalMeasure from_cdf(const std::function<double(double, double)>& cdf_fn,
                            const Grid& daughter, const Grid& parent) {
  check_same_domain(daughter, parent, "from_cdf");
  TriangularArray rows(parent.n_cells());
  for (std::size_t r = 0; r < parent.n_cells(); ++r) {
    const double y = parent.right_node(r);
    const std::size_t len = admissible_atoms(daughter, parent, r);
    if (len == 0) throw InvalidInput("from_cdf: parent grid finer than daughter grid");
    rows[r].resize(len);
    double previous = 0.0;
    double sum = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
      double c = m + 1 == len ? 1.0 : cdf_fn(daughter.right_node(m), y);
      if (!std::isfinite(c)) throw InvalidInput("from_cdf: CDF is not finite");
      c = std::clamp(c, previous, 1.0);
      rows[r][m] = c - previous;
      sum += rows[r][m];
      previous = c;
    }
    for (double& w : rows[r]) w /= sum;
  }
  return ConditionalMeasure(daughter, parent, std::move(rows), Representation::atomic_cdf);
}

ConditionalMeasure uniform_measure(const Grid& daughter, const Grid& parent) {
  check_same_domain(daughter, parent, "uniform_measure");
  TriangularArray rows(parent.n_cells());
  for (std::size_t r = 0; r < parent.n_cells(); ++r) {
    const std::size_t len = admissible_atoms(daughter, parent, r);
    rows[r].assign(len, 1.0 / static_cast<double>(len));
  }
  return ConditionalMeasure(daughter, parent, std::move(rows), Representation::atomic_cdf);
}

namespace {

void check_point(const ConditionalMeasure& F, double x, double y) {
  const double xm = F.parent_grid().x_max();
  const double slack = 1e-12 * xm;
  if (!(x >= -slack && x <= xm + slack && y >= -slack && y <= xm + slack)) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") outside Q x Q";
    throw InvalidInput(msg.str());
  }
}

}  // namespace

double cdf(const ConditionalMeasure& F, double x, double y) {
  check_point(F, x, y);
  if (x >= y) return 1.0;
  const std::size_t r = F.parent_grid().cell_containing(std::max(y, 0.0));
  const double scale = F.daughter_grid().x_max();
  double sum = 0.0;
  for (std::size_t m = 0; m < F.row_length(r); ++m) {
    if (!at_or_below(F.atom(m), x, scale)) break;
    sum += F.weight(r, m);
  }
  return std::min(sum, 1.0);
}

FiniteMeasure row_measure(const ConditionalMeasure& F, double y) {
  check_point(F, 0.0, y);
  if (y <= 0.0) return FiniteMeasure::dirac(0.0);
  const std::size_t r = F.parent_grid().cell_containing(y);
  const double scale = F.daughter_grid().x_max();
  std::vector<Atom> atoms;
  atoms.reserve(F.row_length(r));
  for (std::size_t m = 0; m < F.row_length(r); ++m) {
    const double q = F.atom(m);
    atoms.push_back({at_or_below(q, y, scale) ? q : y, F.weight(r, m)});
  }
  return FiniteMeasure(std::move(atoms));
}

ConditionalMeasure resample(const ConditionalMeasure& F, const Grid& daughter,
                            const Grid& parent) {
  check_same_domain(F.daughter_grid(), daughter, "resample");
  check_same_domain(daughter, parent, "resample");
  TriangularArray rows(parent.n_cells());
  for (std::size_t r = 0; r < parent.n_cells(); ++r) {
    const double y = parent.right_node(r);
    const std::size_t len = admissible_atoms(daughter, parent, r);
    if (len == 0) throw InvalidInput("resample: parent grid finer than daughter grid");
    rows[r].resize(len);
    double previous = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
      const double c = m + 1 == len ? 1.0 : std::max(previous, cdf(F, daughter.right_node(m), y));
      rows[r][m] = c - previous;
      previous = c;
    }
  }
  return ConditionalMeasure(daughter, parent, std::move(rows), Representation::atomic_cdf);
}

}  // namespace floc
