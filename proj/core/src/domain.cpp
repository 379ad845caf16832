#include "floc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floc/error.hpp"

namespace floc {

Grid::Grid(std::size_t n_cells, double x_max) : n_cells_(n_cells), x_max_(x_max) {
  if (n_cells == 0) throw InvalidInput("grid needs at least one cell");
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw InvalidInput("grid x_max must be positive and finite");
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_cells_ + 1);
  for (std::size_t j = 0; j <= n_cells_; ++j) out[j] = node(j);
  return out;
}

std::size_t Grid::cell_containing(double y) const {
  if (!(y >= 0.0) || y > x_max_ * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "point " << y << " outside [0, " << x_max_ << "]";
    throw InvalidInput(msg.str());
  }
  const double k = y * static_cast<double>(n_cells_) / x_max_;
  const double nearest = std::round(k);
  double index = std::abs(k - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::ceil(k);
  if (index < 1.0) index = 1.0;
  return std::min(static_cast<std::size_t>(index), n_cells_) - 1;
}

Grid make_grid(std::size_t n_cells, double x_max) { return Grid(n_cells, x_max); }

SizeDistribution::SizeDistribution(Grid grid, std::vector<double> alpha)
    : SizeDistribution(std::move(grid), std::move(alpha), NoCheck{}) {
  for (std::size_t c = 0; c < alpha_.size(); ++c) {
    if (!(alpha_[c] >= 0.0)) {
      std::ostringstream msg;
      msg << "size distribution coefficient " << c + 1 << " is negative or not finite ("
          << alpha_[c] << ")";
      throw InvalidInput(msg.str());
    }
  }
}

SizeDistribution::SizeDistribution(Grid grid, std::vector<double> alpha, NoCheck)
    : grid_(std::move(grid)), alpha_(std::move(alpha)) {
  if (alpha_.size() != grid_.n_cells()) {
    throw InvalidInput("size distribution length does not match the grid");
  }
  for (double a : alpha_) {
    if (!std::isfinite(a)) throw InvalidInput("size distribution has a non-finite coefficient");
  }
}

SizeDistribution SizeDistribution::unchecked(Grid grid, std::vector<double> alpha) {
  return SizeDistribution(std::move(grid), std::move(alpha), NoCheck{});
}

double SizeDistribution::operator()(double x) const {
  if (x <= 0.0) return alpha_.front();
  return alpha_[grid_.cell_containing(std::min(x, grid_.x_max()))];
}

SizeDistribution project(const std::function<double(double)>& f, const Grid& grid,
                         std::size_t subsamples) {
  if (subsamples == 0) throw InvalidInput("projection needs at least one subsample per cell");
  const std::size_t n = grid.n_cells();
  const double h = grid.dx() / static_cast<double>(subsamples);
  std::vector<double> alpha(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double left = grid.node(c);
    double sum = 0.0;
    for (std::size_t s = 0; s < subsamples; ++s) {
      const double x = left + (static_cast<double>(s) + 0.5) * h;
      const double v = f(x);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "projected function is not finite at x = " << x;
        throw InvalidInput(msg.str());
      }
      sum += v;
    }
    alpha[c] = sum / static_cast<double>(subsamples);
  }
  return SizeDistribution::unchecked(grid, std::move(alpha));
}

double zeroth_moment(const SizeDistribution& b) {
  double sum = 0.0;
  for (double a : b.alpha()) sum += a;
  return sum * b.grid().dx();
}

double first_moment(const SizeDistribution& b) {
  const Grid& g = b.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) sum += g.midpoint(c) * b[c];
  return sum * g.dx();
}

double nodal_first_moment(const SizeDistribution& b) {
  const Grid& g = b.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) sum += g.right_node(c) * b[c];
  return sum * g.dx();
}

double l1_norm(const SizeDistribution& b) {
  double sum = 0.0;
  for (double a : b.alpha()) sum += std::abs(a);
  return sum * b.grid().dx();
}

double l1_distance(const SizeDistribution& a, const SizeDistribution& b) {
  const Grid& ga = a.grid();
  const Grid& gb = b.grid();
  if (std::abs(ga.x_max() - gb.x_max()) > 1e-12 * ga.x_max()) {
    throw InvalidInput("l1_distance: grids cover different domains");
  }
  // Sweep the merged breakpoints.
  std::size_t ia = 0;
  std::size_t ib = 0;
  double left = 0.0;
  double sum = 0.0;
  while (ia < ga.n_cells() && ib < gb.n_cells()) {
    const double ra = ga.right_node(ia);
    const double rb = gb.right_node(ib);
    const double right = std::min(ra, rb);
    sum += std::abs(a[ia] - b[ib]) * (right - left);
    left = right;
    if (ra <= right) ++ia;
    if (rb <= right) ++ib;
  }
  return sum;
}

namespace {

void check_kernel_samples(const KernelSet& k, std::size_t resolution) {
  const double xm = k.x_max;
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double x = xm * static_cast<double>(i) / static_cast<double>(resolution);
    const double kf = k.fragmentation(x);
    const double mu = k.removal(x);
    if (!(kf >= 0.0) || !std::isfinite(kf)) {
      throw InvalidInput("fragmentation rate must be finite and nonnegative");
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
      throw InvalidInput("removal rate must be finite and nonnegative");
    }
    for (std::size_t j = 0; j <= resolution; ++j) {
      const double y = xm * static_cast<double>(j) / static_cast<double>(resolution);
      const double kxy = k.aggregation(x, y);
      if (!(kxy >= 0.0) || !std::isfinite(kxy)) {
        throw InvalidInput("aggregation kernel must be finite and nonnegative");
      }
      if (std::abs(kxy - k.aggregation(y, x)) > 1e-12 * kxy) {
        throw InvalidInput("aggregation kernel is not symmetric");
      }
      if (x + y > xm * (1.0 + 1e-12) && kxy != 0.0) {
        throw InvalidInput("aggregation kernel must vanish for x + y > x_max");
      }
    }
  }
}

}  // namespace

KernelSet make_kernels(std::function<double(double, double)> aggregation,
                       std::function<double(double)> fragmentation,
                       std::function<double(double)> removal, double x_max,
                       std::size_t resolution) {
  if (!(x_max > 0.0)) throw InvalidInput("kernel domain x_max must be positive");
  if (resolution == 0) resolution = 1;
  KernelSet k{std::move(aggregation), std::move(fragmentation), std::move(removal), x_max, {}};
  check_kernel_samples(k, resolution);
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double x = x_max * static_cast<double>(i) / static_cast<double>(resolution);
    k.sup.fragmentation = std::max(k.sup.fragmentation, k.fragmentation(x));
    k.sup.removal = std::max(k.sup.removal, k.removal(x));
    for (std::size_t j = 0; j <= resolution; ++j) {
      const double y = x_max * static_cast<double>(j) / static_cast<double>(resolution);
      k.sup.aggregation = std::max(k.sup.aggregation, k.aggregation(x, y));
    }
  }
  return k;
}

KernelSet builtin_kernels(double c_a, double c_f, double c_mu, double x_max) {
  if (!(c_a >= 0.0) || !(c_f >= 0.0) || !(c_mu >= 0.0)) {
    throw InvalidInput("kernel coefficients must be nonnegative");
  }
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw InvalidInput("kernel domain x_max must be positive");
  }
  KernelSet k;
  k.x_max = x_max;
  k.aggregation = [c_a, x_max](double x, double y) {
    if (x + y >= x_max) return 0.0;
    const double s = std::cbrt(x) + std::cbrt(y);
    return c_a * s * s * s;
  };
  k.fragmentation = [c_f](double x) { return c_f * std::cbrt(x); };
  k.removal = [c_mu](double x) { return c_mu * std::cbrt(x); };
  // (x^{1/3} + y^{1/3})^3 on x + y <= x_max peaks at x = y = x_max / 2.
  k.sup.aggregation = 4.0 * c_a * x_max;
  k.sup.fragmentation = c_f * std::cbrt(x_max);
  k.sup.removal = c_mu * std::cbrt(x_max);
  return k;
}

}  // namespace floc
