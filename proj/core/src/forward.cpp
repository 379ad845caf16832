#include "floc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "floc/error.hpp"

namespace floc {

Discretization::Discretization(Grid grid, const KernelSet& kernels, DiagonalGain diagonal)
    : grid_(std::move(grid)), sup_(kernels.sup), diagonal_(diagonal) {
  if (std::abs(kernels.x_max - grid_.x_max()) > 1e-12 * grid_.x_max()) {
    throw InvalidInput("kernels and grid cover different size domains");
  }
  const std::size_t n = grid_.n_cells();
  aggregation_.resize(n * n);
  fragmentation_.resize(n);
  removal_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = grid_.right_node(i);
    fragmentation_[i] = kernels.fragmentation(xi);
    removal_[i] = kernels.removal(xi);
    for (std::size_t j = 0; j < n; ++j) {
      aggregation_[i * n + j] = kernels.aggregation(xi, grid_.right_node(j));
    }
  }
}

void Discretization::check_compatible(const ConditionalMeasure& gamma) const {
  if (!(gamma.daughter_grid() == grid_) || !(gamma.parent_grid() == grid_)) {
    throw InvalidInput("conditional measure grids must equal the solution grid (M = L = N)");
  }
}

void Discretization::aggregation_rhs(std::span<const double> alpha, std::span<double> out) const {
  const std::size_t n = grid_.n_cells();
  const double dx = grid_.dx();
  for (std::size_t i = 0; i < n; ++i) {
    // Gain: pairs of nodes x_{j+1} + x_{i-j} = x_{i+1}.
    double gain = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      gain += aggregation(j, i - 1 - j) * alpha[j] * alpha[i - 1 - j];
    }
    // Loss: partners with x_{i+1} + x_{j+1} <= x_N.
    double loss = 0.0;
    for (std::size_t j = 0; j + i + 2 <= n; ++j) loss += aggregation(i, j) * alpha[j];
    out[i] = 0.5 * gain * dx - alpha[i] * loss * dx;
  }
}

void Discretization::breakage_removal_rhs(std::span<const double> alpha,
                                          const ConditionalMeasure& gamma, std::span<double> out,
                                          bool accumulate) const {
  breakage_removal_rhs(alpha, gamma.rows(), out, accumulate);
}

void Discretization::breakage_removal_rhs(std::span<const double> alpha,
                                          const TriangularArray& rows, std::span<double> out,
                                          bool accumulate) const {
  const std::size_t n = grid_.n_cells();
  const std::size_t skip = diagonal_ == DiagonalGain::include ? 0 : 1;
  if (!accumulate) std::fill(out.begin(), out.end(), 0.0);
  // Row j scatters k_f(x_j) alpha_j into the daughter cells below it.
  for (std::size_t j = 0; j < n; ++j) {
    const double source = fragmentation_[j] * alpha[j];
    if (source == 0.0) continue;
    const auto& row = rows[j];
    const std::size_t last = std::min(row.size(), j + 1 - skip);
    for (std::size_t i = 0; i < last; ++i) out[i] += row[i] * source;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] -= (0.5 * fragmentation_[i] + removal_[i]) * alpha[i];
  }
}

void Discretization::rhs(std::span<const double> alpha, const ConditionalMeasure& gamma,
                         std::span<double> out) const {
  rhs(alpha, gamma.rows(), out);
}

void Discretization::rhs(std::span<const double> alpha, const TriangularArray& rows,
                         std::span<double> out) const {
  aggregation_rhs(alpha, out);
  breakage_removal_rhs(alpha, rows, out, true);
}

namespace {

void check_state(const SizeDistribution& b, const Grid& grid) {
  if (!(b.grid() == grid)) throw InvalidInput("size distribution grid does not match");
}

}  // namespace

std::vector<double> aggregation_rhs(const SizeDistribution& b, const KernelSet& k) {
  Discretization disc(b.grid(), k);
  std::vector<double> out(b.grid().n_cells());
  disc.aggregation_rhs(b.alpha(), out);
  return out;
}

std::vector<double> breakage_removal_rhs(const SizeDistribution& b,
                                         const ConditionalMeasure& gamma, const KernelSet& k,
                                         DiagonalGain diagonal) {
  Discretization disc(b.grid(), k, diagonal);
  disc.check_compatible(gamma);
  std::vector<double> out(b.grid().n_cells());
  disc.breakage_removal_rhs(b.alpha(), gamma, out);
  return out;
}

std::vector<double> rhs(const SizeDistribution& b, const ConditionalMeasure& gamma,
                        const KernelSet& k, DiagonalGain diagonal) {
  Discretization disc(b.grid(), k, diagonal);
  disc.check_compatible(gamma);
  std::vector<double> out(b.grid().n_cells());
  disc.rhs(b.alpha(), gamma, out);
  return out;
}

std::vector<double> Trajectory::state_at(double t) const {
  const double span = times.back();
  const double slack = 1e-12 * std::max(1.0, span);
  if (!(t >= -slack && t <= span + slack)) {
    std::ostringstream msg;
    msg << "time " << t << " outside the trajectory span [0, " << span << "]";
    throw InvalidInput(msg.str());
  }
  if (times.size() == 1) return states.front();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k1 = static_cast<std::size_t>(it - times.begin());
  if (k1 == 0) return states.front();
  if (k1 >= times.size()) return states.back();
  const std::size_t k0 = k1 - 1;
  const double w = (t - times[k0]) / (times[k1] - times[k0]);
  std::vector<double> out(states[k0].size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = (1.0 - w) * states[k0][c] + w * states[k1][c];
  }
  return out;
}

Trajectory integrate(const Discretization& disc, const SizeDistribution& b0,
                     const ConditionalMeasure& gamma, double t_f, std::size_t n_steps,
                     const IntegrationOptions& options) {
  disc.check_compatible(gamma);
  return integrate_weights(disc, b0, gamma.rows(), t_f, n_steps, options);
}

Trajectory integrate_weights(const Discretization& disc, const SizeDistribution& b0,
                             const TriangularArray& gamma, double t_f, std::size_t n_steps,
                             const IntegrationOptions& options) {
  const Grid& grid = disc.grid();
  check_state(b0, grid);
  if (gamma.size() != grid.n_cells()) throw InvalidInput("weight array must have N rows");
  for (std::size_t r = 0; r < gamma.size(); ++r) {
    if (gamma[r].size() != r + 1) throw InvalidInput("weight row has the wrong length");
    for (double w : gamma[r]) {
      if (!std::isfinite(w)) throw InvalidInput("weights must be finite");
    }
  }
  if (!(t_f >= 0.0) || !std::isfinite(t_f)) throw InvalidInput("final time must be >= 0");
  if (options.stride == 0) throw InvalidInput("trajectory stride must be positive");

  Trajectory traj{grid, {0.0}, {std::vector<double>(b0.alpha().begin(), b0.alpha().end())},
                  0.0, false};
  auto monitor = [&](const std::vector<double>& y) {
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    traj.min_coefficient = std::min(traj.min_coefficient, lo);
    if (lo < -options.negativity_floor * std::max(hi, 0.0)) traj.negativity_warning = true;
  };
  traj.min_coefficient = *std::min_element(traj.states[0].begin(), traj.states[0].end());
  if (t_f == 0.0) return traj;
  if (n_steps == 0) throw InvalidInput("integration needs at least one step");

  const std::size_t n = grid.n_cells();
  const double dt = t_f / static_cast<double>(n_steps);
  std::vector<double> y = traj.states[0];
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    disc.rhs(y, gamma, k1);
    for (std::size_t c = 0; c < n; ++c) tmp[c] = y[c] + 0.5 * dt * k1[c];
    disc.rhs(tmp, gamma, k2);
    for (std::size_t c = 0; c < n; ++c) tmp[c] = y[c] + 0.5 * dt * k2[c];
    disc.rhs(tmp, gamma, k3);
    for (std::size_t c = 0; c < n; ++c) tmp[c] = y[c] + dt * k3[c];
    disc.rhs(tmp, gamma, k4);
    for (std::size_t c = 0; c < n; ++c) {
      y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      if (!std::isfinite(y[c])) {
        std::ostringstream msg;
        msg << "non-finite state at step " << step << " (cell " << c + 1 << ")";
        throw IntegrationFailure(msg.str(), step);
      }
    }
    monitor(y);
    if (step % options.stride == 0 || step == n_steps) {
      traj.times.push_back(step == n_steps ? t_f : static_cast<double>(step) * dt);
      traj.states.push_back(y);
    }
  }
  return traj;
}

Trajectory integrate(const SizeDistribution& b0, const ConditionalMeasure& gamma,
                     const KernelSet& k, double t_f, std::size_t n_steps,
                     const IntegrationOptions& options) {
  return integrate(Discretization(b0.grid(), k), b0, gamma, t_f, n_steps, options);
}

DiagnosticBounds diagnostic_bounds(double c0, double x_max, const KernelSupNorms& sup,
                                   const ConditionalMeasure& gamma) {
  DiagnosticBounds d;
  d.c0 = c0;
  d.c1 = 3.0 * x_max * c0 * sup.aggregation + sup.removal;
  d.c_frag = sup.fragmentation;
  d.lipschitz_c = d.c_frag * (0.5 + x_max * gamma.max_density()) + d.c1;
  return d;
}

DiagnosticBounds diagnostic_bounds(const Trajectory& traj, const KernelSupNorms& sup,
                                   const ConditionalMeasure& gamma) {
  double c0 = 0.0;
  for (const auto& s : traj.states) {
    for (double a : s) c0 = std::max(c0, std::abs(a));
  }
  return diagnostic_bounds(c0, traj.grid.x_max(), sup, gamma);
}

ObservationSet partial_moments(const Trajectory& traj, std::span<const double> bin_edges,
                               std::span<const double> sample_times) {
  const Grid& grid = traj.grid;
  const double xm = grid.x_max();
  if (bin_edges.size() < 2) throw InvalidInput("need at least one bin (two edges)");
  for (std::size_t j = 0; j < bin_edges.size(); ++j) {
    if (!(bin_edges[j] >= -1e-12 * xm && bin_edges[j] <= xm * (1.0 + 1e-12))) {
      throw InvalidInput("bin edges must lie in [0, x_max]");
    }
    if (j > 0 && !(bin_edges[j] > bin_edges[j - 1])) {
      throw InvalidInput("bin edges must be strictly increasing");
    }
  }
  if (sample_times.empty()) throw InvalidInput("need at least one sample time");

  ObservationSet obs;
  obs.n_bins = bin_edges.size() - 1;
  obs.n_times = sample_times.size();
  obs.counts.assign(obs.n_bins * obs.n_times, 0.0);
  obs.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  obs.times.assign(sample_times.begin(), sample_times.end());

  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const std::vector<double> state = traj.state_at(sample_times[i]);
    for (std::size_t j = 0; j < obs.n_bins; ++j) {
      const double a = bin_edges[j];
      const double b = bin_edges[j + 1];
      double sum = 0.0;
      for (std::size_t c = 0; c < grid.n_cells(); ++c) {
        const double lo = std::max(a, grid.node(c));
        const double hi = std::min(b, grid.node(c + 1));
        if (hi > lo) sum += state[c] * (hi - lo);
      }
      obs(j, i) = sum;
    }
  }
  return obs;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  char buf[32];
  os << 't';
  for (std::size_t c = 0; c < traj.grid.n_cells(); ++c) os << ",x_" << c + 1;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
    os << buf;
    for (double a : traj.states[k]) {
      std::snprintf(buf, sizeof buf, "%.17g", a);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace floc
