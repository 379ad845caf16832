#include "floc/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "floc/error.hpp"
#include "parallel.hpp"

namespace floc {

void InverseSetup::validate() const {
  observations.validate();
  const ExperimentGeometry& g = geometry;
  if (observations.n_bins + 1 != g.bin_edges.size() ||
      observations.n_times != g.sample_times.size()) {
    throw InvalidInput("observation matrix shape does not match the bins and sample times");
  }
  const double xm = g.disc.grid().x_max();
  if (g.bin_edges.front() < -1e-12 * xm || g.bin_edges.back() > xm * (1.0 + 1e-12)) {
    throw InvalidInput("bin edges must lie in [0, x_max]");
  }
  if (g.sample_times.front() < 0.0 || g.sample_times.back() > g.t_f * (1.0 + 1e-12)) {
    throw InvalidInput("sample times must lie in [0, t_f]");
  }
}

const char* to_string(Method m) noexcept {
  return m == Method::projected_gradient ? "projected-gradient" : "gauss-newton";
}

Method method_from_string(const std::string& s) {
  if (s == "projected-gradient") return Method::projected_gradient;
  if (s == "gauss-newton") return Method::gauss_newton;
  throw InvalidInput("unknown minimization method '" + s + "'");
}

std::vector<double> model_counts(const ConditionalMeasure& gamma, const InverseSetup& setup) {
  const ExperimentGeometry& g = setup.geometry;
  try {
    const Trajectory traj = integrate(g.disc, g.b0, gamma, g.t_f, g.n_steps);
    return partial_moments(traj, g.bin_edges, g.sample_times).counts;
  } catch (const NumericalFailure& e) {
    throw CostEvaluationFailure(std::string("forward solve failed: ") + e.what(),
                                std::make_shared<const ConditionalMeasure>(gamma));
  }
}

double cost(const ConditionalMeasure& gamma, const InverseSetup& setup) {
  const std::vector<double> model = model_counts(gamma, setup);
  const std::vector<double>& data = setup.observations.counts;
  if (model.size() != data.size()) throw InvalidInput("observation shape mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double r = model[k] - data[k];
    sum += r * r;
  }
  return sum;
}

std::vector<double> simplex_project(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("cannot project an empty vector onto the simplex");
  bool feasible = true;
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("simplex projection input is not finite");
    feasible = feasible && x >= 0.0;
    total += x;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (feasible && std::abs(total - 1.0) <= 4.0 * eps * static_cast<double>(v.size())) {
    return {v.begin(), v.end()};
  }

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) threshold = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - threshold, 0.0);
  return out;
}

std::vector<double> flatten(const TriangularArray& rows) {
  std::vector<double> flat;
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return flat;
}

TriangularArray unflatten(std::span<const double> flat, const ConditionalMeasure& shape) {
  TriangularArray rows(shape.n_rows());
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].assign(flat.begin() + static_cast<std::ptrdiff_t>(k),
                   flat.begin() + static_cast<std::ptrdiff_t>(k + shape.row_length(r)));
    k += shape.row_length(r);
  }
  if (k != flat.size()) throw InvalidInput("flat weight vector has the wrong length");
  return rows;
}

TriangularArray cost_gradient(const ConditionalMeasure& gamma, const InverseSetup& setup,
                              double h, std::size_t threads) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("gradient step must be positive");
  setup.geometry.disc.check_compatible(gamma);

  struct Slot {
    std::size_t row;
    std::size_t atom;
  };
  std::vector<Slot> slots;
  for (std::size_t r = 0; r < gamma.n_rows(); ++r) {
    for (std::size_t m = 0; m < gamma.row_length(r); ++m) slots.push_back({r, m});
  }

  TriangularArray grad(gamma.n_rows());
  for (std::size_t r = 0; r < gamma.n_rows(); ++r) grad[r].assign(gamma.row_length(r), 0.0);

  auto perturbed = [&](const Slot& s, double delta) {
    std::vector<double> row(gamma.row(s.row).begin(), gamma.row(s.row).end());
    row[s.atom] += delta;
    return simplex_project(row);
  };

  detail::parallel_for(slots.size(), threads, [&](std::size_t k) {
    const Slot& s = slots[k];
    // A single admissible atom is pinned to weight 1.
    if (gamma.row_length(s.row) == 1) return;
    std::vector<double> plus = perturbed(s, h);
    std::vector<double> minus = perturbed(s, -h);
    const auto original = gamma.row(s.row);
    if (std::equal(plus.begin(), plus.end(), original.begin()) &&
        std::equal(minus.begin(), minus.end(), original.begin())) {
      throw DegenerateStep("gradient step too small to perturb the weights");
    }
    TriangularArray rows = gamma.rows();
    rows[s.row] = std::move(plus);
    const double j_plus = cost(gamma.with_rows(rows), setup);
    rows[s.row] = std::move(minus);
    const double j_minus = cost(gamma.with_rows(std::move(rows)), setup);
    grad[s.row][s.atom] = (j_plus - j_minus) / (2.0 * h);
  });
  return grad;
}

std::vector<double> model_jacobian(const ConditionalMeasure& gamma, const InverseSetup& setup) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const ExperimentGeometry& g = setup.geometry;
  const Discretization& disc = g.disc;
  disc.check_compatible(gamma);
  const Grid& grid = disc.grid();
  const std::size_t n = grid.n_cells();
  const double dx = grid.dx();
  const TriangularArray& w = gamma.rows();
  const bool diagonal = disc.diagonal_gain() == DiagonalGain::include;

  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t l = 0; l < n; ++l) offset[l + 1] = offset[l] + w[l].size();
  const std::size_t n_params = offset[n];

  // d rhs / d alpha at alpha.
  auto state_jacobian = [&](const VectorXd& a) {
    MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < i; ++j) {
        const std::size_t k = i - 1 - j;
        const double c = 0.5 * dx * disc.aggregation(j, k);
        m(ii, static_cast<Eigen::Index>(j)) += c * a(static_cast<Eigen::Index>(k));
        m(ii, static_cast<Eigen::Index>(k)) += c * a(static_cast<Eigen::Index>(j));
      }
      for (std::size_t j = 0; j + i + 2 <= n; ++j) {
        const double c = dx * disc.aggregation(i, j);
        m(ii, ii) -= c * a(static_cast<Eigen::Index>(j));
        m(ii, static_cast<Eigen::Index>(j)) -= c * a(ii);
      }
      m(ii, ii) -= 0.5 * disc.fragmentation(i) + disc.removal(i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t last = std::min(w[j].size(), diagonal ? j + 1 : j);
      for (std::size_t i = 0; i < last; ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            w[j][i] * disc.fragmentation(j);
      }
    }
    return m;
  };
  auto tangent = [&](const VectorXd& a, const MatrixXd& s) {
    MatrixXd ds = state_jacobian(a) * s;
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t last = std::min(w[l].size(), diagonal ? l + 1 : l);
      const double source = disc.fragmentation(l) * a(static_cast<Eigen::Index>(l));
      for (std::size_t m = 0; m < last; ++m) {
        ds(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(offset[l] + m)) += source;
      }
    }
    return ds;
  };
  auto rhs = [&](const VectorXd& a) {
    VectorXd out(static_cast<Eigen::Index>(n));
    disc.rhs(std::span<const double>(a.data(), n), w, std::span<double>(out.data(), n));
    return out;
  };

  const double dt = g.t_f / static_cast<double>(g.n_steps);
  VectorXd y = Eigen::Map<const VectorXd>(g.b0.alpha().data(), static_cast<Eigen::Index>(n));
  MatrixXd s = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_params));
  std::vector<double> times{0.0};
  std::vector<MatrixXd> sens{s};
  for (std::size_t step = 1; step <= g.n_steps; ++step) {
    const VectorXd k1 = rhs(y);
    const MatrixXd d1 = tangent(y, s);
    const VectorXd y2 = y + 0.5 * dt * k1;
    const MatrixXd s2 = s + 0.5 * dt * d1;
    const VectorXd k2 = rhs(y2);
    const MatrixXd d2 = tangent(y2, s2);
    const VectorXd y3 = y + 0.5 * dt * k2;
    const MatrixXd s3 = s + 0.5 * dt * d2;
    const VectorXd k3 = rhs(y3);
    const MatrixXd d3 = tangent(y3, s3);
    const VectorXd y4 = y + dt * k3;
    const MatrixXd s4 = s + dt * d3;
    const VectorXd k4 = rhs(y4);
    const MatrixXd d4 = tangent(y4, s4);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    if (!y.allFinite() || !s.allFinite()) {
      throw IntegrationFailure("non-finite sensitivity", step);
    }
    times.push_back(step == g.n_steps ? g.t_f : static_cast<double>(step) * dt);
    sens.push_back(s);
  }

  const std::size_t n_bins = g.bin_edges.size() - 1;
  const std::size_t n_times = g.sample_times.size();
  MatrixXd overlap = MatrixXd::Zero(static_cast<Eigen::Index>(n_bins), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n_bins; ++j) {
    for (std::size_t c = 0; c < n; ++c) {
      const double lo = std::max(g.bin_edges[j], grid.node(c));
      const double hi = std::min(g.bin_edges[j + 1], grid.node(c + 1));
      if (hi > lo) overlap(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = hi - lo;
    }
  }
  std::vector<double> jac(n_bins * n_times * n_params);
  for (std::size_t i = 0; i < n_times; ++i) {
    const double t = g.sample_times[i];
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k1 = std::min<std::size_t>(static_cast<std::size_t>(it - times.begin()),
                                                 times.size() - 1);
    const std::size_t k0 = k1 == 0 ? 0 : k1 - 1;
    const double frac = k1 == k0 ? 0.0 : std::clamp((t - times[k0]) / (times[k1] - times[k0]), 0.0, 1.0);
    const MatrixXd at = overlap * ((1.0 - frac) * sens[k0] + frac * sens[k1]);
    for (std::size_t j = 0; j < n_bins; ++j) {
      for (std::size_t p = 0; p < n_params; ++p) {
        jac[(j * n_times + i) * n_params + p] =
            at(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
      }
    }
  }
  return jac;
}

namespace {

// Row-wise projection of a flat weight vector.
std::vector<double> project_rows(std::span<const double> flat, const ConditionalMeasure& shape) {
  std::vector<double> out(flat.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < shape.n_rows(); ++r) {
    const std::size_t len = shape.row_length(r);
    const std::vector<double> p = simplex_project(flat.subspan(k, len));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(k));
    k += len;
  }
  return out;
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}


using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::size_t> row_offsets(const ConditionalMeasure& shape) {
  std::vector<std::size_t> offset(shape.n_rows() + 1, 0);
  for (std::size_t r = 0; r < shape.n_rows(); ++r) offset[r + 1] = offset[r] + shape.row_length(r);
  return offset;
}

// min |A z - b|^2 over the product of row simplices, by a primal active-set
// method started from the feasible point z.
std::vector<double> simplex_least_squares(const MatrixXd& a, const VectorXd& b,
                                          std::vector<double> z,
                                          const std::vector<std::size_t>& offset) {
  const std::size_t n = z.size();
  const std::size_t rows = offset.size() - 1;
  std::vector<bool> fixed(n);
  for (std::size_t k = 0; k < n; ++k) fixed[k] = z[k] <= 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    // Keep one free entry per row.
    bool any = false;
    for (std::size_t k = offset[r]; k < offset[r + 1]; ++k) any = any || !fixed[k];
    if (!any) fixed[offset[r + 1] - 1] = false;
  }

  const std::size_t max_rounds = 3 * n + 20;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    // Eliminate the last free entry of each row through its row sum.
    std::vector<std::size_t> pivot(rows);
    std::vector<std::size_t> vars;
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t p = offset[r + 1];
      for (std::size_t k = offset[r]; k < offset[r + 1]; ++k) {
        if (fixed[k]) continue;
        if (p != offset[r + 1]) vars.push_back(p);
        p = k;
      }
      pivot[r] = p;
    }
    VectorXd rhs = b;
    for (std::size_t r = 0; r < rows; ++r) rhs -= a.col(static_cast<Eigen::Index>(pivot[r]));
    std::vector<std::size_t> row_of(n);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = offset[r]; k < offset[r + 1]; ++k) row_of[k] = r;
    }
    std::vector<double> target(n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) target[pivot[r]] = 1.0;
    if (!vars.empty()) {
      MatrixXd reduced(a.rows(), static_cast<Eigen::Index>(vars.size()));
      for (std::size_t v = 0; v < vars.size(); ++v) {
        reduced.col(static_cast<Eigen::Index>(v)) =
            a.col(static_cast<Eigen::Index>(vars[v])) -
            a.col(static_cast<Eigen::Index>(pivot[row_of[vars[v]]]));
      }
      const VectorXd u = reduced.completeOrthogonalDecomposition().solve(rhs);
      for (std::size_t v = 0; v < vars.size(); ++v) {
        target[vars[v]] = u(static_cast<Eigen::Index>(v));
        target[pivot[row_of[vars[v]]]] -= u(static_cast<Eigen::Index>(v));
      }
    }

    // Walk towards the target until an entry hits zero.
    double step = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!fixed[k] && target[k] < 0.0) step = std::min(step, z[k] / (z[k] - target[k]));
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = fixed[k] ? 0.0 : z[k] + step * (target[k] - z[k]);
    if (step < 1.0) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!fixed[k] && (z[k] <= 0.0 || (target[k] < 0.0 && z[k] <= 1e-15))) {
          if (k != pivot[row_of[k]] || offset[row_of[k] + 1] - offset[row_of[k]] > 1) {
            fixed[k] = true;
            z[k] = 0.0;
          }
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        bool any = false;
        for (std::size_t k = offset[r]; k < offset[r + 1]; ++k) any = any || !fixed[k];
        if (!any) fixed[pivot[r]] = false;
      }
      continue;
    }

    // Optimal on this face; release the fixed entry with the most negative
    // reduced gradient, if any.
    const VectorXd zz = Eigen::Map<const VectorXd>(z.data(), static_cast<Eigen::Index>(n));
    const VectorXd grad = a.transpose() * (a * zz - b);
    const double scale = grad.cwiseAbs().maxCoeff();
    std::size_t release = n;
    double most = -1e-10 * scale;
    for (std::size_t k = 0; k < n; ++k) {
      if (!fixed[k]) continue;
      const double reduced =
          grad(static_cast<Eigen::Index>(k)) - grad(static_cast<Eigen::Index>(pivot[row_of[k]]));
      if (reduced < most) {
        most = reduced;
        release = k;
      }
    }
    if (release == n) break;
    fixed[release] = false;
  }
  return z;
}

struct Objective {
  const InverseSetup& setup;
  const ConditionalMeasure& shape;

  ConditionalMeasure measure(std::span<const double> flat) const {
    return shape.with_rows(unflatten(flat, shape));
  }
  double operator()(std::span<const double> flat) const { return cost(measure(flat), setup); }
};

void projected_gradient(const InverseSetup& setup, const ConditionalMeasure& seed,
                        const MinimizeOptions& options, Estimate& est) {
  const Objective objective{setup, seed};
  const std::size_t n = seed.n_weights();
  std::vector<double> x = flatten(seed.rows());
  std::vector<double> g = flatten(cost_gradient(seed, setup, options.gradient_step, options.threads));
  double f = est.cost;
  double step = 0.0;
  std::vector<double> trial(n), shifted(n);

  est.stop_reason = "max_iters";
  for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
    for (std::size_t k = 0; k < n; ++k) shifted[k] = x[k] - g[k];
    const std::vector<double> unit = project_rows(shifted, seed);
    double mapping = 0.0;
    for (std::size_t k = 0; k < n; ++k) mapping = std::max(mapping, std::abs(x[k] - unit[k]));
    if (mapping < options.tol_grad) {
      est.converged = true;
      est.stop_reason = "gradient mapping";
      return;
    }

    if (iter == 1 || options.step_rule == StepRule::fixed) {
      step = options.initial_step > 0.0 ? options.initial_step : 0.1 / sup_norm(g);
    }

    bool accepted = false;
    double f_trial = f;
    for (std::size_t back = 0; back <= options.max_backtracks; ++back) {
      for (std::size_t k = 0; k < n; ++k) shifted[k] = x[k] - step * g[k];
      trial = project_rows(shifted, seed);
      double slope = 0.0;
      for (std::size_t k = 0; k < n; ++k) slope += g[k] * (trial[k] - x[k]);
      f_trial = objective(trial);
      if (f_trial <= f + options.armijo * slope && f_trial <= f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      est.stop_reason = "line search failed";
      return;
    }

    const ConditionalMeasure next = objective.measure(trial);
    const std::vector<double> g_next =
        flatten(cost_gradient(next, setup, options.gradient_step, options.threads));
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = trial[k] - x[k];
      ss += s * s;
      sy += s * (g_next[k] - g[k]);
    }
    if (options.step_rule == StepRule::barzilai_borwein && sy > 0.0) {
      step = std::clamp(ss / sy, 1e-30, 1e30);
    }

    const double decrease = (f - f_trial) / f;
    x = trial;
    g = g_next;
    f = f_trial;
    est.measure = next;
    est.cost = f;
    est.iterations = iter;
    est.history.push_back(f);

    if (f <= options.tol_abs_cost) {
      est.converged = true;
      est.stop_reason = "zero cost";
      return;
    }
    if (decrease < options.tol_cost) {
      est.converged = true;
      est.stop_reason = "relative cost decrease";
      return;
    }
  }
}

void gauss_newton(const InverseSetup& setup, const ConditionalMeasure& seed,
                  const MinimizeOptions& options, Estimate& est) {
  const Objective objective{setup, seed};
  const std::size_t n = seed.n_weights();
  const std::vector<std::size_t> offset = row_offsets(seed);
  const std::vector<double>& data = setup.observations.counts;
  const auto n_obs = static_cast<Eigen::Index>(data.size());
  const auto n_var = static_cast<Eigen::Index>(n);

  std::vector<double> x = flatten(seed.rows());
  double f = est.cost;
  MatrixXd jac(n_obs, n_var);
  VectorXd residual(n_obs);
  auto linearize = [&](const ConditionalMeasure& at) {
    const std::vector<double> j = model_jacobian(at, setup);
    jac = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        j.data(), n_obs, n_var);
    const std::vector<double> model = model_counts(at, setup);
    for (Eigen::Index k = 0; k < n_obs; ++k) {
      residual(k) = model[static_cast<std::size_t>(k)] - data[static_cast<std::size_t>(k)];
    }
  };
  linearize(seed);
  const double scale = std::max(jac.colwise().squaredNorm().maxCoeff(), 1e-300);
  double lambda = options.damping * scale;

  est.stop_reason = "max_iters";
  std::size_t accepted = 0;
  for (std::size_t trial_no = 1; trial_no <= options.max_iters; ++trial_no) {
    const VectorXd xv = Eigen::Map<const VectorXd>(x.data(), n_var);
    const VectorXd grad = 2.0 * jac.transpose() * residual;
    std::vector<double> shifted(n);
    for (std::size_t k = 0; k < n; ++k) shifted[k] = x[k] - grad(static_cast<Eigen::Index>(k));
    const std::vector<double> unit = project_rows(shifted, seed);
    double mapping = 0.0;
    for (std::size_t k = 0; k < n; ++k) mapping = std::max(mapping, std::abs(x[k] - unit[k]));
    if (mapping < options.tol_grad) {
      est.converged = true;
      est.stop_reason = "gradient mapping";
      return;
    }

    // Damped linearization stacked as one least-squares system.
    MatrixXd a(n_obs + n_var, n_var);
    VectorXd b(n_obs + n_var);
    const double root = std::sqrt(lambda);
    a.topRows(n_obs) = jac;
    a.bottomRows(n_var) = root * MatrixXd::Identity(n_var, n_var);
    b.head(n_obs) = jac * xv - residual;
    b.tail(n_var) = root * xv;
    std::vector<double> z = project_rows(simplex_least_squares(a, b, x, offset), seed);

    const double f_trial = z == x ? f : objective(z);
    if (!(f_trial < f)) {
      lambda = std::max(lambda, 1e-16 * scale) * 10.0;
      if (lambda > 1e12 * scale) {
        est.converged = true;
        est.stop_reason = "no descent direction";
        return;
      }
      continue;
    }

    const double decrease = (f - f_trial) / f;
    x = std::move(z);
    f = f_trial;
    est.measure = objective.measure(x);
    est.cost = f;
    est.iterations = ++accepted;
    est.history.push_back(f);
    lambda /= 10.0;

    if (f <= options.tol_abs_cost) {
      est.converged = true;
      est.stop_reason = "zero cost";
      return;
    }
    if (decrease < options.tol_cost) {
      est.converged = true;
      est.stop_reason = "relative cost decrease";
      return;
    }
    linearize(est.measure);
  }
}

}  // namespace

Estimate minimize(const InverseSetup& setup, const ConditionalMeasure& seed,
                  const MinimizeOptions& options) {
  setup.validate();
  setup.geometry.disc.check_compatible(seed);
  validate_rows(seed.daughter_grid(), seed.parent_grid(), seed.rows());

  Estimate est{seed, cost(seed, setup), 0, false, "", {}};
  est.history.push_back(est.cost);
  if (est.cost <= options.tol_abs_cost) {
    est.converged = true;
    est.stop_reason = "zero cost";
    return est;
  }
  if (options.method == Method::gauss_newton) {
    gauss_newton(setup, seed, options, est);
  } else {
    projected_gradient(setup, seed, options, est);
  }
  return est;
}

}  // namespace floc
