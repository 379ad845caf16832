#include <cmath>
#include <sstream>

#include "doctest.h"
#include "floc/error.hpp"
#include "floc/forward.hpp"
#include "floc/synthetic.hpp"
#include "support.hpp"

using namespace floc;
using doctest::Approx;

namespace {

KernelSet constant_kernels(double ka, double kf, double mu, double x_max = 1.0) {
  return make_kernels([=](double x, double y) { return x + y <= x_max * (1 + 1e-12) ? ka : 0.0; },
                      [=](double) { return kf; }, [=](double) { return mu; }, x_max);
}

SizeDistribution reference_b0(const Grid& g) {
  return project([](double x) { return 1e3 * std::exp(-x); }, g);
}

}  // namespace

TEST_CASE("aggregation rhs, hand-evaluated N = 2") {
  const Grid g(2, 1.0);
  const double kappa = 3.0;
  const SizeDistribution b(g, {1.0, 0.0});
  const std::vector<double> r = aggregation_rhs(b, constant_kernels(kappa, 0.0, 0.0));
  CHECK(r[0] == Approx(-0.5 * kappa));
  CHECK(r[1] == Approx(0.25 * kappa));
}

TEST_CASE("aggregation rhs vanishes at zero and conserves the nodal first moment") {
  const Grid g(16, 1.0);
  const KernelSet k = builtin_kernels(1e-3, 0.0, 0.0, 1.0);
  for (double v : aggregation_rhs(SizeDistribution(g, std::vector<double>(16, 0.0)), k)) {
    CHECK(v == 0.0);
  }
  testing::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(16);
    for (double& x : a) x = rng.uniform(0.0, 100.0);
    const std::vector<double> r = aggregation_rhs(SizeDistribution(g, a), k);
    double flux = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
      flux += g.right_node(i) * r[i];
      scale += g.right_node(i) * std::abs(r[i]);
    }
    CHECK(std::abs(flux) <= 1e-13 * scale);
  }
}

TEST_CASE("aggregation rhs against a double-quadrature oracle") {
  // pi^N of A[b] for b(x) = exp(-x), k = 1 on x + y <= 1, by fine midpoint
  // quadrature; the scheme's deviation should shrink like dx.
  auto oracle = [](const Grid& g) {
    const int sub = 400;
    std::vector<double> out(g.n_cells());
    auto b = [](double x) { return std::exp(-x); };
    for (std::size_t c = 0; c < g.n_cells(); ++c) {
      double sum = 0.0;
      for (int s = 0; s < 20; ++s) {
        const double x = g.node(c) + (s + 0.5) * g.dx() / 20.0;
        double gain = 0.0;
        for (int q = 0; q < sub; ++q) {
          const double y = (q + 0.5) * x / sub;
          gain += b(y) * b(x - y) * x / sub;
        }
        double loss = 0.0;
        for (int q = 0; q < sub; ++q) {
          const double y = (q + 0.5) * (1.0 - x) / sub;
          loss += b(y) * (1.0 - x) / sub;
        }
        sum += 0.5 * gain - b(x) * loss;
      }
      out[c] = sum / 20.0;
    }
    return out;
  };
  const KernelSet k = constant_kernels(1.0, 0.0, 0.0);
  double previous = 0.0;
  for (std::size_t n : {10, 20, 40}) {
    const Grid g(n, 1.0);
    const SizeDistribution b = project([](double x) { return std::exp(-x); }, g);
    const std::vector<double> r = aggregation_rhs(b, k);
    const std::vector<double> ref = oracle(g);
    double err = 0.0;
    for (std::size_t c = 0; c < n; ++c) err += std::abs(r[c] - ref[c]) * g.dx();
    if (previous > 0.0) {
      CHECK(previous / err > 1.5);
      CHECK(previous / err < 2.5);
    }
    previous = err;
  }
}

TEST_CASE("breakage and removal rhs") {
  const Grid g(4, 1.0);
  const ConditionalMeasure gamma = truth_measure(TruthKind::beta22, g, g);

  SUBCASE("last component, hand-evaluated") {
    const SizeDistribution b(g, {0.0, 0.0, 0.0, 1.0});
    const std::vector<double> r = breakage_removal_rhs(b, gamma, constant_kernels(0, 0.1, 0.1),
                                                       DiagonalGain::exclude);
    CHECK(r[3] == Approx(-0.15));
  }
  SUBCASE("no fragmentation, no removal") {
    const SizeDistribution b(g, {1.0, 2.0, 3.0, 4.0});
    for (double v : breakage_removal_rhs(b, gamma, constant_kernels(1.0, 0.0, 0.0))) {
      CHECK(v == 0.0);
    }
  }
  SUBCASE("pure breakage count balance") {
    const KernelSet k = builtin_kernels(0.0, 0.1, 0.0, 1.0);
    const SizeDistribution b(g, {4.0, 3.0, 2.0, 1.0});
    const std::vector<double> r = breakage_removal_rhs(b, gamma, k);
    double produced = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      produced += r[i] * g.dx();
      expected += 0.5 * k.fragmentation(g.right_node(i)) * b[i] * g.dx();
    }
    CHECK(produced == Approx(expected).epsilon(1e-14));

    // The literal variant loses the daughters that stay in the parent's cell.
    const std::vector<double> lit = breakage_removal_rhs(b, gamma, k, DiagonalGain::exclude);
    double lost = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      lost += gamma.weight(i, i) * k.fragmentation(g.right_node(i)) * b[i] * g.dx();
    }
    double lit_produced = 0.0;
    for (double v : lit) lit_produced += v * g.dx();
    CHECK(lit_produced == Approx(expected - lost));
  }
  SUBCASE("grid mismatch") {
    const SizeDistribution b(Grid(5, 1.0), {1, 1, 1, 1, 1});
    CHECK_THROWS_AS(breakage_removal_rhs(b, gamma, constant_kernels(0, 1, 1)), InvalidInput);
  }
}

TEST_CASE("rhs is the sum of its parts and Lipschitz within the diagnostic bound") {
  const Grid g(10, 1.0);
  const KernelSet k = builtin_kernels(1e-3, 0.1, 0.1, 1.0);
  const ConditionalMeasure gamma = truth_measure(TruthKind::arcsine, g, g);
  testing::Rng rng(11);
  const double radius = 50.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(10), c(10);
    for (double& x : a) x = rng.uniform(0.0, radius);
    for (double& x : c) x = rng.uniform(0.0, radius);
    const SizeDistribution b(g, a);
    const SizeDistribution d(g, c);
    const std::vector<double> sum = rhs(b, gamma, k);
    const std::vector<double> agg = aggregation_rhs(b, k);
    const std::vector<double> brk = breakage_removal_rhs(b, gamma, k);
    for (std::size_t i = 0; i < 10; ++i) CHECK(sum[i] == Approx(agg[i] + brk[i]));

    const DiagnosticBounds bounds = diagnostic_bounds(radius, 1.0, k.sup, gamma);
    const std::vector<double> other = rhs(d, gamma, k);
    double lhs = 0.0;
    for (std::size_t i = 0; i < 10; ++i) lhs += std::abs(sum[i] - other[i]) * g.dx();
    CHECK(lhs <= bounds.lipschitz_c * l1_distance(b, d) * (1 + 1e-12));
  }
}

TEST_CASE("diagnostic bounds") {
  const Grid g(5, 2.0);
  const ConditionalMeasure gamma = uniform_measure(g, g);
  const KernelSet k = builtin_kernels(0.5, 0.2, 0.3, 2.0);
  const DiagnosticBounds d = diagnostic_bounds(10.0, 2.0, k.sup, gamma);
  CHECK(d.c0 == 10.0);
  CHECK(d.c1 == Approx(3.0 * 2.0 * 10.0 * k.sup.aggregation + k.sup.removal));
  CHECK(d.c_frag == Approx(k.sup.fragmentation));
  CHECK(gamma.max_density() == Approx(1.0 / g.dx()));  // row 1 is a unit atom
  CHECK(d.lipschitz_c == Approx(d.c_frag * (0.5 + 2.0 * gamma.max_density()) + d.c1));
}

TEST_CASE("linear decay is reproduced to RK4 accuracy") {
  const Grid g(6, 1.0);
  const double m = 1.0;
  const KernelSet k = constant_kernels(0.0, 0.0, m);
  const SizeDistribution b0(g, {1, 2, 3, 4, 5, 6});
  const ConditionalMeasure gamma = uniform_measure(g, g);
  const Trajectory traj = integrate(b0, gamma, k, 1.0, 100);
  REQUIRE(traj.size() == 101);
  for (std::size_t c = 0; c < 6; ++c) {
    const double exact = b0[c] * std::exp(-m);
    CHECK(std::abs(traj.states.back()[c] - exact) <= 1e-8 * exact);
  }
  CHECK(traj.times.back() == 1.0);
  CHECK(traj.states.front() == std::vector<double>(b0.alpha().begin(), b0.alpha().end()));
}

TEST_CASE("trajectory bookkeeping") {
  const Grid g(4, 1.0);
  const KernelSet k = builtin_kernels(1e-3, 0.1, 0.1, 1.0);
  const SizeDistribution b0(g, {1, 1, 1, 1});
  const ConditionalMeasure gamma = uniform_measure(g, g);

  const Trajectory zero = integrate(b0, gamma, k, 0.0, 10);
  CHECK(zero.size() == 1);
  CHECK(zero.times[0] == 0.0);

  IntegrationOptions opts;
  opts.stride = 3;
  const Trajectory strided = integrate(b0, gamma, k, 1.0, 10, opts);
  const std::vector<double> expected_times{0.0, 0.3, 0.6, 0.9, 1.0};
  REQUIRE(strided.times.size() == expected_times.size());
  for (std::size_t i = 0; i < expected_times.size(); ++i) {
    CHECK(strided.times[i] == Approx(expected_times[i]).epsilon(1e-15));
  }
  CHECK(strided.times.back() == 1.0);
  const Trajectory full = integrate(b0, gamma, k, 1.0, 10);
  CHECK(strided.states.back() == full.states.back());

  const std::vector<double> mid = full.state_at(0.05);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(mid[c] == Approx(0.5 * (full.states[0][c] + full.states[1][c])));
  }
  CHECK_THROWS_AS(full.state_at(1.5), InvalidInput);
  CHECK_THROWS_AS(integrate(b0, gamma, k, -1.0, 10), InvalidInput);
  CHECK_THROWS_AS(integrate(b0, gamma, k, 1.0, 0), InvalidInput);

  std::ostringstream csv;
  write_trajectory_csv(csv, strided);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,x_1,x_2,x_3,x_4");
}

TEST_CASE("blow-up is reported with its step") {
  const Grid g(4, 1.0);
  const KernelSet growth =
      make_kernels([](double x, double y) { return x + y <= 1.0 + 1e-12 ? 1e300 : 0.0; },
                   [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0);
  try {
    (void)integrate(SizeDistribution(g, {1e10, 1e10, 1e10, 1e10}), uniform_measure(g, g), growth,
                    1.0, 10);
    FAIL("expected an integration failure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= 10);
  }
}

TEST_CASE("reference configuration stays finite and nonnegative") {
  const Grid g(30, 1.0);
  const KernelSet k = builtin_kernels(1e-6, 0.1, 0.1, 1.0);
  const Trajectory traj =
      integrate(reference_b0(g), truth_measure(TruthKind::beta22, g, g), k, 1.0, 200);
  CHECK_FALSE(traj.negativity_warning);
  CHECK(traj.min_coefficient >= 0.0);
  for (const auto& s : traj.states) {
    for (double a : s) CHECK(std::isfinite(a));
  }
  const DiagnosticBounds d = diagnostic_bounds(traj, k.sup, truth_measure(TruthKind::beta22, g, g));
  CHECK(d.c0 > 0.0);
  CHECK(std::isfinite(d.lipschitz_c));
}

TEST_CASE("RK4 step halving") {
  const Grid g(20, 1.0);
  const KernelSet k = builtin_kernels(1e-4, 1.0, 1.0, 1.0);
  const ConditionalMeasure gamma = truth_measure(TruthKind::beta22, g, g);
  auto final_state = [&](std::size_t steps) {
    const Trajectory t = integrate(reference_b0(g), gamma, k, 1.0, steps);
    return SizeDistribution::unchecked(g, t.states.back());
  };
  const double e1 = l1_distance(final_state(5), final_state(10));
  const double e2 = l1_distance(final_state(10), final_state(20));
  CHECK(e1 / e2 >= 8.0);
  CHECK(e1 / e2 <= 32.0);
}

TEST_CASE("solution depends continuously on the measure") {
  const Grid g(12, 1.0);
  const KernelSet k = builtin_kernels(1e-6, 0.5, 0.1, 1.0);
  const ConditionalMeasure target = truth_measure(TruthKind::beta22, g, g);
  const ConditionalMeasure other = truth_measure(TruthKind::arcsine, g, g);
  const SizeDistribution b0 = reference_b0(g);
  const SizeDistribution ref =
      SizeDistribution::unchecked(g, integrate(b0, target, k, 1.0, 100).states.back());
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 6; ++i) {
    const double w = std::pow(0.5, i);
    TriangularArray rows = target.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t m = 0; m < rows[r].size(); ++m) {
        rows[r][m] = (1 - w) * target.weight(r, m) + w * other.weight(r, m);
      }
    }
    const ConditionalMeasure blend = target.with_rows(rows);
    const SizeDistribution b =
        SizeDistribution::unchecked(g, integrate(b0, blend, k, 1.0, 100).states.back());
    const double d = l1_distance(b, ref);
    CHECK(d < previous);
    previous = d;
  }
}

TEST_CASE("partial moments") {
  const Grid g(4, 1.0);
  const KernelSet k = builtin_kernels(1e-3, 0.1, 0.1, 1.0);
  const SizeDistribution b0(g, {4, 3, 2, 1});
  const Trajectory traj = integrate(b0, uniform_measure(g, g), k, 1.0, 10);

  const std::vector<double> times{0.0, 0.25, 1.0};
  const ObservationSet aligned = partial_moments(traj, g.nodes(), times);
  CHECK(aligned.n_bins == 4);
  CHECK(aligned.n_times == 3);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(aligned(j, 0) == Approx(b0[j] * 0.25));
    CHECK(aligned(j, 2) == Approx(traj.states.back()[j] * 0.25));
  }

  const std::vector<double> whole{0.0, 1.0};
  const ObservationSet total = partial_moments(traj, whole, times);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<double> s = traj.state_at(times[i]);
    double m0 = 0.0;
    for (double a : s) m0 += a * 0.25;
    CHECK(total(0, i) == Approx(m0));
  }

  // Unaligned bins against the exact overlap with each cell.
  const std::vector<double> edges{0.0, 0.1, 0.55, 0.9};
  const ObservationSet odd = partial_moments(traj, edges, times);
  for (std::size_t j = 0; j < 3; ++j) {
    const std::vector<double> s = traj.state_at(0.25);
    double q = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      const double overlap =
          std::min(edges[j + 1], g.right_node(c)) - std::max(edges[j], g.node(c));
      if (overlap > 0.0) q += s[c] * overlap;
    }
    CHECK(odd(j, 1) == Approx(q).epsilon(1e-12));
  }

  CHECK_THROWS_AS(partial_moments(traj, edges, std::vector<double>{2.0}), InvalidInput);
  CHECK_THROWS_AS(partial_moments(traj, std::vector<double>{0.0, 1.5}, times), InvalidInput);
  CHECK_THROWS_AS(partial_moments(traj, std::vector<double>{0.5, 0.2}, times), InvalidInput);
}
