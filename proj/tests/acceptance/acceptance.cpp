// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion K   run criterion K only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floc/experiment.hpp"
#include "floc/forward.hpp"
#include "floc/inverse.hpp"
#include "floc/io.hpp"
#include "floc/metrics.hpp"
#include "floc/study.hpp"
#include "floc/synthetic.hpp"
#include "support.hpp"

using namespace floc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[fail] ";
    }
    detail += what + "; ";
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt_list(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(f, v[k]);
  return s + "]";
}

SizeDistribution final_state(const Trajectory& t) { return t.state(t.size() - 1); }

// Histories of every minimization run by this process, for criterion 8.
std::vector<std::pair<std::string, Estimate>>& optimizer_runs() {
  static std::vector<std::pair<std::string, Estimate>> runs;
  return runs;
}

// --- 1 ---------------------------------------------------------------------

Outcome forward_order() {
  Outcome out;
  const ModelParameters p;
  std::vector<SizeDistribution> finals;
  for (std::size_t n : {10, 20, 40, 80, 160}) {
    const ExperimentGeometry g = make_geometry(p, n, 1);
    const Grid& grid = g.disc.grid();
    finals.push_back(final_state(
        integrate(g.disc, g.b0, truth_measure(TruthKind::beta22, grid, grid), p.t_f, p.n_steps)));
  }
  std::vector<double> diffs;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    diffs.push_back(l1_distance(finals[k], finals[k + 1]));
  }
  std::vector<double> ratios;
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) ratios.push_back(diffs[k] / diffs[k + 1]);
  out.detail = "L1 |b^N - b^2N| for N=10,20,40,80: " + fmt_list(diffs) + "; ";
  for (double r : ratios) out.require(r >= 1.5 && r <= 2.5, "ratio " + fmt("%.3f", r));
  return out;
}

// --- 2 ---------------------------------------------------------------------

double midpoint_drift(std::size_t n, const KernelSet& k) {
  const Grid g(n, 1.0);
  const SizeDistribution b0 = project([](double x) { return 1e3 * std::exp(-x); }, g);
  const Trajectory t = integrate(b0, truth_measure(TruthKind::beta22, g, g), k, 1.0, 200);
  const double m0 = first_moment(b0);
  return std::abs(first_moment(final_state(t)) - m0) / m0;
}

Outcome conservation() {
  Outcome out;
  const KernelSet agg = builtin_kernels(1e-6, 0.0, 0.0, 1.0);
  const KernelSet brk = builtin_kernels(0.0, 0.1, 0.0, 1.0);
  for (const auto& [name, k] : {std::pair{"aggregation", agg}, std::pair{"breakage", brk}}) {
    const double d40 = midpoint_drift(40, k);
    const double d80 = midpoint_drift(80, k);
    out.require(d40 <= 0.01, std::string(name) + " mass drift N=40 " + fmt("%.3e", d40));
    out.require(d40 / d80 >= 1.4 && d40 / d80 <= 2.6,
                std::string(name) + " drift ratio 40/80 " + fmt("%.3f", d40 / d80));
  }
  const Grid g(40, 1.0);
  const SizeDistribution b0 = project([](double x) { return 1e3 * std::exp(-x); }, g);
  const std::vector<double> r =
      breakage_removal_rhs(b0, truth_measure(TruthKind::beta22, g, g), brk);
  double produced = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    produced += r[c] * g.dx();
    expected += 0.5 * brk.fragmentation(g.right_node(c)) * b0[c] * g.dx();
  }
  const double rel = std::abs(produced - expected) / expected;
  out.require(rel <= 1e-3, "count production relative error " + fmt("%.3e", rel));
  return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome integrator() {
  Outcome out;
  const Grid g(6, 1.0);
  const KernelSet decay =
      make_kernels([](double, double) { return 0.0; }, [](double) { return 0.0; },
                   [](double) { return 1.0; }, 1.0);
  const SizeDistribution b0(g, {1, 2, 3, 4, 5, 6});
  const Trajectory t = integrate(b0, uniform_measure(g, g), decay, 1.0, 100);
  double worst = 0.0;
  for (std::size_t c = 0; c < 6; ++c) {
    const double exact = b0[c] * std::exp(-1.0);
    worst = std::max(worst, std::abs(t.states.back()[c] - exact) / exact);
  }
  out.require(worst <= 1e-8, "linear decay relative error " + fmt("%.3e", worst));

  const Grid h(20, 1.0);
  const KernelSet k = builtin_kernels(1e-4, 1.0, 1.0, 1.0);
  const ConditionalMeasure gamma = truth_measure(TruthKind::beta22, h, h);
  const SizeDistribution c0 = project([](double x) { return 1e3 * std::exp(-x); }, h);
  auto run = [&](std::size_t steps) { return final_state(integrate(c0, gamma, k, 1.0, steps)); };
  const SizeDistribution s5 = run(5);
  const SizeDistribution s10 = run(10);
  const SizeDistribution s20 = run(20);
  const double ratio = l1_distance(s5, s10) / l1_distance(s10, s20);
  out.require(ratio >= 8.0 && ratio <= 32.0, "RK4 step-halving ratio " + fmt("%.3f", ratio));
  return out;
}

// --- 4 ---------------------------------------------------------------------

Outcome metric_suite() {
  Outcome out;
  const double slack = 1e-9 + kDefaultProhorovTolerance;
  testing::Rng rng(2024);
  std::size_t axiom_failures = 0;
  std::size_t order_failures = 0;
  const int trials = 250;
  for (int trial = 0; trial < trials; ++trial) {
    const FiniteMeasure a = testing::random_finite_measure(rng, 6);
    const FiniteMeasure b = testing::random_finite_measure(rng, 6);
    const FiniteMeasure c = testing::random_finite_measure(rng, 6);
    const std::function<double(const FiniteMeasure&, const FiniteMeasure&)> metrics[] = {
        [](const FiniteMeasure& x, const FiniteMeasure& y) { return prohorov(x, y); },
        [](const FiniteMeasure& x, const FiniteMeasure& y) { return levy(x, y); },
        [](const FiniteMeasure& x, const FiniteMeasure& y) { return kolmogorov(x, y); }};
    for (const auto& d : metrics) {
      const double ab = d(a, b);
      const bool ok = d(a, a) <= slack && ab >= 0.0 && ab == d(b, a) &&
                      ab <= d(a, c) + d(c, b) + slack;
      if (!ok) ++axiom_failures;
    }
    const double p = prohorov(a, b);
    if (levy(a, b) > p + slack || p > total_variation(a, b) + slack) ++order_failures;
  }
  out.require(axiom_failures == 0,
              std::to_string(axiom_failures) + " axiom violations on " + std::to_string(trials) +
                  " triples x 3 metrics");
  out.require(order_failures == 0, std::to_string(order_failures) + " levy<=prohorov<=TV violations");

  double dirac_worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(-1.0, 2.0);
    const double y = rng.uniform(-1.0, 2.0);
    const double d = prohorov(FiniteMeasure::dirac(x), FiniteMeasure::dirac(y));
    dirac_worst = std::max(dirac_worst, std::abs(d - std::min(std::abs(x - y), 1.0)));
  }
  out.require(dirac_worst <= 1e-6, "dirac closed form max error " + fmt("%.2e", dirac_worst));

  double oracle_worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteMeasure a = testing::random_finite_measure(rng, 5);
    const FiniteMeasure b = testing::random_finite_measure(rng, 5);
    oracle_worst = std::max(oracle_worst, std::abs(prohorov(a, b) - testing::prohorov_oracle(a, b)));
  }
  out.require(oracle_worst <= 1e-6, "subset-enumeration oracle max error " +
                                        fmt("%.2e", oracle_worst));
  return out;
}

// --- 5 ---------------------------------------------------------------------

Outcome kolmogorov_cross_check() {
  Outcome out;
  const Grid g(240, 1.0);
  const double d = kolmogorov(truth_measure(TruthKind::beta22, g, g), uniform_measure(g, g));
  const double target = std::sqrt(3.0) / 18.0;
  out.require(std::abs(d - target) <= 2.0 / 240.0,
              "d_K = " + fmt("%.6f", d) + " vs " + fmt("%.6f", target));
  return out;
}

// --- 6 ---------------------------------------------------------------------

Outcome inverse_recovery() {
  Outcome out;
  const ModelParameters p;
  const std::size_t n = 8;
  const ExperimentGeometry geometry = make_geometry(p, n, n + 40);
  const Grid& grid = geometry.disc.grid();
  const ConditionalMeasure truth = truth_measure(TruthKind::beta22, grid, grid);
  const InverseSetup setup{geometry, generate_data(truth, geometry, 0.0, leg_seed(0, n))};
  const ConditionalMeasure seed = uniform_measure(grid, grid);
  const Estimate e = minimize(setup, seed);
  optimizer_runs().emplace_back("recovery N=8", e);
  const Grid reference(240, p.x_max);
  const double err = uniform_error(e.measure, truth, reference);
  const double seed_err = uniform_error(seed, truth, reference);
  const double ratio = e.cost / e.history.front();
  out.require(ratio <= 1e-4, "cost " + fmt("%.4g", e.history.front()) + " -> " +
                                 fmt("%.4g", e.cost) + " (ratio " + fmt("%.2e", ratio) + ")");
  out.require(2.0 * err <= seed_err,
              "uniform error " + fmt("%.4f", err) + " vs seed " + fmt("%.4f", seed_err));
  return out;
}

// --- 7 ---------------------------------------------------------------------

const StudyResult& study_for(TruthKind kind) {
  static std::map<TruthKind, StudyResult> cache;
  auto it = cache.find(kind);
  if (it == cache.end()) {
    StudyOptions opt;
    opt.n_values = {5, 10, 15, 20};
    opt.sigma = 0.0;
    const TruthGenerator truth = [kind](const Grid& d, const Grid& q) {
      return truth_measure(kind, d, q);
    };
    it = cache.emplace(kind, refinement_study(truth, opt)).first;
    for (const StudyLeg& leg : it->second.legs) {
      if (leg.estimate) {
        optimizer_runs().emplace_back(std::string(to_string(kind)) + " N=" + std::to_string(leg.n),
                                      *leg.estimate);
      }
    }
  }
  return it->second;
}

Outcome consistency_trend() {
  Outcome out;
  for (TruthKind kind : {TruthKind::beta22, TruthKind::arcsine}) {
    const StudyResult& r = study_for(kind);
    const ErrorCurve& c = r.curve;
    std::size_t flagged = 0;
    for (bool f : c.flagged) flagged += f ? 1 : 0;
    std::string failures;
    for (const StudyLeg& leg : r.legs) {
      if (!leg.failure.empty()) failures += " N=" + std::to_string(leg.n) + ": " + leg.failure;
    }
    const std::string name = to_string(kind);
    out.require(failures.empty(), name + " legs ok" + failures);
    out.require(flagged >= 3, name + " errors " + fmt_list(c.errors) + ", " +
                                  std::to_string(flagged) + " flagged");
    out.require(c.errors.back() < c.errors.front(),
                name + " error(N=20) < error(N=5)");
  }
  return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome optimizer_contracts() {
  Outcome out;
  if (optimizer_runs().empty()) {
    inverse_recovery();
    study_for(TruthKind::beta22);
    study_for(TruthKind::arcsine);
  }
  std::size_t non_monotone = 0;
  std::size_t infeasible = 0;
  for (const auto& [name, e] : optimizer_runs()) {
    for (std::size_t k = 1; k < e.history.size(); ++k) {
      if (e.history[k] > e.history[k - 1]) {
        ++non_monotone;
        break;
      }
    }
    const ConditionalMeasure& f = e.measure;
    for (std::size_t r = 0; r < f.n_rows(); ++r) {
      double sum = 0.0;
      bool negative = false;
      for (double w : f.row(r)) {
        negative = negative || !(w >= 0.0);
        sum += w;
      }
      if (negative || std::abs(sum - 1.0) > ConditionalMeasure::kRowSumTolerance) {
        ++infeasible;
        break;
      }
    }
  }
  const std::string runs = std::to_string(optimizer_runs().size());
  out.require(non_monotone == 0, std::to_string(non_monotone) + "/" + runs + " non-monotone histories");
  out.require(infeasible == 0, std::to_string(infeasible) + "/" + runs + " infeasible estimates");

  // Directional derivative from the gradient against a forward secant.
  const ModelParameters p;
  const std::size_t n = 8;
  const ExperimentGeometry geometry = make_geometry(p, n, n + 40);
  const Grid& grid = geometry.disc.grid();
  const InverseSetup setup{
      geometry,
      generate_data(truth_measure(TruthKind::beta22, grid, grid), geometry, 0.0, leg_seed(0, n))};
  testing::Rng rng(8);
  const double h = kDefaultGradientStep;
  double worst = 0.0;
  for (int point = 0; point < 50; ++point) {
    const ConditionalMeasure f = testing::random_conditional(rng, grid, grid, 0.2);
    const TriangularArray g = cost_gradient(f, setup, h);
    TriangularArray moved = f.rows();
    double slope = 0.0;
    const double t = 1e-7;
    for (std::size_t r = 0; r < moved.size(); ++r) {
      if (moved[r].size() < 2) continue;
      std::vector<double> d(moved[r].size());
      double mean = 0.0;
      for (double& v : d) mean += (v = rng.uniform(-1.0, 1.0));
      mean /= static_cast<double>(d.size());
      for (std::size_t m = 0; m < d.size(); ++m) {
        d[m] -= mean;
        slope += g[r][m] * d[m];
        moved[r][m] += t * d[m];
      }
    }
    const double secant = (cost(f.with_rows(moved), setup) - cost(f, setup)) / t;
    worst = std::max(worst, std::abs(slope - secant) / std::max(1.0, std::abs(secant)));
  }
  out.require(worst <= 10.0 * h, "gradient vs secant max relative discrepancy " +
                                      fmt("%.2e", worst) + " (bound " + fmt("%.0e", 10.0 * h) + ")");
  return out;
}

// --- 9 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLOC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome reproducibility() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "floc_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentConfig config;
  config.n_values = {4, 6, 8};
  config.sigma = 2.0;
  config.rng_seed = 99;
  config.output_dir = (dir / "first").string();
  write_text_file(dir / "config.json", config_to_json(config));

  out.require(run_cli("--config " + (dir / "config.json").string() + " study") == 0, "first run");
  out.require(run_cli("--config " + (dir / "first" / "manifest.json").string() + " --out " +
                      (dir / "second").string() + " study") == 0,
              "re-run from manifest");
  std::size_t compared = 0;
  std::size_t differing = 0;
  for (const auto& entry : fs::directory_iterator(dir / "first")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    const fs::path twin = dir / "second" / entry.path().filename();
    if (!fs::exists(twin) || read_text_file(entry.path()) != read_text_file(twin)) ++differing;
  }
  out.require(compared > 0 && differing == 0, std::to_string(compared) + " CSV files compared, " +
                                                  std::to_string(differing) + " differ");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
  double budget_seconds;
};

const Criterion kCriteria[] = {
    {1, "forward-scheme order", forward_order, 10.0},
    {2, "conservation laws", conservation, 10.0},
    {3, "ODE integrator", integrator, 0.0},
    {4, "metric suite", metric_suite, 60.0},
    {5, "Kolmogorov cross-check", kolmogorov_cross_check, 0.0},
    {6, "inverse recovery, noiseless", inverse_recovery, 300.0},
    {7, "consistency trend", consistency_trend, 1800.0},
    {8, "optimizer contracts", optimizer_contracts, 0.0},
    {9, "reproducibility", reproducibility, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion K]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      o.require(false, "runtime over " + fmt("%.0f", c.budget_seconds) + " s");
    }
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                seconds, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
