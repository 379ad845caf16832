// floc: forward solves, pseudo-data, inversion and refinement studies from
// the command line. Exit status 0 on success, 2 on invalid input, 3 on a
// numerical failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "floc/error.hpp"
#include "floc/experiment.hpp"
#include "floc/forward.hpp"
#include "floc/io.hpp"
#include "floc/metrics.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kInvalidInput = 2;
constexpr int kNumericalFailure = 3;

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

floc::ExperimentConfig load_config(const Globals& g) {
  floc::ExperimentConfig config;
  if (!g.config_path.empty()) config = floc::config_from_json(floc::read_text_file(g.config_path));
  if (!g.out_dir.empty()) config.output_dir = g.out_dir;
  if (g.seed) config.rng_seed = *g.seed;
  config.validate();
  return config;
}

void print_value(const char* name, double v) {
  std::cout << name << ' ' << floc::format_double(v) << '\n';
}

floc::ConditionalMeasure measure_for(const floc::ExperimentConfig& config, const floc::Grid& grid,
                                     const std::string& override_path) {
  if (!override_path.empty()) {
    return floc::resample(floc::load_measure(override_path), grid, grid);
  }
  return floc::make_truth_generator(config.truth)(grid, grid);
}

int run_forward(const Globals& g, std::size_t n, const std::string& measure_path,
                std::size_t stride) {
  const floc::ExperimentConfig config = load_config(g);
  const std::size_t cells = n ? n : config.n_cells;
  const floc::ExperimentGeometry geo = floc::make_geometry(config.model, cells, 1, config.diagonal);
  const floc::ConditionalMeasure gamma = measure_for(config, geo.disc.grid(), measure_path);
  floc::IntegrationOptions opts;
  opts.stride = stride;
  const floc::Trajectory traj = floc::integrate(geo.disc, geo.b0, gamma, geo.t_f, geo.n_steps, opts);

  std::ostringstream csv;
  floc::write_trajectory_csv(csv, traj);
  const fs::path path = fs::path(config.output_dir) / "trajectory.csv";
  floc::write_text_file(path, csv.str());
  const floc::SizeDistribution last =
      floc::SizeDistribution::unchecked(traj.grid, traj.states.back());
  std::cout << "trajectory " << path.string() << '\n';
  print_value("zeroth_moment", floc::zeroth_moment(last));
  print_value("first_moment", floc::first_moment(last));
  print_value("min_coefficient", traj.min_coefficient);
  if (traj.negativity_warning) std::cerr << "warning: coefficients fell below the negativity floor\n";
  return 0;
}

int run_generate(const Globals& g, std::size_t n, std::optional<double> sigma) {
  floc::ExperimentConfig config = load_config(g);
  if (sigma) config.sigma = *sigma;
  const std::size_t cells = n ? n : config.n_cells;
  const floc::ExperimentGeometry geo =
      floc::make_geometry(config.model, cells, cells + config.extra_times, config.diagonal);
  const floc::ConditionalMeasure truth = measure_for(config, geo.disc.grid(), "");
  const floc::ObservationSet obs =
      floc::generate_data(truth, geo, config.sigma, floc::leg_seed(config.rng_seed, cells));
  const fs::path dir = config.output_dir;
  floc::save_observations(dir / "observations.json", obs);
  floc::save_measure(dir / "truth.json", truth);
  std::cout << "observations " << (dir / "observations.json").string() << '\n';
  std::cout << "truth " << (dir / "truth.json").string() << '\n';
  return 0;
}

int run_invert(const Globals& g, const std::string& data_path, const std::string& seed_path,
               const std::string& truth_path) {
  const floc::ExperimentConfig config = load_config(g);
  const floc::ObservationSet obs = floc::load_observations(data_path);
  floc::ExperimentGeometry geo =
      floc::make_geometry(config.model, obs.n_bins, obs.n_times, config.diagonal);
  geo.bin_edges = obs.bin_edges;
  geo.sample_times = obs.times;
  const floc::InverseSetup setup{geo, obs};
  const floc::Grid& grid = geo.disc.grid();
  const floc::ConditionalMeasure seed =
      seed_path.empty() ? floc::uniform_measure(grid, grid)
                        : floc::resample(floc::load_measure(seed_path), grid, grid);
  const floc::Estimate est = floc::minimize(setup, seed, config.minimize);

  const fs::path dir = config.output_dir;
  const std::string stem = "estimate_N" + std::to_string(obs.n_bins);
  floc::save_measure(dir / (stem + ".json"), est.measure);
  std::ostringstream history;
  floc::write_history_csv(history, est);
  floc::write_text_file(dir / (stem + "_history.csv"), history.str());

  std::cout << "estimate " << (dir / (stem + ".json")).string() << '\n';
  print_value("initial_cost", est.history.front());
  print_value("cost", est.cost);
  std::cout << "iterations " << est.iterations << '\n';
  std::cout << "stop_reason " << est.stop_reason << '\n';
  if (!truth_path.empty()) {
    const floc::Grid reference(config.reference_atoms, config.model.x_max);
    const floc::ConditionalMeasure truth = floc::resample(floc::load_measure(truth_path), grid, grid);
    print_value("error", floc::uniform_error(est.measure, truth, reference));
    print_value("seed_error", floc::uniform_error(seed, truth, reference));
  }
  return 0;
}

int run_study(const Globals& g) {
  const floc::ExperimentConfig config = load_config(g);
  const floc::ExperimentReport report = floc::run_experiment(config);
  const floc::ErrorCurve& curve = report.result.curve;
  for (std::size_t k = 0; k < curve.n_values.size(); ++k) {
    std::cout << "N " << curve.n_values[k] << " error " << floc::format_double(curve.errors[k])
              << " cost " << floc::format_double(curve.costs[k])
              << (curve.flagged[k] ? " flagged" : "") << '\n';
  }
  for (const floc::StudyLeg& leg : report.result.legs) {
    if (!leg.failure.empty()) std::cerr << "N=" << leg.n << " failed: " << leg.failure << '\n';
  }
  std::cout << "manifest " << (fs::path(config.output_dir) / "manifest.json").string() << '\n';
  return report.all_legs_ok ? 0 : kNumericalFailure;
}

int run_metric(const std::string& a_path, const std::string& b_path, const std::string& mode,
               double tol) {
  const floc::ConditionalMeasure a = floc::load_measure(a_path);
  const floc::ConditionalMeasure b = floc::load_measure(b_path);
  const double d = floc::conditional_distance(a, b, floc::metric_mode_from_string(mode), tol);
  std::cout << floc::format_double(d) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flocculation population balance: forward model and measure identification"};
  app.require_subcommand(1);

  Globals globals;
  std::uint64_t seed = 0;
  app.add_option("--config", globals.config_path, "JSON configuration or run manifest");
  app.add_option("--out", globals.out_dir, "output directory (overrides the configuration)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the configuration)");

  std::size_t n = 0;
  std::size_t stride = 1;
  std::string measure_path;
  auto* forward = app.add_subcommand("forward", "solve the forward problem, write trajectory.csv");
  forward->add_option("-n,--cells", n, "grid cells (default: config n_cells)")
      ->check(CLI::PositiveNumber);
  forward->add_option("--measure", measure_path, "measure JSON (default: the configured truth)");
  forward->add_option("--stride", stride, "keep every stride-th step")->check(CLI::PositiveNumber);

  double sigma = 0.0;
  auto* generate = app.add_subcommand("generate-data", "write observations CSV + JSON metadata");
  generate->add_option("-n,--cells", n, "grid cells (default: config n_cells)")
      ->check(CLI::PositiveNumber);
  auto* sigma_opt = generate->add_option("--sigma", sigma, "noise standard deviation");

  std::string data_path;
  std::string seed_path;
  std::string truth_path;
  auto* invert = app.add_subcommand("invert", "estimate the measure from one observation set");
  invert->add_option("--data", data_path, "observations JSON")->required();
  invert->add_option("--seed-measure", seed_path, "seed measure JSON (default: uniform)");
  invert->add_option("--truth", truth_path, "truth measure JSON, to report the uniform error");

  auto* study = app.add_subcommand("study", "run the refinement study and write all artifacts");

  std::string a_path;
  std::string b_path;
  std::string mode = "prohorov";
  double tol = floc::kDefaultProhorovTolerance;
  auto* metric = app.add_subcommand("metric", "conditional distance between two measure files");
  metric->add_option("a", a_path, "first measure JSON")->required();
  metric->add_option("b", b_path, "second measure JSON")->required();
  metric->add_option("--mode", mode, "prohorov | levy | kolmogorov")
      ->check(CLI::IsMember({"prohorov", "levy", "kolmogorov"}));
  metric->add_option("--tol", tol, "Prohorov bisection tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }
  if (*seed_opt) globals.seed = seed;

  try {
    if (*forward) return run_forward(globals, n, measure_path, stride);
    if (*generate) {
      return run_generate(globals, n, *sigma_opt ? std::optional<double>(sigma) : std::nullopt);
    }
    if (*invert) return run_invert(globals, data_path, seed_path, truth_path);
    if (*study) return run_study(globals);
    if (*metric) return run_metric(a_path, b_path, mode, tol);
  } catch (const floc::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const floc::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return 0;
}
