#include "floc/experiment.hpp"

#include <cmath>
#include <sstream>

#include "floc/error.hpp"
#include "floc/io.hpp"
#include "json.hpp"

namespace floc {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (truth.empty()) throw InvalidInput("config: truth must be named");
  if (n_values.empty()) throw InvalidInput("config: n_values must be nonempty");
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] < 2) throw InvalidInput("config: every N must be at least 2");
    if (k > 0 && n_values[k] <= n_values[k - 1]) {
      throw InvalidInput("config: n_values must be strictly increasing");
    }
  }
  if (n_cells < 2) throw InvalidInput("config: n_cells must be at least 2");
  if (!(model.c_a >= 0.0) || !(model.c_f >= 0.0) || !(model.c_mu >= 0.0)) {
    throw InvalidInput("config: kernel coefficients must be nonnegative");
  }
  if (!(model.x_max > 0.0) || !std::isfinite(model.x_max)) {
    throw InvalidInput("config: x_max must be positive");
  }
  if (!(model.t_f > 0.0) || !std::isfinite(model.t_f)) {
    throw InvalidInput("config: t_f must be positive");
  }
  if (model.n_steps == 0) throw InvalidInput("config: n_steps must be positive");
  if (!(model.b0_amplitude >= 0.0) || !std::isfinite(model.b0_rate)) {
    throw InvalidInput("config: b0 parameters must be finite, amplitude >= 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("config: sigma must be >= 0");
  if (reference_atoms == 0) throw InvalidInput("config: reference_atoms must be positive");
  if (minimize.max_iters == 0) throw InvalidInput("config: max_iters must be positive");
  if (!(minimize.gradient_step > 0.0)) throw InvalidInput("config: gradient_step must be > 0");
}

namespace {

const char* to_string(StepRule r) { return r == StepRule::fixed ? "fixed" : "barzilai-borwein"; }

StepRule step_rule_from_string(const std::string& s) {
  if (s == "fixed") return StepRule::fixed;
  if (s == "barzilai-borwein") return StepRule::barzilai_borwein;
  throw InvalidInput("config: unknown step_rule '" + s + "'");
}

const char* to_string(DiagonalGain d) { return d == DiagonalGain::include ? "include" : "exclude"; }

DiagonalGain diagonal_from_string(const std::string& s) {
  if (s == "include") return DiagonalGain::include;
  if (s == "exclude") return DiagonalGain::exclude;
  throw InvalidInput("config: unknown diagonal_gain '" + s + "'");
}

// Reads the keys of `j` into the matching slots; anything else is an error.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidInput(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& slot) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      slot = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InvalidInput(where_ + ": bad value for '" + key + "': " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      bool known = false;
      for (const auto& k : seen_) known = known || k == item.key();
      if (!known) throw InvalidInput(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

json config_json(const ExperimentConfig& c) {
  json model;
  model["c_a"] = c.model.c_a;
  model["c_f"] = c.model.c_f;
  model["c_mu"] = c.model.c_mu;
  model["x_max"] = c.model.x_max;
  model["t_f"] = c.model.t_f;
  model["n_steps"] = c.model.n_steps;
  model["b0_amplitude"] = c.model.b0_amplitude;
  model["b0_rate"] = c.model.b0_rate;

  const MinimizeOptions& o = c.minimize;
  json opt;
  opt["method"] = to_string(o.method);
  opt["max_iters"] = o.max_iters;
  opt["tol_cost"] = o.tol_cost;
  opt["tol_grad"] = o.tol_grad;
  opt["tol_abs_cost"] = o.tol_abs_cost;
  opt["initial_step"] = o.initial_step;
  opt["step_rule"] = to_string(o.step_rule);
  opt["armijo"] = o.armijo;
  opt["max_backtracks"] = o.max_backtracks;
  opt["gradient_step"] = o.gradient_step;
  opt["threads"] = o.threads;
  opt["damping"] = o.damping;

  json j;
  j["truth"] = c.truth;
  j["model"] = model;
  j["n_values"] = c.n_values;
  j["n_cells"] = c.n_cells;
  j["sigma"] = c.sigma;
  j["rng_seed"] = c.rng_seed;
  j["output_dir"] = c.output_dir;
  j["extra_times"] = c.extra_times;
  j["reference_atoms"] = c.reference_atoms;
  j["diagonal_gain"] = to_string(c.diagonal);
  j["minimize"] = opt;
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
  }
  // A run manifest carries its configuration under "config".
  if (j.is_object() && j.contains("config") && j.contains("legs")) j = j.at("config");

  ExperimentConfig c;
  Reader top(j, "config");
  top.get("truth", c.truth);
  top.get("n_values", c.n_values);
  top.get("n_cells", c.n_cells);
  top.get("sigma", c.sigma);
  top.get("rng_seed", c.rng_seed);
  top.get("output_dir", c.output_dir);
  top.get("extra_times", c.extra_times);
  top.get("reference_atoms", c.reference_atoms);
  std::string diagonal = to_string(c.diagonal);
  top.get("diagonal_gain", diagonal);
  c.diagonal = diagonal_from_string(diagonal);

  if (const json* m = top.child("model")) {
    Reader r(*m, "config.model");
    r.get("c_a", c.model.c_a);
    r.get("c_f", c.model.c_f);
    r.get("c_mu", c.model.c_mu);
    r.get("x_max", c.model.x_max);
    r.get("t_f", c.model.t_f);
    r.get("n_steps", c.model.n_steps);
    r.get("b0_amplitude", c.model.b0_amplitude);
    r.get("b0_rate", c.model.b0_rate);
    r.finish();
  }
  if (const json* m = top.child("minimize")) {
    MinimizeOptions& o = c.minimize;
    Reader r(*m, "config.minimize");
    std::string method = to_string(o.method);
    r.get("method", method);
    o.method = method_from_string(method);
    r.get("max_iters", o.max_iters);
    r.get("tol_cost", o.tol_cost);
    r.get("tol_grad", o.tol_grad);
    r.get("tol_abs_cost", o.tol_abs_cost);
    r.get("initial_step", o.initial_step);
    std::string rule = to_string(o.step_rule);
    r.get("step_rule", rule);
    o.step_rule = step_rule_from_string(rule);
    r.get("armijo", o.armijo);
    r.get("max_backtracks", o.max_backtracks);
    r.get("gradient_step", o.gradient_step);
    r.get("threads", o.threads);
    r.get("damping", o.damping);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump(2) + "\n";
}

TruthGenerator make_truth_generator(const std::string& truth) {
  if (truth == "beta22" || truth == "arcsine") {
    const TruthKind kind = truth_kind_from_string(truth);
    return [kind](const Grid& daughter, const Grid& parent) {
      return truth_measure(kind, daughter, parent);
    };
  }
  auto loaded = std::make_shared<const ConditionalMeasure>(load_measure(truth));
  return [loaded](const Grid& daughter, const Grid& parent) {
    return resample(*loaded, daughter, parent);
  };
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  StudyOptions options;
  options.model = config.model;
  options.n_values = config.n_values;
  options.sigma = config.sigma;
  options.rng_seed = config.rng_seed;
  options.extra_times = config.extra_times;
  options.reference_atoms = config.reference_atoms;
  options.minimize = config.minimize;
  options.diagonal = config.diagonal;

  ExperimentReport report{refinement_study(make_truth_generator(config.truth), options), {}, true};
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);

  auto emit = [&](const std::string& name, const std::string& contents) {
    write_text_file(dir / name, contents);
    report.files.push_back(dir / name);
  };

  json legs = json::array();
  for (const StudyLeg& leg : report.result.legs) {
    const std::string stem = "N" + std::to_string(leg.n);
    json entry;
    entry["N"] = leg.n;
    entry["n_times"] = leg.n + config.extra_times;
    entry["data_seed"] = leg.data_seed;
    entry["ok"] = leg.failure.empty();
    if (!leg.failure.empty()) {
      report.all_legs_ok = false;
      entry["failure"] = leg.failure;
    }
    if (leg.seed_measure) entry["seed_measure"] = json::parse(measure_to_json(*leg.seed_measure));
    if (leg.estimate) {
      const Estimate& est = *leg.estimate;
      entry["cost"] = format_double(est.cost);
      entry["initial_cost"] = format_double(est.history.front());
      entry["iterations"] = est.iterations;
      entry["converged"] = est.converged;
      entry["stop_reason"] = est.stop_reason;
      entry["error"] = format_double(leg.error);
      entry["seed_error"] = format_double(leg.seed_error);
      save_measure(dir / ("estimate_" + stem + ".json"), est.measure);
      report.files.push_back(dir / ("estimate_" + stem + ".json"));
      std::ostringstream history;
      write_history_csv(history, est);
      emit("estimate_" + stem + "_history.csv", history.str());
      if (leg.truth && leg.failure.empty()) {
        const Grid& ref = report.result.reference;
        std::ostringstream surface;
        write_abs_error_surface(surface, resample(est.measure, ref, ref),
                                resample(*leg.truth, ref, ref));
        emit("abs_error_" + stem + ".csv", surface.str());
      }
    }
    legs.push_back(entry);
  }

  std::ostringstream curve;
  write_error_curve_csv(curve, report.result.curve);
  emit("error_curve.csv", curve.str());

  json manifest;
  manifest["config"] = config_json(config);
  manifest["sample_times"] = "t_i = i * t_f / N_t, i = 1..N_t";
  manifest["bins"] = "aligned to the N solver cells";
  manifest["rng"] = "mt19937_64, Marsaglia polar normals, leg seed = splitmix64(rng_seed, N)";
  manifest["legs"] = legs;
  manifest["all_legs_ok"] = report.all_legs_ok;
  emit("manifest.json", manifest.dump(2) + "\n");
  return report;
}

}  // namespace floc
