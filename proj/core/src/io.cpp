#include "floc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "floc/error.hpp"
#include "json.hpp"

namespace floc {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInput(std::string(what) + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": bad value for '" + key + "': " + e.what());
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw InvalidInput("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string measure_to_json(const ConditionalMeasure& F) {
  json j;
  j["x_max"] = F.parent_grid().x_max();
  j["M"] = F.n_atoms();
  j["L"] = F.n_rows();
  j["representation"] = to_string(F.representation());
  j["weights"] = F.rows();
  return j.dump(2) + "\n";
}

ConditionalMeasure measure_from_json(const std::string& text) {
  const char* what = "measure";
  const json j = parse_json(text, what);
  const auto x_max = field<double>(j, "x_max", what);
  const auto m = field<std::size_t>(j, "M", what);
  const auto l = field<std::size_t>(j, "L", what);
  Representation rep = Representation::atomic_cdf;
  if (j.contains("representation")) {
    rep = representation_from_string(field<std::string>(j, "representation", what));
  }
  auto rows = field<TriangularArray>(j, "weights", what);
  return ConditionalMeasure(Grid(m, x_max), Grid(l, x_max), std::move(rows), rep);
}

void save_measure(const std::filesystem::path& path, const ConditionalMeasure& F) {
  write_text_file(path, measure_to_json(F));
}

ConditionalMeasure load_measure(const std::filesystem::path& path) {
  try {
    return measure_from_json(read_text_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void save_observations(const std::filesystem::path& json_path, const ObservationSet& obs) {
  obs.validate();
  std::filesystem::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  if (csv_path == json_path) csv_path += ".csv";

  std::ostringstream csv;
  csv << 't';
  for (std::size_t j = 0; j < obs.n_bins; ++j) csv << ",n_" << j + 1;
  csv << '\n';
  for (std::size_t i = 0; i < obs.n_times; ++i) {
    csv << format_double(obs.times[i]);
    for (std::size_t j = 0; j < obs.n_bins; ++j) csv << ',' << format_double(obs(j, i));
    csv << '\n';
  }
  write_text_file(csv_path, csv.str());

  json meta;
  meta["counts_csv"] = csv_path.filename().string();
  meta["n_bins"] = obs.n_bins;
  meta["n_times"] = obs.n_times;
  meta["bin_edges"] = obs.bin_edges;
  meta["times"] = obs.times;
  meta["sigma"] = obs.noise_sigma;
  meta["rng_seed"] = obs.rng_seed ? json(*obs.rng_seed) : json(nullptr);
  write_text_file(json_path, meta.dump(2) + "\n");
}

ObservationSet load_observations(const std::filesystem::path& json_path) {
  const std::string what = json_path.string();
  const json meta = parse_json(read_text_file(json_path), what.c_str());
  ObservationSet obs;
  obs.n_bins = field<std::size_t>(meta, "n_bins", what.c_str());
  obs.n_times = field<std::size_t>(meta, "n_times", what.c_str());
  obs.bin_edges = field<std::vector<double>>(meta, "bin_edges", what.c_str());
  obs.times = field<std::vector<double>>(meta, "times", what.c_str());
  obs.noise_sigma = field<double>(meta, "sigma", what.c_str());
  if (meta.contains("rng_seed") && !meta["rng_seed"].is_null()) {
    obs.rng_seed = field<std::uint64_t>(meta, "rng_seed", what.c_str());
  }
  const auto csv_name = field<std::string>(meta, "counts_csv", what.c_str());
  const std::filesystem::path csv_path = json_path.parent_path() / csv_name;

  std::istringstream csv(read_text_file(csv_path));
  std::string line;
  if (!std::getline(csv, line)) throw InvalidInput(csv_path.string() + ": empty file");
  if (split(strip_cr(line)).size() != obs.n_bins + 1) {
    throw InvalidInput(csv_path.string() + ": header does not have N_x + 1 columns");
  }
  obs.counts.assign(obs.n_bins * obs.n_times, 0.0);
  std::size_t i = 0;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != obs.n_bins + 1 || i >= obs.n_times) {
      throw InvalidInput(csv_path.string() + ": line " + std::to_string(line_no) +
                         " does not match the declared shape");
    }
    for (std::size_t j = 0; j < obs.n_bins; ++j) obs(j, i) = parse_number(cells[j + 1], line_no);
    ++i;
  }
  if (i != obs.n_times) throw InvalidInput(csv_path.string() + ": too few rows");
  obs.validate();
  return obs;
}

void write_history_csv(std::ostream& os, const Estimate& estimate) {
  os << "iter,cost\n";
  for (std::size_t k = 0; k < estimate.history.size(); ++k) {
    os << k << ',' << format_double(estimate.history[k]) << '\n';
  }
}

void write_error_curve_csv(std::ostream& os, const ErrorCurve& curve) {
  os << "N,error,cost,flagged\n";
  for (std::size_t k = 0; k < curve.n_values.size(); ++k) {
    os << curve.n_values[k] << ',' << format_double(curve.errors[k]) << ','
       << format_double(curve.costs[k]) << ',' << (curve.flagged[k] ? 1 : 0) << '\n';
  }
}

ErrorCurve read_error_curve_csv(std::istream& is) {
  ErrorCurve curve;
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "N,error,cost,flagged") {
    throw InvalidInput("error curve: unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) {
      throw InvalidInput("error curve: line " + std::to_string(line_no) + " needs 4 columns");
    }
    curve.n_values.push_back(static_cast<std::size_t>(parse_number(cells[0], line_no)));
    curve.errors.push_back(parse_number(cells[1], line_no));
    curve.costs.push_back(parse_number(cells[2], line_no));
    curve.flagged.push_back(parse_number(cells[3], line_no) != 0.0);
  }
  return curve;
}

void write_abs_error_surface(std::ostream& os, const ConditionalMeasure& estimate,
                             const ConditionalMeasure& truth) {
  if (!(estimate.daughter_grid() == truth.daughter_grid()) ||
      !(estimate.parent_grid() == truth.parent_grid())) {
    throw InvalidInput("error surface: measures must share their grids");
  }
  const Grid& daughter = estimate.daughter_grid();
  os << 'y';
  for (std::size_t m = 0; m < daughter.n_cells(); ++m) os << ',' << format_double(estimate.atom(m));
  os << '\n';
  for (std::size_t r = 0; r < estimate.n_rows(); ++r) {
    const double y = estimate.parent_grid().right_node(r);
    os << format_double(y);
    for (std::size_t m = 0; m < daughter.n_cells(); ++m) {
      const double x = estimate.atom(m);
      os << ',' << format_double(std::abs(cdf(estimate, x, y) - cdf(truth, x, y)));
    }
    os << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  os << contents;
  if (!os) throw InvalidInput("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace floc
