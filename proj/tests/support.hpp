#pragma once

// Hand-rolled generators and brute-force oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "floc/measure.hpp"
#include "floc/synthetic.hpp"

namespace floc::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  std::vector<double> simplex(std::size_t n, double floor = 0.0) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) sum += (x = uniform(floor, 1.0));
    for (double& x : w) x /= sum;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

// Random finite measure on [0, 1]; locations snapped to a coarse lattice half
// the time so that coincident atoms are exercised.
inline FiniteMeasure random_finite_measure(Rng& rng, std::size_t max_atoms) {
  const std::size_t n = 1 + rng.index(max_atoms);
  const std::vector<double> w = rng.simplex(n);
  const bool lattice = rng.uniform() < 0.5;
  std::vector<Atom> atoms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform();
    if (lattice) x = std::round(x * 8.0) / 8.0;
    atoms[i] = {x, w[i]};
  }
  return FiniteMeasure(std::move(atoms));
}

inline ConditionalMeasure random_conditional(Rng& rng, const Grid& daughter, const Grid& parent,
                                             double floor = 0.0) {
  TriangularArray rows(parent.n_cells());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r] = rng.simplex(admissible_atoms(daughter, parent, r), floor);
  }
  return ConditionalMeasure(daughter, parent, std::move(rows));
}

// Prohorov distance by enumerating every subset A of each support and
// bisecting on eps: mu(A) <= nu(A^eps) + eps and the same with roles swapped.
inline double prohorov_oracle(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  auto holds = [](const FiniteMeasure& a, const FiniteMeasure& b, double eps) {
    const auto x = a.atoms();
    const auto y = b.atoms();
    for (std::uint32_t mask = 1; mask < (1U << x.size()); ++mask) {
      double mass = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (mask & (1U << i)) mass += x[i].weight;
      }
      double near = 0.0;
      for (const Atom& t : y) {
        bool close = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if ((mask & (1U << i)) && std::abs(t.location - x[i].location) <= eps + 1e-12) {
            close = true;
          }
        }
        if (close) near += t.weight;
      }
      if (mass > near + eps + 1e-12) return false;
    }
    return true;
  };
  double lo = 0.0;
  double hi = 1.0;
  if (holds(mu, nu, 0.0) && holds(nu, mu, 0.0)) return 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mu, nu, mid) && holds(nu, mu, mid) ? hi : lo) = mid;
  }
  return hi;
}

// Levy distance by bisection; the one-sided conditions are checked at the
// atoms and just below the shifted atoms, where the step functions jump.
inline double levy_oracle(const FiniteMeasure& f, const FiniteMeasure& g) {
  auto holds = [](const FiniteMeasure& a, const FiniteMeasure& b, double eps) {
    std::vector<double> probes;
    for (const Atom& t : a.atoms()) probes.push_back(t.location);
    for (const Atom& t : b.atoms()) probes.push_back(t.location - eps - 1e-12);
    for (double s : probes) {
      if (a.cdf(s) > b.cdf(s + eps) + eps + 1e-12) return false;
    }
    return true;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(f, g, mid) && holds(g, f, mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace floc::testing
