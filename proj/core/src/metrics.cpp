#include "floc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "floc/error.hpp"

namespace floc {

MetricMode metric_mode_from_string(const std::string& s) {
  if (s == "prohorov") return MetricMode::prohorov;
  if (s == "levy") return MetricMode::levy;
  if (s == "kolmogorov") return MetricMode::kolmogorov;
  throw InvalidInput("unknown metric mode '" + s + "'");
}

const char* to_string(MetricMode m) noexcept {
  switch (m) {
    case MetricMode::prohorov: return "prohorov";
    case MetricMode::levy: return "levy";
    case MetricMode::kolmogorov: return "kolmogorov";
  }
  return "?";
}

namespace {

constexpr double kFlowEpsilon = 1e-15;
constexpr double kDistanceSlack = 1e-12;

// Dinic max-flow on a small dense bipartite network with real capacities.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : adjacency_(n), level_(n), next_(n) {}

  void add_edge(std::size_t from, std::size_t to, double capacity) {
    adjacency_[from].push_back(edges_.size());
    edges_.push_back({to, capacity});
    adjacency_[to].push_back(edges_.size());
    edges_.push_back({from, 0.0});
  }

  double max_flow(std::size_t source, std::size_t sink) {
    double total = 0.0;
    while (build_levels(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      for (;;) {
        const double pushed = push(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= kFlowEpsilon) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Edge {
    std::size_t to;
    double residual;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t id : adjacency_[u]) {
        const Edge& e = edges_[id];
        if (e.residual > kFlowEpsilon && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          queue.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double push(std::size_t u, std::size_t sink, double limit) {
    if (u == sink) return limit;
    for (std::size_t& i = next_[u]; i < adjacency_[u].size(); ++i) {
      const std::size_t id = adjacency_[u][i];
      Edge& e = edges_[id];
      if (e.residual <= kFlowEpsilon || level_[e.to] != level_[u] + 1) continue;
      const double pushed = push(e.to, sink, std::min(limit, e.residual));
      if (pushed > kFlowEpsilon) {
        e.residual -= pushed;
        edges_[id ^ 1U].residual += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

// Largest mass that can be moved from mu to nu along pairs at distance <= eps.
double coupled_mass(const FiniteMeasure& mu, const FiniteMeasure& nu, double eps) {
  const auto a = mu.atoms();
  const auto b = nu.atoms();
  const std::size_t source = 0;
  const std::size_t sink = a.size() + b.size() + 1;
  FlowNetwork net(sink + 1);
  for (std::size_t i = 0; i < a.size(); ++i) net.add_edge(source, 1 + i, a[i].weight);
  for (std::size_t j = 0; j < b.size(); ++j) net.add_edge(1 + a.size() + j, sink, b[j].weight);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (std::abs(a[i].location - b[j].location) <= eps + kDistanceSlack) {
        net.add_edge(1 + i, 1 + a.size() + j, 2.0);
      }
    }
  }
  return net.max_flow(source, sink);
}

bool prohorov_feasible(const FiniteMeasure& mu, const FiniteMeasure& nu, double eps) {
  return coupled_mass(mu, nu, eps) >= 1.0 - eps - 1e-12;
}

// Lexicographic order on atom lists, so that the metric sees its arguments in
// a canonical order and is exactly symmetric.
bool canonical_less(const FiniteMeasure& a, const FiniteMeasure& b) {
  const auto x = a.atoms();
  const auto y = b.atoms();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].location != y[i].location) return x[i].location < y[i].location;
    if (x[i].weight != y[i].weight) return x[i].weight < y[i].weight;
  }
  return x.size() < y.size();
}

// Smallest eps >= 0 with G(s) <= H(s + eps) + eps for all s.
double levy_one_sided(const FiniteMeasure& g, const FiniteMeasure& h) {
  double worst = 0.0;
  double g_level = 0.0;
  const auto ga = g.atoms();
  const auto ha = h.atoms();
  for (const Atom& atom : ga) {
    g_level = std::min(1.0, g_level + atom.weight);
    const double s = atom.location;
    // Walk H's levels to the right of s.
    double h_level = h.cdf(s);
    double best = std::max(0.0, g_level - h_level);
    for (const Atom& b : ha) {
      if (b.location <= s) continue;
      const double start = b.location - s;
      if (start >= best) break;
      h_level = std::min(1.0, h_level + b.weight);
      best = std::min(best, std::max(start, g_level - h_level));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<double> merged_locations(const FiniteMeasure& a, const FiniteMeasure& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  for (const Atom& t : a.atoms()) xs.push_back(t.location);
  for (const Atom& t : b.atoms()) xs.push_back(t.location);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> refined_parent_nodes(const ConditionalMeasure& F, const ConditionalMeasure& G) {
  std::vector<double> ys;
  for (std::size_t r = 0; r < F.n_rows(); ++r) ys.push_back(F.parent_grid().right_node(r));
  for (std::size_t r = 0; r < G.n_rows(); ++r) ys.push_back(G.parent_grid().right_node(r));
  std::sort(ys.begin(), ys.end());
  const double slack = 1e-12 * F.parent_grid().x_max();
  ys.erase(std::unique(ys.begin(), ys.end(),
                       [slack](double a, double b) { return std::abs(a - b) <= slack; }),
           ys.end());
  return ys;
}

void check_comparable(const ConditionalMeasure& F, const ConditionalMeasure& G) {
  const double a = F.parent_grid().x_max();
  const double b = G.parent_grid().x_max();
  if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
    throw InvalidInput("measures live on different size domains");
  }
}

double row_metric(const FiniteMeasure& a, const FiniteMeasure& b, MetricMode mode, double tol) {
  switch (mode) {
    case MetricMode::prohorov: return prohorov(a, b, tol);
    case MetricMode::levy: return levy(a, b);
    case MetricMode::kolmogorov: return kolmogorov(a, b);
  }
  return 0.0;
}

}  // namespace

double prohorov(const FiniteMeasure& mu, const FiniteMeasure& nu, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("prohorov tolerance must be positive");
  const FiniteMeasure& a = canonical_less(nu, mu) ? nu : mu;
  const FiniteMeasure& b = canonical_less(nu, mu) ? mu : nu;
  if (prohorov_feasible(a, b, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (prohorov_feasible(a, b, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double levy(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  return std::max(levy_one_sided(mu, nu), levy_one_sided(nu, mu));
}

double kolmogorov(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  double sup = 0.0;
  for (double x : merged_locations(mu, nu)) sup = std::max(sup, std::abs(mu.cdf(x) - nu.cdf(x)));
  return sup;
}

double total_variation(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  const auto a = mu.atoms();
  const auto b = nu.atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  double sum = 0.0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].location < b[j].location)) {
      sum += a[i++].weight;
    } else if (i == a.size() || b[j].location < a[i].location) {
      sum += b[j++].weight;
    } else {
      sum += std::abs(a[i++].weight - b[j++].weight);
    }
  }
  return 0.5 * sum;
}

double kolmogorov(const ConditionalMeasure& F, const ConditionalMeasure& G) {
  return conditional_distance(F, G, MetricMode::kolmogorov);
}

double conditional_distance(const ConditionalMeasure& F, const ConditionalMeasure& G,
                            MetricMode mode, double tol) {
  check_comparable(F, G);
  double sup = 0.0;
  for (double y : refined_parent_nodes(F, G)) {
    sup = std::max(sup, row_metric(row_measure(F, y), row_measure(G, y), mode, tol));
  }
  return sup;
}

double set_distance(std::span<const ConditionalMeasure> a, std::span<const ConditionalMeasure> b,
                    SetDistanceMode mode, MetricMode metric, double tol) {
  if (a.empty() || b.empty()) throw InvalidInput("set distance needs two nonempty sets");
  std::vector<double> d(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      d[i * b.size() + j] = conditional_distance(a[i], b[j], metric, tol);
    }
  }
  if (mode == SetDistanceMode::pairwise_inf) return *std::min_element(d.begin(), d.end());

  double a_to_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, d[i * b.size() + j]);
    a_to_b = std::max(a_to_b, best);
  }
  double b_to_a = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) best = std::min(best, d[i * b.size() + j]);
    b_to_a = std::max(b_to_a, best);
  }
  return std::max(a_to_b, b_to_a);
}

}  // namespace floc
