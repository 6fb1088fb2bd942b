#include "ballast/graphs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ballast/rng.hpp"

namespace ballast {

namespace {

void finalize(RegularGraph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.adjacency.assign(g.n, {});
  for (const auto& [u, v] : g.edges) {
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
}

std::uint64_t edge_key(std::uint32_t u, std::uint32_t v, std::uint32_t n) {
  if (u > v) std::swap(u, v);
  return static_cast<std::uint64_t>(u) * n + v;
}

}  // namespace

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "complete") return GraphKind::complete;
  if (s == "cycle") return GraphKind::cycle;
  if (s == "hypercube") return GraphKind::hypercube;
  if (s == "random-regular" || s == "random_regular") return GraphKind::random_regular;
  throw std::invalid_argument("unknown graph kind '" + s + "'");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::complete: return "complete";
    case GraphKind::cycle: return "cycle";
    case GraphKind::hypercube: return "hypercube";
    case GraphKind::random_regular: return "random-regular";
  }
  return "?";
}

RegularGraph generate_graph(GraphKind kind, std::uint32_t n, std::uint32_t d, std::uint64_t seed) {
  switch (kind) {
    case GraphKind::complete: return make_complete(n);
    case GraphKind::cycle: return make_cycle(n);
    case GraphKind::hypercube: return make_hypercube(d);
    case GraphKind::random_regular: return make_random_regular(n, d, seed);
  }
  throw std::invalid_argument("generate_graph: bad kind");
}

RegularGraph make_complete(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("make_complete: need n >= 2");
  RegularGraph g;
  g.n = n;
  g.d = n - 1;
  g.edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  finalize(g);
  return g;
}

RegularGraph make_cycle(std::uint32_t n) {
  if (n < 3) throw std::invalid_argument("make_cycle: need n >= 3");
  RegularGraph g;
  g.n = n;
  g.d = 2;
  for (std::uint32_t u = 0; u < n; ++u) {
    const std::uint32_t v = (u + 1) % n;
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  finalize(g);
  return g;
}

RegularGraph make_hypercube(std::uint32_t dim) {
  if (dim == 0 || dim > 24) throw std::invalid_argument("make_hypercube: need 1 <= dim <= 24");
  RegularGraph g;
  g.n = 1u << dim;
  g.d = dim;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (std::uint32_t bit = 0; bit < dim; ++bit) {
      const std::uint32_t v = u ^ (1u << bit);
      if (u < v) g.edges.emplace_back(u, v);
    }
  finalize(g);
  return g;
}

RegularGraph make_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed) {
  if (d == 0 || d >= n) throw std::invalid_argument("make_random_regular: need 1 <= d < n");
  if ((static_cast<std::uint64_t>(n) * d) % 2 != 0) {
    throw std::invalid_argument("make_random_regular: n*d must be even");
  }
  Xoshiro256StarStar rng(seed);
  constexpr int kMaxRestarts = 1000;
  constexpr int kMaxPairAttempts = 20000;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    // Pairing model: each vertex contributes d stubs; repeatedly join two
    // uniform stubs, rejecting self-loops and repeated edges, until none are
    // left.  A dead end (only invalid joins remain) triggers a restart.
    std::vector<std::uint32_t> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (std::uint32_t v = 0; v < n; ++v)
      for (std::uint32_t i = 0; i < d; ++i) stubs.push_back(v);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(stubs.size());
    RegularGraph g;
    g.n = n;
    g.d = d;
    g.edges.reserve(stubs.size() / 2);
    bool ok = true;
    while (!stubs.empty()) {
      bool paired = false;
      for (int attempt = 0; attempt < kMaxPairAttempts; ++attempt) {
        const auto i = static_cast<std::size_t>(rng.bounded(stubs.size()));
        auto j = static_cast<std::size_t>(rng.bounded(stubs.size() - 1));
        if (j >= i) ++j;
        const std::uint32_t u = stubs[i], v = stubs[j];
        if (u == v || seen.count(edge_key(u, v, n)) != 0) continue;
        seen.insert(edge_key(u, v, n));
        g.edges.emplace_back(std::min(u, v), std::max(u, v));
        // Remove both stubs, larger position first so indices stay valid.
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        stubs[hi] = stubs.back();
        stubs.pop_back();
        stubs[lo] = stubs.back();
        stubs.pop_back();
        paired = true;
        break;
      }
      if (!paired) {
        ok = false;
        break;
      }
    }
    if (ok) {
      finalize(g);
      return g;
    }
  }
  throw std::runtime_error("make_random_regular: pairing failed to complete");
}

RegularGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_graph: cannot open '" + path + "'");
  RegularGraph g;
  if (!(in >> g.n >> g.d)) throw std::runtime_error("load_graph: bad header in '" + path + "'");
  if (g.n == 0 || g.d == 0 || g.d >= g.n) {
    throw std::runtime_error("load_graph: invalid n/d in '" + path + "'");
  }
  const std::uint64_t expected_edges = static_cast<std::uint64_t>(g.n) * g.d / 2;
  std::unordered_set<std::uint64_t> seen;
  std::uint32_t u = 0, v = 0;
  while (in >> u >> v) {
    if (u >= g.n || v >= g.n) throw std::runtime_error("load_graph: vertex out of range");
    if (u == v) throw std::runtime_error("load_graph: self-loop");
    if (!seen.insert(edge_key(u, v, g.n)).second) {
      throw std::runtime_error("load_graph: duplicate edge");
    }
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  if (g.edges.size() != expected_edges) {
    throw std::runtime_error("load_graph: edge count does not match n*d/2");
  }
  finalize(g);
  for (std::uint32_t w = 0; w < g.n; ++w) {
    if (g.adjacency[w].size() != g.d) {
      throw std::runtime_error("load_graph: vertex " + std::to_string(w) + " is not d-regular");
    }
  }
  return g;
}

void save_graph(const RegularGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_graph: cannot open '" + path + "'");
  out << g.n << ' ' << g.d << '\n';
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
  if (!out) throw std::runtime_error("save_graph: write failed for '" + path + "'");
}

bool is_connected(const RegularGraph& g) {
  if (g.n == 0) return false;
  std::vector<char> visited(g.n, 0);
  std::deque<std::uint32_t> queue{0};
  visited[0] = 1;
  std::uint32_t count = 1;
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::uint32_t v : g.adjacency[u]) {
      if (!visited[v]) {
        visited[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == g.n;
}

double spectral_expansion_dense(const RegularGraph& g) {
  const std::uint32_t n = g.n;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  const double inv_d = 1.0 / g.d;
  for (const auto& [u, v] : g.edges) {
    lap(u, v) -= inv_d;
    lap(v, u) -= inv_d;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_expansion: eigensolver failed");
  }
  const auto& ev = solver.eigenvalues();  // ascending; ev[0] ~ 0
  // |1 - l| over l in [ev[1], ev[n-1]] is maximized at an endpoint.
  return std::max(std::abs(1.0 - ev[1]), std::abs(1.0 - ev[n - 1]));
}

double spectral_expansion_power(const RegularGraph& g) {
  const std::uint32_t n = g.n;
  const double inv_d = 1.0 / g.d;
  std::vector<double> x(n), y(n), z(n);
  Xoshiro256StarStar rng(0x5eedULL);
  for (auto& e : x) e = rng.uniform01() - 0.5;

  auto deflate = [n](std::vector<double>& v) {
    // Remove the all-ones eigenvector component (eigenvalue 1 of A/d).
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= n;
    for (double& e : v) e -= mean;
  };
  auto matvec = [&](const std::vector<double>& src, std::vector<double>& dst) {
    for (std::uint32_t u = 0; u < n; ++u) {
      double acc = 0.0;
      for (std::uint32_t v : g.adjacency[u]) acc += src[v];
      dst[u] = acc * inv_d;
    }
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  };

  deflate(x);
  double nx = norm(x);
  if (nx == 0.0) return 0.0;
  for (double& e : x) e /= nx;

  double estimate = 0.0;
  int stable = 0;
  constexpr int kMaxIters = 200000;
  for (int it = 0; it < kMaxIters; ++it) {
    matvec(x, y);
    deflate(y);
    matvec(y, z);
    deflate(z);
    // x is unit, so x.z = x (A/d)^2 x estimates the squared expansion.
    double lam_sq = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) lam_sq += x[i] * z[i];
    lam_sq = std::max(0.0, lam_sq);
    if (std::abs(lam_sq - estimate) <= 1e-13 * std::max(1.0, lam_sq)) {
      if (++stable >= 5) {
        estimate = lam_sq;
        break;
      }
    } else {
      stable = 0;
    }
    estimate = lam_sq;
    const double nz = norm(z);
    if (nz < 1e-300) return 0.0;
    for (std::uint32_t i = 0; i < n; ++i) x[i] = z[i] / nz;
  }
  return std::sqrt(estimate);
}

double spectral_expansion(const RegularGraph& g) {
  if (g.lambda) return *g.lambda;
  if (g.n == 0) throw std::invalid_argument("spectral_expansion: empty graph");
  return g.n <= 2048 ? spectral_expansion_dense(g) : spectral_expansion_power(g);
}

MixingResult mixing_check(const RegularGraph& g, const std::vector<std::uint32_t>& X,
                          const std::vector<std::uint32_t>& Y, double lambda) {
  std::vector<char> in_y(g.n, 0);
  for (std::uint32_t v : Y) {
    if (v >= g.n) throw std::out_of_range("mixing_check: vertex out of range");
    in_y[v] = 1;
  }
  MixingResult res;
  for (std::uint32_t u : X) {
    if (u >= g.n) throw std::out_of_range("mixing_check: vertex out of range");
    for (std::uint32_t w : g.adjacency[u]) res.e_xy += in_y[w];
  }
  const double n = g.n;
  const double sx = static_cast<double>(X.size());
  const double sy = static_cast<double>(Y.size());
  res.expected = g.d * sx * sy / n;
  res.bound = lambda * g.d * std::sqrt(sx * (n - sx) * sy * (n - sy)) / n;
  res.deviation = std::abs(static_cast<double>(res.e_xy) - res.expected);
  res.holds = res.deviation <= res.bound + 1e-9;
  return res;
}

std::vector<rational> graphical_vector_exact(const RegularGraph& g, const LoadState& state) {
  if (g.n != state.n()) {
    throw std::invalid_argument("graphical_vector: graph and state disagree on n");
  }
  // Units with denominator 2|E|: a decided edge gives 2 units to its lesser
  // endpoint, a tied edge gives 1 unit to each endpoint.
  std::vector<std::uint64_t> units(g.n, 0);
  for (const auto& [u, v] : g.edges) {
    const std::uint64_t lu = state.load(u), lv = state.load(v);
    if (lu > lv) {
      units[state.rank_of(v)] += 2;
    } else if (lu < lv) {
      units[state.rank_of(u)] += 2;
    } else {
      units[state.rank_of(u)] += 1;
      units[state.rank_of(v)] += 1;
    }
  }
  const std::uint64_t denom = 2 * static_cast<std::uint64_t>(g.edges.size());
  std::vector<rational> p(g.n);
  for (std::uint32_t r = 0; r < g.n; ++r) p[r] = rational(units[r], denom);
  return p;
}

std::vector<double> graphical_vector(const RegularGraph& g, const LoadState& state) {
  const auto exact = graphical_vector_exact(g, state);
  std::vector<double> p(exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) p[i] = to_double(exact[i]);
  return p;
}

PrefixBoundReport expansion_prefix_bounds_check(const RegularGraph& g, const LoadState& state,
                                                std::optional<double> lambda_hint) {
  if (g.n != state.n()) {
    throw std::invalid_argument("expansion_prefix_bounds_check: graph and state disagree on n");
  }
  PrefixBoundReport report;
  report.lambda = lambda_hint ? *lambda_hint : spectral_expansion(g);
  const double lambda = report.lambda;
  const double n = g.n;
  const double two_e = 2.0 * static_cast<double>(g.edges.size());

  // Prefix mass of the top-j set S_j with rank-consistent ties: the ordered
  // pairs inside S_j over 2|E|, accumulated exactly as bins join by rank.
  std::vector<char> in_s(g.n, 0);
  std::uint64_t inside_pairs = 0;
  constexpr double kTol = 1e-9;
  for (std::uint32_t j1 = 1; j1 <= g.n; ++j1) {
    const std::uint32_t b = state.bin_at_rank(j1 - 1);
    std::uint32_t links = 0;
    for (std::uint32_t w : g.adjacency[b]) links += in_s[w];
    inside_pairs += 2ull * links;
    in_s[b] = 1;

    const double prefix = static_cast<double>(inside_pairs) / two_e;
    const double j = j1;
    const double general_bound = (j / n) * (1.0 - (1.0 - lambda) * (n - j) / n);
    report.worst_slack_general = std::max(report.worst_slack_general, prefix - general_bound);
    if (prefix > general_bound + kTol) report.holds_general = false;
    if (j <= lambda * n) {
      const double small_bound = 2.0 * lambda * j / n;
      report.worst_slack_small = std::max(report.worst_slack_small, prefix - small_bound);
      if (prefix > small_bound + kTol) report.holds_small = false;
    }
    if (j >= lambda * n) {
      const double large_bound = 2.0 * (j / n) * (j / n);
      report.worst_slack_large = std::max(report.worst_slack_large, prefix - large_bound);
      if (prefix > large_bound + kTol) report.holds_large = false;
    }
  }
  return report;
}

ExpansionPrecondition expander_quantile_precondition(std::uint32_t n, std::uint32_t k,
                                                     double lambda) {
  if (n < 2 || k == 0) {
    throw std::invalid_argument("expander_quantile_precondition: need n >= 2, k >= 1");
  }
  ExpansionPrecondition pre;
  pre.lambda = lambda;
  pre.lambda_tilde = std::max(lambda, std::pow(static_cast<double>(n), -0.00005));
  const double log_n = std::log(static_cast<double>(n));
  const double exponent = std::pow(log_n, (static_cast<double>(k) - 1.0) / k);
  pre.delta1 = std::exp2(-0.5 * exponent);
  pre.holds = lambda <= 0.5 + 1e-12 && pre.delta1 >= pre.lambda_tilde - 1e-12;
  return pre;
}

}  // namespace ballast
