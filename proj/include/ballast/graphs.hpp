#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ballast/load_state.hpp"
#include "ballast/rational.hpp"

/// Regular graphs for the graphical allocation process: generators, file I/O,
/// spectral expansion, and the exact per-rank allocation vector.
namespace ballast {

enum class GraphKind {
  complete,
  cycle,
  hypercube,
  random_regular,
};

GraphKind graph_kind_from_string(const std::string& s);
std::string to_string(GraphKind kind);

/// Undirected d-regular graph on vertices 0..n-1.  Immutable after
/// construction; concurrent reads are safe.
struct RegularGraph {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  /// Each undirected edge once, as (u, v) with u < v.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  /// adjacency[v] lists the d neighbours of v in ascending order.
  std::vector<std::vector<std::uint32_t>> adjacency;
  /// Cached spectral expansion; set by callers that computed it once.
  std::optional<double> lambda;
};

/// Dispatch to the matching generator.  `d` is the degree (ignored for
/// complete and cycle, the dimension for hypercube); `seed` only matters for
/// random_regular.
RegularGraph generate_graph(GraphKind kind, std::uint32_t n, std::uint32_t d, std::uint64_t seed);

RegularGraph make_complete(std::uint32_t n);
RegularGraph make_cycle(std::uint32_t n);
/// Hypercube of the given dimension: n = 2^dim vertices, degree dim.
RegularGraph make_hypercube(std::uint32_t dim);
/// Uniform-ish simple d-regular graph by stub pairing with rejection; requires
/// n*d even and d < n.  Deterministic in `seed`; throws if generation fails
/// repeatedly (astronomically unlikely for d << n).
RegularGraph make_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed);

/// Text format: first line "n d", then one "u v" line per undirected edge,
/// 0-indexed.  load_graph validates regularity, simplicity and vertex range.
RegularGraph load_graph(const std::string& path);
void save_graph(const RegularGraph& g, const std::string& path);

bool is_connected(const RegularGraph& g);

/// Spectral expansion lambda = max_{i >= 2} |1 - lambda_i| where lambda_i are
/// the eigenvalues of the normalized Laplacian I - A/d.  Dense solve for
/// n <= 2048, deflated power iteration on (A/d)^2 above that (tolerance 1e-9).
/// Uses g.lambda when already cached; does not write the cache.
double spectral_expansion(const RegularGraph& g);

/// Force one specific computation path (both ignore the cache).
double spectral_expansion_dense(const RegularGraph& g);
double spectral_expansion_power(const RegularGraph& g);

/// Edge-count concentration between two vertex sets.  e(X, Y) counts ordered
/// pairs (x, y), x in X, y in Y, xy an edge, so edges inside the intersection
/// count twice.  The deviation |e(X,Y) - d|X||Y|/n| is compared against
/// lambda * d * sqrt(|X|(n-|X|)|Y|(n-|Y|)) / n.
struct MixingResult {
  std::uint64_t e_xy = 0;
  double expected = 0.0;
  double bound = 0.0;
  double deviation = 0.0;
  bool holds = false;
};
MixingResult mixing_check(const RegularGraph& g, const std::vector<std::uint32_t>& X,
                          const std::vector<std::uint32_t>& Y, double lambda);

/// Exact per-rank allocation vector of the graphical process on the given
/// loads: a uniform edge is drawn and the ball goes to its lesser-loaded
/// endpoint, with a fair coin on ties.  Entry r is the probability that the
/// bin at descending rank r receives the ball, in units with denominator
/// 2 * |edges|.
std::vector<rational> graphical_vector_exact(const RegularGraph& g, const LoadState& state);
std::vector<double> graphical_vector(const RegularGraph& g, const LoadState& state);

/// Prefix mass bounds implied by spectral expansion.  For the top-j ranked
/// bins S_j, the probability that a ball lands inside S_j, with ties resolved
/// toward the heavier-ranked endpoint, equals e(S_j, S_j) / (2|E|); this
/// routine checks that quantity (exact integer arithmetic in units of
/// 1/(2|E|)) against three bounds:
///   small prefixes  (j <= lambda n):  <= 2 lambda j / n
///   large prefixes  (j >= lambda n):  <= 2 (j/n)^2
///   all prefixes:                     <= (j/n) (1 - (1 - lambda)(n-j)/n)
/// Slacks are reported as (prefix - bound); positive means violated.
struct PrefixBoundReport {
  double lambda = 0.0;
  bool holds_small = true;
  bool holds_large = true;
  bool holds_general = true;
  double worst_slack_small = 0.0;
  double worst_slack_large = 0.0;
  double worst_slack_general = 0.0;
  bool all_hold() const { return holds_small && holds_large && holds_general; }
};
PrefixBoundReport expansion_prefix_bounds_check(const RegularGraph& g, const LoadState& state,
                                                std::optional<double> lambda_hint = {});

/// Precondition under which the graphical process on an expander falls into
/// the relaxed-quantile class with k tiers: lambda <= 1/2 and the smallest
/// tier cut 2^{-(1/2) (log n)^{(k-1)/k}} is at least
/// lambda_tilde = max(lambda, n^{-0.00005}).
struct ExpansionPrecondition {
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  double delta1 = 0.0;  // the smallest tier cut for this (n, k)
  bool holds = false;
};
ExpansionPrecondition expander_quantile_precondition(std::uint32_t n, std::uint32_t k,
                                                     double lambda);

}  // namespace ballast
