#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ballast/load_state.hpp"
#include "ballast/processes.hpp"
#include "ballast/rational.hpp"

/// Cross-checks between processes: brute-force enumeration oracles, exact
/// identities, stochastic-dominance couplings, relaxed-class membership, and
/// empirical frequency validation.
namespace ballast {

/// True when p is prefix-majorized by q: every prefix sum of p is at most the
/// corresponding prefix sum of q (within tol).  Vectors are rank-indexed.
bool prefix_majorizes(const std::vector<double>& p, const std::vector<double>& q,
                      double tol = 1e-12);
bool prefix_majorizes_exact(const std::vector<rational>& p, const std::vector<rational>& q);

/// Run two load-independent processes in lockstep under a shared-uniform
/// coupling: each step draws one uniform u and both processes increment the
/// bin whose CDF interval (over rank probabilities, exact rationals) contains
/// u.  If a's vector is prefix-majorized by b's, then a's sorted load vector
/// stays prefix-majorized by b's at every step; this is verified with exact
/// integer prefix sums after every ball.
struct CouplingReport {
  bool precondition_holds = false;  ///< a's vector prefix-majorized by b's
  bool holds = false;               ///< load majorization held at every step
  std::uint64_t steps = 0;          ///< balls actually placed
  std::uint64_t violation_step = 0;   ///< first violating step (valid if !holds)
  std::uint32_t violation_prefix = 0; ///< 1-based prefix length of first violation
  std::int64_t max_slack = 0;  ///< max over steps/prefixes of sum_a - sum_b (<= 0 iff holds)
};
CouplingReport coupled_run(const ProcessSpec& a, const ProcessSpec& b, std::uint32_t n,
                           std::uint64_t m, std::uint64_t seed);

/// Brute-force per-rank probability of one step by enumerating every equally
/// likely outcome (sample tuples, probe chains, or edge/coin pairs) in exact
/// arithmetic.  Guards: n <= 64, and at most 4 samples/probes per ball.
std::vector<rational> enum_vector(const ProcessSpec& spec, const LoadState& state);

/// Monte-Carlo frequency check of step() against the analytic vector.
struct EmpiricalReport {
  std::vector<double> frequencies;   ///< observed hit rate per rank
  double max_sigmas = 0.0;           ///< worst |freq - p| in binomial sigmas
  std::uint32_t worst_rank = 0;      ///< 0-based rank attaining it
  bool within_budget = false;
};
EmpiricalReport empirical_vector(const ProcessSpec& spec, const LoadState& state,
                                 std::uint64_t trials, std::uint64_t seed,
                                 double sigma_budget = 4.0);

/// Membership test for the relaxed quantile class, entrywise form: with cuts
/// c_1 < ... < c_k and the quantile vector q of those cuts,
///   (i)   p_i <= gamma * q_i for every rank i <= c_k,
///   (ii)  p is non-decreasing,
///   (iii) p_{ceil(n/3)}  <= (1 - 4 eps)/n,
///   (iv)  p_{ceil(2n/3)} >= (1 + 4 eps)/n,
/// with eps in (0, 1/4).  Tolerance 1e-12 throughout.
struct RelaxedEntrywiseReport {
  bool tier_caps = false;
  bool non_decreasing = false;
  bool light_separation = false;  ///< condition (iii)
  bool heavy_separation = false;  ///< condition (iv)
  double worst_cap_excess = 0.0;  ///< max of p_i - gamma q_i over checked ranks
  double worst_monotone_drop = 0.0;
  bool member = false;
};
RelaxedEntrywiseReport relaxed_quantile_entrywise(const std::vector<double>& p,
                                                  const std::vector<std::uint32_t>& cuts,
                                                  std::uint32_t n, double gamma, double eps);

/// Membership in prefix/suffix (majorized) form, exact arithmetic: for the
/// quantile vector q of the cuts,
///   (a) prefix_j(p) <= gamma * prefix_j(q)        for j <= c_k,
///   (b) prefix_j(p) <= (1 - 4 eps) j / n          for j <= ceil(n/3),
///   (c) suffix from rank r of p >= (1+4 eps)(n-r+1)/n   for r >= ceil(2n/3).
/// This is the right form for processes whose vector is non-monotone at
/// individual ranks (e.g. graphical allocation) but balanced in aggregate.
struct RelaxedMajorizedReport {
  bool cap_prefixes = false;
  bool light_prefix = false;
  bool heavy_suffix = false;
  double worst_cap_excess = 0.0;
  double worst_light_excess = 0.0;
  double worst_heavy_shortfall = 0.0;
  bool member = false;
};
RelaxedMajorizedReport relaxed_quantile_majorized(const std::vector<rational>& p,
                                                  const std::vector<std::uint32_t>& cuts,
                                                  std::uint32_t n, const rational& gamma,
                                                  const rational& eps);

/// A single-cut quantile step is distributed exactly like 2-probe thinning
/// with the same cut: both enumerations must agree rank by rank.
bool thinning_equivalence_check(std::uint32_t cut, std::uint32_t n);

/// The quantile fraction delta such that Threshold(f) on this state behaves
/// like Quantile(delta): the fraction of bins with load >= f.
rational threshold_equiv_quantile(const LoadState& state, std::int64_t f);

/// Decompose Quantile(cut) on a state into a two-threshold mixture: thresholds
/// f_low = y and f_high = y + 1 where y is the load at rank `cut`, mixed with
/// weight alpha on f_high.  alpha = (delta2 - delta)/(delta2 - delta1), where
/// delta1, delta2 are the class boundaries of y (fractions of bins with load
/// > y resp. >= y).  The mixture reproduces the quantile vector exactly after
/// aggregating ranks over equal-load classes; `verified` reports that exact
/// check.
struct MixtureDecomposition {
  std::int64_t f_low = 0;
  std::int64_t f_high = 0;
  rational alpha;  ///< weight of Threshold(f_high); 1 - alpha on Threshold(f_low)
  bool verified = false;
};
MixtureDecomposition quantile_threshold_mixture(const LoadState& state, std::uint32_t cut);

/// Compare Quantile(c_1, ..., c_k) against the 2k-probe thinning chain that
/// asks the same cuts from the top down, each twice (schedule
/// c_k, c_k, c_{k-1}, c_{k-1}, ..., c_1 with the final probe unconditional).
/// The chain's exact vector should be prefix-majorized by the quantile's at
/// the cut boundaries; `full_holds` additionally reports all prefixes.
struct ChainMajorizationReport {
  std::vector<std::uint32_t> schedule;
  bool boundary_holds = false;
  bool full_holds = false;
  double worst_boundary_slack = 0.0;  ///< max prefix(thinning) - prefix(quantile) at cuts
};
ChainMajorizationReport thinning_chain_check(const std::vector<std::uint32_t>& cuts,
                                             std::uint32_t n);

}  // namespace ballast
