#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ballast/common.hpp"
#include "ballast/potentials.hpp"
#include "ballast/processes.hpp"

/// Batch experiment drivers shared by the CLI and the test suites: repetition
/// pools, gap statistics, the reference tables, lower-bound regimes, the
/// graphical degree sweep and the self-verification suite.
///
/// Determinism contract: repetition r always runs on the stream seeded by
/// rep_seed(base_seed, r), so results are independent of thread count and of
/// how many repetitions run; collectors order results by repetition index.
namespace ballast {

/// Rules tying the number of balls to n.
enum class MRule {
  fixed,       ///< use the explicit m
  thousand_n,  ///< m = 1000 n (the heavily loaded reference tables)
  logsq,       ///< m = ceil(n ln^2 n)
  sqrt_rule,   ///< m = ceil(n sqrt(ln n) / 10)
};
MRule m_rule_from_string(const std::string& s);
std::string to_string(MRule rule);
std::uint64_t resolve_m(MRule rule, std::uint32_t n, std::uint64_t fixed_m);

/// Gap threshold that the matching lower-bound regime is expected to exceed:
/// logsq: ln(n) / (8 ln ln n);  sqrt_rule: sqrt(ln n) / 20.
double lower_bound_threshold(MRule regime, std::uint32_t n);

/// Run `work(r)` for r in [0, reps) on a pool of min(threads, reps) workers.
void parallel_reps(std::uint32_t reps, std::uint32_t threads,
                   const std::function<void(std::uint32_t)>& work);

struct GapDistribution {
  std::map<double, std::uint32_t> histogram;  ///< final gap -> repetition count
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::uint32_t repetitions = 0;
  std::string config_echo;
  std::vector<double> gaps;  ///< per-repetition final gaps, by repetition index
};

/// Final-gap distribution over `reps` independent repetitions (no checkpoint
/// series kept; memory stays O(reps + n)).
GapDistribution gap_distribution(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m,
                                 std::uint32_t reps, std::uint64_t base_seed,
                                 std::uint32_t threads);

/// Full per-repetition results (checkpoints and potential series included).
std::vector<RunResult> simulate_reps(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m,
                                     std::uint32_t reps, std::uint64_t base_seed,
                                     std::uint32_t threads, std::uint64_t checkpoint_every,
                                     const std::vector<PotentialSpec>& potentials);

/// A process labelled for table output; the factory receives n so that
/// n-dependent parameters (quantile cuts) can be materialized per row.
struct NamedProcess {
  std::string label;
  std::function<ProcessSpec(std::uint32_t n)> make;
};

/// The reference table processes: one-plus-beta(0.5), the uniform quantile
/// grids k = 1..4 (cut scale `delta_scale`, natural log), and two-choice.
std::vector<NamedProcess> reference_processes(double delta_scale, LogBase base);

struct TableRow {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::string label;
  GapDistribution dist;
};

std::vector<TableRow> gap_table(const std::vector<std::uint32_t>& ns,
                                const std::vector<NamedProcess>& processes, MRule rule,
                                std::uint64_t fixed_m, std::uint32_t reps, std::uint64_t base_seed,
                                std::uint32_t threads);

struct LowerBoundRow {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  double threshold = 0.0;
  std::uint32_t repetitions = 0;
  std::uint32_t exceed_count = 0;  ///< repetitions with final gap >= threshold
  double fraction = 0.0;
  double mean_gap = 0.0;
};

/// Uniform Quantile(delta) under a lower-bound regime (logsq or sqrt_rule).
LowerBoundRow lower_bound_row(std::uint32_t n, double delta, MRule regime, std::uint32_t reps,
                              std::uint64_t base_seed, std::uint32_t threads);

struct GraphicalRow {
  std::uint32_t degree = 0;
  std::string kind;  ///< cycle / random-regular / complete
  double lambda = 0.0;
  std::uint64_t m = 0;
  GapDistribution dist;
};

/// Graphical allocation across degrees: 2 uses the cycle, n-1 the complete
/// graph, anything else a seeded random regular graph.
std::vector<GraphicalRow> graphical_sweep(std::uint32_t n, const std::vector<std::uint32_t>& degrees,
                                          MRule rule, std::uint64_t fixed_m, std::uint32_t reps,
                                          std::uint64_t base_seed, std::uint32_t threads);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The self-verification suite: exact identities, enumeration oracles,
/// couplings, mixing and prefix bounds, relaxed-class membership and
/// determinism.  With `inject_fault` the quantile vector of the first check is
/// deliberately perturbed; exactly that check must then fail.
std::vector<VerifyCheck> run_verify(bool inject_fault);

}  // namespace ballast
