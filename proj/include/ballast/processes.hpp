#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ballast/common.hpp"
#include "ballast/load_state.hpp"
#include "ballast/rational.hpp"
#include "ballast/rng.hpp"

/// The allocation processes: definitions, per-rank probability vectors,
/// single-step sampling, and the tight simulation loop.
///
/// Convention: probability vectors are indexed by descending rank (index 0 is
/// a heaviest bin).  Quantile cuts and thinning cuts are stored as integer
/// counts c = delta * n, never as floating-point fractions.
namespace ballast {

struct RegularGraph;

/// Uniform allocation: each ball goes to a uniform bin.
struct OneChoice {};

/// d uniform samples with replacement; the ball goes to a least-loaded sample
/// (among tied least-loaded samples, the one latest in the descending order).
struct DChoice {
  std::uint32_t d = 2;
};

/// Mix of the two: with probability beta a two-sample step, else one uniform.
struct OnePlusBeta {
  double beta = 0.5;
};

/// Two samples; each only reveals which quantile tier its rank lies in, cut at
/// ranks cuts[0] < cuts[1] < ... (counts in [1, n-1]).  The sample in the
/// lighter tier wins; a fair coin decides equal tiers.
struct Quantile {
  std::vector<std::uint32_t> cuts;
};

/// Two samples; each only reveals which load range it lies in, cut at strictly
/// decreasing thresholds.  With `relative_to_average` set, the effective
/// thresholds at time t are values[i] + floor(t/n).
struct Threshold {
  std::vector<std::int64_t> values;
  bool relative_to_average = false;
};

/// Bins proposed one at a time: proposal j is accepted iff its rank exceeds
/// accept_cuts[j] (it is light enough); the last of accept_cuts.size() + 1
/// proposals is always accepted.  Cuts are non-increasing counts.
struct Thinning {
  std::vector<std::uint32_t> accept_cuts;
};

/// A uniform edge of a regular graph is drawn; the ball goes to its
/// lesser-loaded endpoint, with a fair coin on ties.
struct Graphical {
  std::shared_ptr<const RegularGraph> graph;
};

using ProcessSpec =
    std::variant<OneChoice, DChoice, OnePlusBeta, Quantile, Threshold, Thinning, Graphical>;

/// Throws std::invalid_argument naming the offending field if the
/// configuration is not well formed for n bins.
void validate(const ProcessSpec& spec, std::uint32_t n);

/// Canonical one-line description, used in CSV/JSON config echoes.
std::string describe(const ProcessSpec& spec);

/// Parse a process name as used by the CLI ("one-choice", "two-choice",
/// "d-choice", "one-plus-beta", "quantile", "threshold", "thinning",
/// "graphical").
bool is_process_name(const std::string& name);

/// The uniform quantile grid: cut k is 1/2, cut i < k is
/// 2^{-scale * (log n)^{(k-i)/k}}, sorted ascending, rounded up to a multiple
/// of 1/n and clamped to at least 1/n.  Returns integer counts.  Throws if
/// rounding collapses two cuts.
std::vector<std::uint32_t> make_uniform_quantiles(std::uint32_t n, std::uint32_t k,
                                                  LogBase base = LogBase::natural,
                                                  double scale = 0.5);

/// Per-rank probability vector of one allocation step.  Threshold and
/// Graphical depend on the current loads and require `state`; the others are
/// load-independent and ignore it.
std::vector<double> analytic_vector(const ProcessSpec& spec, std::uint32_t n,
                                    const LoadState* state = nullptr);

/// Same vector in exact rational arithmetic.  For OnePlusBeta the exact binary
/// value of beta is used.
std::vector<rational> analytic_vector_exact(const ProcessSpec& spec, std::uint32_t n,
                                            const LoadState* state = nullptr);

/// Sample the bin receiving the next ball.  Does not modify the state.
std::uint32_t step(const ProcessSpec& spec, const LoadState& state, Xoshiro256StarStar& rng);

/// Scalar observable evaluated on the state at checkpoints (e.g. a potential).
using Observer = std::function<double(const LoadState&)>;

struct RunResult {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::string config_echo;
  double final_gap = 0.0;
  std::uint64_t max_load = 0;
  /// Checkpoint times (multiples of checkpoint_every, plus m itself last).
  std::vector<std::uint64_t> checkpoint_times;
  std::vector<double> gap_series;
  /// observable_series[i][j] = observers[i] evaluated at checkpoint_times[j].
  std::vector<std::vector<double>> observable_series;
  LoadState final_state{1};
};

/// Run m balls from the empty state with a dedicated generator seeded by
/// `seed`.  checkpoint_every == 0 records only the final checkpoint.
/// Deterministic: identical arguments give an identical RunResult.
RunResult run(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m, std::uint64_t seed,
              std::uint64_t checkpoint_every = 0, const std::vector<Observer>& observers = {});

}  // namespace ballast
