#include "ballast/processes.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ballast/graphs.hpp"

namespace ballast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bigint ipow(bigint base, std::uint32_t exp) {
  bigint result = 1;
  while (exp > 0) {
    if (exp & 1u) result *= base;
    base *= base;
    exp >>= 1u;
  }
  return result;
}

/// Number of cuts strictly below a 1-based rank (== quantile tier; 0 is the
/// heaviest tier).  k is tiny, a linear scan beats binary search.
inline std::uint32_t quantile_tier(std::uint32_t rank1, const std::uint32_t* cuts,
                                   std::uint32_t k) {
  std::uint32_t t = 0;
  while (t < k && cuts[t] < rank1) ++t;
  return t;
}

/// Number of (shifted) thresholds strictly above the load; thresholds are
/// strictly decreasing, so tier 0 means load >= values[0] + shift.
inline std::uint32_t threshold_tier(std::int64_t load, const std::int64_t* values,
                                    std::uint32_t k, std::int64_t shift) {
  std::uint32_t t = 0;
  while (t < k && values[t] + shift > load) ++t;
  return t;
}

// ---------------------------------------------------------------------------
// Steppers: one small functor per process, instantiated once per run so the
// ball loop compiles to straight-line code.

struct OneChoiceStep {
  std::uint32_t n;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState&) {
    return static_cast<std::uint32_t>(rng->bounded(n));
  }
};

/// Lower load wins; among equal loads the sample further right in the
/// descending order (the lighter rank) wins.
inline std::uint32_t lighter_sample(const LoadState& s, std::uint32_t a, std::uint32_t b) {
  const std::uint64_t la = s.load(a), lb = s.load(b);
  if (la != lb) return la < lb ? a : b;
  return s.rank_of(a) > s.rank_of(b) ? a : b;
}

struct TwoChoiceStep {
  std::uint32_t n;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    const auto a = static_cast<std::uint32_t>(rng->bounded(n));
    const auto b = static_cast<std::uint32_t>(rng->bounded(n));
    return lighter_sample(s, a, b);
  }
};

struct DChoiceStep {
  std::uint32_t n;
  std::uint32_t d;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    auto best = static_cast<std::uint32_t>(rng->bounded(n));
    for (std::uint32_t i = 1; i < d; ++i) {
      const auto c = static_cast<std::uint32_t>(rng->bounded(n));
      best = lighter_sample(s, best, c);
    }
    return best;
  }
};

struct OnePlusBetaStep {
  std::uint32_t n;
  double beta;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    if (rng->uniform01() < beta) {
      const auto a = static_cast<std::uint32_t>(rng->bounded(n));
      const auto b = static_cast<std::uint32_t>(rng->bounded(n));
      return lighter_sample(s, a, b);
    }
    return static_cast<std::uint32_t>(rng->bounded(n));
  }
};

struct QuantileStep {
  std::uint32_t n;
  const std::uint32_t* cuts;
  std::uint32_t k;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    const auto a = static_cast<std::uint32_t>(rng->bounded(n));
    const auto b = static_cast<std::uint32_t>(rng->bounded(n));
    const std::uint32_t ta = quantile_tier(s.rank_of(a) + 1, cuts, k);
    const std::uint32_t tb = quantile_tier(s.rank_of(b) + 1, cuts, k);
    // The larger tier index is the lighter side and receives the ball.
    if (ta != tb) return ta > tb ? a : b;
    return rng->coin() ? a : b;
  }
};

struct ThresholdStep {
  std::uint32_t n;
  const std::int64_t* values;
  std::uint32_t k;
  bool relative;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    const std::int64_t shift =
        relative ? static_cast<std::int64_t>(s.total() / n) : std::int64_t{0};
    const auto a = static_cast<std::uint32_t>(rng->bounded(n));
    const auto b = static_cast<std::uint32_t>(rng->bounded(n));
    const std::uint32_t ta = threshold_tier(static_cast<std::int64_t>(s.load(a)), values, k, shift);
    const std::uint32_t tb = threshold_tier(static_cast<std::int64_t>(s.load(b)), values, k, shift);
    if (ta != tb) return ta > tb ? a : b;
    return rng->coin() ? a : b;
  }
};

struct ThinningStep {
  std::uint32_t n;
  const std::uint32_t* cuts;
  std::uint32_t probes_minus_one;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    for (std::uint32_t j = 0; j < probes_minus_one; ++j) {
      const auto b = static_cast<std::uint32_t>(rng->bounded(n));
      // Accept when the proposal sits below the cut (light enough).
      if (s.rank_of(b) + 1 > cuts[j]) return b;
    }
    return static_cast<std::uint32_t>(rng->bounded(n));
  }
};

struct GraphicalStep {
  const std::pair<std::uint32_t, std::uint32_t>* edges;
  std::uint64_t edge_count;
  Xoshiro256StarStar* rng;
  std::uint32_t operator()(const LoadState& s) {
    const auto& [u, v] = edges[rng->bounded(edge_count)];
    const std::uint64_t lu = s.load(u), lv = s.load(v);
    if (lu != lv) return lu < lv ? u : v;
    return rng->coin() ? u : v;
  }
};

template <class MakeStepper>
RunResult run_generic(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m,
                      std::uint64_t seed, std::uint64_t checkpoint_every,
                      const std::vector<Observer>& observers, MakeStepper&& make) {
  RunResult res;
  res.n = n;
  res.m = m;
  res.seed = seed;
  res.config_echo = describe(spec);
  res.observable_series.resize(observers.size());

  LoadState state(n);
  Xoshiro256StarStar rng(seed);
  auto stepper = make(rng);

  auto record = [&](std::uint64_t t) {
    res.checkpoint_times.push_back(t);
    res.gap_series.push_back(state.gap());
    for (std::size_t i = 0; i < observers.size(); ++i) {
      res.observable_series[i].push_back(observers[i](state));
    }
  };

  const std::uint64_t stride = checkpoint_every == 0 ? (m == 0 ? 1 : m) : checkpoint_every;
  std::uint64_t next_checkpoint = stride;
  for (std::uint64_t t = 1; t <= m; ++t) {
    state.increment(stepper(state));
    if (t == next_checkpoint) {
      record(t);
      next_checkpoint += stride;
    }
  }
  if (res.checkpoint_times.empty() || res.checkpoint_times.back() != m) record(m);

  res.final_gap = state.gap();
  res.max_load = state.load(state.bin_at_rank(0));
  res.final_state = std::move(state);
  return res;
}

}  // namespace

void validate(const ProcessSpec& spec, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("process: n must be positive");
  std::visit(
      overloaded{
          [&](const OneChoice&) {},
          [&](const DChoice& p) {
            if (p.d == 0 || p.d > 64) {
              throw std::invalid_argument("d-choice: d must lie in [1, 64]");
            }
          },
          [&](const OnePlusBeta& p) {
            if (!(p.beta >= 0.0 && p.beta <= 1.0)) {
              throw std::invalid_argument("one-plus-beta: beta must lie in [0, 1]");
            }
          },
          [&](const Quantile& p) {
            if (p.cuts.empty()) throw std::invalid_argument("quantile: cuts must be non-empty");
            for (std::size_t i = 0; i < p.cuts.size(); ++i) {
              if (p.cuts[i] < 1 || p.cuts[i] > n - 1) {
                throw std::invalid_argument("quantile: cuts must be counts in [1, n-1]");
              }
              if (i > 0 && p.cuts[i] <= p.cuts[i - 1]) {
                throw std::invalid_argument("quantile: cuts must be strictly increasing");
              }
            }
          },
          [&](const Threshold& p) {
            if (p.values.empty()) {
              throw std::invalid_argument("threshold: values must be non-empty");
            }
            for (std::size_t i = 1; i < p.values.size(); ++i) {
              if (p.values[i] >= p.values[i - 1]) {
                throw std::invalid_argument("threshold: values must be strictly decreasing");
              }
            }
          },
          [&](const Thinning& p) {
            if (p.accept_cuts.empty()) {
              throw std::invalid_argument("thinning: accept_cuts must be non-empty");
            }
            for (std::size_t i = 0; i < p.accept_cuts.size(); ++i) {
              if (p.accept_cuts[i] < 1 || p.accept_cuts[i] > n - 1) {
                throw std::invalid_argument("thinning: cuts must be counts in [1, n-1]");
              }
              if (i > 0 && p.accept_cuts[i] > p.accept_cuts[i - 1]) {
                throw std::invalid_argument("thinning: cuts must be non-increasing");
              }
            }
          },
          [&](const Graphical& p) {
            if (!p.graph) throw std::invalid_argument("graphical: graph is required");
            if (p.graph->n != n) {
              throw std::invalid_argument("graphical: graph vertex count differs from n");
            }
            if (p.graph->edges.empty()) {
              throw std::invalid_argument("graphical: graph has no edges");
            }
          },
      },
      spec);
}

std::string describe(const ProcessSpec& spec) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const OneChoice&) { out << "one-choice"; },
                 [&](const DChoice& p) {
                   if (p.d == 2) {
                     out << "two-choice";
                   } else {
                     out << "d-choice(d=" << p.d << ")";
                   }
                 },
                 [&](const OnePlusBeta& p) {
                   out << "one-plus-beta(beta=" << std::setprecision(17) << p.beta << ")";
                 },
                 [&](const Quantile& p) {
                   out << "quantile(cuts=";
                   for (std::size_t i = 0; i < p.cuts.size(); ++i) {
                     out << (i ? "," : "") << p.cuts[i];
                   }
                   out << ")";
                 },
                 [&](const Threshold& p) {
                   out << "threshold(values=";
                   for (std::size_t i = 0; i < p.values.size(); ++i) {
                     out << (i ? "," : "") << p.values[i];
                   }
                   out << (p.relative_to_average ? ";relative" : ";absolute") << ")";
                 },
                 [&](const Thinning& p) {
                   out << "thinning(cuts=";
                   for (std::size_t i = 0; i < p.accept_cuts.size(); ++i) {
                     out << (i ? "," : "") << p.accept_cuts[i];
                   }
                   out << ")";
                 },
                 [&](const Graphical& p) {
                   out << "graphical(";
                   if (p.graph) out << "n=" << p.graph->n << ",d=" << p.graph->d;
                   out << ")";
                 },
             },
             spec);
  return out.str();
}

bool is_process_name(const std::string& name) {
  static const std::set<std::string> names{"one-choice", "two-choice",   "d-choice",
                                           "one-plus-beta", "quantile",  "threshold",
                                           "thinning",    "graphical"};
  return names.count(name) != 0;
}

std::vector<std::uint32_t> make_uniform_quantiles(std::uint32_t n, std::uint32_t k, LogBase base,
                                                  double scale) {
  if (n < 2) throw std::invalid_argument("make_uniform_quantiles: need n >= 2");
  if (k == 0) throw std::invalid_argument("make_uniform_quantiles: need k >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("make_uniform_quantiles: scale must be positive");
  const long double log_n = log_of(static_cast<long double>(n), base);
  std::vector<long double> deltas(k);
  deltas[k - 1] = 0.5L;
  for (std::uint32_t i = 1; i < k; ++i) {
    const long double exponent =
        static_cast<long double>(scale) *
        std::pow(log_n, static_cast<long double>(k - i) / static_cast<long double>(k));
    deltas[i - 1] = std::exp2(-exponent);
  }
  // The raw grid can dip below 1/2 non-monotonically for small n; sort before
  // rounding so the counts come out ordered.
  std::sort(deltas.begin(), deltas.end());
  std::vector<std::uint32_t> cuts(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    long double scaled = deltas[i] * static_cast<long double>(n);
    auto c = static_cast<std::uint64_t>(std::ceil(scaled));
    if (c < 1) c = 1;
    cuts[i] = static_cast<std::uint32_t>(c);
  }
  for (std::uint32_t i = 1; i < k; ++i) {
    if (cuts[i] <= cuts[i - 1]) {
      throw std::invalid_argument(
          "make_uniform_quantiles: cuts collide after rounding; k is too large for this n");
    }
  }
  return cuts;
}

namespace {

std::vector<std::uint32_t> threshold_tiers_by_rank(const Threshold& p, std::uint32_t n,
                                                   const LoadState& state) {
  const std::int64_t shift =
      p.relative_to_average ? static_cast<std::int64_t>(state.total() / n) : std::int64_t{0};
  std::vector<std::uint32_t> tier(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    tier[r] = threshold_tier(static_cast<std::int64_t>(state.load(state.bin_at_rank(r))),
                             p.values.data(), static_cast<std::uint32_t>(p.values.size()), shift);
  }
  return tier;
}

/// Per-rank vector of any two-sample tier process, given the (non-decreasing)
/// tier of each rank: a bin beats the bins in strictly heavier tiers and
/// halves the pairs inside its own tier block, so with block start s and block
/// size z the probability is (2s + z) / n^2.
std::vector<rational> pair_vector_from_tiers(const std::vector<std::uint32_t>& tier,
                                             std::uint32_t n) {
  std::vector<rational> p(n);
  const std::uint64_t denom = static_cast<std::uint64_t>(n) * n;
  std::uint32_t block_start = 0;
  while (block_start < n) {
    std::uint32_t block_end = block_start;
    while (block_end < n && tier[block_end] == tier[block_start]) ++block_end;
    const std::uint64_t units = 2ull * block_start + (block_end - block_start);
    const rational value(units, denom);
    for (std::uint32_t r = block_start; r < block_end; ++r) p[r] = value;
    block_start = block_end;
  }
  return p;
}

}  // namespace

std::vector<rational> analytic_vector_exact(const ProcessSpec& spec, std::uint32_t n,
                                            const LoadState* state) {
  validate(spec, n);
  const std::uint64_t n2 = static_cast<std::uint64_t>(n) * n;
  return std::visit(
      overloaded{
          [&](const OneChoice&) {
            return std::vector<rational>(n, rational(1, n));
          },
          [&](const DChoice& p) {
            std::vector<rational> v(n);
            const bigint denom = ipow(bigint(n), p.d);
            bigint prev = 0;
            for (std::uint32_t i = 1; i <= n; ++i) {
              const bigint cur = ipow(bigint(i), p.d);
              v[i - 1] = rational(cur - prev, denom);
              prev = cur;
            }
            return v;
          },
          [&](const OnePlusBeta& p) {
            const rational beta = rational_from_double(p.beta);
            std::vector<rational> v(n);
            for (std::uint32_t i = 1; i <= n; ++i) {
              v[i - 1] = (1 - beta) / n + beta * rational(2ull * i - 1, n2);
            }
            return v;
          },
          [&](const Quantile& p) {
            // Tier t (cuts c_t < rank <= c_{t+1}, with c_0 = 0 and
            // c_{k+1} = n) has probability (c_t + c_{t+1}) / n^2 per rank.
            std::vector<std::uint32_t> ext;
            ext.push_back(0);
            ext.insert(ext.end(), p.cuts.begin(), p.cuts.end());
            ext.push_back(n);
            std::vector<rational> v(n);
            std::uint32_t t = 0;
            for (std::uint32_t r = 1; r <= n; ++r) {
              while (r > ext[t + 1]) ++t;
              v[r - 1] = rational(static_cast<std::uint64_t>(ext[t]) + ext[t + 1], n2);
            }
            return v;
          },
          [&](const Threshold& p) {
            if (state == nullptr) {
              throw std::invalid_argument("analytic_vector: threshold requires a load state");
            }
            return pair_vector_from_tiers(threshold_tiers_by_rank(p, n, *state), n);
          },
          [&](const Thinning& p) {
            // Probability that rank i receives the ball, over denominator n^d:
            // the probe chain accepts at step j with weight
            // (prod_{l<j} c_l) * n^{d-j} when i clears cut j, and the final
            // unconditional probe contributes prod of all cuts.
            const std::uint32_t dm1 = static_cast<std::uint32_t>(p.accept_cuts.size());
            const std::uint32_t d = dm1 + 1;
            const bigint denom = ipow(bigint(n), d);
            std::vector<rational> v(n);
            for (std::uint32_t i = 1; i <= n; ++i) {
              bigint units = 0;
              bigint reject_weight = 1;  // prod of cuts for probes rejected so far
              for (std::uint32_t j = 0; j < dm1; ++j) {
                if (i > p.accept_cuts[j]) {
                  units += reject_weight * ipow(bigint(n), d - 1 - j);
                }
                reject_weight *= p.accept_cuts[j];
              }
              units += reject_weight;
              v[i - 1] = rational(units, denom);
            }
            return v;
          },
          [&](const Graphical& p) {
            if (state == nullptr) {
              throw std::invalid_argument("analytic_vector: graphical requires a load state");
            }
            return graphical_vector_exact(*p.graph, *state);
          },
      },
      spec);
}

std::vector<double> analytic_vector(const ProcessSpec& spec, std::uint32_t n,
                                    const LoadState* state) {
  validate(spec, n);
  const double dn = static_cast<double>(n);
  return std::visit(
      overloaded{
          [&](const OneChoice&) {
            return std::vector<double>(n, 1.0 / dn);
          },
          [&](const DChoice& p) {
            std::vector<double> v(n);
            long double prev = 0.0L;
            for (std::uint32_t i = 1; i <= n; ++i) {
              const long double cur =
                  std::pow(static_cast<long double>(i) / n, static_cast<long double>(p.d));
              v[i - 1] = static_cast<double>(cur - prev);
              prev = cur;
            }
            return v;
          },
          [&](const OnePlusBeta& p) {
            std::vector<double> v(n);
            for (std::uint32_t i = 1; i <= n; ++i) {
              v[i - 1] = (1.0 - p.beta) / dn + p.beta * (2.0 * i - 1.0) / (dn * dn);
            }
            return v;
          },
          [&](const Quantile& p) {
            std::vector<std::uint32_t> ext;
            ext.push_back(0);
            ext.insert(ext.end(), p.cuts.begin(), p.cuts.end());
            ext.push_back(n);
            std::vector<double> v(n);
            std::uint32_t t = 0;
            for (std::uint32_t r = 1; r <= n; ++r) {
              while (r > ext[t + 1]) ++t;
              v[r - 1] = (static_cast<double>(ext[t]) + ext[t + 1]) / (dn * dn);
            }
            return v;
          },
          [&](const Threshold& p) {
            if (state == nullptr) {
              throw std::invalid_argument("analytic_vector: threshold requires a load state");
            }
            const auto tier = threshold_tiers_by_rank(p, n, *state);
            std::vector<double> v(n);
            std::uint32_t block_start = 0;
            while (block_start < n) {
              std::uint32_t block_end = block_start;
              while (block_end < n && tier[block_end] == tier[block_start]) ++block_end;
              const double value =
                  (2.0 * block_start + (block_end - block_start)) / (dn * dn);
              for (std::uint32_t r = block_start; r < block_end; ++r) v[r] = value;
              block_start = block_end;
            }
            return v;
          },
          [&](const Thinning& p) {
            const auto dm1 = static_cast<std::uint32_t>(p.accept_cuts.size());
            std::vector<double> v(n);
            for (std::uint32_t i = 1; i <= n; ++i) {
              double mass = 0.0;
              double reject_prob = 1.0;
              for (std::uint32_t j = 0; j < dm1; ++j) {
                if (i > p.accept_cuts[j]) mass += reject_prob;
                reject_prob *= static_cast<double>(p.accept_cuts[j]) / dn;
              }
              mass += reject_prob;
              v[i - 1] = mass / dn;
            }
            return v;
          },
          [&](const Graphical& p) {
            if (state == nullptr) {
              throw std::invalid_argument("analytic_vector: graphical requires a load state");
            }
            return graphical_vector(*p.graph, *state);
          },
      },
      spec);
}

std::uint32_t step(const ProcessSpec& spec, const LoadState& state, Xoshiro256StarStar& rng) {
  const std::uint32_t n = state.n();
  validate(spec, n);
  return std::visit(
      overloaded{
          [&](const OneChoice&) { return OneChoiceStep{n, &rng}(state); },
          [&](const DChoice& p) {
            if (p.d == 2) return TwoChoiceStep{n, &rng}(state);
            return DChoiceStep{n, p.d, &rng}(state);
          },
          [&](const OnePlusBeta& p) { return OnePlusBetaStep{n, p.beta, &rng}(state); },
          [&](const Quantile& p) {
            return QuantileStep{n, p.cuts.data(), static_cast<std::uint32_t>(p.cuts.size()),
                                &rng}(state);
          },
          [&](const Threshold& p) {
            return ThresholdStep{n, p.values.data(), static_cast<std::uint32_t>(p.values.size()),
                                 p.relative_to_average, &rng}(state);
          },
          [&](const Thinning& p) {
            return ThinningStep{n, p.accept_cuts.data(),
                                static_cast<std::uint32_t>(p.accept_cuts.size()), &rng}(state);
          },
          [&](const Graphical& p) {
            return GraphicalStep{p.graph->edges.data(), p.graph->edges.size(), &rng}(state);
          },
      },
      spec);
}

RunResult run(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m, std::uint64_t seed,
              std::uint64_t checkpoint_every, const std::vector<Observer>& observers) {
  validate(spec, n);
  return std::visit(
      overloaded{
          [&](const OneChoice&) {
            return run_generic(spec, n, m, seed, checkpoint_every, observers,
                               [&](Xoshiro256StarStar& rng) { return OneChoiceStep{n, &rng}; });
          },
          [&](const DChoice& p) {
            if (p.d == 2) {
              return run_generic(spec, n, m, seed, checkpoint_every, observers,
                                 [&](Xoshiro256StarStar& rng) { return TwoChoiceStep{n, &rng}; });
            }
            return run_generic(
                spec, n, m, seed, checkpoint_every, observers,
                [&](Xoshiro256StarStar& rng) { return DChoiceStep{n, p.d, &rng}; });
          },
          [&](const OnePlusBeta& p) {
            return run_generic(
                spec, n, m, seed, checkpoint_every, observers,
                [&](Xoshiro256StarStar& rng) { return OnePlusBetaStep{n, p.beta, &rng}; });
          },
          [&](const Quantile& p) {
            return run_generic(spec, n, m, seed, checkpoint_every, observers,
                               [&](Xoshiro256StarStar& rng) {
                                 return QuantileStep{n, p.cuts.data(),
                                                     static_cast<std::uint32_t>(p.cuts.size()),
                                                     &rng};
                               });
          },
          [&](const Threshold& p) {
            return run_generic(spec, n, m, seed, checkpoint_every, observers,
                               [&](Xoshiro256StarStar& rng) {
                                 return ThresholdStep{n, p.values.data(),
                                                      static_cast<std::uint32_t>(p.values.size()),
                                                      p.relative_to_average, &rng};
                               });
          },
          [&](const Thinning& p) {
            return run_generic(
                spec, n, m, seed, checkpoint_every, observers, [&](Xoshiro256StarStar& rng) {
                  return ThinningStep{n, p.accept_cuts.data(),
                                      static_cast<std::uint32_t>(p.accept_cuts.size()), &rng};
                });
          },
          [&](const Graphical& p) {
            return run_generic(spec, n, m, seed, checkpoint_every, observers,
                               [&](Xoshiro256StarStar& rng) {
                                 return GraphicalStep{p.graph->edges.data(),
                                                      p.graph->edges.size(), &rng};
                               });
          },
      },
      spec);
}

}  // namespace ballast
