#include "ballast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ballast/graphs.hpp"
#include "ballast/rng.hpp"

namespace ballast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kTol = 1e-12;

std::uint32_t ceil_div(std::uint32_t a, std::uint32_t b) { return (a + b - 1) / b; }

bigint ipow_big(std::uint32_t base, std::uint32_t exp) {
  bigint result = 1;
  for (std::uint32_t i = 0; i < exp; ++i) result *= base;
  return result;
}

/// Enumeration guard shared by the oracle paths.
void check_enum_limits(const ProcessSpec& spec, std::uint32_t n) {
  if (n > 64) throw std::invalid_argument("enum_vector: n must be at most 64");
  std::visit(overloaded{
                 [](const DChoice& p) {
                   if (p.d > 4) throw std::invalid_argument("enum_vector: d must be at most 4");
                 },
                 [](const Thinning& p) {
                   if (p.accept_cuts.size() + 1 > 4) {
                     throw std::invalid_argument("enum_vector: at most 4 probes");
                   }
                 },
                 [](const auto&) {},
             },
             spec);
}

/// Walk all tuples in [0, n)^d, calling visit(tuple pointer).
template <class Visit>
void for_each_tuple(std::uint32_t n, std::uint32_t d, Visit&& visit) {
  std::vector<std::uint32_t> tuple(d, 0);
  while (true) {
    visit(tuple);
    std::uint32_t pos = d;
    while (pos > 0) {
      if (++tuple[pos - 1] < n) break;
      tuple[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) return;
  }
}

std::vector<rational> units_to_vector(const std::vector<std::uint64_t>& units,
                                      const bigint& denom) {
  std::vector<rational> p(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) p[i] = rational(bigint(units[i]), denom);
  return p;
}

}  // namespace

bool prefix_majorizes(const std::vector<double>& p, const std::vector<double>& q, double tol) {
  if (p.size() != q.size()) throw std::invalid_argument("prefix_majorizes: size mismatch");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    if (sp > sq + tol) return false;
  }
  return true;
}

bool prefix_majorizes_exact(const std::vector<rational>& p, const std::vector<rational>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("prefix_majorizes: size mismatch");
  rational sp = 0, sq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    if (sp > sq) return false;
  }
  return true;
}

CouplingReport coupled_run(const ProcessSpec& a, const ProcessSpec& b, std::uint32_t n,
                           std::uint64_t m, std::uint64_t seed) {
  validate(a, n);
  validate(b, n);
  auto require_load_independent = [](const ProcessSpec& spec) {
    if (std::holds_alternative<Threshold>(spec) || std::holds_alternative<Graphical>(spec)) {
      throw std::invalid_argument(
          "coupled_run: both processes must have load-independent vectors");
    }
  };
  require_load_independent(a);
  require_load_independent(b);

  const auto pa = analytic_vector_exact(a, n);
  const auto pb = analytic_vector_exact(b, n);

  CouplingReport report;
  report.precondition_holds = prefix_majorizes_exact(pa, pb);
  if (!report.precondition_holds) return report;

  auto cdf_of = [](const std::vector<rational>& p) {
    std::vector<rational> cdf(p.size());
    rational acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      cdf[i] = acc;
    }
    return cdf;
  };
  const auto cdf_a = cdf_of(pa);
  const auto cdf_b = cdf_of(pb);

  // Smallest rank whose CDF strictly exceeds u; the rank probabilities are
  // exactly the CDF interval lengths.
  auto locate = [](const std::vector<rational>& cdf, const rational& u) {
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return static_cast<std::uint32_t>(lo);
  };

  LoadState sa(n), sb(n);
  Xoshiro256StarStar rng(seed);
  report.holds = true;
  report.max_slack = 0;
  const std::uint64_t denom = 1ull << 53;
  for (std::uint64_t t = 1; t <= m; ++t) {
    const rational u(rng.next() >> 11, denom);
    sa.increment(sa.bin_at_rank(locate(cdf_a, u)));
    sb.increment(sb.bin_at_rank(locate(cdf_b, u)));
    std::int64_t sum_a = 0, sum_b = 0;
    for (std::uint32_t r = 0; r < n; ++r) {
      sum_a += static_cast<std::int64_t>(sa.load(sa.bin_at_rank(r)));
      sum_b += static_cast<std::int64_t>(sb.load(sb.bin_at_rank(r)));
      const std::int64_t slack = sum_a - sum_b;
      report.max_slack = std::max(report.max_slack, slack);
      if (slack > 0 && report.holds) {
        report.holds = false;
        report.violation_step = t;
        report.violation_prefix = r + 1;
      }
    }
    report.steps = t;
  }
  return report;
}

std::vector<rational> enum_vector(const ProcessSpec& spec, const LoadState& state) {
  const std::uint32_t n = state.n();
  validate(spec, n);
  check_enum_limits(spec, n);
  return std::visit(
      overloaded{
          [&](const OneChoice&) {
            // One uniform sample; every position is one outcome.
            std::vector<std::uint64_t> units(n, 1);
            return units_to_vector(units, bigint(n));
          },
          [&](const DChoice& p) {
            // Outcome of a tuple of sampled positions: the least-loaded sample
            // with the rightmost position, which on a descending order is
            // simply the maximum position.
            std::vector<std::uint64_t> units(n, 0);
            for_each_tuple(n, p.d, [&](const std::vector<std::uint32_t>& tuple) {
              units[*std::max_element(tuple.begin(), tuple.end())] += 1;
            });
            return units_to_vector(units, ipow_big(n, p.d));
          },
          [&](const OnePlusBeta& p) {
            // Mixture of the enumerated components with the exact beta.
            const auto one = enum_vector(OneChoice{}, state);
            const auto two = enum_vector(DChoice{2}, state);
            const rational beta = rational_from_double(p.beta);
            std::vector<rational> v(n);
            for (std::uint32_t i = 0; i < n; ++i) {
              v[i] = (1 - beta) * one[i] + beta * two[i];
            }
            return v;
          },
          [&](const Quantile& p) {
            // Ordered pairs of positions; a decided pair pays 2 units to the
            // lighter tier, a tied pair 1 unit to each side (denominator
            // 2 n^2 covers the fair coin).
            const auto k = static_cast<std::uint32_t>(p.cuts.size());
            std::vector<std::uint64_t> units(n, 0);
            auto tier_of = [&](std::uint32_t pos) {
              std::uint32_t t = 0;
              while (t < k && p.cuts[t] < pos + 1) ++t;
              return t;
            };
            for (std::uint32_t x = 0; x < n; ++x) {
              for (std::uint32_t y = 0; y < n; ++y) {
                const std::uint32_t tx = tier_of(x), ty = tier_of(y);
                if (tx > ty) {
                  units[x] += 2;
                } else if (ty > tx) {
                  units[y] += 2;
                } else {
                  units[x] += 1;
                  units[y] += 1;
                }
              }
            }
            return units_to_vector(units, bigint(2) * n * n);
          },
          [&](const Threshold& p) {
            const auto k = static_cast<std::uint32_t>(p.values.size());
            const std::int64_t shift =
                p.relative_to_average ? static_cast<std::int64_t>(state.total() / n)
                                      : std::int64_t{0};
            auto tier_of = [&](std::uint32_t pos) {
              const auto load = static_cast<std::int64_t>(state.load(state.bin_at_rank(pos)));
              std::uint32_t t = 0;
              while (t < k && p.values[t] + shift > load) ++t;
              return t;
            };
            std::vector<std::uint64_t> units(n, 0);
            for (std::uint32_t x = 0; x < n; ++x) {
              for (std::uint32_t y = 0; y < n; ++y) {
                const std::uint32_t tx = tier_of(x), ty = tier_of(y);
                if (tx > ty) {
                  units[x] += 2;
                } else if (ty > tx) {
                  units[y] += 2;
                } else {
                  units[x] += 1;
                  units[y] += 1;
                }
              }
            }
            return units_to_vector(units, bigint(2) * n * n);
          },
          [&](const Thinning& p) {
            // Full probe tuples in [0, n)^d; the realized bin is the first
            // probe whose position clears its cut, else the last probe.
            const auto d = static_cast<std::uint32_t>(p.accept_cuts.size() + 1);
            std::vector<std::uint64_t> units(n, 0);
            for_each_tuple(n, d, [&](const std::vector<std::uint32_t>& tuple) {
              std::uint32_t outcome = tuple[d - 1];
              for (std::uint32_t j = 0; j + 1 < d; ++j) {
                if (tuple[j] + 1 > p.accept_cuts[j]) {
                  outcome = tuple[j];
                  break;
                }
              }
              units[outcome] += 1;
            });
            return units_to_vector(units, ipow_big(n, d));
          },
          [&](const Graphical& p) {
            // Outcomes are (edge, coin) pairs.
            const auto& g = *p.graph;
            std::vector<std::uint64_t> units(n, 0);
            for (const auto& [u, v] : g.edges) {
              for (int coin = 0; coin < 2; ++coin) {
                const std::uint64_t lu = state.load(u), lv = state.load(v);
                std::uint32_t winner;
                if (lu != lv) {
                  winner = lu < lv ? u : v;
                } else {
                  winner = coin ? u : v;
                }
                units[state.rank_of(winner)] += 1;
              }
            }
            return units_to_vector(units, bigint(2) * static_cast<std::uint64_t>(g.edges.size()));
          },
      },
      spec);
}

EmpiricalReport empirical_vector(const ProcessSpec& spec, const LoadState& state,
                                 std::uint64_t trials, std::uint64_t seed, double sigma_budget) {
  if (trials < 10000) {
    throw std::invalid_argument("empirical_vector: need at least 10^4 trials");
  }
  const std::uint32_t n = state.n();
  const auto reference = analytic_vector(spec, n, &state);
  std::vector<std::uint64_t> hits(n, 0);
  Xoshiro256StarStar rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    hits[state.rank_of(step(spec, state, rng))] += 1;
  }
  EmpiricalReport report;
  report.frequencies.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    const double freq = static_cast<double>(hits[r]) / static_cast<double>(trials);
    report.frequencies[r] = freq;
    const double p = reference[r];
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    double dev;
    if (sigma == 0.0) {
      dev = freq == p ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      dev = std::abs(freq - p) / sigma;
    }
    if (dev > report.max_sigmas) {
      report.max_sigmas = dev;
      report.worst_rank = r;
    }
  }
  report.within_budget = report.max_sigmas <= sigma_budget;
  return report;
}

RelaxedEntrywiseReport relaxed_quantile_entrywise(const std::vector<double>& p,
                                                  const std::vector<std::uint32_t>& cuts,
                                                  std::uint32_t n, double gamma, double eps) {
  if (p.size() != n) throw std::invalid_argument("relaxed_quantile: vector size must be n");
  if (!(eps > 0.0 && eps < 0.25)) {
    throw std::invalid_argument("relaxed_quantile: eps must lie in (0, 1/4)");
  }
  if (!(gamma >= 1.0)) throw std::invalid_argument("relaxed_quantile: gamma must be >= 1");
  validate(Quantile{cuts}, n);
  const auto q = analytic_vector(Quantile{cuts}, n);

  RelaxedEntrywiseReport report;
  report.tier_caps = true;
  for (std::uint32_t i = 0; i < cuts.back(); ++i) {
    const double excess = p[i] - gamma * q[i];
    report.worst_cap_excess = std::max(report.worst_cap_excess, excess);
    if (excess > kTol) report.tier_caps = false;
  }
  report.non_decreasing = true;
  for (std::uint32_t i = 1; i < n; ++i) {
    const double drop = p[i - 1] - p[i];
    report.worst_monotone_drop = std::max(report.worst_monotone_drop, drop);
    if (drop > kTol) report.non_decreasing = false;
  }
  const std::uint32_t light_rank = ceil_div(n, 3);
  const std::uint32_t heavy_rank = ceil_div(2 * n, 3);
  report.light_separation = p[light_rank - 1] <= (1.0 - 4.0 * eps) / n + kTol;
  report.heavy_separation = p[heavy_rank - 1] >= (1.0 + 4.0 * eps) / n - kTol;
  report.member = report.tier_caps && report.non_decreasing && report.light_separation &&
                  report.heavy_separation;
  return report;
}

RelaxedMajorizedReport relaxed_quantile_majorized(const std::vector<rational>& p,
                                                  const std::vector<std::uint32_t>& cuts,
                                                  std::uint32_t n, const rational& gamma,
                                                  const rational& eps) {
  if (p.size() != n) throw std::invalid_argument("relaxed_quantile: vector size must be n");
  if (!(eps > 0 && eps < rational(1, 4))) {
    throw std::invalid_argument("relaxed_quantile: eps must lie in (0, 1/4)");
  }
  if (gamma < 1) throw std::invalid_argument("relaxed_quantile: gamma must be >= 1");
  validate(Quantile{cuts}, n);
  const auto q = analytic_vector_exact(Quantile{cuts}, n);

  RelaxedMajorizedReport report;
  report.cap_prefixes = true;
  report.light_prefix = true;
  report.heavy_suffix = true;

  const std::uint32_t light_limit = ceil_div(n, 3);
  const std::uint32_t heavy_start = ceil_div(2 * n, 3);
  const rational light_slope = (1 - 4 * eps) / n;
  const rational heavy_slope = (1 + 4 * eps) / n;

  rational prefix_p = 0, prefix_q = 0;
  for (std::uint32_t j = 1; j <= cuts.back() || j <= light_limit; ++j) {
    prefix_p += p[j - 1];
    prefix_q += q[j - 1];
    if (j <= cuts.back()) {
      const rational excess = prefix_p - gamma * prefix_q;
      report.worst_cap_excess = std::max(report.worst_cap_excess, to_double(excess));
      if (excess > 0) report.cap_prefixes = false;
    }
    if (j <= light_limit) {
      const rational excess = prefix_p - light_slope * j;
      report.worst_light_excess = std::max(report.worst_light_excess, to_double(excess));
      if (excess > 0) report.light_prefix = false;
    }
  }
  rational suffix_p = 0;
  for (std::uint32_t r = n; r >= heavy_start; --r) {
    suffix_p += p[r - 1];
    const rational shortfall = heavy_slope * (n - r + 1) - suffix_p;
    report.worst_heavy_shortfall = std::max(report.worst_heavy_shortfall, to_double(shortfall));
    if (shortfall > 0) report.heavy_suffix = false;
    if (r == 1) break;
  }
  report.member = report.cap_prefixes && report.light_prefix && report.heavy_suffix;
  return report;
}

bool thinning_equivalence_check(std::uint32_t cut, std::uint32_t n) {
  LoadState state(n);
  const auto quantile = enum_vector(Quantile{{cut}}, state);
  const auto thinning = enum_vector(Thinning{{cut}}, state);
  return quantile == thinning;
}

rational threshold_equiv_quantile(const LoadState& state, std::int64_t f) {
  std::uint32_t at_or_above = 0;
  for (std::uint32_t b = 0; b < state.n(); ++b) {
    if (static_cast<std::int64_t>(state.load(b)) >= f) ++at_or_above;
  }
  return rational(at_or_above, state.n());
}

MixtureDecomposition quantile_threshold_mixture(const LoadState& state, std::uint32_t cut) {
  const std::uint32_t n = state.n();
  if (cut == 0 || cut >= n) {
    throw std::invalid_argument("quantile_threshold_mixture: cut must lie in [1, n-1]");
  }
  const std::uint64_t y = state.quantile_value(cut);
  std::uint32_t above = 0, at_or_above = 0;
  for (std::uint32_t b = 0; b < n; ++b) {
    if (state.load(b) > y) ++above;
    if (state.load(b) >= y) ++at_or_above;
  }
  MixtureDecomposition mix;
  mix.f_low = static_cast<std::int64_t>(y);
  mix.f_high = static_cast<std::int64_t>(y) + 1;
  // alpha = (delta2 - delta) / (delta2 - delta1) with the deltas as count
  // fractions; the class of y is never empty, so delta1 < delta2.
  if (at_or_above == above) {
    mix.alpha = 1;
  } else {
    mix.alpha = rational(static_cast<std::int64_t>(at_or_above) - static_cast<std::int64_t>(cut),
                         static_cast<std::int64_t>(at_or_above) - static_cast<std::int64_t>(above));
  }

  // Verify: the mixture's vector agrees with the quantile's after summing
  // ranks over each maximal equal-load class.  Threshold(f_low) acts as
  // Quantile(delta2) and Threshold(f_high) as Quantile(delta1).
  const auto target = analytic_vector_exact(Quantile{{cut}}, n);
  const auto low = analytic_vector_exact(Threshold{{mix.f_low}, false}, n, &state);
  const auto high = analytic_vector_exact(Threshold{{mix.f_high}, false}, n, &state);
  mix.verified = true;
  std::uint32_t block_start = 0;
  while (block_start < n) {
    std::uint32_t block_end = block_start;
    const std::uint64_t value = state.load(state.bin_at_rank(block_start));
    while (block_end < n && state.load(state.bin_at_rank(block_end)) == value) ++block_end;
    rational agg_target = 0, agg_mix = 0;
    for (std::uint32_t r = block_start; r < block_end; ++r) {
      agg_target += target[r];
      agg_mix += (1 - mix.alpha) * low[r] + mix.alpha * high[r];
    }
    if (agg_target != agg_mix) {
      mix.verified = false;
      break;
    }
    block_start = block_end;
  }
  return mix;
}

ChainMajorizationReport thinning_chain_check(const std::vector<std::uint32_t>& cuts,
                                             std::uint32_t n) {
  validate(Quantile{cuts}, n);
  ChainMajorizationReport report;
  // Top cut first, each cut probed twice, 2k probes total: the 2k-th probe is
  // the unconditional one, so 2k - 1 cuts are scheduled.
  const auto k = static_cast<std::uint32_t>(cuts.size());
  for (std::uint32_t i = k; i >= 1; --i) {
    report.schedule.push_back(cuts[i - 1]);
    report.schedule.push_back(cuts[i - 1]);
  }
  report.schedule.pop_back();

  const auto chain = analytic_vector_exact(Thinning{report.schedule}, n);
  const auto quantile = analytic_vector_exact(Quantile{cuts}, n);
  report.boundary_holds = true;
  report.full_holds = true;
  rational prefix_chain = 0, prefix_quantile = 0;
  std::size_t next_cut = 0;
  for (std::uint32_t j = 1; j <= n; ++j) {
    prefix_chain += chain[j - 1];
    prefix_quantile += quantile[j - 1];
    const rational slack = prefix_chain - prefix_quantile;
    if (slack > 0) report.full_holds = false;
    if (next_cut < cuts.size() && j == cuts[next_cut]) {
      report.worst_boundary_slack = std::max(report.worst_boundary_slack, to_double(slack));
      if (slack > 0) report.boundary_holds = false;
      ++next_cut;
    }
  }
  return report;
}

}  // namespace ballast
