#include "ballast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ballast/analysis.hpp"
#include "ballast/graphs.hpp"
#include "ballast/rng.hpp"

namespace ballast {

MRule m_rule_from_string(const std::string& s) {
  if (s == "fixed") return MRule::fixed;
  if (s == "1000n") return MRule::thousand_n;
  if (s == "logsq") return MRule::logsq;
  if (s == "sqrt") return MRule::sqrt_rule;
  throw std::invalid_argument("unknown m-rule '" + s + "' (expected fixed, 1000n, logsq, sqrt)");
}

std::string to_string(MRule rule) {
  switch (rule) {
    case MRule::fixed: return "fixed";
    case MRule::thousand_n: return "1000n";
    case MRule::logsq: return "logsq";
    case MRule::sqrt_rule: return "sqrt";
  }
  return "?";
}

std::uint64_t resolve_m(MRule rule, std::uint32_t n, std::uint64_t fixed_m) {
  const long double ln_n = std::log(static_cast<long double>(n));
  switch (rule) {
    case MRule::fixed:
      if (fixed_m == 0) throw std::invalid_argument("m-rule 'fixed' requires --m > 0");
      return fixed_m;
    case MRule::thousand_n:
      return 1000ull * n;
    case MRule::logsq:
      return static_cast<std::uint64_t>(std::ceil(static_cast<long double>(n) * ln_n * ln_n));
    case MRule::sqrt_rule:
      return static_cast<std::uint64_t>(
          std::ceil(static_cast<long double>(n) * std::sqrt(ln_n) / 10.0L));
  }
  throw std::invalid_argument("resolve_m: bad rule");
}

double lower_bound_threshold(MRule regime, std::uint32_t n) {
  const double ln_n = std::log(static_cast<double>(n));
  switch (regime) {
    case MRule::logsq:
      return ln_n / (8.0 * std::log(ln_n));
    case MRule::sqrt_rule:
      return std::sqrt(ln_n) / 20.0;
    default:
      throw std::invalid_argument("lower_bound_threshold: regime must be logsq or sqrt");
  }
}

void parallel_reps(std::uint32_t reps, std::uint32_t threads,
                   const std::function<void(std::uint32_t)>& work) {
  if (reps == 0) return;
  const std::uint32_t workers = std::max(1u, std::min(threads, reps));
  if (workers == 1) {
    for (std::uint32_t r = 0; r < reps; ++r) work(r);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint32_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::uint32_t r = next.fetch_add(1);
        if (r >= reps) return;
        try {
          work(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

void fill_stats(GapDistribution& dist) {
  dist.repetitions = static_cast<std::uint32_t>(dist.gaps.size());
  if (dist.gaps.empty()) return;
  double sum = 0.0;
  dist.min = dist.gaps.front();
  dist.max = dist.gaps.front();
  for (double g : dist.gaps) {
    sum += g;
    dist.min = std::min(dist.min, g);
    dist.max = std::max(dist.max, g);
    dist.histogram[g] += 1;
  }
  dist.mean = sum / static_cast<double>(dist.gaps.size());
}

/// Decorrelate derived seed streams: row r of a table reuses the repetition
/// scheme with indices shifted beyond the 32-bit repetition range.
std::uint64_t row_seed(std::uint64_t base_seed, std::uint64_t row_index) {
  return rep_seed(base_seed, (row_index + 1) << 32);
}

}  // namespace

GapDistribution gap_distribution(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m,
                                 std::uint32_t reps, std::uint64_t base_seed,
                                 std::uint32_t threads) {
  validate(spec, n);
  GapDistribution dist;
  dist.config_echo = describe(spec);
  dist.gaps.assign(reps, 0.0);
  parallel_reps(reps, threads, [&](std::uint32_t r) {
    dist.gaps[r] = run(spec, n, m, rep_seed(base_seed, r)).final_gap;
  });
  fill_stats(dist);
  return dist;
}

std::vector<RunResult> simulate_reps(const ProcessSpec& spec, std::uint32_t n, std::uint64_t m,
                                     std::uint32_t reps, std::uint64_t base_seed,
                                     std::uint32_t threads, std::uint64_t checkpoint_every,
                                     const std::vector<PotentialSpec>& potentials) {
  validate(spec, n);
  std::vector<Observer> observers;
  observers.reserve(potentials.size());
  for (const auto& p : potentials) {
    observers.push_back([p](const LoadState& s) { return evaluate(p, s); });
  }
  std::vector<RunResult> results(reps);
  parallel_reps(reps, threads, [&](std::uint32_t r) {
    results[r] = run(spec, n, m, rep_seed(base_seed, r), checkpoint_every, observers);
  });
  return results;
}

std::vector<NamedProcess> reference_processes(double delta_scale, LogBase base) {
  std::vector<NamedProcess> list;
  list.push_back({"one-plus-beta(0.5)", [](std::uint32_t) { return ProcessSpec{OnePlusBeta{0.5}}; }});
  for (std::uint32_t k = 1; k <= 4; ++k) {
    std::ostringstream label;
    label << "quantile-k" << k;
    list.push_back({label.str(), [k, delta_scale, base](std::uint32_t n) {
                      return ProcessSpec{Quantile{make_uniform_quantiles(n, k, base, delta_scale)}};
                    }});
  }
  list.push_back({"two-choice", [](std::uint32_t) { return ProcessSpec{DChoice{2}}; }});
  return list;
}

std::vector<TableRow> gap_table(const std::vector<std::uint32_t>& ns,
                                const std::vector<NamedProcess>& processes, MRule rule,
                                std::uint64_t fixed_m, std::uint32_t reps, std::uint64_t base_seed,
                                std::uint32_t threads) {
  std::vector<TableRow> rows;
  std::uint64_t index = 0;
  for (std::uint32_t n : ns) {
    const std::uint64_t m = resolve_m(rule, n, fixed_m);
    for (const auto& named : processes) {
      TableRow row;
      row.n = n;
      row.m = m;
      row.label = named.label;
      row.dist = gap_distribution(named.make(n), n, m, reps, row_seed(base_seed, index), threads);
      rows.push_back(std::move(row));
      ++index;
    }
  }
  return rows;
}

LowerBoundRow lower_bound_row(std::uint32_t n, double delta, MRule regime, std::uint32_t reps,
                              std::uint64_t base_seed, std::uint32_t threads) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("lower_bound_row: delta must lie in (0, 1)");
  }
  auto cut = static_cast<std::uint32_t>(std::llround(delta * n));
  cut = std::max(1u, std::min(n - 1, cut));
  LowerBoundRow row;
  row.n = n;
  row.m = resolve_m(regime, n, 0);
  row.threshold = lower_bound_threshold(regime, n);
  row.repetitions = reps;
  const auto dist =
      gap_distribution(Quantile{{cut}}, n, row.m, reps, base_seed, threads);
  for (double g : dist.gaps) {
    if (g >= row.threshold - 1e-12) ++row.exceed_count;
  }
  row.fraction = reps == 0 ? 0.0 : static_cast<double>(row.exceed_count) / reps;
  row.mean_gap = dist.mean;
  return row;
}

std::vector<GraphicalRow> graphical_sweep(std::uint32_t n, const std::vector<std::uint32_t>& degrees,
                                          MRule rule, std::uint64_t fixed_m, std::uint32_t reps,
                                          std::uint64_t base_seed, std::uint32_t threads) {
  std::vector<GraphicalRow> rows;
  std::uint64_t index = 0;
  for (std::uint32_t d : degrees) {
    GraphicalRow row;
    row.degree = d;
    row.m = resolve_m(rule, n, fixed_m);
    std::shared_ptr<RegularGraph> graph;
    if (d == 2) {
      graph = std::make_shared<RegularGraph>(make_cycle(n));
      row.kind = "cycle";
    } else if (d == n - 1) {
      graph = std::make_shared<RegularGraph>(make_complete(n));
      row.kind = "complete";
    } else {
      graph = std::make_shared<RegularGraph>(
          make_random_regular(n, d, rep_seed(base_seed ^ 0x6772617068ULL, d)));
      row.kind = "random-regular";
    }
    row.lambda = spectral_expansion(*graph);
    graph->lambda.emplace(row.lambda);
    row.dist = gap_distribution(Graphical{graph}, n, row.m, reps, row_seed(base_seed, index),
                                threads);
    rows.push_back(std::move(row));
    ++index;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Self-verification suite.

namespace {

LoadState random_state(Xoshiro256StarStar& rng, std::uint32_t n, std::uint64_t max_load) {
  std::vector<std::uint64_t> loads(n);
  for (auto& l : loads) l = rng.bounded(max_load + 1);
  return LoadState::from_loads(loads);
}

std::vector<std::uint32_t> random_cuts(Xoshiro256StarStar& rng, std::uint32_t n,
                                       std::uint32_t k) {
  std::set<std::uint32_t> cuts;
  while (cuts.size() < k) {
    cuts.insert(1 + static_cast<std::uint32_t>(rng.bounded(n - 1)));
  }
  return {cuts.begin(), cuts.end()};
}

std::string compare_detail(std::size_t cases, std::size_t failures) {
  std::ostringstream out;
  out << cases - failures << "/" << cases << " cases agree";
  return out.str();
}

}  // namespace

std::vector<VerifyCheck> run_verify(bool inject_fault) {
  std::vector<VerifyCheck> checks;

  // 1. A quantile process cutting at every rank reveals the full order, which
  //    is exactly the two-choice rule.
  {
    VerifyCheck c{"two-choice equals full-grid quantile", true, ""};
    std::ostringstream detail;
    for (std::uint32_t n : {4u, 10u, 100u}) {
      std::vector<std::uint32_t> cuts(n - 1);
      for (std::uint32_t i = 0; i + 1 < n; ++i) cuts[i] = i + 1;
      auto quantile = analytic_vector_exact(Quantile{cuts}, n);
      if (inject_fault) {
        // Negative control: shift a little mass toward the heavy end.
        quantile.front() += rational(1, 1000000);
        quantile.back() -= rational(1, 1000000);
      }
      const auto two_choice = analytic_vector_exact(DChoice{2}, n);
      if (quantile != two_choice) {
        c.pass = false;
        detail << "mismatch at n=" << n << "; ";
      }
    }
    c.detail = c.pass ? "exact equality at n=4,10,100" : detail.str();
    checks.push_back(std::move(c));
  }

  // 2. Brute-force enumeration agrees with the analytic vectors.
  {
    VerifyCheck c{"enumeration matches analytic vectors", true, ""};
    Xoshiro256StarStar rng(0xba11a57ULL);
    std::size_t cases = 0, failures = 0;
    for (int round = 0; round < 42; ++round) {
      const auto n = 3 + static_cast<std::uint32_t>(rng.bounded(6));  // 3..8
      const LoadState state = random_state(rng, n, 6);
      ProcessSpec spec = OneChoice{};
      switch (round % 7) {
        case 0: spec = OneChoice{}; break;
        case 1: spec = DChoice{1 + static_cast<std::uint32_t>(rng.bounded(4))}; break;
        case 2: spec = OnePlusBeta{rng.uniform01()}; break;
        case 3:
          spec = Quantile{random_cuts(rng, n, 1 + static_cast<std::uint32_t>(rng.bounded(
                                                   std::min(3u, n - 1))))};
          break;
        case 4: {
          const std::size_t target = 1 + static_cast<std::size_t>(rng.bounded(3));
          std::set<std::int64_t> vals;
          while (vals.size() < target) {
            vals.insert(static_cast<std::int64_t>(rng.bounded(9)) - 1);
          }
          std::vector<std::int64_t> values(vals.rbegin(), vals.rend());
          spec = Threshold{values, rng.coin()};
          break;
        }
        case 5: {
          const auto len = 1 + static_cast<std::uint32_t>(rng.bounded(3));
          std::vector<std::uint32_t> cuts(len);
          for (auto& x : cuts) x = 1 + static_cast<std::uint32_t>(rng.bounded(n - 1));
          std::sort(cuts.rbegin(), cuts.rend());
          spec = Thinning{cuts};
          break;
        }
        case 6:
          spec = Graphical{std::make_shared<RegularGraph>(
              rng.coin() ? make_complete(n) : make_cycle(n))};
          break;
      }
      ++cases;
      if (enum_vector(spec, state) != analytic_vector_exact(spec, n, &state)) ++failures;
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 3. One cut, two probes: quantile and thinning coincide.
  {
    VerifyCheck c{"single-cut quantile equals 2-probe thinning", true, ""};
    std::size_t cases = 0, failures = 0;
    for (std::uint32_t n : {4u, 7u, 12u}) {
      for (std::uint32_t cut = 1; cut < n; ++cut) {
        ++cases;
        if (!thinning_equivalence_check(cut, n)) ++failures;
      }
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 4. A threshold step is a quantile step at the induced cut.
  {
    VerifyCheck c{"threshold acts as the induced quantile", true, ""};
    Xoshiro256StarStar rng(0x7177ULL);
    std::size_t cases = 0, failures = 0;
    for (int round = 0; round < 30; ++round) {
      const auto n = 4 + static_cast<std::uint32_t>(rng.bounded(9));  // 4..12
      const LoadState state = random_state(rng, n, 5);
      const auto f = static_cast<std::int64_t>(rng.bounded(6));
      const rational delta = threshold_equiv_quantile(state, f);
      const auto count = static_cast<std::uint32_t>(delta.convert_to<double>() * n + 0.5);
      if (count == 0 || count >= n) continue;  // degenerate: all or none qualify
      ++cases;
      const auto thr = analytic_vector_exact(Threshold{{f}, false}, n, &state);
      const auto qua = analytic_vector_exact(Quantile{{count}}, n);
      if (thr != qua) ++failures;
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 5. Quantile = mixture of two adjacent thresholds (class aggregates).
  {
    VerifyCheck c{"quantile-threshold mixture reconstruction", true, ""};
    Xoshiro256StarStar rng(0x1234ULL);
    std::size_t cases = 0, failures = 0;
    for (int round = 0; round < 30; ++round) {
      const auto n = 4 + static_cast<std::uint32_t>(rng.bounded(9));
      const LoadState state = random_state(rng, n, 4);
      const auto cut = 1 + static_cast<std::uint32_t>(rng.bounded(n - 1));
      ++cases;
      if (!quantile_threshold_mixture(state, cut).verified) ++failures;
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 6. Shared-uniform coupling preserves load majorization.
  {
    VerifyCheck c{"coupled run keeps two-choice majorized by one-choice", true, ""};
    std::ostringstream detail;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const auto report = coupled_run(DChoice{2}, OneChoice{}, 50, 2000, seed);
      if (!report.precondition_holds || !report.holds) {
        c.pass = false;
        detail << "violation with seed " << seed << " at step " << report.violation_step << "; ";
      }
    }
    c.detail = c.pass ? "3 seeds, 2000 steps each, zero violations" : detail.str();
    checks.push_back(std::move(c));
  }

  // 7. Edge counts between random sets concentrate as the expansion predicts.
  {
    VerifyCheck c{"edge-count concentration on sample graphs", true, ""};
    Xoshiro256StarStar rng(0xe19eULL);
    std::size_t cases = 0, failures = 0;
    const auto complete = make_complete(16);
    const auto regular = make_random_regular(64, 8, 99);
    for (const auto* g : {&complete, &regular}) {
      const double lambda = spectral_expansion(*g);
      for (int round = 0; round < 50; ++round) {
        std::vector<std::uint32_t> X, Y;
        for (std::uint32_t v = 0; v < g->n; ++v) {
          if (rng.coin()) X.push_back(v);
          if (rng.coin()) Y.push_back(v);
        }
        if (X.empty() || Y.empty()) continue;
        ++cases;
        if (!mixing_check(*g, X, Y, lambda).holds) ++failures;
      }
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 8. Prefix mass of top-ranked sets obeys the spectral bounds.
  {
    VerifyCheck c{"spectral prefix bounds on top-rank sets", true, ""};
    Xoshiro256StarStar rng(0x5e7ULL);
    const auto g = make_random_regular(64, 8, 7);
    const double lambda = spectral_expansion(g);
    std::size_t cases = 0, failures = 0;
    for (int round = 0; round < 20; ++round) {
      const LoadState state = random_state(rng, g.n, 12);
      ++cases;
      if (!expansion_prefix_bounds_check(g, state, lambda).all_hold()) ++failures;
    }
    c.pass = failures == 0;
    c.detail = compare_detail(cases, failures);
    checks.push_back(std::move(c));
  }

  // 9. Quantile vectors sit inside their own relaxed class.
  {
    VerifyCheck c{"relaxed-class membership of quantile vectors", true, ""};
    std::ostringstream detail;
    for (std::uint32_t k : {1u, 2u}) {
      const auto cuts = make_uniform_quantiles(1000, k);
      const auto p = analytic_vector(Quantile{cuts}, 1000);
      const auto report = relaxed_quantile_entrywise(p, cuts, 1000, 1.0, 1.0 / 12.0);
      if (!report.member) {
        c.pass = false;
        detail << "k=" << k << " not a member; ";
      }
    }
    c.detail = c.pass ? "k=1,2 at n=1000 with gamma=1, eps=1/12" : detail.str();
    checks.push_back(std::move(c));
  }

  // 10. Identical seeds reproduce identical runs.
  {
    VerifyCheck c{"seeded runs are reproducible", true, ""};
    const auto a = run(DChoice{2}, 100, 10000, 7, 1000);
    const auto b = run(DChoice{2}, 100, 10000, 7, 1000);
    const bool same_gaps = a.gap_series == b.gap_series;
    const bool same_loads = a.final_state.loads() == b.final_state.loads();
    c.pass = same_gaps && same_loads;
    c.detail = c.pass ? "two runs, identical series and loads" : "runs diverged";
    checks.push_back(std::move(c));
  }

  return checks;
}

}  // namespace ballast
