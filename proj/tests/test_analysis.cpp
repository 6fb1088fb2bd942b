#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ballast/analysis.hpp"
#include "ballast/graphs.hpp"
#include "ballast/load_state.hpp"
#include "ballast/processes.hpp"
#include "ballast/rational.hpp"
#include "ballast/rng.hpp"

using namespace ballast;

TEST_CASE("prefix majorization orders vectors by cumulative mass") {
  CHECK(prefix_majorizes({0.1, 0.4, 0.5}, {0.2, 0.3, 0.5}));
  CHECK_FALSE(prefix_majorizes({0.3, 0.2, 0.5}, {0.2, 0.3, 0.5}));
  CHECK(prefix_majorizes({0.25, 0.25, 0.5}, {0.25, 0.25, 0.5}));  // equality is fine
  CHECK(prefix_majorizes_exact({rational(1, 4), rational(3, 4)},
                               {rational(1, 2), rational(1, 2)}));
  CHECK_FALSE(prefix_majorizes_exact({rational(3, 4), rational(1, 4)},
                                     {rational(1, 2), rational(1, 2)}));
}

TEST_CASE("enumeration equals analytic vectors on a fixed configuration") {
  const auto state = LoadState::from_loads({2, 1, 1, 0, 0});
  const auto graph = std::make_shared<RegularGraph>(make_cycle(5));
  const std::vector<ProcessSpec> specs = {
      OneChoice{},         DChoice{2},           DChoice{3},
      OnePlusBeta{0.25},   Quantile{{2, 4}},     Threshold{{2, 1}, false},
      Threshold{{2, 0}, true}, Thinning{{3, 2}}, Graphical{graph},
  };
  for (const auto& spec : specs) {
    CAPTURE(describe(spec));
    CHECK(enum_vector(spec, state) == analytic_vector_exact(spec, 5, &state));
  }
}

TEST_CASE("enumeration guards its cost") {
  const LoadState big(65);
  CHECK_THROWS_AS(enum_vector(OneChoice{}, big), std::invalid_argument);
  const LoadState small(6);
  CHECK_THROWS_AS(enum_vector(DChoice{5}, small), std::invalid_argument);
  CHECK_THROWS_AS(enum_vector(Thinning{{3, 3, 2, 2}}, small), std::invalid_argument);
}

TEST_CASE("empirical frequencies stay within the sigma budget") {
  const auto state = LoadState::from_loads({3, 2, 2, 1, 0});
  const auto rep = empirical_vector(DChoice{2}, state, 20000, 424242);
  CHECK(rep.within_budget);
  CHECK(rep.frequencies.size() == 5);
  CHECK_THROWS_AS(empirical_vector(DChoice{2}, state, 5000, 1), std::invalid_argument);
}

TEST_CASE("single-cut quantile is exactly 2-probe thinning") {
  for (std::uint32_t n : {4u, 6u, 9u}) {
    for (std::uint32_t cut = 1; cut < n; ++cut) {
      CAPTURE(n);
      CAPTURE(cut);
      CHECK(thinning_equivalence_check(cut, n));
    }
  }
}

TEST_CASE("threshold induces the quantile at the count of qualifying bins") {
  const auto s = LoadState::from_loads({5, 3, 2, 1});
  CHECK(threshold_equiv_quantile(s, 3) == rational(1, 2));   // two loads >= 3
  CHECK(threshold_equiv_quantile(s, 6) == rational(0));
  CHECK(threshold_equiv_quantile(s, 1) == rational(1));
}

TEST_CASE("quantile decomposes into a two-threshold mixture") {
  // Boundary rank inside an equal-load class: alpha splits the class.
  const auto tied = LoadState::from_loads({2, 1, 1, 0});
  const auto m1 = quantile_threshold_mixture(tied, 2);
  CHECK(m1.f_low == 1);
  CHECK(m1.f_high == 2);
  CHECK(m1.alpha == rational(1, 2));
  CHECK(m1.verified);

  // Distinct loads: the quantile is exactly one threshold (alpha = 0).
  const auto distinct = LoadState::from_loads({5, 3, 2, 1});
  const auto m2 = quantile_threshold_mixture(distinct, 2);
  CHECK(m2.f_low == 3);
  CHECK(m2.alpha == rational(0));
  CHECK(m2.verified);

  // Fully tied state: every split of the single class reproduces the vector.
  const auto flat = LoadState::from_loads({1, 1, 1, 1});
  const auto m3 = quantile_threshold_mixture(flat, 2);
  CHECK(m3.f_low == 1);
  CHECK(m3.alpha == rational(1, 2));
  CHECK(m3.verified);
}

TEST_CASE("mixture verification across random states and cuts") {
  Xoshiro256StarStar rng(0x1111ULL);
  for (int round = 0; round < 50; ++round) {
    const auto n = 4 + static_cast<std::uint32_t>(rng.bounded(9));
    std::vector<std::uint64_t> loads(n);
    for (auto& x : loads) x = rng.bounded(5);
    const auto state = LoadState::from_loads(loads);
    const auto cut = 1 + static_cast<std::uint32_t>(rng.bounded(n - 1));
    CAPTURE(n);
    CAPTURE(cut);
    CHECK(quantile_threshold_mixture(state, cut).verified);
  }
}

TEST_CASE("thinning chain asks each cut twice from the top, last probe free") {
  const auto rep = thinning_chain_check({300, 500}, 1000);
  CHECK(rep.schedule == std::vector<std::uint32_t>{500, 500, 300});
  CHECK(rep.boundary_holds);
  CHECK(rep.worst_boundary_slack <= 0.0);
  const auto single = thinning_chain_check({500}, 1000);
  CHECK(single.schedule == std::vector<std::uint32_t>{500});
  CHECK(single.boundary_holds);
}

TEST_CASE("coupled run: two-choice stays majorized under one-choice") {
  const auto rep = coupled_run(DChoice{2}, OneChoice{}, 30, 3000, 5);
  CHECK(rep.precondition_holds);
  CHECK(rep.holds);
  CHECK(rep.steps == 3000);
  CHECK(rep.max_slack <= 0);
}

TEST_CASE("coupled run: quantile(0.6) stays majorized under one-plus-beta(0.4)") {
  const auto rep = coupled_run(Quantile{{6}}, OnePlusBeta{0.4}, 10, 10000, 11);
  CHECK(rep.precondition_holds);
  CHECK(rep.holds);
}

TEST_CASE("coupled run reports a failed vector precondition") {
  const auto rep = coupled_run(OneChoice{}, DChoice{2}, 20, 100, 3);
  CHECK_FALSE(rep.precondition_holds);
}

TEST_CASE("coupled run rejects load-dependent processes") {
  CHECK_THROWS_AS(coupled_run(Threshold{{2}, false}, OneChoice{}, 10, 100, 1),
                  std::invalid_argument);
  const auto graph = std::make_shared<RegularGraph>(make_cycle(10));
  CHECK_THROWS_AS(coupled_run(DChoice{2}, Graphical{graph}, 10, 100, 1), std::invalid_argument);
}

TEST_CASE("relaxed entrywise membership of the uniform quantile vectors") {
  for (std::uint32_t k : {1u, 2u}) {
    const auto cuts = make_uniform_quantiles(1000, k);
    const auto p = analytic_vector(Quantile{cuts}, 1000);
    const auto rep = relaxed_quantile_entrywise(p, cuts, 1000, 1.0, 1.0 / 12.0);
    CAPTURE(k);
    CHECK(rep.tier_caps);
    CHECK(rep.non_decreasing);
    CHECK(rep.light_separation);
    CHECK(rep.heavy_separation);
    CHECK(rep.member);
  }
}

TEST_CASE("relaxed entrywise flags violations") {
  const auto cuts = make_uniform_quantiles(1000, 1);
  auto p = analytic_vector(Quantile{cuts}, 1000);
  std::swap(p.front(), p.back());  // break monotonicity and the tier cap
  const auto rep = relaxed_quantile_entrywise(p, cuts, 1000, 1.0, 1.0 / 12.0);
  CHECK_FALSE(rep.member);
  CHECK_FALSE(rep.non_decreasing);
  CHECK(rep.worst_monotone_drop > 0.0);
  CHECK_THROWS_AS(relaxed_quantile_entrywise(p, cuts, 1000, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(relaxed_quantile_entrywise(p, cuts, 1000, 1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(relaxed_quantile_entrywise(p, cuts, 1000, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("relaxed majorized membership follows from entrywise membership") {
  for (std::uint32_t k : {1u, 2u}) {
    const auto cuts = make_uniform_quantiles(1000, k);
    const auto p = analytic_vector_exact(Quantile{cuts}, 1000);
    const auto rep = relaxed_quantile_majorized(p, cuts, 1000, rational(1), rational(1, 12));
    CAPTURE(k);
    CHECK(rep.cap_prefixes);
    CHECK(rep.light_prefix);
    CHECK(rep.heavy_suffix);
    CHECK(rep.member);
  }
}

TEST_CASE("relaxed majorized detects a too-heavy prefix") {
  const auto cuts = make_uniform_quantiles(1000, 1);
  auto p = analytic_vector_exact(Quantile{cuts}, 1000);
  // Move a big chunk of mass to the heaviest rank.
  p[0] += rational(1, 4);
  p[999] -= rational(1, 4);
  const auto rep = relaxed_quantile_majorized(p, cuts, 1000, rational(1), rational(1, 12));
  CHECK_FALSE(rep.member);
  CHECK_FALSE(rep.cap_prefixes);
  CHECK(rep.worst_cap_excess > 0.0);
}
