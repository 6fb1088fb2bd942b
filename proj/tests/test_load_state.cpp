#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ballast/load_state.hpp"
#include "ballast/rng.hpp"

using ballast::LoadState;

namespace {

/// Loads in descending rank order, recomputed from scratch as an oracle.
std::vector<std::uint64_t> sorted_desc(const LoadState& s) {
  std::vector<std::uint64_t> v(s.loads());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::vector<std::uint64_t> by_rank(const LoadState& s) {
  std::vector<std::uint64_t> v(s.n());
  for (std::uint32_t r = 0; r < s.n(); ++r) v[r] = s.load(s.bin_at_rank(r));
  return v;
}

}  // namespace

TEST_CASE("empty state basics") {
  LoadState s(5);
  CHECK(s.n() == 5);
  CHECK(s.total() == 0);
  CHECK(s.gap() == 0.0);
  for (std::uint32_t b = 0; b < 5; ++b) CHECK(s.load(b) == 0);
  s.check_invariants();
}

TEST_CASE("from_loads orders by load descending, bin ascending on ties") {
  const auto s = LoadState::from_loads({3, 1, 4, 1, 5});
  CHECK(s.n() == 5);
  CHECK(s.total() == 14);
  CHECK(s.bin_at_rank(0) == 4);  // load 5
  CHECK(s.bin_at_rank(1) == 2);  // load 4
  CHECK(s.bin_at_rank(2) == 0);  // load 3
  CHECK(s.bin_at_rank(3) == 1);  // load 1, smaller bin first
  CHECK(s.bin_at_rank(4) == 3);  // load 1
  for (std::uint32_t b = 0; b < 5; ++b) CHECK(s.bin_at_rank(s.rank_of(b)) == b);
  s.check_invariants();
}

TEST_CASE("quantile_value reads the sorted vector at a 1-based count") {
  const auto s = LoadState::from_loads({3, 1, 4, 1, 5});
  CHECK(s.quantile_value(1) == 5);
  CHECK(s.quantile_value(2) == 4);
  CHECK(s.quantile_value(3) == 3);
  CHECK(s.quantile_value(4) == 1);
  CHECK(s.quantile_value(5) == 1);
}

TEST_CASE("gap is max load minus average") {
  const auto s = LoadState::from_loads({2, 1, 1, 0});
  CHECK(s.gap() == doctest::Approx(1.0));
  const auto t = LoadState::from_loads({7, 0, 0, 0});
  CHECK(t.gap() == doctest::Approx(7.0 - 7.0 / 4.0));
}

TEST_CASE("increment keeps the descending order exact") {
  LoadState s(8);
  // Push one bin up through an all-equal group: it must take the group head.
  s.increment(3);
  CHECK(s.rank_of(3) == 0);
  s.increment(3);
  CHECK(s.rank_of(3) == 0);
  s.increment(5);
  CHECK(s.rank_of(5) == 1);  // head of the load-1 group, behind load-2
  s.check_invariants();
  CHECK(by_rank(s) == sorted_desc(s));
}

TEST_CASE("increment matches a from-scratch sort under random updates") {
  LoadState s(37);
  ballast::Xoshiro256StarStar rng(2024);
  for (int t = 1; t <= 4000; ++t) {
    s.increment(static_cast<std::uint32_t>(rng.bounded(37)));
    if (t % 200 == 0) {
      s.check_invariants();
      CHECK(by_rank(s) == sorted_desc(s));
    }
  }
  CHECK(s.total() == 4000);
}

TEST_CASE("increment starting from unequal loads") {
  auto s = LoadState::from_loads({4, 4, 2, 2, 2, 0});
  ballast::Xoshiro256StarStar rng(77);
  for (int t = 1; t <= 1000; ++t) {
    s.increment(static_cast<std::uint32_t>(rng.bounded(6)));
    if (t % 100 == 0) {
      s.check_invariants();
      CHECK(by_rank(s) == sorted_desc(s));
    }
  }
  CHECK(s.total() == 14 + 1000);
}

TEST_CASE("tier counts cuts strictly below a 1-based rank") {
  const std::vector<std::uint32_t> cuts = {3, 7};
  CHECK(LoadState::tier(1, cuts) == 0);
  CHECK(LoadState::tier(3, cuts) == 0);
  CHECK(LoadState::tier(4, cuts) == 1);
  CHECK(LoadState::tier(7, cuts) == 1);
  CHECK(LoadState::tier(8, cuts) == 2);
  CHECK(LoadState::tier(10, cuts) == 2);
  CHECK(LoadState::tier(5, {}) == 0);
}

TEST_CASE("tier_threshold counts thresholds strictly above a load") {
  const std::vector<std::int64_t> fs = {5, 3, 1};
  CHECK(LoadState::tier_threshold(6, fs) == 0);
  CHECK(LoadState::tier_threshold(5, fs) == 0);
  CHECK(LoadState::tier_threshold(4, fs) == 1);
  CHECK(LoadState::tier_threshold(3, fs) == 1);
  CHECK(LoadState::tier_threshold(2, fs) == 2);
  CHECK(LoadState::tier_threshold(1, fs) == 2);
  CHECK(LoadState::tier_threshold(0, fs) == 3);
}
