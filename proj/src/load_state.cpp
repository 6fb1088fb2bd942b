#include "ballast/load_state.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ballast {

LoadState::LoadState(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("LoadState: n must be positive");
  n_ = n;
  load_.assign(n, 0);
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  pos_ = order_;
  head_.assign(2, 0);  // load 0 group starts at rank 0; slot for load 1 preallocated
}

LoadState LoadState::from_loads(const std::vector<std::uint64_t>& loads) {
  if (loads.empty()) throw std::invalid_argument("LoadState: n must be positive");
  LoadState s;
  s.n_ = static_cast<std::uint32_t>(loads.size());
  s.load_ = loads;
  s.total_ = std::accumulate(loads.begin(), loads.end(), std::uint64_t{0});
  s.order_.resize(s.n_);
  std::iota(s.order_.begin(), s.order_.end(), 0u);
  std::stable_sort(s.order_.begin(), s.order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return loads[a] > loads[b]; });
  s.pos_.resize(s.n_);
  const std::uint64_t max_load = s.load_[s.order_[0]];
  s.head_.assign(static_cast<std::size_t>(max_load) + 2, 0);
  for (std::uint32_t r = 0; r < s.n_; ++r) {
    s.pos_[s.order_[r]] = r;
    const std::uint64_t v = s.load_[s.order_[r]];
    if (r == 0 || s.load_[s.order_[r - 1]] != v) s.head_[static_cast<std::size_t>(v)] = r;
  }
  return s;
}

void LoadState::increment(std::uint32_t bin) {
  const std::uint64_t v = load_[bin];
  const std::uint32_t r = pos_[bin];
  const std::uint32_t h = head_[static_cast<std::size_t>(v)];
  const std::uint32_t other = order_[h];

  // Move `bin` to the head slot of its equal-load group.
  order_[h] = bin;
  order_[r] = other;
  pos_[bin] = h;
  pos_[other] = r;

  // The old group shrinks by one; if non-empty its head moves right.
  if (h + 1 < n_ && load_[order_[h + 1]] == v) head_[static_cast<std::size_t>(v)] = h + 1;

  load_[bin] = v + 1;
  ++total_;
  if (static_cast<std::size_t>(v) + 2 > head_.size()) head_.resize(static_cast<std::size_t>(v) + 2);
  // `bin` joins the (v+1)-group, becoming its head unless one already sits to
  // its left (then that head stays).
  if (h == 0 || load_[order_[h - 1]] > v + 1) head_[static_cast<std::size_t>(v) + 1] = h;
}

std::uint64_t LoadState::quantile_value(std::uint32_t count) const {
  if (count == 0 || count > n_) {
    throw std::out_of_range("quantile_value: count must lie in [1, n]");
  }
  return load_[order_[count - 1]];
}

double LoadState::gap() const {
  return static_cast<double>(load_[order_[0]]) -
         static_cast<double>(total_) / static_cast<double>(n_);
}

std::uint32_t LoadState::tier(std::uint32_t rank1, const std::vector<std::uint32_t>& cut_counts) {
  // Number of cuts strictly below rank1; cuts are sorted ascending.
  return static_cast<std::uint32_t>(
      std::lower_bound(cut_counts.begin(), cut_counts.end(), rank1) - cut_counts.begin());
}

std::uint32_t LoadState::tier_threshold(std::int64_t load,
                                        const std::vector<std::int64_t>& thresholds) {
  // Thresholds are strictly decreasing; count those strictly above the load
  // (load >= f means the query "load at least f?" answers yes: heavier side).
  return static_cast<std::uint32_t>(
      std::lower_bound(thresholds.begin(), thresholds.end(), load, std::greater<std::int64_t>{}) -
      thresholds.begin());
}

void LoadState::check_invariants() const {
  auto fail = [](const std::string& what) { throw std::logic_error("LoadState invariant: " + what); };
  if (order_.size() != n_ || pos_.size() != n_ || load_.size() != n_) fail("size mismatch");
  std::uint64_t sum = 0;
  for (std::uint32_t r = 0; r < n_; ++r) {
    const std::uint32_t b = order_[r];
    if (b >= n_) fail("order entry out of range");
    if (pos_[b] != r) fail("pos is not the inverse of order");
    if (r > 0 && load_[order_[r - 1]] < load_[b]) fail("order not sorted descending");
    const std::uint64_t v = load_[b];
    if (r == 0 || load_[order_[r - 1]] != v) {
      if (static_cast<std::size_t>(v) >= head_.size() ||
          head_[static_cast<std::size_t>(v)] != r) {
        fail("group head does not point at first group member");
      }
    }
    sum += v;
  }
  if (sum != total_) fail("total differs from sum of loads");
}

}  // namespace ballast
