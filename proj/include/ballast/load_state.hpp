#pragma once

#include <cstdint>
#include <vector>

/// Core load-vector state with O(1) sorted-order maintenance.
namespace ballast {

/// Loads of n bins together with a descending order that is kept exact under
/// single-ball increments in O(1) time.
///
/// Rank r (0-based) is the position in the descending order: rank 0 is a
/// heaviest bin.  Ties are broken by the order's history, which is exactly the
/// freedom the group-swap update exploits: incrementing a bin first swaps it
/// with the first (heaviest-side) member of its equal-load group, so the order
/// stays sorted without any scan.
class LoadState {
 public:
  /// n empty bins.  Order starts as bin identity.
  explicit LoadState(std::uint32_t n);

  /// State with the given loads; order is (load descending, bin index
  /// ascending) and total is the sum of loads.
  static LoadState from_loads(const std::vector<std::uint64_t>& loads);

  /// Add one ball to `bin`, updating order, positions and group heads in O(1).
  void increment(std::uint32_t bin);

  std::uint32_t n() const { return n_; }

  /// Total number of balls placed so far.
  std::uint64_t total() const { return total_; }

  std::uint64_t load(std::uint32_t bin) const { return load_[bin]; }

  /// Bin occupying descending-order rank r (0-based).
  std::uint32_t bin_at_rank(std::uint32_t rank) const { return order_[rank]; }

  /// Rank (0-based) currently held by `bin`.
  std::uint32_t rank_of(std::uint32_t bin) const { return pos_[bin]; }

  const std::vector<std::uint64_t>& loads() const { return load_; }

  /// Load of the bin at 1-based descending rank `count` (count in [1, n]):
  /// the load value at the `count/n` quantile of the sorted vector.
  std::uint64_t quantile_value(std::uint32_t count) const;

  /// max load - total/n.
  double gap() const;

  /// Quantile-tier of a 1-based rank against ascending cut counts
  /// (c_1 < ... < c_k, each in [1, n]): the number of cuts strictly below the
  /// rank.  Tier 0 holds ranks 1..c_1 (heaviest bins), tier k the lightest.
  static std::uint32_t tier(std::uint32_t rank1, const std::vector<std::uint32_t>& cut_counts);

  /// Threshold-tier of a load against strictly decreasing thresholds
  /// f_1 > ... > f_k: the number of thresholds strictly above the load.
  /// Tier 0 means load >= f_1 (heaviest), tier k means load < f_k.
  static std::uint32_t tier_threshold(std::int64_t load, const std::vector<std::int64_t>& thresholds);

  /// Check all structural invariants (order sorted descending, positions
  /// inverse to order, group heads consistent, total equals sum).  Intended
  /// for tests; throws std::logic_error on the first violation.
  void check_invariants() const;

 private:
  LoadState() = default;

  std::uint32_t n_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> load_;   // bin -> load
  std::vector<std::uint32_t> order_;  // rank -> bin, loads descending
  std::vector<std::uint32_t> pos_;    // bin -> rank (inverse of order_)
  // load value -> first rank of that value's group; meaningful only while the
  // group is non-empty, stale entries are never read.
  std::vector<std::uint32_t> head_;
};

}  // namespace ballast
