#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pkgpulse/tgraph.hpp"

namespace pkgpulse {

/// Tied values receive the mean of the 1-based positions they span.
std::vector<double> average_ranks(std::span<const double> scores, bool descending = false);

/// Throws UndefinedCorrelation when either input is constant and
/// DimensionMismatch on unequal or empty inputs.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> gold, std::span<const double> pred);

/// Tie-corrected Kendall tau-b, O(n log n).
double kendall_tau(std::span<const double> gold, std::span<const double> pred);

enum class TopKBy { Gold, Predicted };

struct RankCorrelation {
  double rho = 0.0;
  double tau = 0.0;
};

/// Indices of the k largest values; ties keep input order.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);

/// rho and tau restricted to the k items ranked highest by gold (or by the
/// prediction). Both lists are re-ranked within the subset. Throws
/// std::invalid_argument when fewer than k items are supplied.
RankCorrelation at_k(std::span<const double> gold, std::span<const double> pred, std::size_t k = 25,
                     TopKBy by = TopKBy::Gold);

/// Mean of 1/position over queries; nullopt marks a miss contributing 0.
/// Throws std::invalid_argument on an empty query set or a zero position.
double mrr(std::span<const std::optional<std::size_t>> best_gold_positions);

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample
  double p_two_sided = 1.0;
  bool exact = false;
};

/// Exact null distribution (under the observed ties) when both samples have
/// at most 8 values, otherwise the tie-corrected normal approximation with
/// continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kExactMannWhitneyLimit = 8;

struct RankedItem {
  std::string id;
  double score = 0.0;
  std::size_t position = 0;  // 1-based, strict
  std::size_t tie_group = 0;  // items with equal score share a group
};

/// Items sorted by decreasing score, equal scores ordered by id.
struct RankedList {
  std::vector<RankedItem> items;

  static RankedList from_scores(std::vector<std::pair<std::string, double>> scored);
  /// Position of the best-ranked member of `gold`; nullopt when none is listed.
  std::optional<std::size_t> best_position(const StringSet& gold) const;
  bool empty() const noexcept { return items.empty(); }
};

}  // namespace pkgpulse
