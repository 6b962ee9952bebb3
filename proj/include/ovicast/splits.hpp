#pragma once

#include <cstddef>
#include <vector>

namespace ovicast {

/// Train/test index sets; every train index precedes every test index.
struct SplitPlan {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
};

/// First floor(n * train_fraction) indices train, the rest test. Needs n >= 5.
SplitPlan chronological_split(std::size_t n, double train_fraction);

/// Walk-forward folds: [0, n) is cut into k + 1 contiguous blocks as equal as
/// possible, earlier blocks taking the remainder. Fold i trains on blocks
/// 1..i and validates on block i + 1.
std::vector<SplitPlan> time_series_splits(std::size_t n, std::size_t k);

}  // namespace ovicast
