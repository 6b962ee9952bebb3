#include "ovicast/splits.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ovicast/error.hpp"

namespace ovicast {

namespace {

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

}  // namespace

SplitPlan chronological_split(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::Config, "train_fraction must be in (0, 1)");
  if (n < 5) throw Error(ErrorKind::TooFewSamples, "chronological split needs n >= 5, got " + std::to_string(n));
  // Slack absorbs products such as 0.29 * 100 landing just under an integer.
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
  if (n_train == 0 || n_train >= n)
    throw Error(ErrorKind::TooFewSamples, "split leaves an empty train or test set");
  return {range(0, n_train), range(n_train, n)};
}

std::vector<SplitPlan> time_series_splits(std::size_t n, std::size_t k) {
  if (k < 2) throw Error(ErrorKind::Config, "need at least 2 folds");
  if (n < k + 1)
    throw Error(ErrorKind::TooFewSamples,
                std::to_string(k) + " folds need at least " + std::to_string(k + 1) + " samples, got " +
                    std::to_string(n));
  const std::size_t blocks = k + 1;
  const std::size_t base = n / blocks, extra = n % blocks;
  std::vector<std::size_t> ends;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    pos += base + (b < extra ? 1 : 0);
    ends.push_back(pos);
  }
  std::vector<SplitPlan> folds;
  for (std::size_t i = 1; i <= k; ++i) folds.push_back({range(0, ends[i - 1]), range(ends[i - 1], ends[i])});
  return folds;
}

}  // namespace ovicast
