#include <algorithm>
#include <cmath>
#include <set>

#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/rng.hpp"

namespace bcsmile::corpus {

DatasetSplit split_by_dyad(std::vector<std::string> dyads, std::array<double, 3> ratios, std::uint64_t seed) {
  std::sort(dyads.begin(), dyads.end());
  if (std::adjacent_find(dyads.begin(), dyads.end()) != dyads.end()) throw Error("duplicate dyad ids in split input");
  const std::size_t n = dyads.size();
  if (n < 3) throw Error("need at least 3 dyads to split, got " + std::to_string(n));
  for (double r : ratios) {
    if (!(r > 0) || !std::isfinite(r)) throw Error("split ratios must be positive");
  }
  const double total = ratios[0] + ratios[1] + ratios[2];
  auto take = [&](double r) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) * r / total)));
  };
  std::size_t n_val = take(ratios[1]);
  std::size_t n_test = take(ratios[2]);
  while (n_val + n_test > n - 1) {
    // Tiny inputs: keep at least one training dyad.
    if (n_val >= n_test && n_val > 1) --n_val;
    else if (n_test > 1) --n_test;
    else break;
  }

  Rng rng(seed);
  std::shuffle(dyads.begin(), dyads.end(), rng);
  DatasetSplit split;
  split.seed = seed;
  split.val_dyads.assign(dyads.begin(), dyads.begin() + static_cast<long>(n_val));
  split.test_dyads.assign(dyads.begin() + static_cast<long>(n_val),
                          dyads.begin() + static_cast<long>(n_val + n_test));
  split.train_dyads.assign(dyads.begin() + static_cast<long>(n_val + n_test), dyads.end());
  for (auto* part : {&split.train_dyads, &split.val_dyads, &split.test_dyads}) std::sort(part->begin(), part->end());
  return split;
}

}  // namespace bcsmile::corpus
