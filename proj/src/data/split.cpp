#include "tcf/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tcf/util/seed.hpp"

namespace tcf::data {

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const SplitFractions& f,
                                                      std::uint64_t seed) {
  const double fr[3] = {f.train, f.valid, f.test};
  for (double v : fr)
    if (v < 0) throw std::invalid_argument("split: negative fraction");
  if (std::fabs(fr[0] + fr[1] + fr[2] - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions must sum to 1");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, {stream_tag("split")});
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(fr[0] * static_cast<double>(n)));
  const auto n_valid = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(fr[1] * static_cast<double>(n))));
  const std::size_t counts[3] = {n_train, n_valid, n - n_train - n_valid};
  static const char* names[3] = {"train", "valid", "test"};
  for (int i = 0; i < 3; ++i)
    if (fr[i] > 0 && counts[i] == 0)
      throw std::invalid_argument(std::string("split: fraction for ") + names[i] +
                                  " leaves it empty with " + std::to_string(n) + " entities");

  std::array<std::vector<std::size_t>, 3> out;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    out[i].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + counts[i]));
    std::sort(out[i].begin(), out[i].end());
    pos += counts[i];
  }
  return out;
}

Splits split(const Dataset& ds, const SplitFractions& fractions, std::uint64_t seed) {
  auto idx = split_indices(ds.size(), fractions, seed);
  Splits s;
  Dataset* parts[3] = {&s.train, &s.valid, &s.test};
  for (int i = 0; i < 3; ++i) {
    parts[i]->dims = ds.dims;
    for (std::size_t j : idx[i]) parts[i]->trajectories.push_back(ds.trajectories[j]);
  }
  return s;
}

}  // namespace tcf::data
