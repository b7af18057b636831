#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tcf/data/dataset.hpp"

namespace tcf::data {

struct SplitFractions {
  double train = 0.7;
  double valid = 0.15;
  double test = 0.15;
};

struct Splits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Entity-level partition, deterministic in `seed`.  Fractions must sum to 1;
// a positive fraction that would leave its split empty is rejected.
Splits split(const Dataset& ds, const SplitFractions& fractions, std::uint64_t seed);

// Trajectory indices per split (train, valid, test) for the same partition.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const SplitFractions& fractions,
                                                      std::uint64_t seed);

}  // namespace tcf::data
