#pragma once
// Seed splitting.  Every random stream in the project derives from one root
// seed:  derive_seed(root, a, b, ...) folds each component through
// splitmix64, so streams for different (purpose, entity, epoch) tuples are
// decorrelated and reproducible.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tcf {

std::uint64_t splitmix64(std::uint64_t x);

// Stable 64-bit tag for a stream name ("corrupt", "split", ...).
std::uint64_t stream_tag(std::string_view name);

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

inline std::mt19937_64 make_rng(std::uint64_t root,
                                std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_seed(root, path));
}

}  // namespace tcf
