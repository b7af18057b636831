#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "tcf/autodiff/tape.hpp"

namespace tcf::ad {

// y = x W + b, W: in x out, b: 1 x out.
struct DenseParams {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t in = 0;
  std::size_t out = 0;

  static DenseParams create(ParameterSet& ps, const std::string& prefix,
                            std::size_t in, std::size_t out, std::mt19937_64& rng);
  Var apply(Tape& tape, ParameterSet& ps, Var x) const;
};

// Gated recurrent unit:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + (r * h) Un + bn)
//   h' = n + z * (h - n)
// Gate weights are stored fused: wx is in x 3H (z|r|n), uzr is H x 2H.
struct GruParams {
  std::size_t wx = 0;
  std::size_t uzr = 0;
  std::size_t un = 0;
  std::size_t bias = 0;  // 1 x 3H
  std::size_t in = 0;
  std::size_t hidden = 0;

  static GruParams create(ParameterSet& ps, const std::string& prefix,
                          std::size_t in, std::size_t hidden, std::mt19937_64& rng);
  Var step(Tape& tape, ParameterSet& ps, Var x, Var h) const;
};

}  // namespace tcf::ad
