#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tcf/data/dataset.hpp"

namespace tcf::data {

// Conditioning set at time t (1-based: t steps have been observed).
// Holds covariates, features and outcomes for steps 1..t and treatments for
// steps 1..t-1; the treatment chosen at step t is not part of the history.
// Observed outcomes are carried with the covariates: y_s is measured at s
// before a_s is applied.
struct History {
  std::size_t t = 0;
  Dims dims;
  std::vector<std::vector<double>> x;        // t entries
  std::vector<std::vector<double>> v;        // t entries
  std::vector<double> y;                     // t entries
  std::vector<std::vector<std::uint8_t>> a;  // t - 1 entries
};

// Throws std::out_of_range unless 1 <= t <= trajectory length.
History build_history(const Trajectory& tr, const Dims& dims, std::size_t t);

// Forecast context for the decoder at future step s >= t: the base history
// plus the treatments applied from t on and the outcomes predicted so far.
struct DecoderContext {
  const History* base = nullptr;
  std::vector<std::vector<std::uint8_t>> treatments;  // a_t .. a_{s-1}
  std::vector<double> outcomes;                       // y_hat_{t+1} .. y_hat_s
};

}  // namespace tcf::data
