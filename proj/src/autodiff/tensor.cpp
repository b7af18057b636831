#include "tcf/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace tcf::ad {

std::string Shape::str() const {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), data_(std::move(values)) {
  if (shape_.size() != data_.size())
    throw ShapeError("tensor: shape " + shape_.str() + " does not match " +
                     std::to_string(data_.size()) + " values");
}

Tensor::Tensor(std::initializer_list<std::initializer_list<double>> rows) {
  shape_.rows = rows.size();
  shape_.cols = rows.size() == 0 ? 0 : rows.begin()->size();
  data_.reserve(shape_.size());
  for (const auto& r : rows) {
    if (r.size() != shape_.cols) throw ShapeError("tensor: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor({1, values.size()}, {values.begin(), values.end()});
}

Tensor Tensor::column(std::span<const double> values) {
  return Tensor({values.size(), 1}, {values.begin(), values.end()});
}

double Tensor::item() const {
  if (data_.size() != 1)
    throw ShapeError("item() on non-scalar tensor " + shape_.str());
  return data_[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace tcf::ad
