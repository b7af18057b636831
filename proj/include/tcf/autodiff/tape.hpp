#pragma once
// Reverse-mode automatic differentiation over 2-D tensors.
//
// A Tape records primitive operations in execution order.  Each node keeps
// its forward value, a lazily allocated gradient accumulator, and a closure
// that pushes its gradient to its inputs.  backward() walks the nodes once in
// reverse order; running it a second time on the same tape is rejected.

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcf/autodiff/tensor.hpp"

namespace tcf::ad {

// Lower bound applied to arguments of log and to denominators.
inline constexpr double kNumericFloor = 1e-9;

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Ordered, named parameter container.  Indices are stable; do not add
// parameters while a Tape holds references into the set.
class ParameterSet {
 public:
  // Adds a rows x cols parameter initialised uniform in
  // [-1/sqrt(fan_in), 1/sqrt(fan_in)] with fan_in = rows.
  std::size_t add(std::string name, std::size_t rows, std::size_t cols,
                  std::mt19937_64& rng);
  std::size_t add_zeros(std::string name, std::size_t rows, std::size_t cols);

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  // Throws std::out_of_range for unknown names.
  std::size_t index_of(const std::string& name) const;

  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

class Tape;

// Handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(int node, const std::string& op, const std::string& phase);
  int node;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf bound to `p`; repeated calls within one tape return the same node.
  Var parameter(Parameter& p);

  // Records an op node.  `backward` may be empty for non-differentiable ops.
  Var record(std::string op, Tensor value, std::vector<int> inputs,
             BackwardFn backward);

  const Tensor& value(int id) const { return nodes_[id].value; }
  const std::string& op_name(int id) const { return nodes_[id].op; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  int input(int id, std::size_t which) const { return nodes_[id].inputs[which]; }
  std::size_t node_count() const { return nodes_.size(); }

  // Gradient accumulator for `id`, allocated (zeros) on first access.
  Tensor& grad(int id);
  // Gradient of a node after backward; zeros when nothing reached it.
  Tensor grad_of(Var v) const;

  // Runs reverse accumulation from a 1x1 loss and adds each parameter
  // leaf's gradient into Parameter::grad.  Throws std::invalid_argument for a
  // non-scalar loss and std::logic_error when called twice.
  void backward(Var loss);

  bool backward_done() const { return backward_done_; }

 private:
  struct Node {
    std::string op;
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<int> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
  bool backward_done_ = false;
};

// ---- primitives -----------------------------------------------------------
//
// Binary elementwise ops accept b with a's shape, a 1xN row (broadcast over
// rows), an Mx1 column (broadcast over columns) or a 1x1 scalar.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// a / max(b, kNumericFloor)
Var div(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var sigmoid(Var a);
Var tanh(Var a);
// Row-wise softmax over consecutive column groups of width `group`
// (group == cols gives the ordinary row softmax).
Var softmax(Var a, std::size_t group = 0);
// log(max(a, kNumericFloor))
Var log(Var a);
Var abs(Var a);
Var square(Var a);
// max(a, floor) elementwise; the gradient is zero where the floor is active.
Var clamp_min(Var a, double floor);
Var sum(Var a);
Var mean(Var a);
// MxN -> Mx1
Var sum_cols(Var a);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
// Identity forward; backward multiplies the upstream gradient by -lambda.
Var gradient_reversal(Var a, double lambda);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

}  // namespace tcf::ad
