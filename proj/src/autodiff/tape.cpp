#include "tcf/autodiff/tape.hpp"

#include <cmath>

#include "tcf/simd/kernels.hpp"

namespace tcf::ad {

std::size_t ParameterSet::add(std::string name, std::size_t rows,
                              std::size_t cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor value(rows, cols);
  for (auto& v : value.values()) v = dist(rng);
  const std::size_t idx = add_zeros(std::move(name), rows, cols);
  params_[idx].value = std::move(value);
  return idx;
}

std::size_t ParameterSet::add_zeros(std::string name, std::size_t rows,
                                    std::size_t cols) {
  if (by_name_.count(name) != 0)
    throw std::invalid_argument("duplicate parameter name: " + name);
  by_name_.emplace(name, params_.size());
  params_.push_back({std::move(name), Tensor(rows, cols), Tensor(rows, cols)});
  return params_.size() - 1;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::size_t ParameterSet::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) {
    if (p.grad.shape() != p.value.shape())
      p.grad = Tensor(p.value.rows(), p.value.cols());
    else
      p.grad.fill(0.0);
  }
}

const Tensor& Var::value() const { return tape->value(id); }

NonFiniteError::NonFiniteError(int node_id, const std::string& op,
                               const std::string& phase)
    : std::runtime_error("non-finite value in " + phase + " at node " +
                         std::to_string(node_id) + " (" + op + ")"),
      node(node_id) {}

Var Tape::constant(Tensor value) {
  return record("constant", std::move(value), {}, nullptr);
}

Var Tape::parameter(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return {this, it->second};
  Node n;
  n.op = "param:" + p.name;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  return {this, id};
}

Var Tape::record(std::string op, Tensor value, std::vector<int> inputs,
                 BackwardFn backward) {
  const int id = static_cast<int>(nodes_.size());
  if (!value.all_finite()) throw NonFiniteError(id, op, "forward");
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  for (int in : inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, id};
}

Tensor& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

Tensor Tape::grad_of(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.has_grad) return n.grad;
  return Tensor(n.value.rows(), n.value.cols());
}

void Tape::backward(Var loss) {
  if (backward_done_)
    throw std::logic_error("backward already run on this tape; reset by using a new tape");
  if (loss.value().size() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                loss.shape().str());
  backward_done_ = true;
  grad(loss.id).fill(1.0);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.requires_grad) continue;
    if (!n.grad.all_finite()) throw NonFiniteError(id, n.op, "backward");
    if (n.backward) n.backward(*this, id);
  }
  for (Node& n : nodes_) {
    if (n.param == nullptr || !n.has_grad) continue;
    Tensor& pg = n.param->grad;
    if (pg.shape() != n.value.shape()) pg = Tensor(n.value.rows(), n.value.cols());
    simd::axpy(1.0, n.grad.data(), pg.data(), pg.size());
  }
}

}  // namespace tcf::ad
