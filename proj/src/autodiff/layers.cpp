#include "tcf/autodiff/layers.hpp"

#include <cmath>

namespace tcf::ad {

DenseParams DenseParams::create(ParameterSet& ps, const std::string& prefix,
                                std::size_t in, std::size_t out,
                                std::mt19937_64& rng) {
  DenseParams d;
  d.in = in;
  d.out = out;
  d.weight = ps.add(prefix + ".W", in, out, rng);
  // Bias shares the weight's fan-in bound.
  d.bias = ps.add_zeros(prefix + ".b", 1, out);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : ps[d.bias].value.values()) v = dist(rng);
  return d;
}

Var DenseParams::apply(Tape& tape, ParameterSet& ps, Var x) const {
  if (x.shape().cols != in)
    throw ShapeError("dense " + ps[weight].name + ": input " + x.shape().str() +
                     " but layer expects " + std::to_string(in) + " columns");
  return add(matmul(x, tape.parameter(ps[weight])), tape.parameter(ps[bias]));
}

GruParams GruParams::create(ParameterSet& ps, const std::string& prefix,
                            std::size_t in, std::size_t hidden,
                            std::mt19937_64& rng) {
  GruParams g;
  g.in = in;
  g.hidden = hidden;
  g.wx = ps.add(prefix + ".Wx", in, 3 * hidden, rng);
  g.uzr = ps.add(prefix + ".Uzr", hidden, 2 * hidden, rng);
  g.un = ps.add(prefix + ".Un", hidden, hidden, rng);
  g.bias = ps.add_zeros(prefix + ".b", 1, 3 * hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : ps[g.bias].value.values()) v = dist(rng);
  return g;
}

Var GruParams::step(Tape& tape, ParameterSet& ps, Var x, Var h) const {
  if (x.shape().cols != in || h.shape().cols != hidden ||
      x.shape().rows != h.shape().rows)
    throw ShapeError("gru " + ps[wx].name + ": input " + x.shape().str() +
                     ", state " + h.shape().str() + " (expects in=" +
                     std::to_string(in) + ", hidden=" + std::to_string(hidden) + ")");
  const std::size_t H = hidden;
  Var xw = add(matmul(x, tape.parameter(ps[wx])), tape.parameter(ps[bias]));
  Var hu = matmul(h, tape.parameter(ps[uzr]));
  Var z = sigmoid(add(slice_cols(xw, 0, H), slice_cols(hu, 0, H)));
  Var r = sigmoid(add(slice_cols(xw, H, 2 * H), slice_cols(hu, H, 2 * H)));
  Var n = tanh(add(slice_cols(xw, 2 * H, 3 * H),
                   matmul(mul(r, h), tape.parameter(ps[un]))));
  return add(n, mul(z, sub(h, n)));
}

}  // namespace tcf::ad
