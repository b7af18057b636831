#include "tcf/net/network.hpp"

#include <stdexcept>

#include "tcf/util/seed.hpp"

namespace tcf::net {
namespace {

std::vector<std::size_t> with_prefix(const ad::ParameterSet& ps,
                                     std::initializer_list<const char*> prefixes) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (const char* p : prefixes)
      if (ps[i].name.rfind(p, 0) == 0) {
        out.push_back(i);
        break;
      }
  return out;
}

}  // namespace

Network::Network(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  auto rng = make_rng(seed, {stream_tag("init")});
  const auto& c = config_;
  for (std::size_t l = 0; l < c.depth; ++l)
    encoder_.push_back(ad::GruParams::create(params_, "enc." + std::to_string(l),
                                             l == 0 ? c.encoder_input() : c.d_r, c.d_r, rng));
  for (std::size_t l = 0; l < c.depth; ++l)
    decoder_.push_back(ad::GruParams::create(params_, "dec." + std::to_string(l),
                                             l == 0 ? c.decoder_input() : c.d_r, c.d_r, rng));
  gy_hidden_ = ad::DenseParams::create(params_, "gy.hidden", c.d_r + c.k, c.head_hidden, rng);
  gy_out_ = ad::DenseParams::create(params_, "gy.out", c.head_hidden, 1, rng);
  ga_hidden_ = ad::DenseParams::create(params_, "ga.hidden", c.d_r, c.head_hidden, rng);
  ga_out_ = ad::DenseParams::create(params_, "ga.out", c.head_hidden, 2 * c.k, rng);
  psi_ = ad::DenseParams::create(params_, "psi", c.d_r + c.k, c.k * c.d_z, rng);
}

RecurrentState Network::zero_state(ad::Tape& tape, std::size_t rows) {
  RecurrentState s;
  for (std::size_t l = 0; l < config_.depth; ++l)
    s.layers.push_back(tape.constant(ad::Tensor(rows, config_.d_r)));
  return s;
}

namespace {

RecurrentState run_stack(ad::Tape& tape, ad::ParameterSet& ps,
                         const std::vector<ad::GruParams>& stack, const RecurrentState& h,
                         ad::Var input) {
  if (h.layers.size() != stack.size())
    throw std::invalid_argument("recurrent state depth does not match the network");
  RecurrentState out;
  ad::Var x = input;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    x = stack[l].step(tape, ps, x, h.layers[l]);
    out.layers.push_back(x);
  }
  return out;
}

}  // namespace

RecurrentState Network::encoder_step(ad::Tape& tape, const RecurrentState& h, ad::Var input) {
  return run_stack(tape, params_, encoder_, h, input);
}

RecurrentState Network::decoder_step(ad::Tape& tape, const RecurrentState& h, ad::Var input) {
  return run_stack(tape, params_, decoder_, h, input);
}

ad::Var Network::outcome(ad::Tape& tape, ad::Var rep, ad::Var a) {
  ad::Var parts[] = {rep, a};
  ad::Var hidden = ad::tanh(gy_hidden_.apply(tape, params_, ad::concat_cols(parts)));
  return gy_out_.apply(tape, params_, hidden);
}

ad::Var Network::treatment_probs(ad::Tape& tape, ad::Var rep, double grl_lambda) {
  return classify(tape, ad::gradient_reversal(rep, grl_lambda));
}

ad::Var Network::classify(ad::Tape& tape, ad::Var rep) {
  ad::Var hidden = ad::tanh(ga_hidden_.apply(tape, params_, rep));
  return ad::softmax(ga_out_.apply(tape, params_, hidden), 2);
}

ad::Var Network::medium(ad::Tape& tape, ad::Var rep, ad::Var a) {
  ad::Var parts[] = {rep, a};
  return ad::tanh(psi_.apply(tape, params_, ad::concat_cols(parts)));
}

std::vector<std::size_t> Network::representation_params() const {
  return with_prefix(params_, {"enc.", "dec."});
}
std::vector<std::size_t> Network::classifier_params() const {
  return with_prefix(params_, {"ga."});
}
std::vector<std::size_t> Network::outcome_params() const {
  return with_prefix(params_, {"gy."});
}
std::vector<std::size_t> Network::medium_params() const { return with_prefix(params_, {"psi"}); }

ad::Tensor block_expansion(std::size_t k, std::size_t d) {
  ad::Tensor e(k, k * d);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) e(i, i * d + j) = 1.0;
  return e;
}

ad::Var anchor(ad::Var a, ad::Var z, ad::Var y, std::size_t k) {
  const std::size_t d = z.shape().cols / k;
  if (a.shape().cols != k || z.shape().cols != k * d || y.shape().cols != 1)
    throw ad::ShapeError("anchor: a " + a.shape().str() + ", z " + z.shape().str() + ", y " +
                         y.shape().str() + " for K=" + std::to_string(k));
  ad::Var gate = ad::matmul(a, a.tape->constant(block_expansion(k, d)));
  return ad::mul(ad::mul(gate, z), y);
}

ad::Var density_ratio(ad::Var z, ad::Var y_hat, ad::Var o, std::size_t k, double floor) {
  const std::size_t d = z.shape().cols / k;
  ad::Tensor et = block_expansion(k, d);
  ad::Tensor sum_blocks(k * d, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) sum_blocks(i * d + j, i) = et(i, i * d + j);
  ad::Var dist = ad::abs(ad::sub(ad::mul(z, y_hat), o));
  return ad::clamp_min(ad::matmul(dist, z.tape->constant(std::move(sum_blocks))), floor);
}

}  // namespace tcf::net
