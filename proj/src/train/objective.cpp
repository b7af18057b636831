#include "tcf/train/objective.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tcf::train {
namespace {

ad::Tensor stack(const std::vector<ad::Tensor>& parts) {
  const std::size_t rows = parts.front().rows(), cols = parts.front().cols();
  ad::Tensor out(rows * parts.size(), cols);
  for (std::size_t i = 0; i < parts.size(); ++i)
    std::copy(parts[i].values().begin(), parts[i].values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(i * rows * cols));
  return out;
}

ad::Tensor scaled(const ad::Tensor& mask, double count) { return mean_weights(mask, count); }

struct Encoded {
  std::vector<ad::Var> layers;  // per layer, all steps stacked (T*B x d_r)
  ad::Var top() const { return layers.back(); }
};

Encoded run_encoder(ad::Tape& tape, net::Network& net, const std::vector<ad::Tensor>& inputs,
                    std::size_t rows) {
  net::RecurrentState state = net.zero_state(tape, rows);
  std::vector<std::vector<ad::Var>> per_layer(net.config().depth);
  for (const auto& in : inputs) {
    state = net.encoder_step(tape, state, tape.constant(in));
    for (std::size_t l = 0; l < state.layers.size(); ++l) per_layer[l].push_back(state.layers[l]);
  }
  Encoded e;
  for (auto& steps : per_layer) e.layers.push_back(ad::concat_rows(steps));
  return e;
}

ad::Var classify(ad::Tape& tape, net::Network& net, ad::Var rep, bool reverse) {
  return reverse ? net.treatment_probs(tape, rep, 1.0) : net.classify(tape, rep);
}

struct Forward {
  ad::Var l_y, l_a, l_d;
};

Forward forward(ad::Tape& tape, net::Network& net, const Batch& bt, const ObjectiveOptions& o,
                bool outcome_only) {
  const std::size_t B = bt.rows;
  const ad::Tensor a_all = stack(bt.a);
  const ad::Tensor y_all = stack(bt.y_next);
  const ad::Tensor next_all = stack(bt.has_next);
  const ad::Tensor step_all = stack(bt.has_step);

  double n_y = bt.count(bt.has_next);
  for (const auto& h : bt.decoder)
    for (double v : h.has_target.values()) n_y += v;
  double n_a = bt.count(bt.has_step) * (bt.has_counterfactual() ? 2.0 : 1.0);
  for (const auto& h : bt.decoder)
    for (double v : h.has_state.values()) n_a += v;

  Encoded enc = run_encoder(tape, net, bt.enc_in, B);
  ad::Var y_hat = net.outcome(tape, enc.top(), tape.constant(a_all));
  Forward f;
  f.l_y = loss_outcome(y_hat, y_all, scaled(next_all, n_y));

  // Decoder rollout from every encoder state.
  net::RecurrentState state{enc.layers};
  ad::Var prev = y_hat;
  std::vector<ad::Var> dec_tops;
  for (const auto& h : bt.decoder) {
    ad::Var parts[] = {tape.constant(h.input), prev};
    state = net.decoder_step(tape, state, ad::concat_cols(parts));
    prev = net.outcome(tape, state.top(), tape.constant(h.a));
    f.l_y = ad::add(f.l_y, loss_outcome(prev, h.y, scaled(h.has_target, n_y)));
    dec_tops.push_back(state.top());
  }
  if (outcome_only) return f;

  f.l_a = loss_treatment(classify(tape, net, enc.top(), o.reverse_gradient), a_all,
                         scaled(step_all, n_a));
  for (std::size_t j = 0; j < bt.decoder.size(); ++j) {
    const auto& h = bt.decoder[j];
    f.l_a = ad::add(f.l_a, loss_treatment(classify(tape, net, dec_tops[j], o.reverse_gradient),
                                          h.a, scaled(h.has_state, n_a)));
  }

  if (bt.has_counterfactual()) {
    const ad::Tensor a_cf = stack(bt.a_cf);
    Encoded cf = run_encoder(tape, net, bt.enc_in_cf, B);
    f.l_a = ad::add(f.l_a, loss_treatment(classify(tape, net, cf.top(), o.reverse_gradient), a_cf,
                                          scaled(step_all, n_a)));
    // Individual outcomes under the k-th intervention, factual and corrupted.
    std::vector<ad::Var> y_f, y_cf;
    for (std::size_t k = 0; k <= net.config().k; ++k) {
      y_f.push_back(net.outcome(tape, enc.top(), tape.constant(individual_arm(a_all, k))));
      y_cf.push_back(net.outcome(tape, cf.top(), tape.constant(individual_arm(a_cf, k))));
    }
    ad::Var z = net.medium(tape, enc.top(), tape.constant(a_all));
    ContrastiveOptions co;
    co.invert_ratio = o.invert_ratio;
    co.floor = o.ratio_floor;
    f.l_d = loss_contrastive(y_f, y_cf, z, a_all, y_all,
                             scaled(next_all, bt.count(bt.has_next)), co);
  } else {
    f.l_d = tape.constant(ad::Tensor::scalar(0.0));
  }
  return f;
}

}  // namespace

ObjectiveTerms build_objective(ad::Tape& tape, net::Network& net, const Batch& batch,
                               const ObjectiveOptions& opts) {
  Forward f = forward(tape, net, batch, opts, false);
  ObjectiveTerms t{f.l_y, f.l_a, f.l_d, {}, {}};
  t.j = ad::add(ad::add(f.l_y, ad::scale(f.l_a, opts.lambda1)), ad::scale(f.l_d, opts.lambda2));
  auto& b = t.breakdown;
  b.l_y = f.l_y.value().item();
  b.l_a = f.l_a.value().item();
  b.l_d = f.l_d.value().item();
  b.total = b.l_y - opts.lambda1 * b.l_a + opts.lambda2 * b.l_d;
  return t;
}

ObjectiveGradCheck check_objective_gradients(net::Network& net, const Batch& batch,
                                             const ObjectiveOptions& opts, double eps,
                                             ad::Stencil stencil) {
  auto& ps = net.params();
  {
    ad::Tape tape;
    auto t = build_objective(tape, net, batch, opts);
    ps.zero_grad();
    tape.backward(t.j);
  }
  std::vector<ad::Tensor> analytic;
  for (const auto& p : ps) analytic.push_back(p.grad);
  const auto classifier = net.classifier_params();

  ObjectiveGradCheck out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const bool heads = std::find(classifier.begin(), classifier.end(), i) != classifier.end();
    std::size_t j = 0;
    auto at = [&](double delta) {
      double& x = ps[i].value[j];
      const double saved = x;
      x = saved + delta;
      ad::Tape tape;
      auto b = build_objective(tape, net, batch, opts).breakdown;
      x = saved;
      return heads ? b.l_y + opts.lambda1 * b.l_a + opts.lambda2 * b.l_d : b.total;
    };
    for (j = 0; j < ps[i].value.size(); ++j) {
      const double fd = ad::finite_difference(at, eps, stencil);
      const double an = analytic[i][j];
      const double scale = std::max(std::fabs(an), std::fabs(fd));
      const double rel = std::fabs(an - fd) / std::max(scale, kGradFloor);
      ++out.checked;
      if (scale < kGradFloor) ++out.below_floor;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst_param = ps[i].name;
        out.worst_index = j;
        out.worst_analytic = an;
        out.worst_numeric = fd;
      }
    }
  }
  return out;
}

double outcome_loss(net::Network& net, const Batch& batch) {
  ad::Tape tape;
  return forward(tape, net, batch, {}, true).l_y.value().item();
}

}  // namespace tcf::train
