#include "tcf/net/forecaster.hpp"

#include <map>
#include <stdexcept>

namespace tcf::net {
namespace {

// Stacks row vectors into an n x width constant.
ad::Var stack_rows(ad::Tape& tape, const std::vector<std::vector<double>>& rows,
                   std::size_t width) {
  ad::Tensor t(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) t(r, c) = rows[r][c];
  return tape.constant(std::move(t));
}

ad::Var replicate(ad::Var v, std::size_t n) {
  if (n == 1) return v;
  std::vector<ad::Var> parts(n, v);
  return ad::concat_rows(parts);
}

}  // namespace

std::vector<ad::Tensor> encoder_inputs(const data::History& h) {
  const auto& d = h.dims;
  const std::size_t width = d.d_x + d.d_v * d.k + d.k + 1;
  std::vector<ad::Tensor> rows;
  for (std::size_t s = 0; s < h.t; ++s) {
    ad::Tensor row(1, width);
    std::size_t c = 0;
    for (double x : h.x[s]) row[c++] = x;
    for (double v : h.v[s]) row[c++] = v;
    for (std::size_t k = 0; k < d.k; ++k) row[c++] = s == 0 ? 0.0 : h.a[s - 1][k];
    row[c] = h.y[s];
    rows.push_back(std::move(row));
  }
  return rows;
}

Forecaster::Forecaster(Network& net, data::NormStats stats) : net_(net), stats_(std::move(stats)) {
  const auto& c = net_.config();
  if (stats_.x.size() != c.d_x || stats_.v.size() != c.d_v * c.k)
    throw std::invalid_argument("normalization stats do not match the model dimensions");
}

data::History Forecaster::normalize_history(const data::History& raw) const {
  data::History h = raw;
  for (std::size_t s = 0; s < h.t; ++s) {
    for (std::size_t i = 0; i < h.x[s].size(); ++i) h.x[s][i] = stats_.x[i].apply(h.x[s][i]);
    for (std::size_t i = 0; i < h.v[s].size(); ++i)
      h.v[s][i] = data::snap_feature(stats_.v[i].apply(h.v[s][i]));
    h.y[s] = stats_.y.apply(h.y[s]);
  }
  return h;
}

Plan Forecaster::normalize_plan(const Plan& raw) const {
  Plan p = raw;
  for (auto& st : p)
    for (std::size_t i = 0; i < st.v.size(); ++i)
      st.v[i] = data::snap_feature(stats_.v[i].apply(st.v[i]));
  return p;
}

void Forecaster::check_plan(const Plan& plan) const {
  const auto& c = net_.config();
  if (plan.empty()) throw std::invalid_argument("plan must have at least one step");
  if (plan.size() > c.tau_max)
    throw std::out_of_range("horizon " + std::to_string(plan.size()) + " exceeds tau_max " +
                            std::to_string(c.tau_max));
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (plan[j].a.size() != c.k)
      throw std::invalid_argument("plan step " + std::to_string(j) + ": expected " +
                                  std::to_string(c.k) + " treatment bits");
    for (auto b : plan[j].a)
      if (b > 1) throw std::invalid_argument("plan step " + std::to_string(j) + ": bits must be 0/1");
    if (!plan[j].v.empty() && plan[j].v.size() != c.d_v * c.k)
      throw std::invalid_argument("plan step " + std::to_string(j) + ": expected " +
                                  std::to_string(c.d_v * c.k) + " feature values");
  }
}

std::vector<double> Forecaster::default_features(const data::History& history) const {
  const std::size_t n = net_.config().d_v * net_.config().k;
  std::vector<double> mean(n, 0.0);
  for (const auto& v : history.v)
    for (std::size_t i = 0; i < n; ++i) mean[i] += v[i];
  for (auto& m : mean) m /= static_cast<double>(history.v.size());
  return mean;
}

Plan Forecaster::complete_plan(const data::History& history, const Plan& plan) const {
  check_plan(plan);
  if (history.t == 0) throw std::invalid_argument("history must contain at least one step");
  Plan out = plan;
  std::vector<double> mean;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!out[j].v.empty()) continue;
    if (j == 0) {
      out[j].v = history.v.back();
    } else {
      if (mean.empty()) mean = default_features(history);
      out[j].v = mean;
    }
  }
  return out;
}

std::vector<std::vector<double>> Forecaster::forecast_normalized(
    const data::History& norm_history, const std::vector<Plan>& plans) const {
  const auto& c = net_.config();
  if (plans.empty()) return {};
  const std::size_t tau = plans.front().size();
  for (const auto& p : plans) {
    check_plan(p);
    if (p.size() != tau) throw std::invalid_argument("forecast_many: plans differ in length");
    for (const auto& st : p)
      if (st.v.empty()) throw std::invalid_argument("forecast_normalized: plan not completed");
  }
  if (norm_history.dims != c.dims())
    throw std::invalid_argument("history dimensions do not match the model");

  // Plans sharing the step-0 features share one encoder pass.
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < plans.size(); ++i) groups[plans[i].front().v].push_back(i);

  std::vector<std::vector<double>> out(plans.size());
  for (const auto& [v0, members] : groups) {
    data::History h = norm_history;
    h.v.back() = v0;
    ad::Tape tape;
    RecurrentState state = net_.zero_state(tape, 1);
    for (auto& row : encoder_inputs(h)) state = net_.encoder_step(tape, state, tape.constant(row));
    const std::size_t n = members.size();
    for (auto& layer : state.layers) layer = replicate(layer, n);

    auto treatments = [&](std::size_t j) {
      std::vector<std::vector<double>> rows;
      for (auto m : members) {
        const auto& a = plans[m][j].a;
        rows.emplace_back(a.begin(), a.end());
      }
      return stack_rows(tape, rows, c.k);
    };
    ad::Var y_hat = net_.outcome(tape, state.top(), treatments(0));
    std::vector<ad::Var> preds = {y_hat};
    for (std::size_t j = 1; j < tau; ++j) {
      std::vector<std::vector<double>> rows;
      for (std::size_t r = 0; r < n; ++r) {
        const auto& st = plans[members[r]][j];
        const auto& prev = plans[members[r]][j - 1];
        std::vector<double> row(st.v);
        row.insert(row.end(), prev.a.begin(), prev.a.end());
        rows.push_back(std::move(row));
      }
      ad::Var parts[] = {stack_rows(tape, rows, c.decoder_input() - 1), y_hat};
      state = net_.decoder_step(tape, state, ad::concat_cols(parts));
      y_hat = net_.outcome(tape, state.top(), treatments(j));
      preds.push_back(y_hat);
    }
    for (std::size_t r = 0; r < n; ++r)
      for (auto& p : preds) out[members[r]].push_back(p.value()[r]);
  }
  return out;
}

std::vector<std::vector<double>> Forecaster::forecast_many(const data::History& history,
                                                           const std::vector<Plan>& plans) const {
  std::vector<Plan> norm;
  for (const auto& p : plans) norm.push_back(normalize_plan(complete_plan(history, p)));
  auto out = forecast_normalized(normalize_history(history), norm);
  for (auto& row : out)
    for (auto& y : row) y = stats_.y.invert(y);
  return out;
}

std::vector<double> Forecaster::forecast(const data::History& history, const Plan& plan) const {
  return forecast_many(history, {plan}).front();
}

OutcomeSet Forecaster::outcome_set(const data::History& history, const Plan& plan) const {
  const std::size_t k = net_.config().k;
  Plan base = complete_plan(history, plan);
  std::vector<Plan> variants;
  auto with_last = [&](std::vector<std::uint8_t> a) {
    Plan p = base;
    p.back().a = std::move(a);
    variants.push_back(std::move(p));
  };
  with_last(std::vector<std::uint8_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::uint8_t> e(k, 0);
    e[i] = 1;
    with_last(e);
  }
  with_last(base.back().a);
  auto ys = forecast_many(history, variants);
  OutcomeSet os;
  os.a = base.back().a;
  os.none = ys[0].back();
  for (std::size_t i = 0; i < k; ++i) os.single.push_back(ys[1 + i].back());
  os.requested = ys[k + 1].back();
  return os;
}

ad::Tensor Forecaster::encode(const data::History& history) const {
  data::History h = normalize_history(history);
  if (h.dims != net_.config().dims())
    throw std::invalid_argument("history dimensions do not match the model");
  ad::Tape tape;
  RecurrentState state = net_.zero_state(tape, 1);
  for (auto& row : encoder_inputs(h)) state = net_.encoder_step(tape, state, tape.constant(row));
  return state.top().value();
}

}  // namespace tcf::net
