#include "tcf/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tcf::ad {
namespace {

double forward_only(const LossBuilder& loss) {
  Tape tape;
  return loss(tape).value().item();
}

}  // namespace

double evaluate_with_gradient(const LossBuilder& loss, ParameterSet& params) {
  params.zero_grad();
  Tape tape;
  Var l = loss(tape);
  tape.backward(l);
  return l.value().item();
}

double finite_difference(const std::function<double(double)>& f, double eps, Stencil stencil) {
  if (stencil == Stencil::Central2) return (f(eps) - f(-eps)) / (2 * eps);
  // Differences first so a flat direction gives exactly zero.
  auto c4 = [&](double e) {
    const double d1 = f(e) - f(-e);
    const double d2 = f(2 * e) - f(-2 * e);
    return (8 * d1 - d2) / (12 * e);
  };
  if (stencil == Stencil::Central4) return c4(eps);
  if (stencil == Stencil::Richardson) return (16 * c4(eps / 2) - c4(eps)) / 15;

  constexpr int kTable = 16;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink, kSafe = 2.0;
  std::vector<std::vector<double>> a(kTable, std::vector<double>(kTable));
  double h = eps;
  a[0][0] = (f(h) - f(-h)) / (2 * h);
  double best = a[0][0], err = INFINITY;
  for (int i = 1; i < kTable; ++i) {
    h /= kShrink;
    a[0][i] = (f(h) - f(-h)) / (2 * h);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1);
      fac *= kShrink2;
      const double e = std::max(std::fabs(a[j][i] - a[j - 1][i]),
                                std::fabs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::fabs(a[i][i] - a[i - 1][i - 1]) >= kSafe * err) break;
  }
  return best;
}

GradCheckResult grad_check(const LossBuilder& loss, ParameterSet& params,
                           double eps, Stencil stencil) {
  if (!(eps > 0)) throw std::invalid_argument("grad_check: eps must be positive");
  evaluate_with_gradient(loss, params);
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad);

  GradCheckResult res;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& value = params[pi].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double orig = value[i];
      auto at = [&](double delta) {
        value[i] = orig + delta;
        const double f = forward_only(loss);
        value[i] = orig;
        return f;
      };
      const double fd = finite_difference(at, eps, stencil);
      const double a = analytic[pi][i];
      const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-12});
      const double rel = std::fabs(a - fd) / denom;
      ++res.checked;
      if (rel >= res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst_param = params[pi].name;
        res.worst_index = i;
        res.worst_analytic = a;
        res.worst_numeric = fd;
      }
    }
  }
  return res;
}

}  // namespace tcf::ad
