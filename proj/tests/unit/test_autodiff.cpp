#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tcf/autodiff/grad_check.hpp"
#include "tcf/autodiff/layers.hpp"
#include "tcf/autodiff/tape.hpp"

using namespace tcf::ad;

namespace {

// Parameter with entries drawn from [lo, hi], optionally pushed away from 0.
std::size_t add_param(ParameterSet& ps, const std::string& name, std::size_t r, std::size_t c,
                      std::mt19937_64& rng, double lo, double hi, double min_abs = 0.0) {
  const auto i = ps.add_zeros(name, r, c);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : ps[i].value.values()) {
    do v = u(rng);
    while (std::fabs(v) < min_abs);
  }
  return i;
}

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(r, c);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// sum(W * f(params)) with a random constant weighting W so every output
// entry contributes with a distinct coefficient.
double check_op(const std::function<Var(Tape&, ParameterSet&)>& f, ParameterSet& ps,
                std::mt19937_64& rng) {
  Tensor w;
  auto loss = [&](Tape& tape) {
    Var out = f(tape, ps);
    if (w.size() != out.value().size()) w = random_tensor(out.shape().rows, out.shape().cols, rng);
    return sum(mul(out, tape.constant(w)));
  };
  return grad_check(loss, ps, 1e-4, Stencil::Central4).max_rel_error;
}

}  // namespace

TEST_CASE("forward examples") {
  Tape tape;
  auto a = tape.constant(Tensor{{1, 2}});
  auto b = tape.constant(Tensor{{3}, {4}});
  CHECK(matmul(a, b).value().item() == 11.0);
  auto s = softmax(tape.constant(Tensor{{0, 0}}));
  CHECK(s.value()[0] == 0.5);
  CHECK(s.value()[1] == 0.5);
  CHECK(abs(tape.constant(Tensor::scalar(-3.5))).value().item() == 3.5);
  CHECK(log(tape.constant(Tensor::scalar(0.0))).value().item() == doctest::Approx(std::log(1e-9)));
}

TEST_CASE("shape mismatch names the op and the shapes") {
  Tape tape;
  auto a = tape.constant(Tensor(2, 3));
  auto b = tape.constant(Tensor(2, 3));
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, tape.constant(Tensor(3, 2))), ShapeError);
}

TEST_CASE("backward closed forms") {
  ParameterSet ps;
  const auto x = ps.add_zeros("x", 1, 2);
  ps[x].value = Tensor{{1, 2}};
  {
    Tape tape;
    tape.backward(sum(square(tape.parameter(ps[x]))));
    CHECK(ps[x].grad[0] == 2.0);
    CHECK(ps[x].grad[1] == 4.0);
  }
  // softmax cross-entropy gradient is softmax(z) - y.
  ps.zero_grad();
  const auto z = ps.add_zeros("z", 1, 3);
  ps[z].value = Tensor{{0.3, -1.2, 2.0}};
  Tape tape;
  auto p = softmax(tape.parameter(ps[z]));
  auto y = tape.constant(Tensor{{0, 1, 0}});
  tape.backward(scale(sum(mul(y, log(p))), -1.0));
  const auto& pv = p.value();
  CHECK(ps[z].grad[0] == doctest::Approx(pv[0]).epsilon(1e-12));
  CHECK(ps[z].grad[1] == doctest::Approx(pv[1] - 1.0).epsilon(1e-12));
  CHECK(ps[z].grad[2] == doctest::Approx(pv[2]).epsilon(1e-12));
}

TEST_CASE("backward rejects non-scalar losses and a second pass") {
  ParameterSet ps;
  const auto x = ps.add_zeros("x", 1, 2);
  Tape tape;
  auto v = tape.parameter(ps[x]);
  CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
  auto l = sum(v);
  tape.backward(l);
  CHECK_THROWS_AS(tape.backward(l), std::logic_error);
}

TEST_CASE("unreachable parameters get exact zero gradient") {
  std::mt19937_64 rng(1);
  ParameterSet ps;
  const auto used = ps.add("used", 2, 2, rng);
  const auto dead = ps.add("dead", 2, 2, rng);
  ps[dead].grad.fill(5.0);
  auto loss = [&](Tape& t) { return sum(square(t.parameter(ps[used]))); };
  evaluate_with_gradient(loss, ps);
  for (double g : ps[dead].grad.values()) CHECK(g == 0.0);
  auto r = grad_check(loss, ps, 1e-6);
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad_check on sum of squares") {
  ParameterSet ps;
  const auto x = ps.add_zeros("x", 1, 1);
  ps[x].value[0] = 3.0;
  auto loss = [&](Tape& t) { return sum(square(t.parameter(ps[x]))); };
  auto r = grad_check(loss, ps, 1e-6);
  CHECK(r.worst_analytic == 6.0);
  CHECK(r.max_rel_error < 1e-8);
}

TEST_CASE("gradient reversal") {
  ParameterSet ps;
  const auto x = ps.add_zeros("x", 1, 2);
  ps[x].value = Tensor{{1.5, -2.0}};
  for (double lambda : {0.7, 0.5, 0.0}) {
    ps.zero_grad();
    Tape tape;
    auto in = tape.parameter(ps[x]);
    auto out = gradient_reversal(in, lambda);
    CHECK(out.value() == in.value());
    tape.backward(sum(mul(out, tape.constant(Tensor{{2.0, 1.0}}))));
    CHECK(ps[x].grad[0] == -lambda * 2.0);
    CHECK(ps[x].grad[1] == -lambda * 1.0);
  }
  Tape tape;
  CHECK_THROWS_AS(gradient_reversal(tape.constant(Tensor(1, 1)), -0.1), std::invalid_argument);
}

TEST_CASE("softmax rows are positive and sum to one") {
  std::mt19937_64 rng(3);
  Tape tape;
  auto z = tape.constant(random_tensor(16, 6, rng));
  for (std::size_t group : {std::size_t{2}, std::size_t{3}, std::size_t{6}}) {
    const auto& p = softmax(z, group).value();
    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t g = 0; g < 6; g += group) {
        double s = 0;
        for (std::size_t c = g; c < g + group; ++c) {
          CHECK(p(r, c) > 0.0);
          s += p(r, c);
        }
        CHECK(std::fabs(s - 1.0) <= 1e-12);
      }
  }
}

TEST_CASE("every primitive matches finite differences on random inputs") {
  std::mt19937_64 rng(11);
  using Build = std::function<Var(Tape&, ParameterSet&)>;
  struct Case {
    const char* name;
    std::function<void(ParameterSet&)> setup;
    Build f;
  };
  auto P = [](Tape& t, ParameterSet& ps, const char* n) { return t.parameter(ps[ps.index_of(n)]); };
  std::vector<Case> cases = {
      {"matmul", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -1, 1); add_param(ps, "b", 4, 2, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return matmul(P(t, ps, "a"), P(t, ps, "b")); }},
      {"add_row", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -1, 1); add_param(ps, "b", 1, 4, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return add(P(t, ps, "a"), P(t, ps, "b")); }},
      {"sub_col", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -1, 1); add_param(ps, "b", 3, 1, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return sub(P(t, ps, "a"), P(t, ps, "b")); }},
      {"mul_scalar", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -1, 1); add_param(ps, "b", 1, 1, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return mul(P(t, ps, "a"), P(t, ps, "b")); }},
      {"mul_same", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -1, 1); add_param(ps, "b", 2, 3, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return mul(P(t, ps, "a"), P(t, ps, "b")); }},
      {"div", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -1, 1); add_param(ps, "b", 2, 3, rng, 0.5, 2); },
       [&](Tape& t, ParameterSet& ps) { return div(P(t, ps, "a"), P(t, ps, "b")); }},
      {"scale_shift", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return add_scalar(scale(P(t, ps, "a"), -1.7), 0.3); }},
      {"sigmoid", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -2, 2); },
       [&](Tape& t, ParameterSet& ps) { return sigmoid(P(t, ps, "a")); }},
      {"tanh", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -2, 2); },
       [&](Tape& t, ParameterSet& ps) { return tanh(P(t, ps, "a")); }},
      {"softmax_grouped", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -2, 2); },
       [&](Tape& t, ParameterSet& ps) { return softmax(P(t, ps, "a"), 2); }},
      {"log", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, 0.2, 3); },
       [&](Tape& t, ParameterSet& ps) { return log(P(t, ps, "a")); }},
      {"abs", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -2, 2, 0.1); },
       [&](Tape& t, ParameterSet& ps) { return abs(P(t, ps, "a")); }},
      {"square", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -2, 2); },
       [&](Tape& t, ParameterSet& ps) { return square(P(t, ps, "a")); }},
      {"clamp_min", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -2, 2, 0.1); },
       [&](Tape& t, ParameterSet& ps) { return clamp_min(P(t, ps, "a"), 0.0); }},
      {"sum_mean", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return add(sum(P(t, ps, "a")), mean(square(P(t, ps, "a")))); }},
      {"sum_cols", [&](ParameterSet& ps) { add_param(ps, "a", 3, 4, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) { return sum_cols(P(t, ps, "a")); }},
      {"concat_slice", [&](ParameterSet& ps) { add_param(ps, "a", 2, 3, rng, -1, 1); add_param(ps, "b", 2, 2, rng, -1, 1); },
       [&](Tape& t, ParameterSet& ps) {
         Var parts[] = {P(t, ps, "a"), P(t, ps, "b")};
         Var c = concat_cols(parts);
         Var rows[] = {slice_cols(c, 1, 4), square(slice_cols(c, 2, 5))};
         return concat_rows(rows);
       }},
  };
  for (const auto& c : cases) {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      ParameterSet ps;
      c.setup(ps);
      worst = std::max(worst, check_op(c.f, ps, rng));
    }
    INFO("op: " << std::string(c.name));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("GRU and dense layers match finite differences") {
  std::mt19937_64 rng(5);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ParameterSet ps;
    auto gru = GruParams::create(ps, "gru", 3, 4, rng);
    auto dense = DenseParams::create(ps, "out", 4, 2, rng);
    const auto x = add_param(ps, "x", 2, 3, rng, -1, 1);
    const auto h = add_param(ps, "h", 2, 4, rng, -1, 1);
    auto loss = [&](Tape& t) {
      Var h1 = gru.step(t, ps, t.parameter(ps[x]), t.parameter(ps[h]));
      Var h2 = gru.step(t, ps, t.parameter(ps[x]), h1);
      return sum(square(dense.apply(t, ps, h2)));
    };
    worst = std::max(worst, grad_check(loss, ps, 1e-4, Stencil::Central4).max_rel_error);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("initialisation is bounded by 1/sqrt(fan_in)") {
  std::mt19937_64 rng(9);
  ParameterSet ps;
  const auto i = ps.add("w", 16, 8, rng);
  for (double v : ps[i].value.values()) CHECK(std::fabs(v) <= 0.25);
}

TEST_CASE("non-finite forward values are reported with the node id") {
  Tape tape;
  auto a = tape.constant(Tensor::scalar(1e308));
  try {
    scale(a, 10.0);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.node >= 0);
  }
}

TEST_CASE("finite difference stencils") {
  auto cube = [](double d) { return (1.5 + d) * (1.5 + d) * (1.5 + d); };
  CHECK(finite_difference(cube, 1e-3, Stencil::Central4) == doctest::Approx(6.75).epsilon(1e-10));
  CHECK(finite_difference(cube, 1e-3, Stencil::Richardson) ==
        doctest::Approx(6.75).epsilon(1e-10));
  // log|x| evaluated 2e-4 from its singularity: a fixed 1e-4 step is far off,
  // the adaptive tableau is not.
  auto steep = [](double d) { return std::log(std::fabs(2e-4 + d)); };
  const double exact = 1.0 / 2e-4;
  CHECK(std::fabs(finite_difference(steep, 1e-4, Stencil::Central4) - exact) / exact > 1e-2);
  CHECK(finite_difference(steep, 1e-4, Stencil::Ridders) == doctest::Approx(exact).epsilon(1e-7));
}
