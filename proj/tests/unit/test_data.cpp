#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tcf/data/dataset.hpp"
#include "tcf/data/history.hpp"
#include "tcf/data/normalize.hpp"
#include "tcf/data/split.hpp"

using namespace tcf::data;

namespace {

Dataset small_dataset(std::size_t n = 4, std::size_t t = 5) {
  Dataset ds;
  ds.dims = {2, 1, 2};
  for (std::size_t i = 0; i < n; ++i) {
    Trajectory tr;
    tr.entity_id = "e" + std::to_string(i);
    for (std::size_t s = 0; s < t; ++s) {
      TimeStep st;
      st.x = {0.1 * double(i) + double(s), 1.0 / 3.0 * double(s)};
      st.v = {0.5 + 0.25 * double(s % 3), 2.0 - 0.1 * double(i)};
      st.a = {std::uint8_t(s % 2), std::uint8_t((s + i) % 2)};
      st.y = std::sin(double(i + s));
      tr.steps.push_back(st);
    }
    ds.trajectories.push_back(tr);
  }
  return ds;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tcf_test_" + name)).string();
}

}  // namespace

TEST_CASE("dataset round trip is lossless") {
  auto ds = small_dataset();
  ds.trajectories[1].status = "terminal";
  const auto path = temp_path("roundtrip.jsonl");
  save_dataset(ds, path);
  auto back = load_dataset(path);
  CHECK(back == ds);
  std::remove(path.c_str());
}

TEST_CASE("ragged v row is rejected with its line number") {
  const auto path = temp_path("ragged.jsonl");
  {
    std::ofstream out(path);
    out << to_json_line(small_dataset(1).trajectories[0]) << '\n';
    out << R"({"entity_id":"bad","steps":[{"x":[0,0],"v":[[1,2]],"a":[0,1],"y":0},)"
        << R"({"x":[0,0],"v":[[1]],"a":[0,1],"y":0}]})" << '\n';
  }
  try {
    load_dataset(path);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line == 2);
  }
  std::remove(path.c_str());
}

TEST_CASE("empty file gives an empty dataset") {
  const auto path = temp_path("empty.jsonl");
  { std::ofstream out(path); }
  CHECK(load_dataset(path).empty());
  std::remove(path.c_str());
}

TEST_CASE("validate rejects bad bits and single-step trajectories") {
  auto ds = small_dataset();
  ds.trajectories[0].steps[0].a[0] = 2;
  CHECK_THROWS_AS(validate(ds), DatasetError);
  ds = small_dataset(1, 1);
  CHECK_THROWS_AS(validate(ds), DatasetError);
}

TEST_CASE("history contents and bounds") {
  auto ds = small_dataset();
  const auto& tr = ds.trajectories[2];
  auto h = build_history(tr, ds.dims, 3);
  CHECK(h.t == 3);
  CHECK(h.x.size() == 3);
  CHECK(h.v.size() == 3);
  CHECK(h.y.size() == 3);
  CHECK(h.a.size() == 2);
  CHECK(h.x[2] == tr.steps[2].x);
  CHECK(h.a[1] == tr.steps[1].a);
  CHECK_THROWS_AS(build_history(tr, ds.dims, 0), std::out_of_range);
  CHECK_THROWS_AS(build_history(tr, ds.dims, 6), std::out_of_range);
  CHECK(build_history(tr, ds.dims, 1).a.empty());
}

TEST_CASE("normalization fits on train and inverts") {
  auto ds = small_dataset(6, 7);
  auto st = fit_stats(ds);
  auto norm = normalize(ds, st);
  double mean_x = 0;
  std::size_t n = 0;
  double vmin = 1e9, vmax = -1e9;
  for (const auto& tr : norm.trajectories)
    for (const auto& s : tr.steps) {
      mean_x += s.x[0];
      ++n;
      vmin = std::min(vmin, s.v[0]);
      vmax = std::max(vmax, s.v[0]);
    }
  CHECK(std::fabs(mean_x / double(n)) < 1e-9);
  CHECK(vmin == 0.0);
  CHECK(vmax == 1.0);
  auto back = denormalize(norm, st);
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t s = 0; s < ds.trajectories[i].length(); ++s)
      CHECK(back.trajectories[i].steps[s].y ==
            doctest::Approx(ds.trajectories[i].steps[s].y).epsilon(1e-12));

  auto j = to_json(st);
  CHECK(norm_stats_from_json(j) == st);
}

TEST_CASE("constant features pass through unchanged") {
  auto ds = small_dataset();
  for (auto& tr : ds.trajectories)
    for (auto& s : tr.steps) s.x[1] = 4.0;
  auto st = fit_stats(ds);
  CHECK(st.x[1].constant);
  auto norm = normalize(ds, st);
  CHECK(norm.trajectories[0].steps[0].x[1] == 4.0);
}

TEST_CASE("entity split is a deterministic partition") {
  auto a = split_indices(100, {}, 42);
  auto b = split_indices(100, {}, 42);
  CHECK(a == b);
  CHECK(a[0].size() == 70);
  CHECK(a[1].size() == 15);
  CHECK(a[2].size() == 15);
  std::vector<int> seen(100, 0);
  for (const auto& part : a)
    for (auto i : part) ++seen[i];
  for (int c : seen) CHECK(c == 1);
  CHECK(split_indices(100, {}, 43) != a);
  CHECK_THROWS_AS(split_indices(100, {0.5, 0.2, 0.2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_indices(3, {0.8, 0.1, 0.1}, 1), std::invalid_argument);
}

TEST_CASE("bitmask helpers") {
  CHECK(bitmask({1, 0, 1}) == 5u);
  CHECK(bits_from_mask(6, 3) == std::vector<std::uint8_t>{0, 1, 1});
}
