#include "tcf/cf/corruption.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace tcf::cf {

CorruptedStep corrupt_step_at(const std::vector<double>& v, const std::vector<std::uint8_t>& a,
                              const data::Dims& dims, std::size_t k, std::size_t t) {
  if (dims.k == 0) throw std::invalid_argument("corruption needs K >= 1");
  if (k >= dims.k) throw std::invalid_argument("corruption position out of range");
  if (a.size() != dims.k || v.size() != dims.d_v * dims.k)
    throw std::invalid_argument("corruption: step does not match dims");
  CorruptedStep out{v, a, {}};
  CorruptionRecord rec;
  rec.t = t;
  rec.position = k;
  rec.a_before = a[k];
  rec.a_after = static_cast<std::uint8_t>(1 - a[k]);
  out.a[k] = rec.a_after;
  for (std::size_t d = 0; d < dims.d_v; ++d) {
    const double x = v[d * dims.k + k];
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("corruption: feature " + data::format_double(x) +
                                  " outside [0, 1] at step " + std::to_string(t));
    rec.v_before.push_back(x);
    rec.v_after.push_back(1.0 - x);
    out.v[d * dims.k + k] = 1.0 - x;
  }
  out.records.push_back(std::move(rec));
  return out;
}

CorruptedStep corrupt_step(const std::vector<double>& v, const std::vector<std::uint8_t>& a,
                           const data::Dims& dims, std::mt19937_64& rng,
                           const CorruptionOptions& opts, std::size_t t) {
  if (dims.k == 0) throw std::invalid_argument("corruption needs K >= 1");
  if (opts.positions < 1 || opts.positions > dims.k)
    throw std::invalid_argument("corruption: positions must be in 1..K");
  if (opts.positions == 1) {
    std::uniform_int_distribution<std::size_t> pick(0, dims.k - 1);
    return corrupt_step_at(v, a, dims, pick(rng), t);
  }
  std::vector<std::size_t> order(dims.k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  CorruptedStep out{v, a, {}};
  for (std::size_t i = 0; i < opts.positions; ++i) {
    auto step = corrupt_step_at(out.v, out.a, dims, order[i], t);
    out.v = std::move(step.v);
    out.a = std::move(step.a);
    out.records.push_back(std::move(step.records.front()));
  }
  return out;
}

CorruptedTrajectory corrupt_trajectory(const data::Trajectory& tr, const data::Dims& dims,
                                       std::mt19937_64& rng, const CorruptionOptions& opts) {
  CorruptedTrajectory out{tr, {}};
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    auto& st = out.trajectory.steps[t];
    auto c = corrupt_step(st.v, st.a, dims, rng, opts, t);
    st.v = std::move(c.v);
    st.a = std::move(c.a);
    for (auto& r : c.records) out.records.push_back(std::move(r));
  }
  return out;
}

void apply_records(data::Trajectory& tr, const data::Dims& dims,
                   const std::vector<CorruptionRecord>& records) {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (it->t >= tr.steps.size()) throw std::out_of_range("corruption record beyond trajectory");
    auto& st = tr.steps[it->t];
    auto c = corrupt_step_at(st.v, st.a, dims, it->position, it->t);
    st.v = std::move(c.v);
    st.a = std::move(c.a);
  }
}

nlohmann::json to_json(const CorruptionRecord& r, const std::string& entity_id) {
  return {{"schema_version", 1}, {"entity_id", entity_id}, {"t", r.t},
          {"position", r.position}, {"a_before", r.a_before}, {"a_after", r.a_after},
          {"v_before", r.v_before}, {"v_after", r.v_after}};
}

void save_records(const std::vector<std::pair<std::string, std::vector<CorruptionRecord>>>& all,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [id, recs] : all)
    for (const auto& r : recs) out << to_json(r, id).dump() << '\n';
}

}  // namespace tcf::cf
