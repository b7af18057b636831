#include "tcf/data/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace tcf::data {

using nlohmann::json;

DatasetError::DatasetError(const std::string& what, std::size_t line_no)
    : std::runtime_error(line_no == 0 ? what : "line " + std::to_string(line_no) + ": " + what),
      line(line_no) {}

std::size_t Dataset::find(const std::string& entity_id) const {
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    if (trajectories[i].entity_id == entity_id) return i;
  return npos;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint32_t bitmask(const std::vector<std::uint8_t>& a) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) m |= (1u << i);
  return m;
}

std::vector<std::uint8_t> bits_from_mask(std::uint32_t mask, std::size_t k) {
  std::vector<std::uint8_t> a(k);
  for (std::size_t i = 0; i < k; ++i) a[i] = (mask >> i) & 1u;
  return a;
}

namespace {

Dims dims_of(const TimeStep& s, std::size_t line_no) {
  Dims d;
  d.d_x = s.x.size();
  d.k = s.a.size();
  if (d.k == 0) {
    if (!s.v.empty()) throw DatasetError("features present with zero treatments", line_no);
    return d;
  }
  if (s.v.size() % d.k != 0)
    throw DatasetError("feature matrix does not have one column per treatment", line_no);
  d.d_v = s.v.size() / d.k;
  return d;
}

void check_trajectory(const Trajectory& tr, const Dims& dims, std::size_t line_no) {
  if (tr.steps.size() < 2)
    throw DatasetError("trajectory '" + tr.entity_id + "' has fewer than 2 steps", line_no);
  for (std::size_t s = 0; s < tr.steps.size(); ++s) {
    const TimeStep& st = tr.steps[s];
    if (!(dims_of(st, line_no) == dims))
      throw DatasetError("trajectory '" + tr.entity_id + "' step " + std::to_string(s) +
                             ": dimensions differ from the rest of the dataset",
                         line_no);
    for (auto bit : st.a)
      if (bit > 1) throw DatasetError("treatment bit outside {0,1}", line_no);
    auto finite = [](double v) { return std::isfinite(v); };
    bool ok = std::isfinite(st.y);
    for (double v : st.x) ok = ok && finite(v);
    for (double v : st.v) ok = ok && finite(v);
    if (!ok)
      throw DatasetError("non-finite value in trajectory '" + tr.entity_id + "' step " +
                             std::to_string(s),
                         line_no);
  }
}

}  // namespace

void validate(const Dataset& ds) {
  for (std::size_t i = 0; i < ds.trajectories.size(); ++i)
    check_trajectory(ds.trajectories[i], ds.dims, 0);
}

std::string to_json_line(const Trajectory& tr) {
  std::string out;
  out.reserve(64 + tr.steps.size() * 96);
  out += "{\"entity_id\":";
  out += json(tr.entity_id).dump();
  if (!tr.status.empty()) {
    out += ",\"status\":";
    out += json(tr.status).dump();
  }
  out += ",\"steps\":[";
  for (std::size_t s = 0; s < tr.steps.size(); ++s) {
    const TimeStep& st = tr.steps[s];
    const std::size_t k = st.a.size();
    const std::size_t dv = k == 0 ? 0 : st.v.size() / k;
    if (s) out += ',';
    out += "{\"x\":[";
    for (std::size_t i = 0; i < st.x.size(); ++i) {
      if (i) out += ',';
      out += format_double(st.x[i]);
    }
    out += "],\"v\":[";
    for (std::size_t d = 0; d < dv; ++d) {
      if (d) out += ',';
      out += '[';
      for (std::size_t j = 0; j < k; ++j) {
        if (j) out += ',';
        out += format_double(st.v[d * k + j]);
      }
      out += ']';
    }
    out += "],\"a\":[";
    for (std::size_t j = 0; j < k; ++j) {
      if (j) out += ',';
      out += st.a[j] ? '1' : '0';
    }
    out += "],\"y\":";
    out += format_double(st.y);
    out += '}';
  }
  out += "]}";
  return out;
}

Trajectory parse_json_line(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DatasetError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  try {
    Trajectory tr;
    tr.entity_id = j.at("entity_id").get<std::string>();
    if (j.contains("status")) tr.status = j.at("status").get<std::string>();
    for (const auto& js : j.at("steps")) {
      TimeStep st;
      st.x = js.at("x").get<std::vector<double>>();
      for (const auto& a : js.at("a")) {
        const int bit = a.get<int>();
        if (bit != 0 && bit != 1) throw DatasetError("treatment bit outside {0,1}", line_no);
        st.a.push_back(static_cast<std::uint8_t>(bit));
      }
      const std::size_t k = st.a.size();
      for (const auto& row : js.at("v")) {
        auto r = row.get<std::vector<double>>();
        if (r.size() != k)
          throw DatasetError("feature row has " + std::to_string(r.size()) +
                                 " entries but the treatment vector has " + std::to_string(k),
                             line_no);
        st.v.insert(st.v.end(), r.begin(), r.end());
      }
      st.y = js.at("y").get<double>();
      tr.steps.push_back(std::move(st));
    }
    return tr;
  } catch (const json::exception& e) {
    throw DatasetError(std::string("malformed trajectory: ") + e.what(), line_no);
  }
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write " + path);
  for (const auto& tr : ds.trajectories) out << to_json_line(tr) << '\n';
  if (!out) throw DatasetError("write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path);
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  bool have_dims = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Trajectory tr = parse_json_line(line, line_no);
    if (tr.steps.empty())
      throw DatasetError("trajectory '" + tr.entity_id + "' has no steps", line_no);
    if (!have_dims) {
      ds.dims = dims_of(tr.steps.front(), line_no);
      have_dims = true;
    }
    check_trajectory(tr, ds.dims, line_no);
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

}  // namespace tcf::data
