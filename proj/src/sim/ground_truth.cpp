#include "tcf/sim/ground_truth.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tcf/data/dataset.hpp"

namespace tcf::sim {

void GroundTruthTable::set(const std::string& entity, std::size_t t,
                           std::vector<double> outcomes) {
  if (outcomes.size() != (std::size_t{1} << k_))
    throw std::invalid_argument("ground truth row must have 2^K outcomes");
  rows_[{entity, t}] = std::move(outcomes);
}

bool GroundTruthTable::contains(const std::string& entity, std::size_t t) const {
  return rows_.count({entity, t}) != 0;
}

const std::vector<double>& GroundTruthTable::outcomes(const std::string& entity,
                                                      std::size_t t) const {
  auto it = rows_.find({entity, t});
  if (it == rows_.end())
    throw std::out_of_range("ground truth has no entry for entity '" + entity +
                            "' at t=" + std::to_string(t));
  return it->second;
}

double GroundTruthTable::outcome(const std::string& entity, std::size_t t,
                                 std::uint32_t mask) const {
  const auto& row = outcomes(entity, t);
  if (mask >= row.size()) throw std::out_of_range("treatment mask outside 2^K");
  return row[mask];
}

double GroundTruthTable::cate(const std::string& entity, std::size_t t,
                              std::size_t k) const {
  const auto& row = outcomes(entity, t);
  return row[std::uint32_t{1} << k] - row[0];
}

void GroundTruthTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [key, row] : rows_)
    for (std::size_t m = 0; m < row.size(); ++m) {
      out << "{\"schema_version\":1,\"entity_id\":" << nlohmann::json(key.first).dump()
          << ",\"t\":" << key.second << ",\"a\":" << m
          << ",\"y\":" << data::format_double(row[m]) << "}\n";
    }
}

GroundTruthTable GroundTruthTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::map<std::pair<std::string, std::size_t>, std::map<std::uint32_t, double>> raw;
  std::uint32_t max_mask = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const auto mask = j.at("a").get<std::uint32_t>();
      raw[{j.at("entity_id").get<std::string>(), j.at("t").get<std::size_t>()}][mask] =
          j.at("y").get<double>();
      max_mask = std::max(max_mask, mask);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::size_t k = 0;
  while ((std::uint32_t{1} << k) <= max_mask) ++k;
  GroundTruthTable table(k);
  for (auto& [key, cells] : raw) {
    std::vector<double> row(std::size_t{1} << k);
    if (cells.size() != row.size())
      throw std::runtime_error(path + ": incomplete treatment table for entity '" +
                               key.first + "' t=" + std::to_string(key.second));
    for (auto& [m, y] : cells) row[m] = y;
    table.set(key.first, key.second, std::move(row));
  }
  return table;
}

double ground_truth_interaction(const GroundTruthTable& table, const std::string& entity,
                                std::size_t t, std::uint32_t mask) {
  const auto& row = table.outcomes(entity, t);
  if (mask >= row.size()) throw std::out_of_range("treatment mask outside 2^K");
  const double base = row[0];
  const double joint = row[mask] - base;
  double singles = 0;
  for (std::size_t k = 0; k < table.k(); ++k)
    if (mask & (std::uint32_t{1} << k)) singles += row[std::uint32_t{1} << k] - base;
  return joint - singles;
}

}  // namespace tcf::sim
