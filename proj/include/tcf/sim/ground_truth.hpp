#pragma once
// Potential-outcome tables produced by the simulators.
//
// For every entity and step s the table stores Y_{s+1}[a] for all 2^K
// treatment vectors a applied at s, computed from the factual state at s with
// the same noise draw across arms.  File format: JSON lines
//   {"schema_version":1,"entity_id":str,"t":s,"a":bitmask,"y":num}
// with s the 0-based step index and bit k of "a" set when treatment k is on.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tcf::sim {

class GroundTruthTable {
 public:
  GroundTruthTable() = default;
  explicit GroundTruthTable(std::size_t k) : k_(k) {}

  std::size_t k() const { return k_; }
  std::size_t size() const { return rows_.size(); }

  // outcomes has 2^K entries indexed by bitmask.
  void set(const std::string& entity, std::size_t t, std::vector<double> outcomes);
  bool contains(const std::string& entity, std::size_t t) const;
  // Throws std::out_of_range for a missing entry.
  double outcome(const std::string& entity, std::size_t t, std::uint32_t mask) const;
  const std::vector<double>& outcomes(const std::string& entity, std::size_t t) const;

  // Y[e_k] - Y[0] for treatment index k (0-based).
  double cate(const std::string& entity, std::size_t t, std::size_t k) const;

  template <typename Fn>
  void for_each(Fn fn) const {
    for (const auto& [key, row] : rows_) fn(key.first, key.second, row);
  }

  void save(const std::string& path) const;
  static GroundTruthTable load(const std::string& path);

 private:
  std::size_t k_ = 0;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> rows_;
};

// (Y[a] - Y[0]) - sum_k a_k (Y[e_k] - Y[0]), straight from the table.
double ground_truth_interaction(const GroundTruthTable& table, const std::string& entity,
                                std::size_t t, std::uint32_t mask);

}  // namespace tcf::sim
