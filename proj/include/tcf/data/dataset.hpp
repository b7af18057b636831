#pragma once
// Trajectory datasets and their JSON-lines file format.
//
// One trajectory per line:
//   {"entity_id": str, "steps": [{"x": [...], "v": [[...], ...], "a": [0|1, ...], "y": num}, ...]}
// "v" is the D_v x K interventional feature matrix written row by row, so
// column k holds the features of treatment k.  Floats are written with 17
// significant digits.  Trajectories that a simulator cut short carry an
// optional "status" string.
//
// Timing convention: step s holds the covariates x_s, the features v_s, the
// treatment a_s chosen at s, and the outcome y_s observed at s before a_s acts.
// a_s therefore drives y_{s+1}.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcf::data {

struct Dims {
  std::size_t d_x = 0;
  std::size_t d_v = 0;
  std::size_t k = 0;
  bool operator==(const Dims&) const = default;
};

struct TimeStep {
  std::vector<double> x;        // d_x
  std::vector<double> v;        // d_v x k, row-major: v[d * k + j]
  std::vector<std::uint8_t> a;  // k bits
  double y = 0.0;

  double feature(std::size_t d, std::size_t treatment, std::size_t k) const {
    return v[d * k + treatment];
  }
  bool operator==(const TimeStep&) const = default;
};

struct Trajectory {
  std::string entity_id;
  std::vector<TimeStep> steps;
  std::string status;  // empty, "recovered" or "terminal"

  std::size_t length() const { return steps.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct Dataset {
  Dims dims;
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  // Index of `entity_id`, or npos.
  std::size_t find(const std::string& entity_id) const;
  bool operator==(const Dataset&) const = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line = 0);
  std::size_t line;  // 1-based; 0 when not tied to a line
};

// Checks dims consistency, bit values, finiteness and T >= 2 for every
// trajectory; throws DatasetError.
void validate(const Dataset& ds);

std::string to_json_line(const Trajectory& tr);
Trajectory parse_json_line(const std::string& line, std::size_t line_no);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

std::string format_double(double v);  // "%.17g"

std::uint32_t bitmask(const std::vector<std::uint8_t>& a);
std::vector<std::uint8_t> bits_from_mask(std::uint32_t mask, std::size_t k);

}  // namespace tcf::data
