#include "tcf/data/history.hpp"

#include <stdexcept>
#include <string>

namespace tcf::data {

History build_history(const Trajectory& tr, const Dims& dims, std::size_t t) {
  if (t < 1 || t > tr.steps.size())
    throw std::out_of_range("build_history: t=" + std::to_string(t) +
                            " outside [1, " + std::to_string(tr.steps.size()) + "]");
  History h;
  h.t = t;
  h.dims = dims;
  h.x.reserve(t);
  h.v.reserve(t);
  h.y.reserve(t);
  h.a.reserve(t - 1);
  for (std::size_t s = 0; s < t; ++s) {
    const TimeStep& st = tr.steps[s];
    h.x.push_back(st.x);
    h.v.push_back(st.v);
    h.y.push_back(st.y);
    if (s + 1 < t) h.a.push_back(st.a);
  }
  return h;
}

}  // namespace tcf::data
