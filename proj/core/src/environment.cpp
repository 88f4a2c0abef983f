#include "vrl/environment.hpp"

#include <cmath>
#include <map>

namespace vrl {

std::string state_name(const std::string& inner_name,
                       const std::string& delusion_name) {
  return inner_name + "@" + delusion_name;
}

bool is_isb(const UtilityFunction& u, const std::vector<State>& states) {
  if (u.values.size() != states.size())
    throw DomainError("utility '" + u.name + "' is missing states");
  std::map<int, int> first_value;  // inner -> value of first variant seen
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [it, inserted] = first_value.emplace(states[i].inner, u.values[i]);
    if (!inserted && it->second != u.values[i]) return false;
  }
  return true;
}

std::vector<State> make_product_states(
    const std::vector<std::string>& inner_names,
    const std::vector<Delusion>& delusions, int code_offset) {
  std::vector<State> out;
  out.reserve(inner_names.size() * delusions.size());
  int code = code_offset;
  for (std::size_t i = 0; i < inner_names.size(); ++i) {
    for (std::size_t j = 0; j < delusions.size(); ++j) {
      State st;
      st.name = state_name(inner_names[i], delusions[j].name);
      st.inner = static_cast<int>(i);
      st.delusion = static_cast<int>(j);
      st.code = code++;
      out.push_back(std::move(st));
    }
  }
  return out;
}

double formula_utility_raw(double c0, double c1, double c2, int code) {
  double x = static_cast<double>(code);
  return c0 + c1 * x + c2 * std::sin(x + c2);
}

}  // namespace vrl
