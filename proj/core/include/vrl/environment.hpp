#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vrl/delusion.hpp"
#include "vrl/reward_grid.hpp"

namespace vrl {

// One outcome the environment can end in: an inner state paired with a
// self-delusion. `code` is the integer coordinate formula utilities are
// evaluated at.
struct State {
  std::string name;
  int inner = 0;     // index into Environment::inner_names
  int delusion = 0;  // index into Environment::delusions
  int code = 0;
};

std::string state_name(const std::string& inner_name,
                       const std::string& delusion_name);

// A utility function is a table of grid indices, one per state, plus a
// flag recording whether it ignores the delusion coordinate.
struct UtilityFunction {
  std::string name;
  std::vector<int> values;  // grid index per state index
  bool isb = false;
};

// True iff the table assigns equal values to every delusion variant of
// each inner state.
bool is_isb(const UtilityFunction& u, const std::vector<State>& states);

// Product state space: every (inner, delusion) pair, inner-major, with
// codes assigned contiguously from `code_offset`.
std::vector<State> make_product_states(
    const std::vector<std::string>& inner_names,
    const std::vector<Delusion>& delusions, int code_offset);

template <class S>
struct Environment {
  RewardGrid<S> rewards;
  std::vector<std::string> inner_names;
  std::vector<Delusion> delusions;
  std::vector<State> states;
  std::vector<std::string> actions;
  std::vector<UtilityFunction> utilities;

  int num_rewards() const { return rewards.size(); }
  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int num_utilities() const { return static_cast<int>(utilities.size()); }

  const S& utility_value(int u, int s) const {
    return rewards.value(utility_index_value(u, s));
  }
  int utility_index_value(int u, int s) const {
    return utilities.at(static_cast<std::size_t>(u))
        .values.at(static_cast<std::size_t>(s));
  }

  const Delusion& state_delusion(int s) const {
    return delusions.at(
        static_cast<std::size_t>(states.at(static_cast<std::size_t>(s)).delusion));
  }
  bool state_is_non_delusional(int s) const {
    return state_delusion(s).is_identity();
  }

  int state_index(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].name == name) return static_cast<int>(i);
    throw DomainError("unknown state '" + std::string(name) + "'");
  }
  int action_index(std::string_view name) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i] == name) return static_cast<int>(i);
    throw DomainError("unknown action '" + std::string(name) + "'");
  }
  int utility_index(std::string_view name) const {
    for (std::size_t i = 0; i < utilities.size(); ++i)
      if (utilities[i].name == name) return static_cast<int>(i);
    throw DomainError("unknown utility '" + std::string(name) + "'");
  }
  int delusion_index(std::string_view name) const {
    for (std::size_t i = 0; i < delusions.size(); ++i)
      if (delusions[i].name == name) return static_cast<int>(i);
    throw DomainError("unknown delusion '" + std::string(name) + "'");
  }

  void validate() const {
    if (states.empty() || actions.empty() || utilities.empty() ||
        inner_names.empty() || delusions.empty())
      throw DomainError("environment lists must be non-empty");
    for (const Delusion& d : delusions) {
      if (d.grid_size() != rewards.size())
        throw DomainError("delusion '" + d.name + "' is not closed over the grid");
      for (int img : d.map)
        if (img < 0 || img >= rewards.size())
          throw DomainError("delusion '" + d.name + "' maps outside the grid");
    }
    std::unordered_set<std::string> seen;
    std::unordered_set<int> codes;
    for (const State& st : states) {
      if (st.inner < 0 || st.inner >= static_cast<int>(inner_names.size()) ||
          st.delusion < 0 || st.delusion >= static_cast<int>(delusions.size()))
        throw DomainError("state '" + st.name + "' references unknown parts");
      if (!seen.insert(std::to_string(st.inner) + ":" +
                       std::to_string(st.delusion)).second)
        throw DomainError("duplicate (inner, delusion) pair in state list");
      if (!codes.insert(st.code).second)
        throw DomainError("duplicate state code " + std::to_string(st.code));
    }
    for (const UtilityFunction& u : utilities) {
      if (u.values.size() != states.size())
        throw DomainError("utility '" + u.name + "' is missing states");
      for (int v : u.values)
        if (v < 0 || v >= rewards.size())
          throw DomainError("utility '" + u.name + "' leaves the grid");
      if (u.isb != is_isb(u, states))
        throw DomainError("utility '" + u.name + "' has a stale isb flag");
    }
  }
};

// Table utility from exact grid values, one per state in state order.
template <class S>
UtilityFunction make_table_utility(const Environment<S>& env, std::string name,
                                   const std::vector<S>& values) {
  if (values.size() != env.states.size())
    throw DomainError("utility '" + name + "' needs one value per state");
  UtilityFunction u;
  u.name = std::move(name);
  u.values.reserve(values.size());
  for (const S& v : values) u.values.push_back(env.rewards.index_of(v));
  u.isb = is_isb(u, env.states);
  return u;
}

// Utility defined on inner states only; every delusion variant shares the
// inner value, so the result is isb by construction.
template <class S>
UtilityFunction make_isb_utility(const Environment<S>& env, std::string name,
                                 const std::vector<S>& inner_values) {
  if (inner_values.size() != env.inner_names.size())
    throw DomainError("utility '" + name + "' needs one value per inner state");
  UtilityFunction u;
  u.name = std::move(name);
  u.values.reserve(env.states.size());
  for (const State& st : env.states)
    u.values.push_back(
        env.rewards.index_of(inner_values[static_cast<std::size_t>(st.inner)]));
  u.isb = is_isb(u, env.states);
  return u;
}

// The parametric family u(s) = c0 + c1*code + c2*sin(code + c2), with raw
// values mapped onto the grid by `mode`.
template <class S>
UtilityFunction make_formula_utility(const Environment<S>& env, std::string name,
                                     double c0, double c1, double c2,
                                     Rounding mode) {
  UtilityFunction u;
  u.name = std::move(name);
  u.values.reserve(env.states.size());
  for (const State& st : env.states) {
    double x = static_cast<double>(st.code);
    u.values.push_back(env.rewards.quantize(c0 + c1 * x + c2 * std::sin(x + c2), mode));
  }
  u.isb = is_isb(u, env.states);
  return u;
}

double formula_utility_raw(double c0, double c1, double c2, int code);

// The adversarial utility u(s) = d_s(u'(inner)): it tracks the observed
// reward and so rewards self-delusion.
template <class S>
UtilityFunction make_reward_maximising_utility(
    const Environment<S>& env, std::string name,
    const std::vector<int>& inner_reward_index) {
  if (inner_reward_index.size() != env.inner_names.size())
    throw DomainError("utility '" + name + "' needs one value per inner state");
  UtilityFunction u;
  u.name = std::move(name);
  u.values.reserve(env.states.size());
  for (const State& st : env.states) {
    int base = inner_reward_index[static_cast<std::size_t>(st.inner)];
    if (base < 0 || base >= env.rewards.size())
      throw DomainError("utility '" + name + "' leaves the grid");
    u.values.push_back(env.delusions[static_cast<std::size_t>(st.delusion)]
                           .map[static_cast<std::size_t>(base)]);
  }
  u.isb = is_isb(u, env.states);
  return u;
}

}  // namespace vrl
