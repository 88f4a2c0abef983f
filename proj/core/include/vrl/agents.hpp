#pragma once

#include <string>
#include <vector>

#include "vrl/beliefs.hpp"

namespace vrl {

enum class AgentKind { rl, utility, u_vrl, cp_vrl };

inline const char* agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::rl:
      return "rl";
    case AgentKind::utility:
      return "utility";
    case AgentKind::u_vrl:
      return "u_vrl";
    case AgentKind::cp_vrl:
      return "cp_vrl";
  }
  return "rl";
}

struct AgentSpec {
  AgentKind kind = AgentKind::rl;
  int utility = -1;  // utility index, for AgentKind::utility

  std::string key(const std::vector<UtilityFunction>& utilities) const {
    if (kind == AgentKind::utility)
      return std::string("utility_") +
             utilities.at(static_cast<std::size_t>(utility)).name;
    return agent_kind_name(kind);
  }
};

enum class ActionFilter { all, cp };

// Evaluation of one agent over its allowed action set. `chosen` attains
// the maximum; ties resolve to the lowest action index in scenario order.
template <class S>
struct ActionValueTable {
  AgentSpec agent;
  ActionFilter filter = ActionFilter::all;
  std::vector<int> considered;  // action indices, scenario order
  std::vector<S> values;        // parallel to considered
  int chosen = -1;              // action index
  S chosen_value = ScalarTraits<S>::from_long(0);
};

// V_RL(a) = sum_{s,r} B(s|a) B(r|s) r.
template <class S>
S v_rl(const Environment<S>& env, const BeliefModel<S>& belief, int a) {
  S total = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    const S& ps = belief.transition[static_cast<std::size_t>(a)]
                                   [static_cast<std::size_t>(s)];
    if (ps == ScalarTraits<S>::from_long(0)) continue;
    S inner = ScalarTraits<S>::from_long(0);
    for (int r = 0; r < env.num_rewards(); ++r)
      inner += belief.reward_pred[static_cast<std::size_t>(s)]
                                 [static_cast<std::size_t>(r)] *
               env.rewards.value(r);
    total += ps * inner;
  }
  return total;
}

// V_u(a) = sum_s B(s|a) u(s).
template <class S>
S v_utility(const Environment<S>& env, const BeliefModel<S>& belief, int a,
            int u) {
  S total = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    const S& ps = belief.transition[static_cast<std::size_t>(a)]
                                   [static_cast<std::size_t>(s)];
    if (ps == ScalarTraits<S>::from_long(0)) continue;
    total += ps * env.utility_value(u, s);
  }
  return total;
}

// V(a) = sum_{s,r,u} B(s|a) B(r|s) C(u|s,r) u(s); zero-support (s,r)
// pairs contribute 0.
template <class S>
S v_vrl(const Environment<S>& env, const BeliefModel<S>& belief,
        const UtilityBelief<S>& cb, int a) {
  S total = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    const S& ps = belief.transition[static_cast<std::size_t>(a)]
                                   [static_cast<std::size_t>(s)];
    if (ps == ScalarTraits<S>::from_long(0)) continue;
    S inner = ScalarTraits<S>::from_long(0);
    for (int r = 0; r < env.num_rewards(); ++r) {
      const S& pr = belief.reward_pred[static_cast<std::size_t>(s)]
                                      [static_cast<std::size_t>(r)];
      if (pr == ScalarTraits<S>::from_long(0)) continue;
      Posterior<S> post = posterior(env, s, r, cb);
      if (!post.support_flag) continue;
      S expected = ScalarTraits<S>::from_long(0);
      for (int u = 0; u < env.num_utilities(); ++u) {
        const S& w = post.weights[static_cast<std::size_t>(u)];
        if (w == ScalarTraits<S>::from_long(0)) continue;
        expected += w * env.utility_value(u, s);
      }
      inner += pr * expected;
    }
    total += ps * inner;
  }
  return total;
}

// The reduced value sum_{s,u} B(s|a) C(u) u(s): what the VRL value
// collapses to on consistency-preserving actions.
template <class S>
S v_reduced(const Environment<S>& env, const BeliefModel<S>& belief,
            const UtilityBelief<S>& cb, int a) {
  S total = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    const S& ps = belief.transition[static_cast<std::size_t>(a)]
                                   [static_cast<std::size_t>(s)];
    if (ps == ScalarTraits<S>::from_long(0)) continue;
    S mix = ScalarTraits<S>::from_long(0);
    for (int u = 0; u < env.num_utilities(); ++u)
      mix += cb.prior[static_cast<std::size_t>(u)] * env.utility_value(u, s);
    total += ps * mix;
  }
  return total;
}

// Actions whose reachable states all predict rewards identically under B
// and under the utility marginal, within tol.
template <class S>
std::vector<int> cp_actions(const Environment<S>& env,
                            const BeliefModel<S>& belief,
                            const UtilityBelief<S>& cb, const S& tol) {
  std::vector<std::vector<S>> marginals;
  marginals.reserve(static_cast<std::size_t>(env.num_states()));
  for (int s = 0; s < env.num_states(); ++s)
    marginals.push_back(c_marginal(env, s, cb));

  std::vector<int> out;
  for (int a = 0; a < env.num_actions(); ++a) {
    bool ok = true;
    for (int s = 0; s < env.num_states() && ok; ++s) {
      if (belief.transition[static_cast<std::size_t>(a)]
                           [static_cast<std::size_t>(s)] ==
          ScalarTraits<S>::from_long(0))
        continue;
      for (int r = 0; r < env.num_rewards(); ++r) {
        S dev = ScalarTraits<S>::abs(
            belief.reward_pred[static_cast<std::size_t>(s)]
                              [static_cast<std::size_t>(r)] -
            marginals[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)]);
        if (dev > tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(a);
  }
  return out;
}

// Largest gap between the prior and the expected posterior over the
// states an action can reach: max_{s,u} |C(u) - sum_r B(r|s) C(u|s,r)|.
template <class S>
S eep_deviation(const Environment<S>& env, const BeliefModel<S>& belief,
                const UtilityBelief<S>& cb, int a) {
  S worst = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    if (belief.transition[static_cast<std::size_t>(a)]
                         [static_cast<std::size_t>(s)] ==
        ScalarTraits<S>::from_long(0))
      continue;
    std::vector<S> expected(static_cast<std::size_t>(env.num_utilities()),
                            ScalarTraits<S>::from_long(0));
    for (int r = 0; r < env.num_rewards(); ++r) {
      const S& pr = belief.reward_pred[static_cast<std::size_t>(s)]
                                      [static_cast<std::size_t>(r)];
      if (pr == ScalarTraits<S>::from_long(0)) continue;
      Posterior<S> post = posterior(env, s, r, cb);
      if (!post.support_flag) continue;
      for (int u = 0; u < env.num_utilities(); ++u)
        expected[static_cast<std::size_t>(u)] +=
            pr * post.weights[static_cast<std::size_t>(u)];
    }
    for (int u = 0; u < env.num_utilities(); ++u) {
      S dev = ScalarTraits<S>::abs(expected[static_cast<std::size_t>(u)] -
                                   cb.prior[static_cast<std::size_t>(u)]);
      if (dev > worst) worst = dev;
    }
  }
  return worst;
}

// Expected-ethics preservation: the expected posterior equals the prior
// for every utility, on every state the action can reach.
template <class S>
bool is_eep(const Environment<S>& env, const BeliefModel<S>& belief,
            const UtilityBelief<S>& cb, int a, const S& tol) {
  return !(eep_deviation(env, belief, cb, a) > tol);
}

// Evaluate one agent. cp_vrl restricts to the CP set and throws
// NoCPActionError when that set is empty.
template <class S>
ActionValueTable<S> choose(const Environment<S>& env,
                           const BeliefModel<S>& belief,
                           const UtilityBelief<S>& cb, const AgentSpec& agent,
                           const S& cp_tol) {
  ActionValueTable<S> table;
  table.agent = agent;
  if (agent.kind == AgentKind::cp_vrl) {
    table.filter = ActionFilter::cp;
    table.considered = cp_actions(env, belief, cb, cp_tol);
    if (table.considered.empty())
      throw NoCPActionError("no consistency-preserving action exists");
  } else {
    table.filter = ActionFilter::all;
    table.considered.resize(static_cast<std::size_t>(env.num_actions()));
    for (int a = 0; a < env.num_actions(); ++a)
      table.considered[static_cast<std::size_t>(a)] = a;
  }

  table.values.reserve(table.considered.size());
  for (int a : table.considered) {
    S value;
    switch (agent.kind) {
      case AgentKind::rl:
        value = v_rl(env, belief, a);
        break;
      case AgentKind::utility:
        value = v_utility(env, belief, a, agent.utility);
        break;
      case AgentKind::u_vrl:
      case AgentKind::cp_vrl:
        value = v_vrl(env, belief, cb, a);
        break;
      default:
        value = ScalarTraits<S>::from_long(0);
    }
    table.values.push_back(value);
    if (table.chosen < 0 || value > table.chosen_value) {
      table.chosen = a;
      table.chosen_value = value;
    }
  }
  return table;
}

}  // namespace vrl
