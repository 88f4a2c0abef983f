#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vrl/environment.hpp"

namespace vrl {

// Subjective transition and reward-prediction probabilities.
// transition[a][s] = B(s|a), reward_pred[s][r] = B(r|s).
template <class S>
struct BeliefModel {
  std::vector<std::vector<S>> transition;
  std::vector<std::vector<S>> reward_pred;

  void validate(const Environment<S>& env) const {
    const S tol = ScalarTraits<S>::sum_tol();
    if (static_cast<int>(transition.size()) != env.num_actions())
      throw DomainError("belief model: one transition row per action required");
    for (std::size_t a = 0; a < transition.size(); ++a) {
      if (static_cast<int>(transition[a].size()) != env.num_states())
        throw DomainError("belief model: transition row has wrong length");
      S sum = ScalarTraits<S>::from_long(0);
      for (const S& p : transition[a]) {
        if (p < 0 || p > 1)
          throw DomainError("belief model: transition probability outside [0,1]");
        sum += p;
      }
      if (ScalarTraits<S>::abs(sum - ScalarTraits<S>::from_long(1)) > tol)
        throw DomainError("belief model: B(s|" + env.actions[a] +
                          ") does not sum to 1");
    }
    if (static_cast<int>(reward_pred.size()) != env.num_states())
      throw DomainError("belief model: one reward row per state required");
    for (std::size_t s = 0; s < reward_pred.size(); ++s) {
      if (static_cast<int>(reward_pred[s].size()) != env.num_rewards())
        throw DomainError("belief model: reward row has wrong length");
      S sum = ScalarTraits<S>::from_long(0);
      for (const S& p : reward_pred[s]) {
        if (p < 0 || p > 1)
          throw DomainError("belief model: reward probability outside [0,1]");
        sum += p;
      }
      if (ScalarTraits<S>::abs(sum - ScalarTraits<S>::from_long(1)) > tol)
        throw DomainError("belief model: B(r|" + env.states[s].name +
                          ") does not sum to 1");
    }
  }
};

// Prior C(u) over the utility class.
template <class S>
struct UtilityBelief {
  std::vector<S> prior;

  void validate(const Environment<S>& env) const {
    if (static_cast<int>(prior.size()) != env.num_utilities())
      throw DomainError("utility belief: one prior entry per utility required");
    S sum = ScalarTraits<S>::from_long(0);
    for (const S& p : prior) {
      if (p < 0) throw DomainError("utility belief: negative prior entry");
      sum += p;
    }
    if (ScalarTraits<S>::abs(sum - ScalarTraits<S>::from_long(1)) >
        ScalarTraits<S>::sum_tol())
      throw DomainError("utility belief: prior does not sum to 1");
  }
};

// Posterior over utilities after observing reward r in state s. When the
// conditioning event has zero C-probability the weights are all zero and
// support_flag is false; downstream sums treat such terms as 0.
template <class S>
struct Posterior {
  std::vector<S> weights;
  bool support_flag = false;
};

// C(r|s,u) = [u(s) = r], as 0/1.
template <class S>
int likelihood(const Environment<S>& env, int u, int s, int r) {
  if (r < 0 || r >= env.num_rewards())
    throw DomainError("likelihood: reward index off the grid");
  return env.utility_index_value(u, s) == r ? 1 : 0;
}

// C(r|s) = sum_u C(u) [u(s) = r], as a distribution over grid indices.
template <class S>
std::vector<S> c_marginal(const Environment<S>& env, int s,
                          const UtilityBelief<S>& cb) {
  std::vector<S> out(static_cast<std::size_t>(env.num_rewards()),
                     ScalarTraits<S>::from_long(0));
  for (int u = 0; u < env.num_utilities(); ++u)
    out[static_cast<std::size_t>(env.utility_index_value(u, s))] +=
        cb.prior[static_cast<std::size_t>(u)];
  return out;
}

template <class S>
Posterior<S> posterior(const Environment<S>& env, int s, int r,
                       const UtilityBelief<S>& cb) {
  if (r < 0 || r >= env.num_rewards())
    throw DomainError("posterior: reward index off the grid");
  Posterior<S> post;
  post.weights.assign(static_cast<std::size_t>(env.num_utilities()),
                      ScalarTraits<S>::from_long(0));
  S denom = ScalarTraits<S>::from_long(0);
  for (int u = 0; u < env.num_utilities(); ++u)
    if (env.utility_index_value(u, s) == r)
      denom += cb.prior[static_cast<std::size_t>(u)];
  if (denom == ScalarTraits<S>::from_long(0)) {
    post.support_flag = false;
    return post;
  }
  post.support_flag = true;
  for (int u = 0; u < env.num_utilities(); ++u)
    if (env.utility_index_value(u, s) == r)
      post.weights[static_cast<std::size_t>(u)] =
          cb.prior[static_cast<std::size_t>(u)] / denom;
  return post;
}

// True when every reachable state's observed-reward support is contained
// in the utility-marginal support, so no posterior conditions on a
// zero-probability event.
template <class S>
bool full_support(const Environment<S>& env, const BeliefModel<S>& belief,
                  const UtilityBelief<S>& cb) {
  for (int s = 0; s < env.num_states(); ++s) {
    bool reachable = false;
    for (int a = 0; a < env.num_actions() && !reachable; ++a)
      if (!(belief.transition[static_cast<std::size_t>(a)]
                             [static_cast<std::size_t>(s)] ==
            ScalarTraits<S>::from_long(0)))
        reachable = true;
    if (!reachable) continue;
    std::vector<S> marginal = c_marginal(env, s, cb);
    for (int r = 0; r < env.num_rewards(); ++r)
      if (!(belief.reward_pred[static_cast<std::size_t>(s)]
                              [static_cast<std::size_t>(r)] ==
            ScalarTraits<S>::from_long(0)) &&
          marginal[static_cast<std::size_t>(r)] == ScalarTraits<S>::from_long(0))
        return false;
  }
  return true;
}

// Outcome of comparing B(r|s) against C(r|s) on the non-delusional states.
template <class S>
struct ConsistencyReport {
  S tol;
  bool pass = true;
  S max_deviation = ScalarTraits<S>::from_long(0);
  int worst_state = -1;
  std::vector<std::pair<int, S>> per_state;  // (state index, max_r deviation)
};

template <class S>
ConsistencyReport<S> check_consistency(const Environment<S>& env,
                                       const BeliefModel<S>& belief,
                                       const UtilityBelief<S>& cb, const S& tol) {
  ConsistencyReport<S> report;
  report.tol = tol;
  for (int s = 0; s < env.num_states(); ++s) {
    if (!env.state_is_non_delusional(s)) continue;
    std::vector<S> marginal = c_marginal(env, s, cb);
    S dev = ScalarTraits<S>::from_long(0);
    for (int r = 0; r < env.num_rewards(); ++r) {
      S d = ScalarTraits<S>::abs(
          belief.reward_pred[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] -
          marginal[static_cast<std::size_t>(r)]);
      if (d > dev) dev = d;
    }
    report.per_state.emplace_back(s, dev);
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_state = s;
    }
    if (dev > tol) report.pass = false;
  }
  return report;
}

}  // namespace vrl
