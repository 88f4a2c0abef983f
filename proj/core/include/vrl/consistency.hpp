#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vrl/agents.hpp"
#include "vrl/linalg.hpp"

namespace vrl {

// Sensor model B(r|s,ř): probability of observing reward r in state s when
// the inner reward is ř. sensor[s][inner_r][obs_r].
template <class S>
struct InnerRewardModel {
  std::vector<std::vector<std::vector<S>>> sensor;

  void validate(const Environment<S>& env) const {
    if (static_cast<int>(sensor.size()) != env.num_states())
      throw DomainError("sensor model: one block per state required");
    const S tol = ScalarTraits<S>::sum_tol();
    for (int s = 0; s < env.num_states(); ++s) {
      const auto& block = sensor[static_cast<std::size_t>(s)];
      if (static_cast<int>(block.size()) != env.num_rewards())
        throw DomainError("sensor model: one row per inner reward required");
      bool identity_required = env.state_is_non_delusional(s);
      for (int ir = 0; ir < env.num_rewards(); ++ir) {
        const auto& row = block[static_cast<std::size_t>(ir)];
        if (static_cast<int>(row.size()) != env.num_rewards())
          throw DomainError("sensor model: row has wrong length");
        S sum = ScalarTraits<S>::from_long(0);
        for (int r = 0; r < env.num_rewards(); ++r) {
          const S& p = row[static_cast<std::size_t>(r)];
          if (p < 0 || p > 1)
            throw DomainError("sensor model: probability outside [0,1]");
          sum += p;
          if (identity_required) {
            S expected = ScalarTraits<S>::from_long(r == ir ? 1 : 0);
            if (ScalarTraits<S>::abs(p - expected) > tol)
              throw DomainError("sensor model: non-delusional state '" +
                                env.states[static_cast<std::size_t>(s)].name +
                                "' must pass rewards through unchanged");
          }
        }
        if (ScalarTraits<S>::abs(sum - ScalarTraits<S>::from_long(1)) > tol)
          throw DomainError("sensor model: row does not sum to 1");
      }
    }
  }
};

// The sensor implied by taking each state's delusion literally:
// B(r|s,ř) = [r = d_s(ř)].
template <class S>
InnerRewardModel<S> deterministic_sensor(const Environment<S>& env) {
  InnerRewardModel<S> model;
  model.sensor.resize(static_cast<std::size_t>(env.num_states()));
  for (int s = 0; s < env.num_states(); ++s) {
    const Delusion& d = env.state_delusion(s);
    auto& block = model.sensor[static_cast<std::size_t>(s)];
    block.assign(static_cast<std::size_t>(env.num_rewards()),
                 std::vector<S>(static_cast<std::size_t>(env.num_rewards()),
                                ScalarTraits<S>::from_long(0)));
    for (int ir = 0; ir < env.num_rewards(); ++ir)
      block[static_cast<std::size_t>(ir)]
           [static_cast<std::size_t>(d.map[static_cast<std::size_t>(ir)])] =
          ScalarTraits<S>::from_long(1);
  }
  return model;
}

// B(r|s) = sum_{u,ř} C(u) [u(s)=ř] B(r|s,ř): the reward model a prior and
// a sensor jointly induce. Exactly reproduces the utility marginal on
// non-delusional states.
template <class S>
std::vector<std::vector<S>> build_reward_model(const Environment<S>& env,
                                               const UtilityBelief<S>& cb,
                                               const InnerRewardModel<S>& sensor) {
  std::vector<std::vector<S>> reward_pred(
      static_cast<std::size_t>(env.num_states()),
      std::vector<S>(static_cast<std::size_t>(env.num_rewards()),
                     ScalarTraits<S>::from_long(0)));
  for (int s = 0; s < env.num_states(); ++s) {
    auto& row = reward_pred[static_cast<std::size_t>(s)];
    for (int u = 0; u < env.num_utilities(); ++u) {
      const S& w = cb.prior[static_cast<std::size_t>(u)];
      if (w == ScalarTraits<S>::from_long(0)) continue;
      int inner_r = env.utility_index_value(u, s);
      const auto& sensor_row = sensor.sensor[static_cast<std::size_t>(s)]
                                            [static_cast<std::size_t>(inner_r)];
      for (int r = 0; r < env.num_rewards(); ++r)
        row[static_cast<std::size_t>(r)] +=
            w * sensor_row[static_cast<std::size_t>(r)];
    }
  }
  return reward_pred;
}

// The linear system b = M c tying reward predictions at non-delusional
// anchor states to the unknown utility prior. Row (anchor, reward), column
// utility; entries are the 0/1 likelihoods.
template <class S>
struct ExtractionProblem {
  std::vector<int> anchors;  // state indices, all non-delusional
  Matrix<S> m;
  std::vector<S> b;
};

template <class S>
ExtractionProblem<S> build_extraction_problem(const Environment<S>& env,
                                              const BeliefModel<S>& belief,
                                              const std::vector<int>& anchors) {
  ExtractionProblem<S> problem;
  problem.anchors = anchors;
  for (int s : anchors) {
    if (!env.state_is_non_delusional(s))
      throw DomainError("anchor state '" +
                        env.states[static_cast<std::size_t>(s)].name +
                        "' is delusional");
    for (int r = 0; r < env.num_rewards(); ++r) {
      std::vector<S> row(static_cast<std::size_t>(env.num_utilities()),
                         ScalarTraits<S>::from_long(0));
      for (int u = 0; u < env.num_utilities(); ++u)
        row[static_cast<std::size_t>(u)] =
            ScalarTraits<S>::from_long(likelihood(env, u, s, r));
      problem.m.push_back(std::move(row));
      problem.b.push_back(belief.reward_pred[static_cast<std::size_t>(s)]
                                            [static_cast<std::size_t>(r)]);
    }
  }
  return problem;
}

// Greedy anchor selection: repeatedly add the non-delusional state whose
// rows raise the stacked rank most (ties to the lowest state index), until
// full column rank or the budget k runs out.
template <class S>
std::vector<int> find_anchor_states(const Environment<S>& env,
                                    const BeliefModel<S>& belief, int k) {
  std::vector<int> candidates;
  for (int s = 0; s < env.num_states(); ++s)
    if (env.state_is_non_delusional(s)) candidates.push_back(s);
  if (static_cast<int>(candidates.size()) < k)
    throw InsufficientRankError(
        "environment has fewer than k non-delusional states");

  const int needed = env.num_utilities();
  if (k * env.num_rewards() < needed)
    throw InsufficientRankError(
        "k*|R| < |U|: at least ceil(|U|/|R|) = " +
        std::to_string((needed + env.num_rewards() - 1) / env.num_rewards()) +
        " anchor states are needed");

  std::vector<int> chosen;
  int rank = 0;
  while (static_cast<int>(chosen.size()) < k && rank < needed) {
    int best = -1;
    int best_rank = rank;
    for (int s : candidates) {
      if (std::find(chosen.begin(), chosen.end(), s) != chosen.end()) continue;
      std::vector<int> trial = chosen;
      trial.push_back(s);
      int r = matrix_rank(build_extraction_problem(env, belief, trial).m);
      if (r > best_rank) {
        best_rank = r;
        best = s;
      }
    }
    if (best < 0) break;  // no candidate raises the rank
    chosen.push_back(best);
    rank = best_rank;
  }
  if (rank < needed)
    throw InsufficientRankError(
        "greedy anchor selection reached rank " + std::to_string(rank) +
        " of " + std::to_string(needed) + " within " + std::to_string(k) +
        " states");
  return chosen;
}

template <class S>
struct ExtractionReport {
  std::vector<int> anchors;
  int rank = 0;
  int required_rank = 0;
  bool used_square_solve = false;
  S residual_norm2 = ScalarTraits<S>::from_long(0);
  std::vector<S> raw_solution;  // before clipping / renormalization
  S min_entry = ScalarTraits<S>::from_long(0);
  S sum_deviation = ScalarTraits<S>::from_long(0);
};

// Least-squares recovery of the utility prior, validated and projected
// back onto the simplex. Deviations beyond tol raise instead of being
// silently repaired.
template <class S>
std::pair<UtilityBelief<S>, ExtractionReport<S>> extract_prior(
    const Environment<S>& env, const ExtractionProblem<S>& problem,
    const S& tol) {
  ExtractionReport<S> report;
  report.anchors = problem.anchors;
  report.required_rank = env.num_utilities();
  report.rank = matrix_rank(problem.m);
  if (report.rank < report.required_rank)
    throw RankDeficientError(
        "extraction matrix has rank " + std::to_string(report.rank) + " < " +
        std::to_string(report.required_rank) +
        "; more anchor states are needed (lower bound ceil(|U|/|R|) = " +
        std::to_string((env.num_utilities() + env.num_rewards() - 1) /
                       env.num_rewards()) +
        ")");

  std::optional<std::vector<S>> solution;
  if (problem.m.size() == problem.m[0].size()) {
    solution = solve_square(problem.m, problem.b);
    report.used_square_solve = solution.has_value();
  }
  if (!solution) {
    Matrix<S> mt = transpose(problem.m);
    solution = solve_square(matmul(mt, problem.m), matvec(mt, problem.b));
  }
  if (!solution)
    throw RankDeficientError("normal equations are singular");
  report.raw_solution = *solution;

  std::vector<S> residual = matvec(problem.m, *solution);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    S d = residual[i] - problem.b[i];
    report.residual_norm2 += d * d;
  }

  S sum = ScalarTraits<S>::from_long(0);
  report.min_entry = (*solution)[0];
  for (const S& c : *solution) {
    sum += c;
    if (c < report.min_entry) report.min_entry = c;
  }
  report.sum_deviation = ScalarTraits<S>::abs(sum - ScalarTraits<S>::from_long(1));
  if (report.min_entry < -tol)
    throw NotADistributionError(
        "recovered prior has a negative entry beyond tolerance");
  if (report.sum_deviation > tol)
    throw NotADistributionError(
        "recovered prior does not sum to 1 within tolerance");

  UtilityBelief<S> belief;
  belief.prior = *solution;
  S clipped_sum = ScalarTraits<S>::from_long(0);
  for (S& c : belief.prior) {
    if (c < 0) c = ScalarTraits<S>::from_long(0);
    if (c > 1) c = ScalarTraits<S>::from_long(1);
    clipped_sum += c;
  }
  for (S& c : belief.prior) c /= clipped_sum;
  return {std::move(belief), std::move(report)};
}

// Smallest ε such that |u(š,d) − u(š,id)| ≤ ε over all delusion variants.
template <class S>
S eps_isb_values(const Environment<S>& env, const std::vector<S>& state_values) {
  if (state_values.size() != env.states.size())
    throw DomainError("eps_isb: one value per state required");
  std::vector<int> base(env.inner_names.size(), -1);
  for (int s = 0; s < env.num_states(); ++s)
    if (env.state_is_non_delusional(s))
      base[static_cast<std::size_t>(
          env.states[static_cast<std::size_t>(s)].inner)] = s;
  S eps = ScalarTraits<S>::from_long(0);
  for (int s = 0; s < env.num_states(); ++s) {
    int ref = base[static_cast<std::size_t>(
        env.states[static_cast<std::size_t>(s)].inner)];
    if (ref < 0)
      throw DomainError("eps_isb: inner state '" +
                        env.inner_names[static_cast<std::size_t>(
                            env.states[static_cast<std::size_t>(s)].inner)] +
                        "' has no non-delusional variant");
    S dev = ScalarTraits<S>::abs(state_values[static_cast<std::size_t>(s)] -
                                 state_values[static_cast<std::size_t>(ref)]);
    if (dev > eps) eps = dev;
  }
  return eps;
}

template <class S>
S eps_isb(const Environment<S>& env, const UtilityFunction& u) {
  std::vector<S> values;
  values.reserve(u.values.size());
  for (int idx : u.values) values.push_back(env.rewards.value(idx));
  return eps_isb_values(env, values);
}

template <class S>
struct EpsIsbReport {
  S eps = ScalarTraits<S>::from_long(0);
  S max_deviation = ScalarTraits<S>::from_long(0);
  int worst_action = -1;
  S slack = ScalarTraits<S>::from_long(0);  // eps - max_deviation
  bool pass = true;
};

// Verifies |V_u(a) − sum_š Pr(š|a) u(š,id)| ≤ eps_isb(u) for every action.
template <class S>
EpsIsbReport<S> check_eps_isb_bound(const Environment<S>& env,
                                    const BeliefModel<S>& belief,
                                    const UtilityFunction& u) {
  std::vector<S> values;
  values.reserve(u.values.size());
  for (int idx : u.values) values.push_back(env.rewards.value(idx));

  std::vector<int> base(env.inner_names.size(), -1);
  for (int s = 0; s < env.num_states(); ++s)
    if (env.state_is_non_delusional(s))
      base[static_cast<std::size_t>(
          env.states[static_cast<std::size_t>(s)].inner)] = s;

  EpsIsbReport<S> report;
  report.eps = eps_isb_values(env, values);
  for (int a = 0; a < env.num_actions(); ++a) {
    S lhs = ScalarTraits<S>::from_long(0);
    S rhs = ScalarTraits<S>::from_long(0);
    for (int s = 0; s < env.num_states(); ++s) {
      const S& ps = belief.transition[static_cast<std::size_t>(a)]
                                     [static_cast<std::size_t>(s)];
      if (ps == ScalarTraits<S>::from_long(0)) continue;
      lhs += ps * values[static_cast<std::size_t>(s)];
      int ref = base[static_cast<std::size_t>(
          env.states[static_cast<std::size_t>(s)].inner)];
      rhs += ps * values[static_cast<std::size_t>(ref)];
    }
    S dev = ScalarTraits<S>::abs(lhs - rhs);
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_action = a;
    }
  }
  report.slack = report.eps - report.max_deviation;
  report.pass = report.max_deviation <= report.eps + ScalarTraits<S>::sum_tol();
  return report;
}

// --- convolutional utilities over bit-string state codes ---

// All length-k windows of a bit string, in position order.
std::vector<std::string> bit_windows(const std::string& bits, int k);
int window_index(const std::string& window);

template <class S>
S convolution_raw_value(const std::string& bits, int k,
                        const std::vector<S>& kernel) {
  S total = ScalarTraits<S>::from_long(0);
  for (const std::string& w : bit_windows(bits, k))
    total += kernel.at(static_cast<std::size_t>(window_index(w)));
  return total;
}

// u(s) = sum over windows of kernel(window), quantized onto the grid.
// `bits_of` supplies each state's binary code.
template <class S>
UtilityFunction make_convolutional_utility(
    const Environment<S>& env, std::string name, int k,
    const std::vector<S>& kernel,
    const std::function<std::string(const State&)>& bits_of,
    Rounding mode = Rounding::nearest) {
  if (kernel.size() != (std::size_t{1} << k))
    throw DomainError("convolutional kernel needs one entry per k-bit window");
  UtilityFunction u;
  u.name = std::move(name);
  u.values.reserve(env.states.size());
  for (const State& st : env.states) {
    S raw = convolution_raw_value(bits_of(st), k, kernel);
    u.values.push_back(env.rewards.quantize(ScalarTraits<S>::to_double(raw), mode));
  }
  u.isb = is_isb(u, env.states);
  return u;
}

}  // namespace vrl
