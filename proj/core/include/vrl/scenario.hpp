#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrl/consistency.hpp"

namespace vrl {

// How a utility function was specified; kept so scenarios serialize the
// way they were written and so raw formula samples can be exported.
struct UtilitySource {
  enum class Kind { table, inner_table, formula };
  Kind kind = Kind::table;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

template <class S>
struct Scenario {
  std::string name;
  int schema_version = 1;
  std::uint64_t seed = 0;

  Environment<S> env;
  BeliefModel<S> belief;

  // Exactly one of the two: a prior table, or an extraction directive.
  std::optional<UtilityBelief<S>> prior;
  std::optional<int> extract_anchors;

  // The prior the reward model was compiled from, when known. Used as the
  // reference when judging extraction accuracy.
  std::optional<UtilityBelief<S>> generating_prior;
  bool reward_model_push_forward = false;

  std::vector<AgentSpec> agents;
  std::vector<UtilitySource> utility_sources;
  Rounding utility_rounding = Rounding::nearest;
  int code_offset = 0;

  S cp_tol = ScalarTraits<S>::default_tol();
  S consistency_tol = ScalarTraits<S>::default_tol();
  S extraction_tol = ScalarTraits<S>::extraction_tol();

  void validate() const {
    env.validate();
    belief.validate(env);
    if (prior.has_value() == extract_anchors.has_value())
      throw DomainError(
          "scenario must carry exactly one of a prior table or an "
          "extraction directive");
    if (prior) prior->validate(env);
    if (generating_prior) generating_prior->validate(env);
    if (agents.empty()) throw DomainError("scenario names no agents");
    for (const AgentSpec& a : agents)
      if (a.kind == AgentKind::utility &&
          (a.utility < 0 || a.utility >= env.num_utilities()))
        throw DomainError("utility agent references an unknown utility");
  }
};

// --- worked-example scenarios ---

// Two inner states (neutral / agent loses), rewards {-1,0,1}, one action
// per (inner, delusion) pair over all 27 reward maps, two isb utilities
// with prior (2/3, 1/3). The belief table models each delusion as a
// push-forward of the utility marginal, except the constant-0 and swap
// delusions, which the worked example treats as consistency preserving.
template <class S>
Scenario<S> build_example3();

// Same environment, with the CP-constrained agent enabled alongside the
// unconstrained one.
template <class S>
Scenario<S> build_example4();

struct ToyConfig {
  std::uint64_t seed = 0;
  int anchors = 2;
  bool has_cp_tol_override = false;
  double cp_tol_override = 0.0;
};

// The 20-state model: 5 inner states x 4 delusions, rewards {-3..3},
// 10 formula utilities truncated onto the grid, simplicity prior ~ 1/k,
// reward model compiled from the prior, and the agent prior recovered by
// anchor-state extraction.
template <class S>
Scenario<S> build_toy_model(const ToyConfig& cfg = {});

// --- scenario files ---

template <class S>
Scenario<S> parse_scenario(const json& doc);

template <class S>
json scenario_to_json(const Scenario<S>& sc);

// ------------------------------------------------------------------
// implementation

namespace detail {

template <class S>
std::vector<S> push_forward_row(const std::vector<S>& marginal,
                                const Delusion& d) {
  std::vector<S> out(marginal.size(), ScalarTraits<S>::from_long(0));
  for (std::size_t r = 0; r < marginal.size(); ++r)
    out[static_cast<std::size_t>(d.map[r])] += marginal[r];
  return out;
}

}  // namespace detail

template <class S>
Scenario<S> build_example3() {
  using T = ScalarTraits<S>;
  Scenario<S> sc;
  sc.name = "example3";

  std::vector<S> grid_values = {T::from_long(-1), T::from_long(0),
                                T::from_long(1)};

  // Named delusions first, then the remaining reward maps in lexicographic
  // image order. The constant-1 map must precede the generic maps so that
  // the selector's lowest-index tie-break lands on it.
  std::vector<Delusion> delusions;
  delusions.push_back(identity_delusion(3));
  delusions.push_back(constant_delusion("const_-1", 3, 0));
  delusions.push_back(constant_delusion("const_0", 3, 1));
  delusions.push_back(constant_delusion("const_1", 3, 2));
  delusions.push_back(delusion_from_images("swap", {2, 1, 0}, 3));
  const std::array<const char*, 3> token = {"m1", "0", "1"};
  for (const auto& images : enumerate_all_maps(3)) {
    bool taken = false;
    for (const Delusion& d : delusions)
      if (d.map == images) taken = true;
    if (taken) continue;
    std::string name = "map";
    for (int img : images) name += std::string("_") + token[static_cast<std::size_t>(img)];
    delusions.push_back(delusion_from_images(name, images, 3));
  }

  std::vector<std::string> inners = {"s1", "s2"};
  int n_states = static_cast<int>(inners.size() * delusions.size());
  sc.code_offset = -(n_states / 2);

  Environment<S> env{RewardGrid<S>(grid_values), inners, delusions,
                     make_product_states(inners, delusions, sc.code_offset),
                     {}, {}};
  for (const State& st : env.states)
    env.actions.push_back("a" + std::to_string(st.inner + 1) + "@" +
                          delusions[static_cast<std::size_t>(st.delusion)].name);

  env.utilities.push_back(make_isb_utility(
      env, "u1", std::vector<S>{T::from_long(0), T::from_long(-1)}));
  env.utilities.push_back(make_isb_utility(
      env, "u2", std::vector<S>{T::from_long(0), T::from_long(1)}));
  sc.utility_sources.assign(2, UtilitySource{UtilitySource::Kind::inner_table});

  UtilityBelief<S> prior;
  prior.prior = {T::ratio(2, 3), T::ratio(1, 3)};

  BeliefModel<S> belief;
  belief.transition.assign(
      static_cast<std::size_t>(env.num_states()),
      std::vector<S>(static_cast<std::size_t>(env.num_states()),
                     T::from_long(0)));
  for (int a = 0; a < env.num_states(); ++a)
    belief.transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] =
        T::from_long(1);
  belief.reward_pred.reserve(static_cast<std::size_t>(env.num_states()));
  for (int s = 0; s < env.num_states(); ++s) {
    const Delusion& d = env.state_delusion(s);
    std::vector<S> marginal = c_marginal(env, s, prior);
    if (d.name == "const_0" || d.name == "swap")
      belief.reward_pred.push_back(std::move(marginal));
    else
      belief.reward_pred.push_back(detail::push_forward_row(marginal, d));
  }

  sc.env = std::move(env);
  sc.belief = std::move(belief);
  sc.prior = std::move(prior);
  sc.agents = {AgentSpec{AgentKind::u_vrl}};
  return sc;
}

template <class S>
Scenario<S> build_example4() {
  Scenario<S> sc = build_example3<S>();
  sc.name = "example4";
  sc.agents = {AgentSpec{AgentKind::u_vrl}, AgentSpec{AgentKind::cp_vrl}};
  return sc;
}

template <class S>
Scenario<S> build_toy_model(const ToyConfig& cfg) {
  using T = ScalarTraits<S>;
  Scenario<S> sc;
  sc.name = "toy";
  sc.seed = cfg.seed;

  std::vector<S> grid_values;
  for (int r = -3; r <= 3; ++r) grid_values.push_back(T::from_long(r));

  // Delusions in name order; with inner-major codes this places the
  // non-delusional states at codes -8, -4, 0, 4, 8.
  std::vector<Delusion> delusions;
  delusions.push_back(constant_delusion("bad", 7, 0));
  delusions.push_back(constant_delusion("del", 7, 6));
  delusions.push_back(identity_delusion(7));
  delusions.push_back(delusion_from_images("inv", {6, 5, 4, 3, 2, 1, 0}, 7));

  std::vector<std::string> inners = {"0", "1", "2", "3", "4"};
  sc.code_offset = -10;

  Environment<S> env{RewardGrid<S>(grid_values), inners, delusions,
                     make_product_states(inners, delusions, sc.code_offset),
                     {}, {}};
  for (const State& st : env.states) env.actions.push_back(st.name);

  // The 10 coefficient combinations with at most one of c1, c2 nonzero,
  // ordered by (number of nonzero shape coefficients, c0, c1, c2).
  std::vector<std::array<double, 3>> coeffs;
  for (double c0 : {0.0, 5.0})
    for (double c1 : {0.0, -0.5, 0.5})
      for (double c2 : {0.0, -2.5, 2.5}) {
        if (c1 != 0.0 && c2 != 0.0) continue;
        coeffs.push_back({c0, c1, c2});
      }
  std::sort(coeffs.begin(), coeffs.end(),
            [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
              int na = (a[1] != 0.0) + (a[2] != 0.0);
              int nb = (b[1] != 0.0) + (b[2] != 0.0);
              if (na != nb) return na < nb;
              return a < b;
            });

  sc.utility_rounding = Rounding::trunc;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    env.utilities.push_back(make_formula_utility(env,
                                                 "u" + std::to_string(k + 1),
                                                 coeffs[k][0], coeffs[k][1],
                                                 coeffs[k][2],
                                                 sc.utility_rounding));
    UtilitySource src;
    src.kind = UtilitySource::Kind::formula;
    src.c0 = coeffs[k][0];
    src.c1 = coeffs[k][1];
    src.c2 = coeffs[k][2];
    sc.utility_sources.push_back(src);
  }

  // Simplicity-biased generating prior: weight 1/k by list position.
  UtilityBelief<S> generating;
  S total = T::from_long(0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    generating.prior.push_back(T::ratio(1, static_cast<long long>(k + 1)));
    total += generating.prior.back();
  }
  for (S& p : generating.prior) p /= total;

  BeliefModel<S> belief;
  belief.transition.assign(
      static_cast<std::size_t>(env.num_states()),
      std::vector<S>(static_cast<std::size_t>(env.num_states()),
                     T::from_long(0)));
  for (int a = 0; a < env.num_states(); ++a)
    belief.transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] =
        T::from_long(1);
  belief.reward_pred = build_reward_model(env, generating,
                                          deterministic_sensor(env));

  sc.env = std::move(env);
  sc.belief = std::move(belief);
  sc.generating_prior = std::move(generating);
  sc.reward_model_push_forward = true;
  sc.extract_anchors = cfg.anchors;
  sc.agents = {AgentSpec{AgentKind::rl}, AgentSpec{AgentKind::cp_vrl}};
  if (cfg.has_cp_tol_override) sc.cp_tol = T::parse(json(cfg.cp_tol_override));
  return sc;
}

}  // namespace vrl

#include "vrl/scenario_io.hpp"
