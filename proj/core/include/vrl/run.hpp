#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vrl/scenario.hpp"

namespace vrl {

struct RunOptions {
  bool json_only = false;
};

template <class S>
struct RunResult {
  json report;
  std::vector<std::pair<std::string, std::string>> csv_files;
  bool ok = true;
  int exit_code = 0;
};

namespace detail {

template <class S>
json invariant_entry(const std::string& name, const std::string& status,
                     const std::optional<S>& worst, const std::optional<S>& tol,
                     const std::string& note = "") {
  json j;
  j["name"] = name;
  j["status"] = status;
  j["worst"] = worst ? ScalarTraits<S>::format(*worst) : json(nullptr);
  j["tol"] = tol ? ScalarTraits<S>::format(*tol) : json(nullptr);
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace detail

// Execute a scenario: consistency check, optional prior extraction, the CP
// filter, every requested agent, and the invariant suites. The report is
// deterministic given the scenario and seed.
template <class S>
RunResult<S> run(const Scenario<S>& sc, const RunOptions& opts = {}) {
  using T = ScalarTraits<S>;
  sc.validate();

  RunResult<S> result;
  json& doc = result.report;
  doc["schema_version"] = 1;
  doc["scenario"] = sc.name;
  doc["mode"] = T::mode_name();
  doc["seed"] = sc.seed;
  doc["tolerances"] = json{{"cp", T::format(sc.cp_tol)},
                           {"consistency", T::format(sc.consistency_tol)},
                           {"extraction", T::format(sc.extraction_tol)}};

  bool ok = true;

  // Agent-side utility prior: given directly or extracted from B.
  UtilityBelief<S> cb;
  json extraction = json(nullptr);
  if (sc.prior) {
    cb = *sc.prior;
  } else {
    std::vector<int> anchors =
        find_anchor_states(sc.env, sc.belief, *sc.extract_anchors);
    auto [extracted, report] =
        extract_prior(sc.env, build_extraction_problem(sc.env, sc.belief, anchors),
                      sc.extraction_tol);
    cb = std::move(extracted);
    extraction = json::object();
    json anchor_names = json::array();
    for (int s : report.anchors)
      anchor_names.push_back(sc.env.states[static_cast<std::size_t>(s)].name);
    extraction["anchors"] = std::move(anchor_names);
    extraction["rank"] = report.rank;
    extraction["required_rank"] = report.required_rank;
    extraction["used_square_solve"] = report.used_square_solve;
    extraction["residual_norm2"] = T::format(report.residual_norm2);
    json prior_json;
    for (std::size_t u = 0; u < cb.prior.size(); ++u)
      prior_json[sc.env.utilities[u].name] = T::format(cb.prior[u]);
    extraction["prior"] = std::move(prior_json);
    if (sc.generating_prior) {
      S err = T::from_long(0);
      for (std::size_t u = 0; u < cb.prior.size(); ++u) {
        S d = T::abs(cb.prior[u] - sc.generating_prior->prior[u]);
        if (d > err) err = d;
      }
      bool pass = !(err > sc.extraction_tol);
      extraction["reference_max_abs_error"] = T::format(err);
      extraction["pass"] = pass;
      ok = ok && pass;
    }
  }
  doc["extraction"] = std::move(extraction);

  // Consistency of B and C on the non-delusional states.
  ConsistencyReport<S> consistency =
      check_consistency(sc.env, sc.belief, cb, sc.consistency_tol);
  {
    json jc;
    jc["pass"] = consistency.pass;
    jc["tol"] = T::format(consistency.tol);
    jc["max_deviation"] = T::format(consistency.max_deviation);
    jc["worst_state"] =
        consistency.worst_state >= 0
            ? json(sc.env.states[static_cast<std::size_t>(consistency.worst_state)]
                       .name)
            : json(nullptr);
    json per_state;
    for (const auto& [s, dev] : consistency.per_state)
      per_state[sc.env.states[static_cast<std::size_t>(s)].name] = T::format(dev);
    jc["per_state"] = std::move(per_state);
    doc["consistency"] = std::move(jc);
    ok = ok && consistency.pass;
  }

  // CP filter.
  std::vector<int> cp = cp_actions(sc.env, sc.belief, cb, sc.cp_tol);
  {
    json names = json::array();
    for (int a : cp) names.push_back(sc.env.actions[static_cast<std::size_t>(a)]);
    doc["cp_actions"] = std::move(names);
  }

  // Agents.
  json agents = json::array();
  for (const AgentSpec& spec : sc.agents) {
    ActionValueTable<S> table = choose(sc.env, sc.belief, cb, spec, sc.cp_tol);
    json ja;
    ja["kind"] = agent_kind_name(spec.kind);
    if (spec.kind == AgentKind::utility)
      ja["utility"] = sc.env.utilities[static_cast<std::size_t>(spec.utility)].name;
    ja["filter"] = table.filter == ActionFilter::cp ? "cp" : "all";
    ja["chosen"] = sc.env.actions[static_cast<std::size_t>(table.chosen)];
    ja["chosen_value"] = T::format(table.chosen_value);
    json reached = json::array();
    bool wireheaded = false;
    for (int s = 0; s < sc.env.num_states(); ++s) {
      if (sc.belief.transition[static_cast<std::size_t>(table.chosen)]
                              [static_cast<std::size_t>(s)] == T::from_long(0))
        continue;
      reached.push_back(sc.env.states[static_cast<std::size_t>(s)].name);
      if (!sc.env.state_is_non_delusional(s)) wireheaded = true;
    }
    ja["reached"] = std::move(reached);
    ja["wireheaded"] = wireheaded;
    json values;
    for (std::size_t i = 0; i < table.considered.size(); ++i)
      values[sc.env.actions[static_cast<std::size_t>(table.considered[i])]] =
          T::format(table.values[i]);
    ja["values"] = std::move(values);
    agents.push_back(std::move(ja));

    if (!opts.json_only) {
      std::ostringstream csv;
      csv << "action,value,chosen\n";
      for (std::size_t i = 0; i < table.considered.size(); ++i)
        csv << sc.env.actions[static_cast<std::size_t>(table.considered[i])]
            << ',' << T::to_string(table.values[i]) << ','
            << (table.considered[i] == table.chosen ? 1 : 0) << '\n';
      result.csv_files.emplace_back(
          sc.name + "_values_" + spec.key(sc.env.utilities) + ".csv",
          csv.str());
    }
  }
  doc["agents"] = std::move(agents);

  // Invariant suites.
  json invariants = json::array();
  {
    invariants.push_back(detail::invariant_entry<S>(
        "consistency", consistency.pass ? "pass" : "fail",
        std::optional<S>(consistency.max_deviation),
        std::optional<S>(consistency.tol)));

    // Posterior structure over every (state, reward) pair.
    S worst_norm = T::from_long(0);
    S worst_mean = T::from_long(0);
    bool support_ok = true;
    for (int s = 0; s < sc.env.num_states(); ++s)
      for (int r = 0; r < sc.env.num_rewards(); ++r) {
        Posterior<S> post = posterior(sc.env, s, r, cb);
        if (!post.support_flag) {
          for (const S& w : post.weights)
            if (!(w == T::from_long(0))) support_ok = false;
          continue;
        }
        S sum = T::from_long(0);
        S mean = T::from_long(0);
        for (int u = 0; u < sc.env.num_utilities(); ++u) {
          const S& w = post.weights[static_cast<std::size_t>(u)];
          if (w > T::from_long(0) &&
              likelihood(sc.env, u, s, r) == 0)
            support_ok = false;
          sum += w;
          mean += w * sc.env.utility_value(u, s);
        }
        S dn = T::abs(sum - T::from_long(1));
        if (dn > worst_norm) worst_norm = dn;
        S dm = T::abs(mean - sc.env.rewards.value(r));
        if (dm > worst_mean) worst_mean = dm;
      }
    bool norm_ok = !(worst_norm > T::sum_tol());
    bool mean_ok = !(worst_mean > T::sum_tol());
    invariants.push_back(detail::invariant_entry<S>(
        "posterior_normalization", norm_ok ? "pass" : "fail",
        std::optional<S>(worst_norm), std::optional<S>(T::sum_tol())));
    invariants.push_back(detail::invariant_entry<S>(
        "posterior_support", support_ok ? "pass" : "fail", std::optional<S>(),
        std::optional<S>()));
    invariants.push_back(detail::invariant_entry<S>(
        "posterior_mean_reward", mean_ok ? "pass" : "fail",
        std::optional<S>(worst_mean), std::optional<S>(T::sum_tol())));
    ok = ok && norm_ok && support_ok && mean_ok;

    // CP actions are expected-ethics preserving, with the tolerance
    // widened by the |R| terms the expectation sums over.
    S eep_tol = sc.cp_tol * T::from_long(sc.env.num_rewards());
    S worst_eep = T::from_long(0);
    for (int a : cp) {
      S dev = eep_deviation(sc.env, sc.belief, cb, a);
      if (dev > worst_eep) worst_eep = dev;
    }
    bool eep_ok = !(worst_eep > eep_tol);
    invariants.push_back(detail::invariant_entry<S>(
        "cp_implies_eep", eep_ok ? "pass" : "fail", std::optional<S>(worst_eep),
        std::optional<S>(eep_tol)));
    ok = ok && eep_ok;

    // On CP actions the VRL value collapses to the prior-mixture value.
    S worst_red = T::from_long(0);
    for (int a : cp) {
      S dev = T::abs(v_vrl(sc.env, sc.belief, cb, a) -
                     v_reduced(sc.env, sc.belief, cb, a));
      if (dev > worst_red) worst_red = dev;
    }
    bool red_ok = !(worst_red > T::default_tol());
    invariants.push_back(detail::invariant_entry<S>(
        "no_wireheading_reduction", red_ok ? "pass" : "fail",
        std::optional<S>(worst_red), std::optional<S>(T::default_tol())));
    ok = ok && red_ok;

    // With full reward support the unconstrained VRL value is the RL value.
    if (full_support(sc.env, sc.belief, cb)) {
      S worst = T::from_long(0);
      for (int a = 0; a < sc.env.num_actions(); ++a) {
        S dev = T::abs(v_vrl(sc.env, sc.belief, cb, a) - v_rl(sc.env, sc.belief, a));
        if (dev > worst) worst = dev;
      }
      bool uvrl_ok = !(worst > T::default_tol());
      invariants.push_back(detail::invariant_entry<S>(
          "u_vrl_equals_rl", uvrl_ok ? "pass" : "fail", std::optional<S>(worst),
          std::optional<S>(T::default_tol())));
      ok = ok && uvrl_ok;
    } else {
      invariants.push_back(detail::invariant_entry<S>(
          "u_vrl_equals_rl", "skipped", std::optional<S>(), std::optional<S>(),
          "zero-support rewards reachable"));
    }
  }
  doc["invariants"] = std::move(invariants);

  // Figure data: raw and grid samples of the formula utilities.
  if (!opts.json_only) {
    bool any_formula = false;
    for (const UtilitySource& src : sc.utility_sources)
      if (src.kind == UtilitySource::Kind::formula) any_formula = true;
    if (any_formula) {
      std::ostringstream csv;
      csv << "state,code";
      for (const UtilityFunction& u : sc.env.utilities)
        csv << ',' << u.name << "_raw," << u.name;
      csv << '\n';
      for (int s = 0; s < sc.env.num_states(); ++s) {
        const State& st = sc.env.states[static_cast<std::size_t>(s)];
        csv << st.name << ',' << st.code;
        for (std::size_t u = 0; u < sc.env.utilities.size(); ++u) {
          const UtilitySource& src = sc.utility_sources[u];
          if (src.kind == UtilitySource::Kind::formula)
            csv << ','
                << json(formula_utility_raw(src.c0, src.c1, src.c2, st.code))
                       .dump();
          else
            csv << ',';
          csv << ','
              << T::to_string(sc.env.utility_value(static_cast<int>(u), s));
        }
        csv << '\n';
      }
      result.csv_files.emplace_back(sc.name + "_utilities.csv", csv.str());
    }
  }

  doc["ok"] = ok;
  result.ok = ok;
  result.exit_code = ok ? 0 : 1;
  return result;
}

template <class S>
void write_outputs(const RunResult<S>& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string name =
      result.report.at("scenario").template get<std::string>();
  std::ofstream report(std::filesystem::path(out_dir) / (name + "_report.json"),
                       std::ios::binary);
  report << result.report.dump(2) << '\n';
  for (const auto& [filename, content] : result.csv_files) {
    std::ofstream csv(std::filesystem::path(out_dir) / filename,
                      std::ios::binary);
    csv << content;
  }
}

}  // namespace vrl
