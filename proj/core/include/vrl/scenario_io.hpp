#pragma once

// JSON scenario files. See docs/scenario-schema.md for the format.

#include <set>

#include "vrl/scenario.hpp"

namespace vrl {

namespace detail {

inline const json& require_field(const json& doc, const std::string& key,
                                 const std::string& path) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ScenarioError(path + key, "missing field");
  return *it;
}

template <class S>
S parse_scalar(const json& j, const std::string& path) {
  try {
    return ScalarTraits<S>::parse(j);
  } catch (const Error& e) {
    throw ScenarioError(path, e.what());
  }
}

inline AgentSpec parse_agent(const std::string& text,
                             const std::vector<UtilityFunction>& utilities,
                             const std::string& path) {
  if (text == "rl") return {AgentKind::rl, -1};
  if (text == "u_vrl") return {AgentKind::u_vrl, -1};
  if (text == "cp_vrl") return {AgentKind::cp_vrl, -1};
  if (text.rfind("utility:", 0) == 0) {
    std::string name = text.substr(8);
    for (std::size_t i = 0; i < utilities.size(); ++i)
      if (utilities[i].name == name)
        return {AgentKind::utility, static_cast<int>(i)};
    throw ScenarioError(path, "unknown utility '" + name + "'");
  }
  throw ScenarioError(path, "unknown agent kind '" + text + "'");
}

inline std::string agent_to_string(const AgentSpec& a,
                                   const std::vector<UtilityFunction>& utilities) {
  if (a.kind == AgentKind::utility)
    return "utility:" + utilities.at(static_cast<std::size_t>(a.utility)).name;
  return agent_kind_name(a.kind);
}

}  // namespace detail

template <class S>
Scenario<S> parse_scenario(const json& doc) {
  using T = ScalarTraits<S>;
  if (!doc.is_object()) throw ScenarioError("", "scenario must be an object");

  Scenario<S> sc;
  sc.schema_version =
      detail::require_field(doc, "schema_version", "").get<int>();
  if (sc.schema_version != 1)
    throw ScenarioError("schema_version",
                        "unsupported version " +
                            std::to_string(sc.schema_version));
  sc.name = detail::require_field(doc, "name", "").get<std::string>();
  if (doc.contains("seed")) sc.seed = doc["seed"].get<std::uint64_t>();

  // rewards
  const json& jr = detail::require_field(doc, "rewards", "");
  if (!jr.is_array() || jr.empty())
    throw ScenarioError("rewards", "must be a non-empty array");
  std::vector<S> grid_values;
  for (std::size_t i = 0; i < jr.size(); ++i)
    grid_values.push_back(detail::parse_scalar<S>(
        jr[i], "rewards[" + std::to_string(i) + "]"));
  RewardGrid<S> grid = [&] {
    try {
      return RewardGrid<S>(grid_values);
    } catch (const Error& e) {
      throw ScenarioError("rewards", e.what());
    }
  }();

  // delusions
  const json& jd = detail::require_field(doc, "delusions", "");
  if (!jd.is_array() || jd.empty())
    throw ScenarioError("delusions", "must be a non-empty array");
  std::vector<Delusion> delusions;
  std::set<std::string> delusion_names;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    const std::string path = "delusions[" + std::to_string(i) + "]";
    std::string name =
        detail::require_field(jd[i], "name", path + ".").get<std::string>();
    if (!delusion_names.insert(name).second)
      throw ScenarioError(path, "duplicate delusion name '" + name + "'");
    const json& jm = detail::require_field(jd[i], "map", path + ".");
    if (!jm.is_array() || static_cast<int>(jm.size()) != grid.size())
      throw ScenarioError(path + ".map", "must list one image per grid value");
    std::vector<int> images;
    for (std::size_t r = 0; r < jm.size(); ++r) {
      S value = detail::parse_scalar<S>(
          jm[r], path + ".map[" + std::to_string(r) + "]");
      try {
        images.push_back(grid.index_of(value));
      } catch (const Error&) {
        throw ScenarioError(path + ".map[" + std::to_string(r) + "]",
                            "image is not on the reward grid");
      }
    }
    delusions.push_back(delusion_from_images(std::move(name), std::move(images),
                                             grid.size()));
  }

  // inner states, product state space
  const json& ji = detail::require_field(doc, "inner_states", "");
  if (!ji.is_array() || ji.empty())
    throw ScenarioError("inner_states", "must be a non-empty array");
  std::vector<std::string> inners;
  std::set<std::string> inner_names;
  for (const json& j : ji) {
    std::string name = j.get<std::string>();
    if (!inner_names.insert(name).second)
      throw ScenarioError("inner_states", "duplicate inner state '" + name + "'");
    inners.push_back(std::move(name));
  }

  int n_states = static_cast<int>(inners.size() * delusions.size());
  sc.code_offset =
      doc.contains("code_offset") ? doc["code_offset"].get<int>() : -(n_states / 2);

  Environment<S> env{std::move(grid), std::move(inners), std::move(delusions),
                     {}, {}, {}};
  env.states = make_product_states(env.inner_names, env.delusions, sc.code_offset);

  if (doc.contains("utility_rounding"))
    sc.utility_rounding =
        rounding_from_name(doc["utility_rounding"].get<std::string>());

  // utilities
  const json& ju = detail::require_field(doc, "utilities", "");
  if (!ju.is_array() || ju.empty())
    throw ScenarioError("utilities", "must be a non-empty array");
  std::set<std::string> utility_names;
  for (std::size_t i = 0; i < ju.size(); ++i) {
    const std::string path = "utilities[" + std::to_string(i) + "]";
    std::string name =
        detail::require_field(ju[i], "name", path + ".").get<std::string>();
    if (!utility_names.insert(name).second)
      throw ScenarioError(path, "duplicate utility name '" + name + "'");
    UtilitySource src;
    if (ju[i].contains("values")) {
      src.kind = UtilitySource::Kind::table;
      const json& jv = ju[i]["values"];
      std::vector<S> values(env.states.size(), ScalarTraits<S>::from_long(0));
      std::vector<bool> seen(env.states.size(), false);
      for (const auto& [key, jval] : jv.items()) {
        int s;
        try {
          s = env.state_index(key);
        } catch (const Error&) {
          throw ScenarioError(path + ".values", "unknown state '" + key + "'");
        }
        values[static_cast<std::size_t>(s)] =
            detail::parse_scalar<S>(jval, path + ".values." + key);
        seen[static_cast<std::size_t>(s)] = true;
      }
      for (std::size_t s = 0; s < seen.size(); ++s)
        if (!seen[s])
          throw ScenarioError(path + ".values",
                              "missing state '" + env.states[s].name + "'");
      try {
        env.utilities.push_back(make_table_utility(env, name, values));
      } catch (const Error& e) {
        throw ScenarioError(path, e.what());
      }
    } else if (ju[i].contains("inner_values")) {
      src.kind = UtilitySource::Kind::inner_table;
      const json& jv = ju[i]["inner_values"];
      std::vector<S> values(env.inner_names.size(),
                            ScalarTraits<S>::from_long(0));
      std::vector<bool> seen(env.inner_names.size(), false);
      for (const auto& [key, jval] : jv.items()) {
        auto it = std::find(env.inner_names.begin(), env.inner_names.end(), key);
        if (it == env.inner_names.end())
          throw ScenarioError(path + ".inner_values",
                              "unknown inner state '" + key + "'");
        std::size_t idx =
            static_cast<std::size_t>(it - env.inner_names.begin());
        values[idx] =
            detail::parse_scalar<S>(jval, path + ".inner_values." + key);
        seen[idx] = true;
      }
      for (std::size_t s = 0; s < seen.size(); ++s)
        if (!seen[s])
          throw ScenarioError(path + ".inner_values",
                              "missing inner state '" + env.inner_names[s] + "'");
      try {
        env.utilities.push_back(make_isb_utility(env, name, values));
      } catch (const Error& e) {
        throw ScenarioError(path, e.what());
      }
    } else if (ju[i].contains("c0") || ju[i].contains("c1") ||
               ju[i].contains("c2")) {
      src.kind = UtilitySource::Kind::formula;
      src.c0 = detail::require_field(ju[i], "c0", path + ".").get<double>();
      src.c1 = detail::require_field(ju[i], "c1", path + ".").get<double>();
      src.c2 = detail::require_field(ju[i], "c2", path + ".").get<double>();
      env.utilities.push_back(make_formula_utility(env, name, src.c0, src.c1,
                                                   src.c2, sc.utility_rounding));
    } else {
      throw ScenarioError(
          path, "must carry 'values', 'inner_values', or formula coefficients");
    }
    sc.utility_sources.push_back(src);
  }

  // actions
  const json& ja = detail::require_field(doc, "actions", "");
  if (!ja.is_array() || ja.empty())
    throw ScenarioError("actions", "must be a non-empty array");
  BeliefModel<S> belief;
  std::set<std::string> action_names;
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string path = "actions[" + std::to_string(i) + "]";
    std::string name =
        detail::require_field(ja[i], "name", path + ".").get<std::string>();
    if (!action_names.insert(name).second)
      throw ScenarioError(path, "duplicate action name '" + name + "'");
    env.actions.push_back(name);
    std::vector<S> row(env.states.size(), ScalarTraits<S>::from_long(0));
    if (ja[i].contains("to")) {
      std::string to = ja[i]["to"].get<std::string>();
      int s;
      try {
        s = env.state_index(to);
      } catch (const Error&) {
        throw ScenarioError(path + ".to", "unknown state '" + to + "'");
      }
      row[static_cast<std::size_t>(s)] = ScalarTraits<S>::from_long(1);
    } else if (ja[i].contains("transition")) {
      for (const auto& [key, jval] : ja[i]["transition"].items()) {
        int s;
        try {
          s = env.state_index(key);
        } catch (const Error&) {
          throw ScenarioError(path + ".transition", "unknown state '" + key + "'");
        }
        row[static_cast<std::size_t>(s)] =
            detail::parse_scalar<S>(jval, path + ".transition." + key);
      }
    } else {
      throw ScenarioError(path, "must carry 'to' or 'transition'");
    }
    belief.transition.push_back(std::move(row));
  }

  // priors
  auto parse_prior_map = [&](const json& jv,
                             const std::string& path) -> UtilityBelief<S> {
    UtilityBelief<S> out;
    out.prior.assign(env.utilities.size(), ScalarTraits<S>::from_long(0));
    std::vector<bool> seen(env.utilities.size(), false);
    for (const auto& [key, jval] : jv.items()) {
      int u;
      try {
        u = env.utility_index(key);
      } catch (const Error&) {
        throw ScenarioError(path, "unknown utility '" + key + "'");
      }
      out.prior[static_cast<std::size_t>(u)] =
          detail::parse_scalar<S>(jval, path + "." + key);
      seen[static_cast<std::size_t>(u)] = true;
    }
    for (std::size_t u = 0; u < seen.size(); ++u)
      if (!seen[u])
        throw ScenarioError(path,
                            "missing utility '" + env.utilities[u].name + "'");
    return out;
  };

  if (doc.contains("generating_prior"))
    sc.generating_prior =
        parse_prior_map(doc["generating_prior"], "generating_prior");

  const json& jp = detail::require_field(doc, "prior", "");
  std::string prior_kind =
      detail::require_field(jp, "kind", "prior.").get<std::string>();
  if (prior_kind == "table") {
    sc.prior = parse_prior_map(detail::require_field(jp, "values", "prior."),
                               "prior.values");
  } else if (prior_kind == "extract") {
    int anchors = detail::require_field(jp, "anchors", "prior.").get<int>();
    if (anchors < 1)
      throw ScenarioError("prior.anchors", "must be at least 1");
    sc.extract_anchors = anchors;
  } else {
    throw ScenarioError("prior.kind", "must be 'table' or 'extract'");
  }

  // reward model
  const json& jm = detail::require_field(doc, "reward_model", "");
  std::string rm_kind =
      detail::require_field(jm, "kind", "reward_model.").get<std::string>();
  if (rm_kind == "push_forward") {
    sc.reward_model_push_forward = true;
    const UtilityBelief<S>* source = nullptr;
    if (sc.generating_prior)
      source = &*sc.generating_prior;
    else if (sc.prior)
      source = &*sc.prior;
    else
      throw ScenarioError("reward_model",
                          "push_forward needs a generating_prior or a prior table");
    belief.reward_pred =
        build_reward_model(env, *source, deterministic_sensor(env));
  } else if (rm_kind == "table") {
    const json& rows = detail::require_field(jm, "rows", "reward_model.");
    belief.reward_pred.assign(
        env.states.size(),
        std::vector<S>(static_cast<std::size_t>(env.num_rewards()),
                       ScalarTraits<S>::from_long(0)));
    std::vector<bool> seen(env.states.size(), false);
    for (const auto& [skey, jrow] : rows.items()) {
      int s;
      try {
        s = env.state_index(skey);
      } catch (const Error&) {
        throw ScenarioError("reward_model.rows", "unknown state '" + skey + "'");
      }
      seen[static_cast<std::size_t>(s)] = true;
      for (const auto& [rkey, jval] : jrow.items()) {
        S value = detail::parse_scalar<S>(json(rkey),
                                          "reward_model.rows." + skey);
        int r;
        try {
          r = env.rewards.index_of(value);
        } catch (const Error&) {
          throw ScenarioError("reward_model.rows." + skey,
                              "reward '" + rkey + "' is not on the grid");
        }
        belief.reward_pred[static_cast<std::size_t>(s)]
                          [static_cast<std::size_t>(r)] =
            detail::parse_scalar<S>(jval,
                                    "reward_model.rows." + skey + "." + rkey);
      }
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
      if (!seen[s])
        throw ScenarioError("reward_model.rows",
                            "missing state '" + env.states[s].name + "'");
  } else {
    throw ScenarioError("reward_model.kind", "must be 'push_forward' or 'table'");
  }

  // agents
  const json& jag = detail::require_field(doc, "agents", "");
  if (!jag.is_array() || jag.empty())
    throw ScenarioError("agents", "must be a non-empty array");
  for (const json& j : jag)
    sc.agents.push_back(
        detail::parse_agent(j.get<std::string>(), env.utilities, "agents"));

  // tolerances
  if (doc.contains("tolerances")) {
    const json& jt = doc["tolerances"];
    if (jt.contains("cp"))
      sc.cp_tol = detail::parse_scalar<S>(jt["cp"], "tolerances.cp");
    if (jt.contains("consistency"))
      sc.consistency_tol =
          detail::parse_scalar<S>(jt["consistency"], "tolerances.consistency");
    if (jt.contains("extraction"))
      sc.extraction_tol =
          detail::parse_scalar<S>(jt["extraction"], "tolerances.extraction");
  }

  sc.env = std::move(env);
  sc.belief = std::move(belief);
  try {
    sc.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError("", e.what());
  }
  return sc;
}

template <class S>
json scenario_to_json(const Scenario<S>& sc) {
  using T = ScalarTraits<S>;
  json doc;
  doc["schema_version"] = sc.schema_version;
  doc["name"] = sc.name;
  doc["seed"] = sc.seed;

  json rewards = json::array();
  for (const S& v : sc.env.rewards.values()) rewards.push_back(T::format(v));
  doc["rewards"] = std::move(rewards);

  json delusions = json::array();
  for (const Delusion& d : sc.env.delusions) {
    json jd;
    jd["name"] = d.name;
    json map = json::array();
    for (int img : d.map) map.push_back(T::format(sc.env.rewards.value(img)));
    jd["map"] = std::move(map);
    delusions.push_back(std::move(jd));
  }
  doc["delusions"] = std::move(delusions);

  doc["inner_states"] = sc.env.inner_names;
  doc["code_offset"] = sc.code_offset;
  doc["utility_rounding"] = rounding_name(sc.utility_rounding);

  json utilities = json::array();
  for (std::size_t i = 0; i < sc.env.utilities.size(); ++i) {
    const UtilityFunction& u = sc.env.utilities[i];
    const UtilitySource& src = sc.utility_sources.at(i);
    json ju;
    ju["name"] = u.name;
    switch (src.kind) {
      case UtilitySource::Kind::formula:
        ju["c0"] = src.c0;
        ju["c1"] = src.c1;
        ju["c2"] = src.c2;
        break;
      case UtilitySource::Kind::inner_table: {
        json values;
        std::set<int> done;
        for (std::size_t s = 0; s < sc.env.states.size(); ++s)
          if (done.insert(sc.env.states[s].inner).second)
            values[sc.env.inner_names[static_cast<std::size_t>(
                sc.env.states[s].inner)]] =
                T::format(sc.env.rewards.value(u.values[s]));
        ju["inner_values"] = std::move(values);
        break;
      }
      case UtilitySource::Kind::table:
      default: {
        json values;
        for (std::size_t s = 0; s < sc.env.states.size(); ++s)
          values[sc.env.states[s].name] =
              T::format(sc.env.rewards.value(u.values[s]));
        ju["values"] = std::move(values);
        break;
      }
    }
    utilities.push_back(std::move(ju));
  }
  doc["utilities"] = std::move(utilities);

  json actions = json::array();
  for (int a = 0; a < sc.env.num_actions(); ++a) {
    json ja;
    ja["name"] = sc.env.actions[static_cast<std::size_t>(a)];
    const auto& row = sc.belief.transition[static_cast<std::size_t>(a)];
    int point_mass = -1;
    bool simple = true;
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] == T::from_long(0)) continue;
      if (row[s] == T::from_long(1) && point_mass < 0)
        point_mass = static_cast<int>(s);
      else
        simple = false;
    }
    if (simple && point_mass >= 0) {
      ja["to"] = sc.env.states[static_cast<std::size_t>(point_mass)].name;
    } else {
      json tr;
      for (std::size_t s = 0; s < row.size(); ++s)
        if (!(row[s] == T::from_long(0)))
          tr[sc.env.states[s].name] = T::format(row[s]);
      ja["transition"] = std::move(tr);
    }
    actions.push_back(std::move(ja));
  }
  doc["actions"] = std::move(actions);

  auto prior_map = [&](const UtilityBelief<S>& belief) {
    json out;
    for (std::size_t u = 0; u < belief.prior.size(); ++u)
      out[sc.env.utilities[u].name] = T::format(belief.prior[u]);
    return out;
  };

  if (sc.generating_prior)
    doc["generating_prior"] = prior_map(*sc.generating_prior);

  if (sc.reward_model_push_forward &&
      (sc.generating_prior || sc.prior)) {
    doc["reward_model"] = json{{"kind", "push_forward"}};
  } else {
    json rows;
    for (std::size_t s = 0; s < sc.belief.reward_pred.size(); ++s) {
      json row;
      for (int r = 0; r < sc.env.num_rewards(); ++r)
        row[T::to_string(sc.env.rewards.value(r))] =
            T::format(sc.belief.reward_pred[s][static_cast<std::size_t>(r)]);
      rows[sc.env.states[s].name] = std::move(row);
    }
    doc["reward_model"] = json{{"kind", "table"}, {"rows", std::move(rows)}};
  }

  if (sc.prior)
    doc["prior"] = json{{"kind", "table"}, {"values", prior_map(*sc.prior)}};
  else
    doc["prior"] = json{{"kind", "extract"}, {"anchors", *sc.extract_anchors}};

  json agents = json::array();
  for (const AgentSpec& a : sc.agents)
    agents.push_back(detail::agent_to_string(a, sc.env.utilities));
  doc["agents"] = std::move(agents);

  doc["tolerances"] = json{{"cp", T::format(sc.cp_tol)},
                           {"consistency", T::format(sc.consistency_tol)},
                           {"extraction", T::format(sc.extraction_tol)}};
  return doc;
}

}  // namespace vrl
