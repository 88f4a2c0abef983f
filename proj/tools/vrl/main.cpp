// vrl: scenario runner for consistency-preserving value-learning agents.
//
// Exit codes: 0 all checks pass, 1 assertion failure, 2 scenario error,
// 3 no consistency-preserving action.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "vrl/run.hpp"

namespace {

struct CommonOpts {
  std::string out = ".";
  bool exact = false;
  bool json_only = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "Output directory for reports");
  cmd->add_flag("--exact", opts.exact,
                "Exact rational arithmetic instead of doubles");
  cmd->add_flag("--json-only", opts.json_only, "Skip CSV value tables");
}

vrl::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vrl::ScenarioError(path, "cannot open file");
  try {
    return vrl::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw vrl::ScenarioError(path, e.what());
  }
}

template <class S>
int run_scenario(const vrl::Scenario<S>& sc, const CommonOpts& opts) {
  vrl::RunOptions ro;
  ro.json_only = opts.json_only;
  vrl::RunResult<S> result = vrl::run(sc, ro);
  vrl::write_outputs(result, opts.out);
  for (const auto& agent : result.report.at("agents"))
    std::cout << sc.name << ": " << agent.at("kind").template get<std::string>()
              << " chose " << agent.at("chosen").template get<std::string>()
              << " (value " << agent.at("chosen_value").dump()
              << (agent.at("wireheaded").template get<bool>() ? ", wireheaded"
                                                              : "")
              << ")\n";
  std::cout << sc.name << ": " << (result.ok ? "all checks passed" : "CHECK FAILED")
            << "\n";
  return result.exit_code;
}

template <class S>
int run_extract(const vrl::Scenario<S>& sc, int anchors_override,
                const CommonOpts& opts) {
  using T = vrl::ScalarTraits<S>;
  int k = anchors_override > 0 ? anchors_override
          : sc.extract_anchors
              ? *sc.extract_anchors
              : (sc.env.num_utilities() + sc.env.num_rewards() - 1) /
                    sc.env.num_rewards();
  std::vector<int> anchors = vrl::find_anchor_states(sc.env, sc.belief, k);
  auto [recovered, report] = vrl::extract_prior(
      sc.env, vrl::build_extraction_problem(sc.env, sc.belief, anchors),
      sc.extraction_tol);

  vrl::json doc;
  doc["schema_version"] = 1;
  doc["scenario"] = sc.name;
  doc["mode"] = T::mode_name();
  vrl::json anchor_names = vrl::json::array();
  for (int s : report.anchors)
    anchor_names.push_back(sc.env.states[static_cast<std::size_t>(s)].name);
  doc["anchors"] = std::move(anchor_names);
  doc["rank"] = report.rank;
  doc["required_rank"] = report.required_rank;
  doc["used_square_solve"] = report.used_square_solve;
  doc["residual_norm2"] = T::format(report.residual_norm2);
  vrl::json prior;
  for (std::size_t u = 0; u < recovered.prior.size(); ++u)
    prior[sc.env.utilities[u].name] = T::format(recovered.prior[u]);
  doc["prior"] = std::move(prior);

  bool ok = true;
  const vrl::UtilityBelief<S>* reference = nullptr;
  if (sc.generating_prior)
    reference = &*sc.generating_prior;
  else if (sc.prior)
    reference = &*sc.prior;
  if (reference) {
    S err = T::from_long(0);
    for (std::size_t u = 0; u < recovered.prior.size(); ++u) {
      S d = T::abs(recovered.prior[u] - reference->prior[u]);
      if (d > err) err = d;
    }
    ok = !(err > sc.extraction_tol);
    doc["reference_max_abs_error"] = T::format(err);
    doc["pass"] = ok;
  }

  std::filesystem::create_directories(opts.out);
  std::ofstream out(std::filesystem::path(opts.out) /
                        (sc.name + "_extraction.json"),
                    std::ios::binary);
  out << doc.dump(2) << '\n';
  std::cout << sc.name << ": extracted prior from " << report.anchors.size()
            << " anchor state(s), rank " << report.rank << "/"
            << report.required_rank << "\n";
  return ok ? 0 : 1;
}

template <class S>
int run_check_cp(const vrl::Scenario<S>& sc, const CommonOpts& opts) {
  using T = vrl::ScalarTraits<S>;
  vrl::UtilityBelief<S> cb;
  if (sc.prior) {
    cb = *sc.prior;
  } else {
    std::vector<int> anchors =
        vrl::find_anchor_states(sc.env, sc.belief, *sc.extract_anchors);
    cb = vrl::extract_prior(
             sc.env, vrl::build_extraction_problem(sc.env, sc.belief, anchors),
             sc.extraction_tol)
             .first;
  }
  auto consistency =
      vrl::check_consistency(sc.env, sc.belief, cb, sc.consistency_tol);
  std::vector<int> cp = vrl::cp_actions(sc.env, sc.belief, cb, sc.cp_tol);

  vrl::json doc;
  doc["schema_version"] = 1;
  doc["scenario"] = sc.name;
  doc["mode"] = T::mode_name();
  doc["consistency_pass"] = consistency.pass;
  doc["consistency_max_deviation"] = T::format(consistency.max_deviation);
  vrl::json names = vrl::json::array();
  for (int a : cp) names.push_back(sc.env.actions[static_cast<std::size_t>(a)]);
  doc["cp_actions"] = std::move(names);

  std::filesystem::create_directories(opts.out);
  std::ofstream out(std::filesystem::path(opts.out) / (sc.name + "_cp.json"),
                    std::ios::binary);
  out << doc.dump(2) << '\n';
  std::cout << sc.name << ": " << cp.size() << " of " << sc.env.num_actions()
            << " actions are consistency preserving\n";
  return consistency.pass ? 0 : 1;
}

enum class Builder { none, example3, example4, toy };

template <class S>
vrl::Scenario<S> make_scenario(Builder builder, const std::string& file,
                               const vrl::ToyConfig& toy_cfg) {
  switch (builder) {
    case Builder::example3:
      return vrl::build_example3<S>();
    case Builder::example4:
      return vrl::build_example4<S>();
    case Builder::toy:
      return vrl::build_toy_model<S>(toy_cfg);
    case Builder::none:
    default:
      return vrl::parse_scenario<S>(load_json(file));
  }
}

template <class S>
int dispatch(const std::string& verb, Builder builder, const std::string& file,
             const vrl::ToyConfig& toy_cfg, int anchors_override,
             const std::string& emit_path, const CommonOpts& opts) {
  vrl::Scenario<S> sc = make_scenario<S>(builder, file, toy_cfg);
  if (!emit_path.empty()) {
    std::ofstream out(emit_path, std::ios::binary);
    if (!out) throw vrl::ScenarioError(emit_path, "cannot open for writing");
    out << vrl::scenario_to_json(sc).dump(2) << '\n';
    std::cout << "wrote scenario to " << emit_path << "\n";
  }
  if (verb == "extract") return run_extract<S>(sc, anchors_override, opts);
  if (verb == "check-cp") return run_check_cp<S>(sc, opts);
  return run_scenario<S>(sc, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for value reinforcement learning agents"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string file;
  std::string emit_path;
  vrl::ToyConfig toy_cfg;
  int anchors_override = 0;
  double toy_tol = 0.0;

  CLI::App* cmd_run = app.add_subcommand("run", "Run a scenario file");
  cmd_run->add_option("scenario", file, "Scenario JSON file")->required();
  add_common(cmd_run, opts);

  CLI::App* cmd_e3 =
      app.add_subcommand("example3", "Run the bundled wireheading example");
  add_common(cmd_e3, opts);
  cmd_e3->add_option("--emit-scenario", emit_path,
                     "Also write the scenario as JSON to this path");

  CLI::App* cmd_e4 = app.add_subcommand(
      "example4", "Run the bundled consistency-preserving example");
  add_common(cmd_e4, opts);
  cmd_e4->add_option("--emit-scenario", emit_path,
                     "Also write the scenario as JSON to this path");

  CLI::App* cmd_toy =
      app.add_subcommand("toy", "Run the bundled 20-state experiment");
  add_common(cmd_toy, opts);
  cmd_toy->add_option("--seed", toy_cfg.seed, "Seed recorded in the report");
  CLI::Option* tol_opt =
      cmd_toy->add_option("--tol", toy_tol, "CP tolerance override");
  cmd_toy->add_option("--anchors", toy_cfg.anchors,
                      "Anchor states for prior extraction");
  cmd_toy->add_option("--emit-scenario", emit_path,
                      "Also write the scenario as JSON to this path");

  CLI::App* cmd_extract =
      app.add_subcommand("extract", "Recover the utility prior from B");
  cmd_extract->add_option("scenario", file, "Scenario JSON file")->required();
  cmd_extract->add_option("--anchors", anchors_override,
                          "Anchor-state budget override");
  add_common(cmd_extract, opts);

  CLI::App* cmd_cp =
      app.add_subcommand("check-cp", "List the consistency-preserving actions");
  cmd_cp->add_option("scenario", file, "Scenario JSON file")->required();
  add_common(cmd_cp, opts);

  CLI11_PARSE(app, argc, argv);

  Builder builder = Builder::none;
  std::string verb = "run";
  if (cmd_e3->parsed()) builder = Builder::example3;
  if (cmd_e4->parsed()) builder = Builder::example4;
  if (cmd_toy->parsed()) builder = Builder::toy;
  if (cmd_extract->parsed()) verb = "extract";
  if (cmd_cp->parsed()) verb = "check-cp";
  if (tol_opt->count() > 0) {
    toy_cfg.has_cp_tol_override = true;
    toy_cfg.cp_tol_override = toy_tol;
  }

  try {
    if (opts.exact)
      return dispatch<vrl::Rational>(verb, builder, file, toy_cfg,
                                     anchors_override, emit_path, opts);
    return dispatch<double>(verb, builder, file, toy_cfg, anchors_override,
                            emit_path, opts);
  } catch (const vrl::NoCPActionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const vrl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
