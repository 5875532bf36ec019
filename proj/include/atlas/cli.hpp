#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atlas/io.hpp"

namespace atlas::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kValidation = 2, kResource = 3, kUsage = 64 };

struct RunConfig {
  std::string mode = "rational";
  /// Feasibility tolerance for float-mode behaviors.
  double tol = 1e-9;
  double sdp_tol = 1e-7;
  double quantum_tol = 1e-10;
  std::uint64_t budget = std::uint64_t{1} << 24;
  std::uint64_t seed = 0;
  std::string format = "json";

  void check() const {
    if (mode != "rational" && mode != "float") throw Error(Errc::UsageError, "--mode must be rational or float");
    if (format != "json" && format != "text") throw Error(Errc::UsageError, "--format must be json or text");
    if (!(tol > 0) || !(sdp_tol > 0) || !(quantum_tol > 0)) throw Error(Errc::UsageError, "tolerances must be positive");
    if (budget < 1) throw Error(Errc::UsageError, "--budget must be at least 1");
  }

  io::Json to_json() const {
    return {{"mode", mode}, {"tol", tol},       {"sdp_tol", sdp_tol}, {"quantum_tol", quantum_tol},
            {"budget", budget}, {"seed", seed}, {"format", format}};
  }

  PolytopeOptions polytope() const { return {budget}; }
};

namespace detail {

inline void flatten(const io::Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

inline void write_file(const std::filesystem::path& path, const io::Json& j) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::ParseError, "cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

inline io::Json validation_to_json(const ValidationReport& r, const Scenario& s) {
  io::Json norm = io::Json::array(), dist = io::Json::array();
  for (const auto& n : r.normalization)
    norm.push_back({{"context", s.context_key(s.contexts()[n.context].members)}, {"sum", n.sum}});
  for (const auto& d : r.disturbance)
    dist.push_back({{"first", s.context_key(s.contexts()[d.first].members)},
                    {"second", s.context_key(s.contexts()[d.second].members)},
                    {"shared", s.context_key(d.shared)},
                    {"max_deviation", d.max_deviation}});
  return {{"valid", r.valid()}, {"normalization", norm}, {"disturbance", dist}};
}

}  // namespace detail

/// Parses argv, runs one subcommand and writes a versioned report to `out`. Returns the
/// process exit code: 0 success, 2 invalid input, 3 budget or convergence failure, 64 usage.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bell/Kochen-Specker contextuality atlas", "atlas"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  RunConfig cfg;
  app.add_option("--mode", cfg.mode, "numeric mode for behaviors: rational or float")->capture_default_str();
  app.add_option("--tol", cfg.tol, "tolerance for float behaviors")->capture_default_str();
  app.add_option("--sdp-tol", cfg.sdp_tol, "target width of the theta interval")->capture_default_str();
  app.add_option("--quantum-tol", cfg.quantum_tol, "tolerance for quantum consistency checks")->capture_default_str();
  app.add_option("--budget", cfg.budget, "maximum number of deterministic assignments")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for randomized procedures")->capture_default_str();
  app.add_option("--format", cfg.format, "output format: json or text")->capture_default_str();

  std::string command;
  io::Json result;
  int status = kOk;
  std::vector<std::string> files;
  std::string graph_file, partition_file, out_dir = ".";
  int dim = 2, restarts = 20, n = 0, samples = 1000;

  auto* validate = app.add_subcommand("validate", "check normalization and no-disturbance of a behavior");
  validate->add_option("files", files, "scenario and behavior")->required()->expected(2);

  auto* bound = app.add_subcommand("bound", "exact classical bound of an inequality");
  bound->add_option("files", files, "scenario and inequality")->required()->expected(2);

  auto* tight = app.add_subcommand("tight", "facet test of an inequality with its stated bound");
  tight->add_option("files", files, "scenario and inequality")->required()->expected(2);

  auto* member = app.add_subcommand("member", "membership of a behavior in the classical polytope");
  member->add_option("files", files, "scenario and behavior")->required()->expected(2);

  auto* graph = app.add_subcommand("graph", "graph invariants");
  graph->require_subcommand(1);
  auto* g_alpha = graph->add_subcommand("alpha", "independence number");
  auto* g_theta = graph->add_subcommand("theta", "certified Lovasz theta interval");
  auto* g_ratio = graph->add_subcommand("ratio", "alpha, theta and their ratio");
  auto* g_part = graph->add_subcommand("partition", "partition into n independent sets");
  for (auto* sub : {g_alpha, g_theta, g_ratio, g_part}) sub->add_option("graph", graph_file)->required();
  g_part->add_option("--n", n, "number of parts")->required();
  auto* g_excl = graph->add_subcommand("exclusivity", "exclusivity graph of an inequality");
  g_excl->add_option("files", files, "scenario and inequality")->required()->expected(2);

  auto* qvalue = app.add_subcommand("qvalue", "seesaw lower bound on the quantum value");
  qvalue->add_option("files", files, "scenario and inequality")->required()->expected(2);
  qvalue->add_option("--dim", dim, "local dimension per party")->capture_default_str();
  qvalue->add_option("--restarts", restarts, "number of random restarts")->capture_default_str();

  auto* dilate = app.add_subcommand("dilate", "Neumark dilation of a POVM");
  dilate->add_option("povm", graph_file)->required();
  dilate->add_option("--samples", samples, "random states for the probability check")->capture_default_str();

  auto* sic = app.add_subcommand("sic", "state-independent contextuality sets");
  sic->require_subcommand(1);
  auto* s_verify = sic->add_subcommand("verify", "witness operator diagnostics");
  auto* s_critical = sic->add_subcommand("critical", "single-element removal check");
  auto* s_lift = sic->add_subcommand("lift", "bipartite Bell inequality from the set");
  for (auto* sub : {s_verify, s_critical, s_lift}) {
    sub->add_option("sicset", graph_file)->required();
    sub->add_option("--samples", samples, "random states")->capture_default_str();
  }

  auto* map = app.add_subcommand("map", "Bell/KS conversion report");
  map->add_option("files", files, "scenario and inequality")->required()->expected(2);
  map->add_option("--partition", partition_file, "partition JSON");
  auto* map_dim = map->add_option("--dim", dim, "local dimension for quantum estimates");
  map->add_option("--restarts", restarts, "seesaw restarts")->capture_default_str();

  auto* examples = app.add_subcommand("examples", "write canned scenarios and inequalities");
  examples->require_subcommand(1);
  auto* e_pearle = examples->add_subcommand("pearle", "hexagon and its Bell version");
  auto* e_ncycle = examples->add_subcommand("ncycle", "n-cycle inequality");
  e_ncycle->add_option("--n", n, "number of measurements")->required();
  auto* e_chsh = examples->add_subcommand("chsh", "CHSH");
  auto* e_pm = examples->add_subcommand("pm-square", "Peres-Mermin square SIC set");
  for (auto* sub : {e_pearle, e_ncycle, e_chsh, e_pm}) sub->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg.check();
    auto load_scenario = [&] { return io::scenario_from_json(io::read_json_file(files.at(0))); };
    auto load_inequality = [&](const ScenarioPtr& s) { return io::inequality_from_json(io::read_json_file(files.at(1)), s); };

    if (*validate) {
      command = "validate";
      auto s = load_scenario();
      auto b = io::behavior_from_json(io::read_json_file(files[1]), s);
      auto report = std::visit([&](const auto& beh) { return validate_behavior(*s, beh, cfg.tol); }, b);
      result = detail::validation_to_json(report, *s);
      if (!report.valid()) status = kValidation;
    } else if (*bound) {
      command = "bound";
      auto s = load_scenario();
      auto ineq = load_inequality(s);
      result = {{"bound", io::rational_to_json(classical_bound(ineq, cfg.polytope()))},
                {"stated_bound", io::rational_to_json(ineq.bound())},
                {"kind", to_string(ineq.kind())}};
    } else if (*tight) {
      command = "tight";
      auto s = load_scenario();
      result = io::tightness_to_json(tightness_test(load_inequality(s), cfg.polytope()));
    } else if (*member) {
      command = "member";
      auto s = load_scenario();
      auto b = io::behavior_from_json(io::read_json_file(files[1]), s);
      auto desc = enumerate_vertices(s, cfg.polytope());
      MembershipResult r;
      if (cfg.mode == "float") {
        auto fb = std::holds_alternative<FloatBehavior>(b) ? std::get<FloatBehavior>(b) : to_float(std::get<ExactBehavior>(b));
        r = membership_test(fb, cfg.tol, cfg.polytope());
      } else {
        auto eb = std::holds_alternative<ExactBehavior>(b) ? std::get<ExactBehavior>(b) : to_exact(std::get<FloatBehavior>(b));
        r = membership_test(eb, cfg.polytope());
      }
      result = io::membership_to_json(r, *s, desc);
    } else if (*graph) {
      ThetaOptions topts;
      if (*g_excl) {
        command = "graph exclusivity";
        auto s = load_scenario();
        auto form = to_event_form(load_inequality(s));
        result = {{"graph", io::graph_to_json(exclusivity_graph(form))}, {"event_form", io::event_form_to_json(form, *s)}};
      } else {
        auto g = io::graph_from_json(io::read_json_file(graph_file));
        if (*g_alpha) {
          command = "graph alpha";
          result = {{"alpha", independence_number(g)}};
        } else if (*g_theta) {
          command = "graph theta";
          result = io::theta_to_json(lovasz_theta(g, cfg.sdp_tol, topts));
        } else if (*g_ratio) {
          command = "graph ratio";
          result = io::invariants_to_json(contextuality_ratio(g, cfg.sdp_tol, topts));
        } else {
          command = "graph partition";
          if (n < 1 || static_cast<std::size_t>(n) > g.size()) throw Error(Errc::UsageError, "--n must be between 1 and the vertex count");
          auto p = find_n_partition(g, static_cast<std::size_t>(n));
          result = {{"found", p.has_value()}};
          if (p) {
            result["partition"] = io::partition_to_json(*p);
            result["undersized"] = p->undersized();
          }
        }
      }
    } else if (*qvalue) {
      command = "qvalue";
      auto s = load_scenario();
      auto ineq = load_inequality(s);
      SeesawOptions o;
      o.local_dimension = dim;
      o.restarts = restarts;
      o.seed = cfg.seed;
      auto r = seesaw_max(ineq, o);
      result = io::seesaw_to_json(r, *s);
      result["classical_bound"] = io::rational_to_json(classical_bound(ineq, cfg.polytope()));
    } else if (*dilate) {
      command = "dilate";
      auto effects = io::effects_from_json(io::read_json_file(graph_file));
      auto r = neumark_dilation(effects);
      std::mt19937_64 rng(cfg.seed);
      double worst = 0, ideal = 0;
      for (int i = 0; i < samples; ++i) {
        CVector psi = linalg::random_state(effects.front().rows(), rng);
        CVector lifted = r.isometry * psi;
        for (std::size_t k = 0; k < effects.size(); ++k) {
          double p = (psi.adjoint() * effects[k] * psi)(0, 0).real();
          worst = std::max(worst, std::abs(p - (r.projectors[k] * lifted).squaredNorm()));
        }
      }
      const auto d = effects.front().rows();
      for (std::size_t k = 0; k < r.projectors.size(); ++k) {
        ideal = std::max(ideal, atlas::detail::max_abs(r.projectors[k] * r.projectors[k] - r.projectors[k]));
        for (std::size_t l = k + 1; l < r.projectors.size(); ++l)
          ideal = std::max(ideal, atlas::detail::max_abs(r.projectors[k] * r.projectors[l]));
      }
      result = io::dilation_to_json(r);
      result["check"] = {{"samples", samples},
                         {"max_probability_error", worst},
                         {"max_projector_error", ideal},
                         {"isometry_error", atlas::detail::max_abs(r.isometry.adjoint() * r.isometry - CMatrix::Identity(d, d))},
                         {"passed", worst <= cfg.quantum_tol && ideal <= cfg.quantum_tol}};
    } else if (*sic) {
      auto set = io::sic_from_json(io::read_json_file(graph_file));
      if (*s_verify) {
        command = "sic verify";
        result = io::sic_report_to_json(verify_sic(set, static_cast<std::size_t>(samples), cfg.seed, cfg.polytope()));
      } else if (*s_critical) {
        command = "sic critical";
        result = io::criticality_to_json(criticality_check(set, static_cast<std::size_t>(samples), cfg.seed, cfg.polytope()));
      } else {
        command = "sic lift";
        result = io::sic_bell_to_json(sic_to_bell(set, cfg.polytope()));
      }
    } else if (*map) {
      command = "map";
      auto s = load_scenario();
      auto ineq = load_inequality(s);
      MapOptions o;
      o.polytope = cfg.polytope();
      if (!partition_file.empty()) o.partition = io::partition_from_json(io::read_json_file(partition_file), s.get());
      if (map_dim->count() > 0) o.dimension = dim;
      o.seesaw.restarts = restarts;
      o.seesaw.seed = cfg.seed;
      result = io::mapping_to_json(map_report(ineq, o));
    } else if (*examples) {
      std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      std::vector<std::string> written;
      auto emit = [&](const std::string& name, const io::Json& j) {
        detail::write_file(dir / name, j);
        written.push_back((dir / name).string());
      };
      if (*e_pearle) {
        command = "examples pearle";
        auto p = pearle_hexagon();
        emit("pearle.scenario.json", io::scenario_to_json(*p.hexagon));
        emit("pearle.gamma.json", io::inequality_to_json(p.gamma));
        emit("pearle.partition.json", io::partition_to_json(p.partition, *p.hexagon));
        emit("pearle.bell.scenario.json", io::scenario_to_json(*p.bell));
        emit("pearle.gammaprime.json", io::inequality_to_json(p.gamma_prime));
      } else if (*e_ncycle) {
        command = "examples ncycle";
        auto c = n_cycle(static_cast<std::size_t>(std::max(n, 0)));
        auto stem = "ncycle" + std::to_string(n);
        emit(stem + ".scenario.json", io::scenario_to_json(*c.scenario));
        emit(stem + ".inequality.json", io::inequality_to_json(c.inequality));
      } else if (*e_chsh) {
        command = "examples chsh";
        auto c = chsh();
        emit("chsh.scenario.json", io::scenario_to_json(*c.scenario));
        emit("chsh.inequality.json", io::inequality_to_json(c.inequality));
      } else {
        command = "examples pm-square";
        auto set = pm_square();
        emit("pm-square.sic.json", io::sic_to_json(set));
        emit("pm-square.scenario.json", io::scenario_to_json(set.scenario()));
        emit("pm-square.witness.json", io::inequality_to_json(set.witness));
      }
      result = {{"files", written}};
    }
  } catch (const Error& e) {
    err << "atlas: " << e.what() << '\n';
    if (e.code() == Errc::UsageError) return kUsage;
    return is_resource_error(e.code()) ? kResource : kValidation;
  } catch (const std::exception& e) {
    err << "atlas: " << e.what() << '\n';
    return kValidation;
  }

  io::Json report = {{"schema_version", kSchemaVersion},
                     {"tool_version", kToolVersion},
                     {"command", command},
                     {"config", cfg.to_json()},
                     {"seed", cfg.seed},
                     {"result", result}};
  if (cfg.format == "text")
    detail::flatten(report, "", out);
  else
    out << report.dump(2) << '\n';
  return status;
}

}  // namespace atlas::cli
