// conelab: command-line laboratory for Garding-cone algebra, conformal
// Schouten eigenvalue problems on cohomogeneity-one models, viscosity
// inclusion checks, and local deformation expansions.
//
// Exit codes:
//   0  success (see the written reports for verdicts)
//   1  run finished but a checked property failed
//   2  configuration or usage error
//   3  admissibility obstruction (cone/domain/precondition violation)
//   4  stall (continuation or Newton iteration did not reach its target)
//   5  a stabilization ladder did not settle
//
// All outputs are deterministic functions of (config, seed): identical
// inputs produce byte-identical files.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conelab/io.hpp"

namespace {

using conelab::cones::ConeSpec;
using conelab::geometry::CohomOneModel;
using conelab::geometry::GridField;
using nlohmann::json;
namespace io = conelab::io;
namespace solver = conelab::solver;
namespace viscosity = conelab::viscosity;
namespace diagnostics = conelab::diagnostics;
namespace deformation = conelab::deformation;
namespace properties = conelab::cone_properties;

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAdmissibility = 3;
constexpr int kExitStall = 4;
constexpr int kExitNotStabilized = 5;

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;  // sentinel: take the config/default value
  double tol = -1.0;    // sentinel: take the config/default value
};

double pick_tol(const Common& c, double from_config) {
  return c.tol > 0.0 ? c.tol : from_config;
}

std::uint64_t pick_seed(const Common& c, long long from_config) {
  return static_cast<std::uint64_t>(c.seed >= 0 ? c.seed : from_config);
}

solver::ContinuationOptions continuation_options(const Common& c,
                                                 const io::IniConfig& cfg,
                                                 const std::string& section) {
  solver::ContinuationOptions opt;
  opt.initial_steps =
      static_cast<int>(cfg.get_int(section + ".initial_steps", 10));
  opt.min_dtau = cfg.get_double(section + ".min_dtau", 1e-4);
  opt.max_growth = cfg.get_double(section + ".max_growth", 1.5);
  opt.newton.tol = pick_tol(c, cfg.get_double(section + ".newton_tol", 1e-10));
  opt.newton.max_iter =
      static_cast<int>(cfg.get_int(section + ".max_iter", 50));
  return opt;
}

std::string states_to_csv(const std::vector<solver::SolverState>& states) {
  std::string csv = "tau,residual_norm,newton_iters,min_margin,min_u,max_u\n";
  for (const auto& st : states) {
    csv += io::format_double(st.tau) + "," +
           io::format_double(st.residual_norm) + "," +
           std::to_string(st.newton_iters) + "," +
           io::format_double(st.min_margin) + "," +
           io::format_double(st.min_u) + "," + io::format_double(st.max_u) +
           "\n";
  }
  return csv;
}

void write_solution_outputs(io::OutputWriter& out, const CohomOneModel& model,
                            const GridField& u, const GridField* residual) {
  if (residual != nullptr) {
    const std::pair<std::string, const GridField*> cols[] = {
        {"u", &u}, {"residual", residual}};
    out.write("solution.csv", io::grid_fields_to_csv(model, cols));
  } else {
    out.write("solution.csv", io::grid_field_to_csv(model, "u", u));
  }
  out.write("eigenvalues.csv",
            io::eigen_field_to_csv(
                model, conelab::geometry::conformal_schouten_eigs(
                           model, u,
                           conelab::geometry::Normalization::MetricInverse)));
}

// ---------------------------------------------------------------------------
// check-cones: sampled structural checks over a family of cones.

int run_check_cones(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);

  properties::SuiteOptions opt;
  opt.samples = static_cast<int>(cfg.get_int("suite.samples", 200));
  opt.seed = pick_seed(c, cfg.get_int("suite.seed", 2026));
  opt.tol = pick_tol(c, cfg.get_double("suite.tol", 1e-10));
  opt.fd_tol = cfg.get_double("suite.fd_tol", 1e-6);

  std::vector<ConeSpec> cones_list;
  if (cfg.has("cone.n")) {
    cones_list.push_back(io::cone_from_config(cfg));
  } else {
    std::vector<int> dims;
    for (const double d : cfg.get_double_list("suite.dims", {3, 4, 5}))
      dims.push_back(static_cast<int>(d));
    cones_list = properties::standard_cones(dims);
  }

  const properties::SuiteReport rep = properties::run_property_suite(cones_list, opt);

  io::OutputWriter out(c.out_dir);
  json j = io::json_of(rep);
  json cone_names = json::array();
  for (const auto& cone : cones_list) cone_names.push_back(cone.describe());
  j["cones"] = std::move(cone_names);
  j["options"] = json{{"samples", opt.samples},
                      {"seed", opt.seed},
                      {"tol", opt.tol},
                      {"fd_tol", opt.fd_tol}};
  out.write("property_suite.json", j.dump(2) + "\n");

  std::string csv = "property,checked,failures,worst\n";
  for (const auto& r : rep.results)
    csv += r.name + "," + std::to_string(r.checked) + "," +
           std::to_string(r.failures) + "," + io::format_double(r.worst) + "\n";
  out.write("properties.csv", csv);

  out.write_manifest("check-cones", cfg.raw(),
                     json{{"seed", opt.seed},
                          {"tol", opt.tol},
                          {"samples", opt.samples},
                          {"cones", cones_list.size()}});

  for (const auto& r : rep.results)
    std::cout << "check-cones: " << r.name << " checked=" << r.checked
              << " failures=" << r.failures
              << " worst=" << io::format_double(r.worst) << "\n";
  std::cout << "check-cones: " << (rep.passed() ? "PASS" : "FAIL") << " ("
            << cones_list.size() << " cones)\n";
  return rep.passed() ? kExitOk : kExitFailedCheck;
}

// ---------------------------------------------------------------------------
// solve: damped Newton at fixed tau for f(lambda^tau) = h_tilde e^{beta u}.

int run_solve(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);
  const CohomOneModel model = io::model_from_config(cfg);
  const ConeSpec cone = io::cone_from_config(cfg);

  const double tau = cfg.require_double("solve.tau");
  const double beta = cfg.get_double("solve.beta", 2.0);
  const std::string h_spec = cfg.get_string("solve.h", "constant:1");
  const std::string u0_spec = cfg.get_string("solve.initial", "zero");

  solver::NewtonOptions nopt;
  nopt.tol = pick_tol(c, cfg.get_double("solve.newton_tol", 1e-10));
  nopt.max_iter = static_cast<int>(cfg.get_int("solve.max_iter", 50));

  const solver::RhsSpec rhs =
      solver::RhsSpec::proper_exp(beta, io::parse_field_spec(h_spec, model));
  const GridField u0 = io::parse_field_spec(u0_spec, model);

  const solver::SolverState st =
      solver::newton_solve(model, cone, tau, rhs, u0, nopt);
  const GridField res = solver::residual(model, cone, tau, rhs, st.u);

  io::OutputWriter out(c.out_dir);
  write_solution_outputs(out, model, st.u, &res);
  json j{{"model", io::json_of(model)},
         {"cone", io::json_of(cone)},
         {"rhs", json{{"beta", beta}, {"h", h_spec}}},
         {"state", io::json_of(st)}};
  out.write("state.json", j.dump(2) + "\n");
  out.write_manifest("solve", cfg.raw(),
                     json{{"tau", tau},
                          {"beta", beta},
                          {"newton_tol", nopt.tol},
                          {"seed", pick_seed(c, 0)}});

  std::cout << "solve: status=" << solver::to_string(st.status)
            << " tau=" << io::format_double(st.tau)
            << " iters=" << st.newton_iters
            << " residual=" << io::format_double(st.residual_norm)
            << " min_margin=" << io::format_double(st.min_margin) << "\n";
  switch (st.status) {
    case solver::SolveStatus::Solved: return kExitOk;
    case solver::SolveStatus::MaxIterations: return kExitStall;
    case solver::SolveStatus::DomainCollapse: return kExitAdmissibility;
  }
  return kExitFailedCheck;
}

// ---------------------------------------------------------------------------
// continuation: march tau from the solvable start to a target; optionally
// classify the attempt as a solvability probe.

int run_continuation(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);
  const CohomOneModel model = io::model_from_config(cfg);
  const ConeSpec cone = io::cone_from_config(cfg);

  const double target_tau = cfg.require_double("continuation.target_tau");
  const double beta = cfg.get_double("continuation.beta", 2.0);
  const std::string h_spec = cfg.get_string("continuation.h", "constant:1");
  const solver::ContinuationOptions copt =
      continuation_options(c, cfg, "continuation");
  const solver::RhsSpec target =
      solver::RhsSpec::proper_exp(beta, io::parse_field_spec(h_spec, model));

  io::OutputWriter out(c.out_dir);
  const json params{{"target_tau", target_tau},
                    {"beta", beta},
                    {"newton_tol", copt.newton.tol},
                    {"seed", pick_seed(c, 0)}};

  if (cfg.get_bool("continuation.probe", false)) {
    const solver::ProbeReport rep =
        solver::nonexistence_probe(model, cone, target_tau, target, copt);
    json j{{"model", io::json_of(model)},
           {"cone", io::json_of(cone)},
           {"probe", io::json_of(rep)}};
    out.write("probe.json", j.dump(2) + "\n");
    if (rep.final_state)
      write_solution_outputs(out, model, rep.final_state->u, nullptr);
    out.write_manifest("continuation", cfg.raw(), params);
    std::cout << "continuation: probe outcome="
              << solver::to_string(rep.outcome)
              << " tau_reached=" << io::format_double(rep.tau_reached) << "\n";
    switch (rep.outcome) {
      case solver::ProbeOutcome::Solved: return kExitOk;
      case solver::ProbeOutcome::Diverging: return kExitOk;
      case solver::ProbeOutcome::ObstructedFlat: return kExitAdmissibility;
      case solver::ProbeOutcome::Stalled: return kExitStall;
    }
    return kExitFailedCheck;
  }

  const solver::ContinuationResult cont =
      solver::continuation(model, cone, target, target_tau, copt);
  out.write("path.csv", states_to_csv(cont.states));
  if (!cont.states.empty()) {
    const solver::SolverState& last = cont.states.back();
    const solver::RhsSpec rhs_last = solver::RhsSpec::homotopy_blend(
        cont.delta, target_tau,
        GridField::constant(
            model.m,
            conelab::cones::f_eval(
                cone, conelab::cones::lambda_tau(model.background_eigs(),
                                                 cont.delta))),
        target, last.tau);
    const GridField res =
        solver::residual(model, cone, last.tau, rhs_last, last.u);
    write_solution_outputs(out, model, last.u, &res);
  }
  json j{{"model", io::json_of(model)},
         {"cone", io::json_of(cone)},
         {"continuation", io::json_of(cont)}};
  out.write("continuation.json", j.dump(2) + "\n");
  out.write_manifest("continuation", cfg.raw(), params);

  std::cout << "continuation: reached_target="
            << (cont.reached_target ? "true" : "false")
            << " tau_reached=" << io::format_double(cont.tau_reached)
            << " steps=" << cont.states.size() << "\n";
  if (!cont.reached_target)
    std::cout << "continuation: stall detail: " << cont.stall_detail << "\n";
  return cont.reached_target ? kExitOk : kExitStall;
}

// ---------------------------------------------------------------------------
// eigenvalue: vanishing-rate ladder for the generalized eigenvalue at tau.

int run_eigenvalue(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);
  const CohomOneModel model = io::model_from_config(cfg);
  const ConeSpec cone = io::cone_from_config(cfg);

  std::vector<double> schedule;
  if (cfg.has("eigenvalue.tau_schedule"))
    schedule = cfg.get_double_list("eigenvalue.tau_schedule", {});
  else
    schedule.push_back(cfg.require_double("eigenvalue.tau"));
  if (schedule.empty())
    throw io::ConfigError("eigenvalue.tau_schedule is empty",
                          cfg.line_of("eigenvalue.tau_schedule"));
  const std::vector<double> ladder = cfg.get_double_list(
      "eigenvalue.beta_ladder", {1.0, 0.5, 0.25, 0.1, 0.05});
  const solver::ContinuationOptions copt =
      continuation_options(c, cfg, "eigenvalue");

  // On a background whose shifted eigenvalues stay admissible, the extremal
  // metric is the background itself and the eigenvalue equals the defining
  // function of the shifted background eigenvalues; that prediction is
  // emitted alongside the computed value (nan when unavailable).
  const auto predicted = [&](double tau) {
    const conelab::cones::LambdaVec shifted =
        conelab::cones::lambda_tau(model.background_eigs(), tau);
    if (conelab::cones::membership(cone, shifted).region !=
        conelab::cones::Region::Interior)
      return std::numeric_limits<double>::quiet_NaN();
    return conelab::cones::f_eval(cone, shifted);
  };

  io::OutputWriter out(c.out_dir);
  std::string curve = "tau,mu,predicted,residual,margin\n";
  bool all_stabilized = true;
  json runs = json::array();
  const solver::EigenpairResult* last = nullptr;
  std::vector<solver::EigenpairResult> results;
  results.reserve(schedule.size());
  for (const double tau : schedule) {
    results.push_back(solver::eigenvalue_extract(model, cone, tau, ladder, copt));
    const solver::EigenpairResult& eig = results.back();
    curve += io::format_double(eig.tau) + "," + io::format_double(eig.mu) +
             "," + io::format_double(predicted(tau)) + "," +
             io::format_double(eig.final_state.residual_norm) + "," +
             io::format_double(eig.final_state.min_margin) + "\n";
    runs.push_back(io::json_of(eig));
    all_stabilized = all_stabilized && eig.stabilized;
    last = &eig;
    std::cout << "eigenvalue: tau=" << io::format_double(eig.tau)
              << " mu=" << io::format_double(eig.mu)
              << " stabilized=" << (eig.stabilized ? "true" : "false") << "\n";
  }
  out.write("curve.csv", curve);
  std::string lcsv = "beta,mu\n";
  for (const auto& [beta, mu] : last->ladder)
    lcsv += io::format_double(beta) + "," + io::format_double(mu) + "\n";
  out.write("ladder.csv", lcsv);
  out.write("eigenfunction.csv", io::grid_field_to_csv(model, "v", last->v));
  json j{{"model", io::json_of(model)},
         {"cone", io::json_of(cone)},
         {"runs", std::move(runs)}};
  out.write("eigenpair.json", j.dump(2) + "\n");
  out.write_manifest("eigenvalue", cfg.raw(),
                     json{{"tau_schedule", schedule},
                          {"beta_ladder", ladder},
                          {"newton_tol", copt.newton.tol},
                          {"seed", pick_seed(c, 0)}});
  return all_stabilized ? kExitOk : kExitNotStabilized;
}

// ---------------------------------------------------------------------------
// viscosity: regularized inclusion check of a candidate field, per side.

int run_viscosity(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);
  const CohomOneModel model = io::model_from_config(cfg);
  const ConeSpec cone = io::cone_from_config(cfg);

  const GridField u =
      io::parse_field_spec(cfg.require_string("viscosity.field"), model);
  const double tau = cfg.require_double("viscosity.tau");
  const double vtol = pick_tol(c, cfg.get_double("viscosity.tol", 1e-8));
  const std::vector<double> ladder =
      cfg.get_double_list("viscosity.ladder", {});
  const std::string side = cfg.get_string("viscosity.side", "both");
  if (side != "sub" && side != "super" && side != "both")
    throw io::ConfigError("viscosity.side must be sub, super or both",
                          cfg.line_of("viscosity.side"));

  io::OutputWriter out(c.out_dir);
  bool all_stabilized = true;
  json reports = json::object();
  const auto run_side = [&](viscosity::Side s, const std::string& name) {
    const viscosity::InclusionReport rep =
        viscosity::viscosity_inclusion_check(u, model, cone, tau, s, vtol,
                                             ladder);
    GridField margins(static_cast<size_t>(model.m));
    for (int i = 0; i < model.m; ++i)
      margins[i] = rep.point_margins[static_cast<size_t>(i)];
    out.write("margins_" + name + ".csv",
              io::grid_field_to_csv(model, "margin", margins,
                                    "side=" + name));
    reports[name] = io::json_of(rep);
    all_stabilized = all_stabilized && rep.stabilized;
    std::cout << "viscosity: side=" << name << " verdict="
              << (rep.verdict ? "included" : "not-included")
              << " margin=" << io::format_double(rep.margin) << " stabilized="
              << (rep.stabilized ? "true" : "false") << "\n";
  };
  if (side == "sub" || side == "both")
    run_side(viscosity::Side::Subsolution, "sub");
  if (side == "super" || side == "both")
    run_side(viscosity::Side::Supersolution, "super");

  json j{{"model", io::json_of(model)},
         {"cone", io::json_of(cone)},
         {"tau", tau},
         {"reports", std::move(reports)}};
  out.write("inclusion.json", j.dump(2) + "\n");
  out.write_manifest("viscosity", cfg.raw(),
                     json{{"tau", tau},
                          {"tol", vtol},
                          {"side", side},
                          {"seed", pick_seed(c, 0)}});
  return all_stabilized ? kExitOk : kExitNotStabilized;
}

// ---------------------------------------------------------------------------
// deformation: second-order expansion control for the local model family.

int run_deformation(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);

  const double alpha = cfg.require_double("deformation.alpha");
  const int n = static_cast<int>(cfg.get_int("deformation.n", 3));
  const double mu = cfg.get_double("deformation.mu", 1e-3 / alpha);
  const double nu = cfg.get_double("deformation.nu", 0.0);
  const double R = cfg.get_double("deformation.R", 0.5);
  const double R_A = cfg.get_double("deformation.R_A", 0.5 / alpha);
  const double tau = cfg.get_double("deformation.tau", 0.5);
  const int per_axis =
      static_cast<int>(cfg.get_int("deformation.per_axis", 5));

  deformation::Vec xhat(n);
  if (cfg.has("deformation.xhat")) {
    const std::vector<double> xs = cfg.get_double_list("deformation.xhat", {});
    if (static_cast<int>(xs.size()) != n)
      throw io::ConfigError("deformation.xhat needs " + std::to_string(n) +
                                " components",
                            cfg.line_of("deformation.xhat"));
    for (int d = 0; d < n; ++d) xhat[d] = xs[static_cast<size_t>(d)];
  } else {
    xhat.setZero();
    xhat[0] = std::sqrt(6.0 / alpha);
  }

  const deformation::DeformationParams params =
      deformation::DeformationParams::validated(n, alpha, mu, nu, R, R_A, tau,
                                                xhat);
  const deformation::Lattice grid =
      deformation::Lattice::ball(n, params.xhat, R_A, per_axis);
  const deformation::ExpansionReport rep =
      deformation::deformation_expansion_check(
          params, deformation::SmoothFn::zero(n), grid);

  io::OutputWriter out(c.out_dir);
  std::string csv = "point,remainder_ratio,delta_pointwise\n";
  for (size_t i = 0; i < rep.delta_pointwise.size(); ++i)
    csv += std::to_string(i) + "," +
           io::format_double(rep.remainder_ratio[i]) + "," +
           io::format_double(rep.delta_pointwise[i]) + "\n";
  out.write("expansion.csv", csv);
  json j{{"params", io::json_of(params)},
         {"grid_points", grid.pts.size()},
         {"report", io::json_of(rep)}};
  out.write("expansion.json", j.dump(2) + "\n");
  out.write_manifest("deformation", cfg.raw(),
                     json{{"alpha", alpha},
                          {"mu", mu},
                          {"nu", nu},
                          {"tau", tau},
                          {"seed", pick_seed(c, 0)}});

  std::cout << "deformation: delta=" << io::format_double(rep.delta)
            << " ratio_max=" << io::format_double(rep.ratio_max)
            << " points=" << rep.delta_pointwise.size() << "\n";
  return rep.delta > 0.0 ? kExitOk : kExitAdmissibility;
}

// ---------------------------------------------------------------------------
// diagnostics: trace-weight pinching and integral functionals of a field.

int run_diagnostics(const Common& c) {
  const io::IniConfig cfg = io::IniConfig::from_file(c.config_path);
  const CohomOneModel model = io::model_from_config(cfg);

  const GridField u =
      io::parse_field_spec(cfg.get_string("diagnostics.u", "zero"), model);
  double t = 1.0;
  if (cfg.has("diagnostics.t"))
    t = cfg.require_double("diagnostics.t");
  else if (cfg.has("diagnostics.tau"))
    t = diagnostics::t_from_tau(cfg.require_double("diagnostics.tau"),
                                model.n);

  const diagnostics::PinchingReport pinching =
      diagnostics::pinching_check(model, u, t);

  std::vector<diagnostics::FunctionalReport> functionals;
  functionals.push_back(diagnostics::y2t_quotient(model, u, t));
  functionals.push_back(diagnostics::sigma2_rayleigh(model, u));
  if (model.n == 3) functionals.push_back(diagnostics::f21_functional(model, u));

  io::OutputWriter out(c.out_dir);
  out.write("slack.csv", io::grid_field_to_csv(model, "slack",
                                               pinching.slack_field,
                                               "t=" + io::format_double(t)));
  std::vector<std::pair<std::string, const GridField*>> cols;
  cols.reserve(functionals.size());
  for (const auto& fr : functionals) cols.push_back({fr.name, &fr.integrand});
  out.write("integrands.csv", io::grid_fields_to_csv(model, cols));

  json flist = json::array();
  for (const auto& fr : functionals) flist.push_back(io::json_of(fr));
  json j{{"model", io::json_of(model)},
         {"t", t},
         {"pinching", io::json_of(pinching)},
         {"functionals", std::move(flist)}};
  out.write("diagnostics.json", j.dump(2) + "\n");
  out.write_manifest("diagnostics", cfg.raw(),
                     json{{"t", t}, {"seed", pick_seed(c, 0)}});

  std::cout << "diagnostics: pinching_slack=" << io::format_double(pinching.slack)
            << " min_cone_margin=" << io::format_double(pinching.min_cone_margin)
            << "\n";
  for (const auto& fr : functionals)
    std::cout << "diagnostics: " << fr.name << "="
              << io::format_double(fr.value) << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "run configuration (INI)")
      ->required();
  sub->add_option("--out", c.out_dir, "output directory (default: out)");
  sub->add_option("--seed", c.seed, "override the sampling seed");
  sub->add_option("--tol", c.tol, "override the primary tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "conelab: cone algebra, conformal eigenvalue problems, viscosity "
      "inclusion checks and deformation expansions on cohomogeneity-one "
      "models"};
  app.require_subcommand(1);

  Common c;
  int rc = kExitOk;
  const struct {
    const char* name;
    const char* help;
    int (*run)(const Common&);
  } commands[] = {
      {"check-cones", "sampled structural checks of the cone algebra",
       run_check_cones},
      {"solve", "Newton solve at fixed tau", run_solve},
      {"continuation", "tau-march from the solvable start (or probe)",
       run_continuation},
      {"eigenvalue", "generalized eigenvalue via the vanishing-rate ladder",
       run_eigenvalue},
      {"viscosity", "regularized sub/supersolution inclusion check",
       run_viscosity},
      {"deformation", "second-order expansion control for local deformations",
       run_deformation},
      {"diagnostics", "trace-weight pinching and integral functionals",
       run_diagnostics},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, c);
    sub->callback([&rc, &c, run = cmd.run] { rc = run(c); });
  }

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? kExitOk : kExitConfig;
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "conelab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const solver::AdmissibilityError& e) {
    std::cerr << "conelab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const solver::DomainBreachError& e) {
    std::cerr << "conelab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const solver::ContinuationStallError& e) {
    std::cerr << "conelab: stall: " << e.what() << "\n";
    return kExitStall;
  } catch (const diagnostics::PreconditionError& e) {
    std::cerr << "conelab: precondition: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const json::exception& e) {
    std::cerr << "conelab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "conelab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "conelab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const std::exception& e) {
    std::cerr << "conelab: error: " << e.what() << "\n";
    return kExitFailedCheck;
  }
  return rc;
}
