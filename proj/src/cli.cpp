#include "adtdesign/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>

#include "adtdesign/criteria.hpp"
#include "adtdesign/destructive.hpp"
#include "adtdesign/error.hpp"
#include "adtdesign/failure_time.hpp"
#include "adtdesign/io.hpp"
#include "adtdesign/scenario.hpp"
#include "adtdesign/sweeps.hpp"
#include "adtdesign/time_plan.hpp"

namespace adt {

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::string product_out;
  std::string exact_out;
  std::string design;
  std::string reference;
  std::string variable;
  double alpha = 0.5;
  std::optional<double> t_star;
  std::optional<int> J;
  std::optional<int> k;
  std::optional<int> n;
  std::optional<double> lo;
  std::optional<double> hi;
  OptimizerConfig cfg;
};

void kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << "," << value << "\n";
}

void kv(std::ostream& out, const std::string& key, double value) {
  kv(out, key, format_number(value));
}

void report_nominals(std::ostream& out, const DegradationModel& model) {
  const Vector delta = eval_delta(model);
  for (Eigen::Index s = 0; s < delta.size(); ++s) {
    kv(out, "delta_" + std::to_string(s + 1), delta[s]);
  }
  try {
    kv(out, "t_median", design_target_time(0.5, model));
  } catch (const Error& e) {
    kv(out, "t_median", std::string("nan"));
  }
  try {
    const VarianceFunction var(model);
    kv(out, "sigma_0", var.sd(0.0));
    kv(out, "sigma_1", var.sd(1.0));
    kv(out, "sigma_ratio", var.endpoint_ratio());
  } catch (const Error&) {
  }
}

GridSpec resolve_grid(const Scenario& s, const Options& o) {
  GridSpec g = s.grid.value_or(GridSpec{});
  if (o.J) g.J = *o.J;
  if (o.k) g.k = *o.k;
  g.validate(s.model.p2());
  return g;
}

double resolve_t_star(const Scenario& s, const Options& o) {
  return o.t_star ? *o.t_star : design_target_time(0.5, s.model);
}

std::string resolve_out(const Scenario& s, const std::string& flag) {
  if (!flag.empty()) return flag;
  return s.output ? s.output->path : std::string();
}

bool json_output(const Scenario& s) {
  return s.output && s.output->format == OutputFormat::Json;
}

std::string design_json(const ApproximateDesign& d, const std::vector<double>& sens,
                        const std::vector<bool>& sat) {
  nlohmann::json j;
  j["t"] = std::vector<double>(d.points().begin(), d.points().end());
  j["weight"] = std::vector<double>(d.weights().begin(), d.weights().end());
  j["sensitivity"] = sens;
  j["saturated"] = sat;
  return j.dump(2) + "\n";
}

void emit_design(std::ostream& out, const Scenario& s, const std::string& path,
                 const ApproximateDesign& d, const std::vector<double>& sens,
                 const std::vector<bool>& sat) {
  const std::string text = json_output(s) ? design_json(d, sens, sat) : design_csv(d, sens, sat);
  if (path.empty()) {
    out << "\n" << text;
  } else {
    write_file_atomic(path, text);
    kv(out, "written", path);
  }
}

std::vector<bool> saturation_flags(const OptimalityCertificate& c, std::size_t n) {
  std::vector<bool> sat(n, false);
  for (auto j : c.saturated_set) sat[j] = true;
  return sat;
}

void report_certificate(std::ostream& out, const OptimalityCertificate& c) {
  kv(out, "certified", c.certified ? "true" : "false");
  kv(out, "kkt_max_violation", c.max_violation);
  kv(out, "kkt_threshold", c.threshold);
  kv(out, "saturated_points", static_cast<double>(c.saturated_set.size()));
  kv(out, "interior_points", static_cast<double>(c.interior_set.size()));
  kv(out, "pattern", c.pattern());
}

int cmd_quantile(const Scenario& s, const Options& o, std::ostream& out) {
  const QuantileResult q = quantile(o.alpha, s.model);
  kv(out, "alpha", o.alpha);
  kv(out, "exists", q.exists ? "true" : "false");
  kv(out, "t_alpha", q.exists ? format_number(q.t_alpha) : "nan");
  kv(out, "bracket_lower", q.lower);
  kv(out, "bracket_upper", q.upper);
  return kExitOk;
}

int cmd_optimize_time(const Scenario& s, const Options& o, std::ostream& out) {
  const GridSpec grid = resolve_grid(s, o);
  const double t_star = resolve_t_star(s, o);
  const TimePlan plan =
      optimize_time_plan(grid, s.model.time_basis(), s.model.sigma_eps(), t_star, o.cfg);
  const CriterionReport rep = c_criterion_time(plan.design, s.model, t_star);
  kv(out, "grid_J", grid.J);
  kv(out, "grid_k", grid.k);
  kv(out, "t_star", t_star);
  kv(out, "iterations", plan.iterations);
  kv(out, "criterion_total", rep.criterion_total);
  kv(out, "criterion_fixed", rep.criterion_fixed);
  kv(out, "criterion_random", rep.criterion_random);
  report_certificate(out, plan.certificate);

  const ApproximateDesign support = plan.design.trimmed();
  for (std::size_t j = 0; j < support.size(); ++j) {
    kv(out, "support", format_number(support.points()[j]) + "," +
                           format_number(support.weights()[j]));
  }
  if (!o.exact_out.empty()) {
    const ApproximateDesign exact =
        round_to_exact(plan.design, grid.k, s.model.time_basis(), s.model.sigma_eps(), t_star);
    kv(out, "exact_efficiency", efficiency(exact, plan.design, s.model, t_star));
    const OptimalityCertificate ce =
        kkt_check(exact, grid, s.model.time_basis(), s.model.sigma_eps(), t_star, o.cfg.tol);
    std::vector<double> sens;
    for (double t : exact.points()) {
      sens.push_back(ce.sensitivity[static_cast<std::size_t>(std::lround(t * grid.J))]);
    }
    write_file_atomic(o.exact_out, design_csv(exact, sens, std::vector<bool>(exact.size(), true)));
    kv(out, "written", o.exact_out);
  }
  emit_design(out, s, resolve_out(s, o.out), plan.design, plan.certificate.sensitivity,
              saturation_flags(plan.certificate, plan.design.size()));
  return plan.certificate.certified ? kExitOk : kExitNotCertified;
}

int cmd_optimize_destructive(const Scenario& s, const Options& o, std::ostream& out) {
  const double t_star = resolve_t_star(s, o);
  const ApproximateDesign xi = elfving_stress_design(s.model);
  kv(out, "t_star", t_star);
  kv(out, "w_star", xi.weights()[1]);
  // Affects estimation only; the design computations below are unaffected.
  kv(out, "note", "single measurement per unit: sigma1 and sigma_eps are not separately "
                  "identifiable without further constraints");

  ApproximateDesign tau({0.0, 1.0}, {0.5, 0.5});
  std::vector<double> sens;
  int status = kExitOk;
  if (s.model.time_basis().is_affine() && t_star > 1.0) {
    tau = elfving_time_design(s.model, t_star);
    kv(out, "pi_star", tau.weights()[1]);
    const Matrix mi = spd_inverse(info_time_weighted(tau, s.model));
    const Vector c = s.model.time_basis()(t_star);
    const double crit = c.dot(mi * c);
    for (double t : tau.points()) {
      const double d = c.dot(mi * weighted_f2(t, s.model));
      sens.push_back(d * d / crit);
    }
  } else {
    const int J = o.J.value_or(s.grid ? s.grid->J : 200);
    const TimePlan plan = destructive_time_plan_numeric(s.model, t_star, J, o.cfg);
    report_certificate(out, plan.certificate);
    tau = plan.design.trimmed();
    for (std::size_t j = 0; j < plan.design.size(); ++j) {
      if (plan.design.weights()[j] > 0.0) sens.push_back(plan.certificate.sensitivity[j]);
    }
    if (!plan.certificate.certified) status = kExitNotCertified;
  }

  const ProductDesign zeta = product_design(xi, tau);
  for (const auto& p : zeta.combined) {
    kv(out, "combined", format_number(p.x) + "," + format_number(p.t) + "," +
                            format_number(p.weight));
  }
  kv(out, "avar_single_obs", avar_single_obs(zeta.combined, s.model, t_star));
  if (!o.product_out.empty()) {
    std::string csv = "x,t,weight\n";
    for (const auto& p : zeta.combined) {
      csv += format_number(p.x) + "," + format_number(p.t) + "," + format_number(p.weight) + "\n";
    }
    write_file_atomic(o.product_out, csv);
    kv(out, "written", o.product_out);
  }
  emit_design(out, s, resolve_out(s, o.out), tau, sens, std::vector<bool>(tau.size(), false));
  return status;
}

ApproximateDesign optimal_reference(const Scenario& s, const Options& o, double t_star) {
  if (!o.reference.empty()) return load_design_csv(o.reference);
  const GridSpec grid = resolve_grid(s, o);
  return optimize_time_plan(grid, s.model.time_basis(), s.model.sigma_eps(), t_star, o.cfg)
      .design;
}

int cmd_efficiency(const Scenario& s, const Options& o, std::ostream& out) {
  const double t_star = resolve_t_star(s, o);
  const ApproximateDesign cand = load_design_csv(o.design);
  const ApproximateDesign ref = optimal_reference(s, o, t_star);
  const CriterionReport rc = c_criterion_time(cand, s.model, t_star);
  const CriterionReport rr = c_criterion_time(ref, s.model, t_star);
  kv(out, "t_star", t_star);
  kv(out, "criterion_candidate", rc.criterion_total);
  kv(out, "criterion_reference", rr.criterion_total);
  kv(out, "efficiency", rr.criterion_total / rc.criterion_total);
  return kExitOk;
}

int cmd_check(const Scenario& s, const Options& o, std::ostream& out) {
  const double t_star = resolve_t_star(s, o);
  const GridSpec grid = resolve_grid(s, o);
  const ApproximateDesign cand = load_design_csv(o.design);
  const OptimalityCertificate cert =
      kkt_check(cand, grid, s.model.time_basis(), s.model.sigma_eps(), t_star, o.cfg.tol);
  const ApproximateDesign ref = optimal_reference(s, o, t_star);
  kv(out, "t_star", t_star);
  report_certificate(out, cert);
  kv(out, "efficiency", efficiency(cand, ref, s.model, t_star));
  return kExitOk;
}

int cmd_sweep(const Scenario& s, const Options& o, std::ostream& out) {
  SweepSpec spec = s.sweep.value_or(SweepSpec::defaults(SweepVariable::TMedian));
  if (!o.variable.empty()) {
    if (o.variable == "t_median") {
      spec = SweepSpec::defaults(SweepVariable::TMedian);
    } else if (o.variable == "sigma_ratio") {
      spec = SweepSpec::defaults(SweepVariable::SigmaRatio);
    } else {
      throw ConfigurationError("--variable must be t_median or sigma_ratio");
    }
  }
  if (o.lo) spec.lo = *o.lo;
  if (o.hi) spec.hi = *o.hi;
  if (o.n) spec.n_points = *o.n;
  const SweepResult r = sweep_efficiency(spec, s.model);
  kv(out, "variable", to_string(r.variable));
  kv(out, "nominal_t_median", r.nominal_t_median);
  kv(out, "nominal_sigma_ratio", r.nominal_ratio);
  kv(out, "rows", static_cast<double>(r.rows.size()));
  const auto unreachable = std::count_if(r.rows.begin(), r.rows.end(),
                                         [](const SweepRow& row) { return !row.ratio_reachable; });
  const auto skipped =
      std::count_if(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return row.skipped; });
  kv(out, "rows_skipped", static_cast<double>(skipped));
  kv(out, "rows_ratio_unreachable", static_cast<double>(unreachable));
  const std::string path = resolve_out(s, o.out);
  const std::string csv = sweep_csv(r);
  if (path.empty()) {
    out << "\n" << csv;
  } else {
    write_file_atomic(path, csv);
    kv(out, "written", path);
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal time plans for accelerated degradation tests", "adtdesign"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario file (JSON)")->required();
    sub->add_option("--t-star", o.t_star, "Extrapolation time (default: median failure time)");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--J", o.J, "Grid subintervals");
    sub->add_option("--k", o.k, "Measurements per unit (weight cap 1/k)");
    sub->add_option("--max-iters", o.cfg.max_iters, "Optimizer iteration limit");
    sub->add_option("--tol", o.cfg.tol, "KKT tolerance");
    sub->add_option("--damping", o.cfg.damping, "Multiplicative exponent in (0,1]");
  };

  auto* q = app.add_subcommand("quantile", "Quantile of the failure-time distribution");
  add_common(q);
  q->add_option("--alpha", o.alpha, "Probability in (0,1)");

  auto* ot = app.add_subcommand("optimize-time", "Capped c-optimal repeated-measures time plan");
  add_common(ot);
  add_grid(ot);
  ot->add_option("--out", o.out, "Design CSV output");
  ot->add_option("--exact-out", o.exact_out, "Rounded exact k-point plan CSV output");

  auto* od = app.add_subcommand("optimize-destructive", "Single-measurement (destructive) design");
  add_common(od);
  od->add_option("--J", o.J, "Grid subintervals for non-affine time bases");
  od->add_option("--out", o.out, "Time design CSV output");
  od->add_option("--product-out", o.product_out, "Product design CSV output (x,t,weight)");

  auto* ef = app.add_subcommand("efficiency", "Efficiency of a time plan");
  add_common(ef);
  add_grid(ef);
  ef->add_option("--design", o.design, "Candidate design CSV")->required();
  ef->add_option("--reference", o.reference, "Reference design CSV (default: optimized plan)");

  auto* ck = app.add_subcommand("check", "Equivalence-theorem check and efficiency of a plan");
  add_common(ck);
  add_grid(ck);
  ck->add_option("--design", o.design, "Design CSV on the grid")->required();
  ck->add_option("--reference", o.reference, "Reference design CSV (default: optimized plan)");

  auto* sw = app.add_subcommand("sweep", "Sensitivity sweep of optimal weights and efficiencies");
  sw->add_option("--scenario", o.scenario, "Scenario file (JSON)")->required();
  sw->add_option("--variable", o.variable, "t_median | sigma_ratio");
  sw->add_option("--lo", o.lo, "Lower end of the sweep");
  sw->add_option("--hi", o.hi, "Upper end of the sweep");
  sw->add_option("--n", o.n, "Number of sweep points");
  sw->add_option("--out", o.out, "Sweep CSV output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const Scenario s = load_scenario(o.scenario);
    CLI::App* sub = app.get_subcommands().front();
    kv(out, "command", sub->get_name());
    report_nominals(out, s.model);
    int code = kExitOk;
    if (sub == q) {
      code = cmd_quantile(s, o, out);
    } else if (sub == ot) {
      code = cmd_optimize_time(s, o, out);
    } else if (sub == od) {
      code = cmd_optimize_destructive(s, o, out);
    } else if (sub == ef) {
      code = cmd_efficiency(s, o, out);
    } else if (sub == ck) {
      code = cmd_check(s, o, out);
    } else if (sub == sw) {
      code = cmd_sweep(s, o, out);
    }
    const auto ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    err << "elapsed_ms," << ms << "\n";
    return code;
  } catch (const ScenarioError& e) {
    for (const auto& msg : e.errors()) err << "error: " << msg << "\n";
    return kExitValidation;
  } catch (const SingularDesignError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const OutOfRegimeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NoPositiveMedianError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace adt
