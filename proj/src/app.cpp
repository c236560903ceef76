#include "warpdirac/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "warpdirac/admissibility.hpp"
#include "warpdirac/estimate_harness.hpp"
#include "warpdirac/evolution.hpp"
#include "warpdirac/parallel.hpp"
#include "warpdirac/report.hpp"

namespace warpdirac {

namespace {

int worker_count(const RunConfig& c) { return c.threads > 0 ? c.threads : default_thread_count(); }

std::string mu_label(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", mu);
  return buf;
}

Json profile_json(const RunConfig& c) {
  Json j;
  j["family"] = to_string(c.profile.family);
  j["n"] = c.n;
  if (c.profile.family == ProfileFamily::AsymptoticallyFlat) {
    j["epsilon"] = c.profile.epsilon;
    j["alpha"] = c.profile.alpha;
    j["beta"] = c.profile.beta;
  }
  if (c.profile.family == ProfileFamily::Polynomial) j["degree"] = c.profile.degree;
  return j;
}

Json grid_json(const RadialGrid& g) { return Json{{"r_max", g.r_max}, {"N", g.N}}; }

Json report_json(const AdmissibilityReport& r) {
  Json j;
  j["mu"] = r.mu;
  j["delta_plus"] = r.delta_plus;
  j["delta_minus"] = r.delta_minus;
  j["delta_phi_mu"] = r.delta_phi_mu;
  j["delta_phi_neg_mu"] = r.delta_phi_neg_mu;
  j["sup_4r2V"] = r.sup_4r2V;
  j["limit_at_infinity_ok"] = r.limit_at_infinity_ok;
  j["admissible"] = r.admissible;
  j["witness_r"] = r.witness_r ? Json(*r.witness_r) : Json(nullptr);
  j["reason"] = r.reason;
  return j;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

SpinorState initial_state(const RunConfig& c, const RadialGrid& grid) {
  return gaussian_state(grid, c.initial.r0, c.initial.width, c.initial.amplitude, c.initial.component);
}

double resolve_t_end(const RunConfig& c, const SpinorState& data) {
  const double limit = causal_limit(data);
  const double t_end = c.t_end_causal ? limit : c.t_end;
  if (!(t_end > 0.0)) fail(ErrorKind::Policy, "causal window is empty for this grid and initial data");
  if (t_end > limit + 1e-12) {
    fail(ErrorKind::Policy, "time window t_end = " + format_double(t_end) + " exceeds the causal limit r_max - R_support - 2 = " +
                                format_double(limit));
  }
  return t_end;
}

std::vector<double> observed_orders(const std::vector<int>& sizes, const std::vector<double>& res) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    out.push_back(std::log(res[k] / res[k + 1]) / std::log(static_cast<double>(sizes[k + 1]) / sizes[k]));
  }
  return out;
}

double min_or_inf(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(v.begin(), v.end());
}

RunOutcome check_metric(const RunConfig& c) {
  RunOutcome out;
  const auto modes = selected_modes(c);
  std::vector<AdmissibilityReport> reports(modes.size());
  parallel_for(static_cast<int>(modes.size()), worker_count(c),
               [&](int i) { reports[i] = check_admissible(c.profile, modes[i].mu(), c.scan); });
  Json j;
  j["command"] = "check-metric";
  j["profile"] = profile_json(c);
  j["c_phi"] = c_phi(c.profile, c.scan);
  bool all = true;
  Json list = Json::array();
  for (const auto& r : reports) {
    list.push_back(report_json(r));
    all = all && r.admissible;
  }
  j["reports"] = list;
  if (c.profile.has_phi1() && !modes.empty()) {
    double mu0 = std::abs(modes.front().mu());
    for (const auto& m : modes) mu0 = std::min(mu0, std::abs(m.mu()));
    const ProfileConstants k = profile_constants(c.profile, c.scan);
    const A2Verdict v = check_A2(k, mu0);
    Json a2;
    a2["A_phi"] = k.A_phi;
    a2["B_phi"] = k.B_phi;
    a2["mu0"] = mu0;
    a2["threshold"] = v.threshold;
    a2["achieved"] = v.achieved;
    a2["pass"] = v.pass;
    if (v.pass) a2["delta_lower_bound"] = deltalemma_lower_bound(k, mu0);
    j["smallness_condition"] = a2;
  }
  j["admissible"] = all;
  out.exit_code = all ? kExitPass : kExitNonAdmissible;
  out.message = all ? "metric admissible for all selected modes" : "metric is not admissible";
  out.artifacts["check_metric.json"] = to_json_text(j);
  return out;
}

RunOutcome spectrum(const RunConfig& c) {
  RunOutcome out;
  double mu_max = c.mu_max;
  if (c.selection == ModeSelection::Band) mu_max = lp_band(c.n, c.band_j).b();
  if (c.selection == ModeSelection::MuList) {
    mu_max = 0.0;
    for (int tm : c.two_mu_list) mu_max = std::max(mu_max, std::abs(tm) / 2.0);
  }
  const MultiplicityTable* table = c.multiplicities ? &*c.multiplicities : nullptr;
  CsvTable csv({"mu", "multiplicity", "degree_plus", "degree_minus", "band_j"});
  bool ok = true;
  for (const ModeIndex& m : sphere_spectrum(c.n, mu_max, table)) {
    ok = ok && laplace_eigenvalue_check(m, SpinorComponent::Plus).holds() &&
         laplace_eigenvalue_check(m, SpinorComponent::Minus).holds();
    csv.add_row({mu_label(m.mu()), m.multiplicity ? std::to_string(*m.multiplicity) : "",
                 std::to_string(*m.degree_plus), std::to_string(*m.degree_minus), std::to_string(band_index(m))});
  }
  out.artifacts["spectrum.csv"] = csv.text();
  out.exit_code = ok ? kExitPass : kExitContract;
  out.message = ok ? "spectrum written" : "degree/eigenvalue identity failed";
  return out;
}

RunOutcome validate(const RunConfig& c) {
  RunOutcome out;
  std::vector<int> sizes = c.validation.sizes;
  if (sizes.empty()) {
    for (int d : {8, 4, 2, 1}) {
      if (c.grid.N / d >= 16) sizes.push_back(c.grid.N / d);
    }
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  const double min_order = c.validation.min_order;
  bool pass = true;
  Json j;
  j["command"] = "validate";
  j["profile"] = profile_json(c);
  j["grid"] = grid_json(c.grid);
  j["sizes"] = sizes;

  Json admissibility = Json::array();
  bool admissible = true;
  for (double mu : c.validation.mu) {
    const AdmissibilityReport r = check_admissible(c.profile, mu, c.scan);
    admissible = admissible && r.admissible;
    admissibility.push_back(report_json(r));
  }
  j["admissibility"] = admissibility;

  struct Case {
    double mu;
    double m;
  };
  std::vector<Case> cases;
  for (double mu : c.validation.mu) {
    for (double m : c.validation.masses) cases.push_back({mu, m});
  }
  std::vector<Json> square(cases.size()), factor(cases.size());
  std::vector<char> case_ok(cases.size(), 1);
  parallel_for(static_cast<int>(cases.size()), worker_count(c), [&](int i) {
    const Case cs = cases[i];
    std::vector<double> res, rm, rp;
    for (int N : sizes) {
      const RadialGrid g = make_grid(c.grid.r_max, N);
      const auto d = assemble_dirac(c.profile, cs.mu, cs.m, g);
      const auto km = assemble_kg(c.profile, cs.mu, cs.m, -1, g);
      const auto kp = assemble_kg(c.profile, cs.mu, cs.m, +1, g);
      res.push_back(verify_square(d, km, kp));
      const FactorizationResiduals f = factorization_check(c.profile, cs.mu, cs.m, g);
      rm.push_back(f.res_minus);
      rp.push_back(f.res_plus);
    }
    const auto o = observed_orders(sizes, res);
    const auto om = observed_orders(sizes, rm);
    const auto op = observed_orders(sizes, rp);
    const bool sq_ok = min_or_inf(o) >= min_order;
    const bool fa_ok = min_or_inf(om) >= min_order && min_or_inf(op) >= min_order;
    case_ok[i] = sq_ok && fa_ok;
    square[i] = Json{{"mu", cs.mu}, {"m", cs.m}, {"residuals", res}, {"orders", o}, {"pass", sq_ok}};
    factor[i] = Json{{"mu", cs.mu},           {"m", cs.m},           {"res_minus", rm},
                     {"res_plus", rp},        {"orders_minus", om},  {"orders_plus", op},
                     {"pass", fa_ok}};
  });
  j["square"] = square;
  j["factorization"] = factor;
  for (char ok : case_ok) pass = pass && ok;

  Json herm = Json::array();
  for (double mu : c.validation.mu) {
    const double m = c.validation.masses.empty() ? c.m : c.validation.masses.back();
    const double dd = assemble_dirac(c.profile, mu, m, c.grid).hermiticity_defect();
    const double dm = assemble_kg(c.profile, mu, m, -1, c.grid).hermiticity_defect();
    const double dp = assemble_kg(c.profile, mu, m, +1, c.grid).hermiticity_defect();
    const bool ok = std::max({dd, dm, dp}) <= 1e-13;
    pass = pass && ok;
    herm.push_back(Json{{"mu", mu}, {"dirac", dd}, {"kg_minus", dm}, {"kg_plus", dp}, {"pass", ok}});
  }
  j["hermiticity"] = herm;

  Json ne = Json::array();
  for (double s : {0.0, 0.5, 1.0}) {
    const NormEquivalenceResult r = norm_equivalence_check(c.profile, s, c.validation.trials, c.seed, c.grid);
    pass = pass && r.within_bound();
    ne.push_back(Json{{"s", s},
                      {"worst_ratio", r.worst_ratio},
                      {"worst_forward", r.worst_forward},
                      {"worst_inverse", r.worst_inverse},
                      {"bound", r.bound},
                      {"c_phi", r.c_phi},
                      {"pass", r.within_bound()}});
  }
  j["norm_equivalence"] = ne;
  j["seed"] = c.seed;
  j["pass"] = pass;
  j["admissible"] = admissible;
  out.artifacts["validate.json"] = to_json_text(j);
  if (!admissible) {
    out.exit_code = kExitNonAdmissible;
    out.message = "metric is not admissible for the validation modes";
  } else {
    out.exit_code = pass ? kExitPass : kExitContract;
    out.message = pass ? "all validation checks passed" : "validation checks failed";
  }
  return out;
}

RunOutcome evolve_workflow(const RunConfig& c) {
  RunOutcome out;
  const SpinorState data = initial_state(c, c.grid);
  const double t_end = resolve_t_end(c, data);
  const std::vector<double> times = uniform_times(0.0, t_end, c.time_samples);
  const auto modes = selected_modes(c);
  std::vector<Json> meta(modes.size());
  std::vector<std::string> csvs(modes.size());
  std::vector<char> ok(modes.size(), 1);
  parallel_for(static_cast<int>(modes.size()), worker_count(c), [&](int i) {
    const double mu = modes[i].mu();
    const DiscreteRadialOperator dirac = assemble_dirac(c.profile, mu, c.m, c.grid);
    const Propagator prop(dirac);
    const SpinorTrajectory traj = evolve(prop, data, times);
    const SpinorState back = prop.apply(traj.states.back(), -t_end);
    const double roundtrip = (back - data).norm() / data.norm();
    const double drift = traj.max_norm_drift();
    Json m;
    m["mu"] = mu;
    m["norm_drift"] = drift;
    m["roundtrip_error"] = roundtrip;
    m["method"] = prop.method() == Propagator::Method::Spectral ? "spectral" : "crank_nicolson";
    if (c.profile.family == ProfileFamily::Flat) {
      const SpinorState exact = flat_exact_solution(c.profile, mu, c.m, data, t_end);
      m["exact_relative_error"] = (traj.states.back() - exact).norm() / exact.norm();
    }
    const DiscreteRadialOperator km = assemble_kg(c.profile, mu, c.m, -1, c.grid);
    const DiscreteRadialOperator kp = assemble_kg(c.profile, mu, c.m, +1, c.grid);
    m["kg_residual"] = kg_crosscheck(traj, km, kp);
    const bool good = drift <= 1e-10 && roundtrip <= 1e-9;
    ok[i] = good;
    m["pass"] = good;
    m["file"] = "trajectory_mu_" + mu_label(mu) + ".csv";
    meta[i] = m;

    CsvTable csv({"t", "r", "re_v_plus", "im_v_plus", "re_v_minus", "im_v_minus"});
    for (std::size_t k = 0; k < times.size(); ++k) {
      const SpinorState& s = traj.states[k];
      for (int r = 0; r < c.grid.N; ++r) {
        csv.add_row({format_double(times[k]), format_double(c.grid.r(r)), format_double(s.plus[r].real()),
                     format_double(s.plus[r].imag()), format_double(s.minus[r].real()),
                     format_double(s.minus[r].imag())});
      }
    }
    csvs[i] = csv.text();
  });
  Json j;
  j["command"] = "evolve";
  j["profile"] = profile_json(c);
  j["grid"] = grid_json(c.grid);
  j["m"] = c.m;
  j["times"] = times;
  j["causal_limit"] = causal_limit(data);
  j["initial_data"] = Json{{"r0", c.initial.r0},
                           {"width", c.initial.width},
                           {"amplitude", c.initial.amplitude},
                           {"component", c.initial.component == SpinorComponent::Plus ? "plus" : "minus"}};
  j["modes"] = meta;
  bool all = true;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    all = all && ok[i];
    out.artifacts[meta[i]["file"].get<std::string>()] = csvs[i];
  }
  j["pass"] = all;
  out.artifacts["evolve.json"] = to_json_text(j);
  out.exit_code = all ? kExitPass : kExitContract;
  out.message = all ? "evolution complete" : "unitarity or reversibility contract failed";
  return out;
}

RunOutcome strichartz_scan(const RunConfig& c) {
  RunOutcome out;
  const SpinorState data = initial_state(c, c.grid);
  const double t_end = resolve_t_end(c, data);
  if (c.teo2_a && c.teo2_b) {
    for (const ExponentTriple& t : c.triples) teo2_exponent_condition(t, *c.teo2_a, *c.teo2_b, c.n);
  }
  const auto modes = selected_modes(c);
  std::vector<double> mus;
  for (const auto& m : modes) mus.push_back(m.mu());

  ScanSettings settings;
  settings.grid = c.grid;
  settings.epsilon = c.epsilon;
  settings.time_samples = c.time_samples;
  settings.t_end = t_end;
  settings.threads = worker_count(c);
  settings.scan = c.scan;

  Json j;
  j["command"] = "strichartz-scan";
  j["profile"] = profile_json(c);
  j["grid"] = grid_json(c.grid);
  j["m"] = c.m;
  j["t_end"] = t_end;
  j["epsilon"] = c.epsilon;
  Json scans = Json::array();
  bool all = true;
  for (std::size_t k = 0; k < c.triples.size(); ++k) {
    const ExponentTriple& t = c.triples[k];
    const NormScanResult r = mu_scan(c.profile, t, c.m, mus, data, settings);
    Json s;
    s["p"] = t.p;
    s["q"] = t.q;
    s["s"] = t.s();
    s["slope_strichartz"] = optional_json(r.slope_strichartz);
    s["slope_smoothing"] = optional_json(r.slope_smoothing);
    s["strichartz_gate"] = r.strichartz_gate;
    s["smoothing_gate"] = r.smoothing_gate;
    s["pass"] = r.passes();
    all = all && r.passes();
    Json modes_json = Json::array();
    CsvTable csv({"mu", "ratio_strichartz", "ratio_smoothing"});
    for (const ModeScanEntry& e : r.modes) {
      modes_json.push_back(Json{{"mu", e.mu},
                                {"strichartz_norm", e.strichartz_norm},
                                {"h_half_norm", e.h_half_norm},
                                {"smoothing_norm", e.smoothing_norm},
                                {"ratio_strichartz", e.ratio_strichartz},
                                {"ratio_smoothing", e.ratio_smoothing},
                                {"delta_plus", e.delta_plus},
                                {"delta_minus", e.delta_minus},
                                {"norm_drift", e.norm_drift}});
      csv.add_row({mu_label(e.mu), format_double(e.ratio_strichartz), format_double(e.ratio_smoothing)});
    }
    s["modes"] = modes_json;
    const std::string name =
        c.triples.size() == 1 ? "strichartz_scan.csv" : "strichartz_scan_" + std::to_string(k) + ".csv";
    s["file"] = name;
    out.artifacts[name] = csv.text();
    scans.push_back(s);
  }
  j["scans"] = scans;

  if (c.teo2_a && c.teo2_b) {
    Json teo = Json::array();
    for (const ExponentTriple& t : c.triples) {
      std::vector<std::pair<ModeIndex, SpinorState>> md;
      for (const ModeIndex& m : modes) {
        const double coeff = std::pow(std::abs(m.mu()), -*c.teo2_b - 1.0);
        md.emplace_back(m, std::complex<double>(coeff, 0.0) * data);
      }
      const Teo2Result r = teo2_surrogate(c.profile, t, *c.teo2_a, *c.teo2_b, md, settings);
      teo.push_back(Json{{"p", t.p},
                         {"q", t.q},
                         {"a", *c.teo2_a},
                         {"b", *c.teo2_b},
                         {"exponent_condition", r.exponent_condition},
                         {"lhs_bound", r.lhs_bound},
                         {"rhs", r.rhs},
                         {"ratio", r.ratio()}});
    }
    j["aggregate"] = teo;
  }
  j["pass"] = all;
  out.artifacts["strichartz_scan.json"] = to_json_text(j);
  out.exit_code = all ? kExitPass : kExitContract;
  out.message = all ? "growth gates passed" : "growth gate exceeded";
  return out;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::CheckMetric: return "check-metric";
    case Command::Spectrum: return "spectrum";
    case Command::Validate: return "validate";
    case Command::Evolve: return "evolve";
    case Command::StrichartzScan: return "strichartz-scan";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::CheckMetric, Command::Spectrum, Command::Validate, Command::Evolve,
                    Command::StrichartzScan}) {
    if (to_string(c) == name) return c;
  }
  fail(ErrorKind::Configuration, "unknown command '" + name + "'");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Contract:
    case ErrorKind::Hypothesis:
      return kExitContract;
    case ErrorKind::NonAdmissible:
      return kExitNonAdmissible;
    case ErrorKind::Configuration:
    case ErrorKind::UnsupportedFamily:
    case ErrorKind::Policy:
      return kExitConfiguration;
    case ErrorKind::Numerical:
      return kExitNumerical;
  }
  return kExitNumerical;
}

RunOutcome execute(const RunConfig& config, Command command) {
  validate_config(config);
  try {
    switch (command) {
      case Command::CheckMetric: return check_metric(config);
      case Command::Spectrum: return spectrum(config);
      case Command::Validate: return validate(config);
      case Command::Evolve: return evolve_workflow(config);
      case Command::StrichartzScan: return strichartz_scan(config);
    }
  } catch (const NonAdmissibleError& e) {
    RunOutcome out;
    out.exit_code = kExitNonAdmissible;
    out.message = e.what();
    Json j{{"command", to_string(command)}, {"error", e.what()}, {"report", report_json(e.report())}};
    out.artifacts["non_admissible.json"] = to_json_text(j);
    return out;
  } catch (const Error& e) {
    RunOutcome out;
    out.exit_code = exit_code_for(e.kind());
    out.message = e.what();
    if (out.exit_code == kExitContract || out.exit_code == kExitNonAdmissible) {
      Json j{{"command", to_string(command)}, {"error", e.what()}, {"kind", std::string(to_string(e.kind()))}};
      out.artifacts["error.json"] = to_json_text(j);
    }
    return out;
  }
  fail(ErrorKind::Configuration, "unhandled command");
}

int run(const RunConfig& config, Command command, std::ostream& log) {
  RunOutcome outcome;
  try {
    outcome = execute(config, command);
  } catch (const Error& e) {
    log << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  if (outcome.exit_code == kExitPass || outcome.exit_code == kExitContract ||
      outcome.exit_code == kExitNonAdmissible) {
    for (const auto& [name, content] : outcome.artifacts) write_file_atomic(config.output_dir / name, content);
  }
  log << to_string(command) << ": " << outcome.message << " (exit " << outcome.exit_code << ")\n";
  return outcome.exit_code;
}

}  // namespace warpdirac
