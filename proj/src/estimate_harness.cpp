#include "warpdirac/estimate_harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "warpdirac/errors.hpp"
#include "warpdirac/parallel.hpp"

namespace warpdirac {

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

void check_causal(const SpinorTrajectory& traj, double t0, double t1) {
  const double limit = traj.causal_limit;
  if (std::abs(t0) > limit + 1e-12 || std::abs(t1) > limit + 1e-12) {
    std::ostringstream msg;
    msg << "time window [" << t0 << ", " << t1 << "] leaves the causal window |t| <= " << limit;
    fail(ErrorKind::Policy, msg.str());
  }
}

void check_triple(const ExponentTriple& triple, int n) {
  if (!is_admissible_triple(triple, n)) {
    std::ostringstream msg;
    msg << "exponent triple (p, q, m) = (" << triple.p << ", " << triple.q << ", " << triple.m
        << ") is not admissible in dimension " << n;
    fail(ErrorKind::Contract, msg.str());
  }
}

// L^p in time by the trapezoid rule; p = inf takes the maximum.
double time_norm(const std::vector<double>& times, const std::vector<double>& values, double p) {
  if (std::isinf(p)) return *std::max_element(values.begin(), values.end());
  require(times.size() >= 2, ErrorKind::Configuration, "a finite time exponent needs at least two samples");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    sum += 0.5 * (std::pow(values[k], p) + std::pow(values[k + 1], p)) * std::abs(times[k + 1] - times[k]);
  }
  return std::pow(sum, 1.0 / p);
}

enum class Weighting { Weighted, Unweighted };

double strichartz_impl(const SpinorTrajectory& traj, const ExponentTriple& triple, const MetricProfile& profile,
                       Weighting weighting) {
  require(!traj.states.empty(), ErrorKind::Configuration, "empty trajectory");
  const int n = profile.n;
  check_triple(triple, n);
  check_causal(traj, traj.times.front(), traj.times.back());
  for (double t : traj.times) check_causal(traj, t, t);
  const RadialGrid& grid = traj.states.front().grid;
  const double q = triple.q;
  const double s = triple.s();
  const double half = 0.5 * (n - 1);

  // Pointwise factors: omega sigma_n (or sigma_n alone) and the measure weight.
  Eigen::VectorXd pre(grid.N), measure(grid.N);
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.r(i);
    const double sig = eval_scaled(profile, r).sigma;
    const double omega = weighting == Weighting::Weighted ? std::pow(sig, -half * (1.0 - 2.0 / q)) : 1.0;
    pre[i] = omega * std::pow(sig, half);
    // r^(-(n-1) q / 2) phi^(n-1) = r^((n-1)(1 - q/2)) sigma^(-(n-1))
    measure[i] = grid.h() * std::pow(r, (n - 1) * (1.0 - 0.5 * q)) * std::pow(sig, -(n - 1.0));
  }

  const int T = static_cast<int>(traj.states.size());
  Eigen::MatrixXd Y(grid.N, 4 * T);
  for (int k = 0; k < T; ++k) {
    const SpinorState& st = traj.states[k];
    Y.col(4 * k) = pre.cwiseProduct(st.plus.real());
    Y.col(4 * k + 1) = pre.cwiseProduct(st.plus.imag());
    Y.col(4 * k + 2) = pre.cwiseProduct(st.minus.real());
    Y.col(4 * k + 3) = pre.cwiseProduct(st.minus.imag());
  }
  if (s != 0.0) Y = flat_reference_calculus(grid, n)->apply_power(Y, 0.5 * s);

  std::vector<double> spatial(T);
  for (int k = 0; k < T; ++k) {
    double sum = 0.0;
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < grid.N; ++i) {
        const double mag = std::hypot(Y(i, 4 * k + 2 * c), Y(i, 4 * k + 2 * c + 1));
        sum += measure[i] * std::pow(mag, q);
      }
    }
    spatial[k] = std::pow(sum, 1.0 / q);
  }
  return time_norm(traj.times, spatial, triple.p);
}

}  // namespace

bool is_admissible_triple(double p, double q, double m, int n) {
  if (!(p >= 2.0) || !(q >= 2.0) || n < 1 || std::isnan(p) || std::isnan(q)) return false;
  if (m == 0.0) {
    if (std::isinf(q)) return false;
    return std::abs(2.0 * inv(p) + (n - 1) / q - 0.5 * (n - 1)) <= 1e-12;
  }
  return std::abs(2.0 * inv(p) + n * inv(q) - 0.5 * n) <= 1e-12;
}

double smoothing_norm(const SpinorTrajectory& traj, const TimeWindow& window) {
  require(window.t1 >= window.t0, ErrorKind::Configuration, "time window must satisfy t0 <= t1");
  check_causal(traj, window.t0, window.t1);
  std::vector<double> t, f;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < window.t0 - 1e-12 || traj.times[k] > window.t1 + 1e-12) continue;
    const SpinorState& st = traj.states[k];
    double sum = 0.0;
    for (int i = 0; i < st.grid.N; ++i) {
      const double r = st.grid.r(i);
      sum += (std::norm(st.plus[i]) + std::norm(st.minus[i])) / (r * r);
    }
    t.push_back(traj.times[k]);
    f.push_back(st.grid.h() * sum);
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) total += 0.5 * (f[k] + f[k + 1]) * (t[k + 1] - t[k]);
  return std::sqrt(total);
}

double strichartz_norm(const SpinorTrajectory& traj, const ExponentTriple& triple, const MetricProfile& profile) {
  return strichartz_impl(traj, triple, profile, Weighting::Weighted);
}

double strichartz_norm_unweighted(const SpinorTrajectory& traj, const ExponentTriple& triple,
                                  const MetricProfile& profile) {
  return strichartz_impl(traj, triple, profile, Weighting::Unweighted);
}

double strichartz_norm_direct(const SpinorTrajectory& traj, const ExponentTriple& triple,
                              const MetricProfile& profile) {
  require(!traj.states.empty(), ErrorKind::Configuration, "empty trajectory");
  const int n = profile.n;
  check_triple(triple, n);
  require(triple.s() == 0.0, ErrorKind::Contract, "direct quadrature needs a triple with s = 0 (p = q)");
  for (double t : traj.times) check_causal(traj, t, t);
  const RadialGrid& grid = traj.states.front().grid;
  const double q = triple.q;
  std::vector<double> spatial;
  for (const SpinorState& st : traj.states) {
    double sum = 0.0;
    for (int i = 0; i < grid.N; ++i) {
      const double r = grid.r(i);
      const double phi = eval_phi(profile, r).phi;
      const double omega = std::pow(phi / r, 0.5 * (n - 1) * (1.0 - 2.0 / q));
      const double to_v = std::pow(phi, -0.5 * (n - 1));
      for (const auto* comp : {&st.plus, &st.minus}) {
        const double v = omega * to_v * std::abs((*comp)[i]);
        sum += grid.h() * std::pow(v, q) * std::pow(phi, n - 1);
      }
    }
    spatial.push_back(std::pow(sum, 1.0 / q));
  }
  return time_norm(traj.times, spatial, triple.p);
}

double h_sobolev_norm(const SpinorState& state, double exponent, int n) {
  require(std::abs(exponent) <= 1.0, ErrorKind::Contract, "Sobolev exponent must lie in [-1, 1]");
  if (exponent == 0.0) return state.norm();
  const auto calc = flat_reference_calculus(state.grid, n);
  Eigen::MatrixXd x(state.grid.N, 4);
  x << state.plus.real(), state.plus.imag(), state.minus.real(), state.minus.imag();
  const Eigen::MatrixXd y = calc->apply_power(x, 0.5 * exponent);
  return std::sqrt(state.grid.h() * y.squaredNorm());
}

double h_ab_norm(const std::vector<std::pair<ModeIndex, SpinorState>>& modes, double a, double b) {
  require(std::abs(a) <= 1.0, ErrorKind::Contract, "H^{a,b} index a must lie in [-1, 1]");
  double total = 0.0;
  for (const auto& [mode, state] : modes) {
    require(mode.degree_plus.has_value() && mode.degree_minus.has_value(), ErrorKind::Configuration,
            "H^{a,b} norm needs harmonic degree metadata for every mode");
    const double ha = h_sobolev_norm(state, a, mode.n);
    const double lp = *mode.degree_plus;
    const double lm = *mode.degree_minus;
    const double ang_plus = std::pow(lp * (lp + mode.n - 2), b);
    const double ang_minus = std::pow(lm * (lm + mode.n - 2), b);
    const double h = state.grid.h();
    total += ha * ha + ang_plus * h * state.plus.squaredNorm() + ang_minus * h * state.minus.squaredNorm();
  }
  return std::sqrt(total);
}

double lemnorms_constant(const MetricProfile& profile, double mu, double m, const RadialGrid& grid) {
  const auto flat = flat_reference_calculus(grid, profile.n);
  const Eigen::MatrixXd A = flat->power_matrix(-0.25);
  const Eigen::VectorXd V = potential_on_grid(profile, mu, grid);
  const Eigen::VectorXd Vp = potential_derivative_on_grid(profile, mu, grid);
  const double c = 1.0 / (grid.h() * grid.h());
  double worst = 0.0;
  for (int sign : {-1, 1}) {
    Eigen::VectorXd d(grid.N);
    for (int i = 0; i < grid.N; ++i) d[i] = 2.0 * c + V[i] * V[i] + sign * Vp[i] + m * m;
    const SpectralCalculus kg(d, Eigen::VectorXd::Constant(grid.N - 1, -c));
    const Eigen::MatrixXd M = A * kg.power_matrix(0.5) * A;
    const Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
    worst = std::max(worst, symmetric_eig(Ms).values.maxCoeff());
  }
  return std::sqrt(worst) / std::pow(1.0 + mu * mu, 0.25);
}

std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::Configuration, "slope fit needs equally many x and y values");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::Numerical, "log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) return std::nullopt;
  const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
  if (*mx - *mn < 1e-12) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool NormScanResult::passes() const {
  const bool s_ok = !slope_strichartz || *slope_strichartz <= strichartz_gate;
  const bool m_ok = !slope_smoothing || *slope_smoothing <= smoothing_gate;
  return s_ok && m_ok;
}

NormScanResult mu_scan(const MetricProfile& profile, const ExponentTriple& triple, double m,
                       const std::vector<double>& mu_list, const SpinorState& data_template,
                       const ScanSettings& settings) {
  require(!mu_list.empty(), ErrorKind::Configuration, "mu scan needs at least one mode");
  require(data_template.grid == settings.grid, ErrorKind::Configuration, "scan data and scan grid differ");
  require(settings.time_samples >= 3, ErrorKind::Configuration, "mu scan needs at least three time samples");
  check_triple(triple, profile.n);
  require(triple.m == m, ErrorKind::Configuration, "triple mass and evolution mass differ");

  NormScanResult out;
  out.triple = triple;
  out.strichartz_gate = 5.0 * inv(triple.p) + settings.epsilon + settings.strichartz_slack;
  out.smoothing_gate = settings.smoothing_exponent + settings.smoothing_slack;
  const double limit = causal_limit(data_template);
  out.t_end = settings.t_end < 0.0 ? limit : settings.t_end;
  if (out.t_end > limit + 1e-12) {
    std::ostringstream msg;
    msg << "requested time window " << out.t_end << " exceeds the causal limit " << limit;
    fail(ErrorKind::Policy, msg.str());
  }

  // Admissibility first, so no evolution runs for an inadmissible scan.
  std::vector<AdmissibilityReport> reports(mu_list.size());
  parallel_for(static_cast<int>(mu_list.size()), settings.threads,
               [&](int i) { reports[i] = check_admissible(profile, mu_list[i], settings.scan); });
  for (const AdmissibilityReport& rep : reports) {
    if (!rep.admissible) {
      throw NonAdmissibleError(rep, "mu = " + std::to_string(rep.mu) + " is not admissible: " + rep.reason);
    }
  }

  const std::vector<double> times = uniform_times(0.0, out.t_end, settings.time_samples);
  const double h_half = h_sobolev_norm(data_template, 0.5, profile.n);
  out.modes.resize(mu_list.size());
  parallel_for(static_cast<int>(mu_list.size()), settings.threads, [&](int i) {
    const double mu = mu_list[i];
    const DiscreteRadialOperator dirac = assemble_dirac(profile, mu, m, settings.grid);
    const Propagator prop(dirac);
    const SpinorTrajectory traj = evolve(prop, data_template, times);
    ModeScanEntry e;
    e.mu = mu;
    e.strichartz_norm = strichartz_norm(traj, triple, profile);
    e.smoothing_norm = smoothing_norm(traj, {0.0, out.t_end});
    e.h_half_norm = h_half;
    e.ratio_strichartz = e.strichartz_norm / h_half;
    e.ratio_smoothing = e.smoothing_norm / h_half;
    e.delta_plus = reports[i].delta_plus;
    e.delta_minus = reports[i].delta_minus;
    e.norm_drift = traj.max_norm_drift();
    out.modes[i] = e;
  });

  std::vector<double> x, ys, ym;
  for (const ModeScanEntry& e : out.modes) {
    x.push_back(std::abs(e.mu));
    ys.push_back(e.ratio_strichartz);
    ym.push_back(e.ratio_smoothing);
  }
  out.slope_strichartz = fit_loglog_slope(x, ys);
  out.slope_smoothing = fit_loglog_slope(x, ym);
  return out;
}

double teo2_exponent_condition(const ExponentTriple& triple, double a, double b, int n) {
  require(a > 0.0 && b > 0.0, ErrorKind::Contract, "H^{a,b} indices must be positive for the aggregate estimate");
  const double value = 5.0 * inv(triple.p) / b + 1.0 / (2.0 * a);
  const bool strict = triple.m == 0.0 && n == 3;
  const bool ok = strict ? value < 1.0 : value <= 1.0;
  if (!ok) {
    std::ostringstream msg;
    msg << "exponent condition 5/(p b) + 1/(2 a) " << (strict ? "< 1" : "<= 1") << " fails: value " << value;
    fail(ErrorKind::Contract, msg.str());
  }
  return value;
}

Teo2Result teo2_surrogate(const MetricProfile& profile, const ExponentTriple& triple, double a, double b,
                          const std::vector<std::pair<ModeIndex, SpinorState>>& mode_data,
                          const ScanSettings& settings) {
  Teo2Result out;
  out.exponent_condition = teo2_exponent_condition(triple, a, b, profile.n);
  check_triple(triple, profile.n);
  require(!mode_data.empty(), ErrorKind::Configuration, "aggregate estimate needs at least one mode");
  require(settings.time_samples >= 3, ErrorKind::Configuration, "aggregate estimate needs at least three samples");

  double limit = kInfinity;
  for (const auto& md : mode_data) {
    require(md.first.n == profile.n, ErrorKind::Configuration, "mode dimension differs from the profile dimension");
    limit = std::min(limit, causal_limit(md.second));
  }
  const double t_end = settings.t_end < 0.0 ? limit : settings.t_end;
  if (t_end > limit + 1e-12) fail(ErrorKind::Policy, "aggregate estimate window exceeds the causal limit");
  const std::vector<double> times = uniform_times(0.0, t_end, settings.time_samples);

  std::vector<double> per_mode(mode_data.size(), 0.0);
  parallel_for(static_cast<int>(mode_data.size()), settings.threads, [&](int i) {
    const auto& [mode, state] = mode_data[i];
    if (state.norm() == 0.0) return;
    const DiscreteRadialOperator dirac = assemble_dirac(profile, mode.mu(), triple.m, state.grid);
    const Propagator prop(dirac);
    per_mode[i] = strichartz_norm(evolve(prop, state, times), triple, profile);
  });
  for (double v : per_mode) out.lhs_bound += v;
  out.rhs = h_ab_norm(mode_data, a, b);
  return out;
}

}  // namespace warpdirac
