#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "warpdirac/errors.hpp"
#include "warpdirac/estimate_harness.hpp"

using namespace warpdirac;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Numerical;
}

SpinorTrajectory short_run(const MetricProfile& p, double mu, double m, const RadialGrid& g, double t_end = 4.0,
                           double amplitude = 1.0) {
  const SpinorState init = gaussian_state(g, 12.0, 1.5, amplitude);
  return evolve(assemble_dirac(p, mu, m, g), init, uniform_times(0.0, t_end, 17));
}

}  // namespace

TEST_CASE("admissible exponent triples") {
  CHECK(is_admissible_triple(4, 4, 0, 3));
  CHECK(is_admissible_triple(kInfinity, 2, 0, 3));
  CHECK(is_admissible_triple(kInfinity, 2, 1, 3));
  CHECK(is_admissible_triple(4, 3, 1, 3));
  CHECK_FALSE(is_admissible_triple(4, 1.5, 0, 3));
  CHECK_FALSE(is_admissible_triple(4, 4, 1, 3));
  CHECK_FALSE(is_admissible_triple(2, kInfinity, 0, 3));
  CHECK_FALSE(is_admissible_triple(1.5, 6, 0, 3));
  const ExponentTriple t{4, 4, 0};
  CHECK(t.s() == 0.0);
  CHECK(ExponentTriple{kInfinity, 2, 0}.s() == 0.5);
}

TEST_CASE("log-log slope fit") {
  std::vector<double> x, y;
  for (double v : {1.0, 2.0, 3.0, 5.0, 8.0}) {
    x.push_back(v);
    y.push_back(3.0 * std::pow(v, 1.5));
  }
  CHECK(*fit_loglog_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_FALSE(fit_loglog_slope({2.0}, {1.0}).has_value());
  CHECK_FALSE(fit_loglog_slope({2.0, 2.0}, {1.0, 3.0}).has_value());
}

TEST_CASE("smoothing norm") {
  const RadialGrid g = make_grid(40.0, 256);
  const SpinorTrajectory traj = short_run(MetricProfile::flat(), 1.0, 0.0, g);
  const double base = smoothing_norm(traj, {0.0, 4.0});
  CHECK(base > 0.0);
  const SpinorTrajectory scaled = short_run(MetricProfile::flat(), 1.0, 0.0, g, 4.0, 3.0);
  CHECK(smoothing_norm(scaled, {0.0, 4.0}) == doctest::Approx(3.0 * base).epsilon(1e-10));

  SpinorTrajectory zero = traj;
  for (SpinorState& s : zero.states) s = SpinorState::zero(g);
  CHECK(smoothing_norm(zero, {0.0, 4.0}) == 0.0);

  CHECK(kind_of([&] { smoothing_norm(traj, {0.0, traj.causal_limit + 1.0}); }) == ErrorKind::Policy);

  // At time zero the integrand is the h-weighted sum of |w / r|^2.
  const SpinorTrajectory two = evolve(assemble_dirac(MetricProfile::flat(), 1.0, 0.0, g), traj.states[0], {0.0, 1e-9});
  double f0 = 0.0;
  for (int i = 0; i < g.N; ++i) f0 += g.h() * std::norm(traj.states[0].plus[i]) / (g.r(i) * g.r(i));
  CHECK(smoothing_norm(two, {0.0, 1e-9}) == doctest::Approx(std::sqrt(f0 * 1e-9)).epsilon(1e-6));
}

TEST_CASE("Strichartz norm") {
  const RadialGrid g = make_grid(40.0, 256);
  const MetricProfile flat = MetricProfile::flat();
  const SpinorTrajectory traj = short_run(flat, 1.0, 0.0, g);
  for (const ExponentTriple& t : {ExponentTriple{4, 4, 0}, ExponentTriple{kInfinity, 2, 0}, ExponentTriple{8, 8.0 / 3.0, 0}}) {
    const double w = strichartz_norm(traj, t, flat);
    CHECK(w > 0.0);
    CHECK(w == doctest::Approx(strichartz_norm_unweighted(traj, t, flat)).epsilon(1e-12));
  }
  const MetricProfile af = MetricProfile::asymptotically_flat(0.05, 1, 1);
  const SpinorTrajectory warped = short_run(af, 1.0, 0.0, g);
  CHECK(strichartz_norm(warped, {4, 4, 0}, af) ==
        doctest::Approx(strichartz_norm_direct(warped, {4, 4, 0}, af)).epsilon(1e-8));
  CHECK(strichartz_norm(warped, {4, 4, 0}, af) != doctest::Approx(strichartz_norm_unweighted(warped, {4, 4, 0}, af)));

  const SpinorTrajectory scaled = short_run(flat, 1.0, 0.0, g, 4.0, 2.5);
  CHECK(strichartz_norm(scaled, {4, 4, 0}, flat) == doctest::Approx(2.5 * strichartz_norm(traj, {4, 4, 0}, flat)).epsilon(1e-10));

  SpinorTrajectory zero = traj;
  for (SpinorState& s : zero.states) s = SpinorState::zero(g);
  CHECK(strichartz_norm(zero, {4, 4, 0}, flat) == 0.0);

  CHECK(kind_of([&] { strichartz_norm(traj, {4, 1.5, 0}, flat); }) == ErrorKind::Contract);
  CHECK(kind_of([&] { strichartz_norm(traj, {4, 4, 1}, flat); }) == ErrorKind::Contract);
  SpinorTrajectory long_run = traj;
  long_run.times.back() = traj.causal_limit + 1.0;
  CHECK(kind_of([&] { strichartz_norm(long_run, {4, 4, 0}, flat); }) == ErrorKind::Policy);
}

TEST_CASE("Strichartz norm of a constant-in-time state equals the spatial quadrature") {
  const RadialGrid g = make_grid(40.0, 256);
  const SpinorState s0 = gaussian_state(g, 12.0, 1.5);
  SpinorTrajectory still;
  still.times = {0.0, 1.0};
  still.states = {s0, s0};
  still.causal_limit = causal_limit(s0);
  // Flat profile, q = 4, n = 3: the spatial factor is (sum h |w|^4 r^-2)^(1/4).
  double sum = 0.0;
  for (int i = 0; i < g.N; ++i) sum += g.h() * std::pow(std::abs(s0.plus[i]), 4) / (g.r(i) * g.r(i));
  CHECK(strichartz_norm(still, {4, 4, 0}, MetricProfile::flat()) == doctest::Approx(std::pow(sum, 0.25)).epsilon(1e-12));
  // Massive energy triple (s = 1/2, q = 2): the H^{1/2} norm of the state.
  CHECK(strichartz_norm(still, {kInfinity, 2, 1}, MetricProfile::flat()) ==
        doctest::Approx(h_sobolev_norm(s0, 0.5)).epsilon(1e-12));
}

TEST_CASE("Sobolev norms") {
  const RadialGrid g = make_grid(20.0, 256);
  const SpinorState s = gaussian_state(g, 8.0, 1.0);
  CHECK(h_sobolev_norm(s, 0.0) == doctest::Approx(s.norm()).epsilon(1e-12));
  CHECK(kind_of([&] { h_sobolev_norm(s, 1.5); }) == ErrorKind::Contract);

  // Eigenvectors of H0 from an independent dense solver.
  const Eigen::MatrixXd H0 = assemble_flat_laplacian(3, g).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H0);
  for (int k : {0, 17, 100}) {
    SpinorState e = SpinorState::zero(g);
    e.plus = es.eigenvectors().col(k).cast<std::complex<double>>();
    const double lambda = es.eigenvalues()(k);
    CHECK(h_sobolev_norm(e, 1.0) == doctest::Approx(std::sqrt(1 + lambda) * e.norm()).epsilon(1e-9));
    CHECK(h_sobolev_norm(e, -0.5) == doctest::Approx(std::pow(1 + lambda, -0.25) * e.norm()).epsilon(1e-9));
  }
  // Monotone in the exponent.
  CHECK(h_sobolev_norm(s, 0.5) > s.norm());
  CHECK(h_sobolev_norm(s, 1.0) > h_sobolev_norm(s, 0.5));
}

TEST_CASE("H^{a,b} norm") {
  const RadialGrid g = make_grid(20.0, 128);
  const SpinorState s = gaussian_state(g, 8.0, 1.0);
  const ModeIndex mu1 = make_mode(2, 3);  // plus degree 0, minus degree 1
  // With b = 0 every angular factor is one.
  const double ha = h_sobolev_norm(s, 0.5);
  CHECK(h_ab_norm({{mu1, s}}, 0.5, 0.0) == doctest::Approx(std::sqrt(ha * ha + s.norm() * s.norm())).epsilon(1e-12));
  // Plus component of mu = 1 has degree 0, so the angular term vanishes for b > 0.
  CHECK(h_ab_norm({{mu1, s}}, 0.5, 1.0) == doctest::Approx(ha).epsilon(1e-12));
  // Minus component of mu = 1 has degree 1: l (l + 1) = 2.
  const SpinorState sm = gaussian_state(g, 8.0, 1.0, 1.0, SpinorComponent::Minus);
  const double ham = h_sobolev_norm(sm, 0.5);
  CHECK(h_ab_norm({{mu1, sm}}, 0.5, 1.0) == doctest::Approx(std::sqrt(ham * ham + 2 * sm.norm() * sm.norm())).epsilon(1e-12));
  // Squares add over modes.
  const ModeIndex mu2 = make_mode(4, 3);
  const double a = h_ab_norm({{mu1, s}}, 0.5, 1.0);
  const double b = h_ab_norm({{mu2, sm}}, 0.5, 1.0);
  CHECK(h_ab_norm({{mu1, s}, {mu2, sm}}, 0.5, 1.0) == doctest::Approx(std::hypot(a, b)).epsilon(1e-12));
  ModeIndex bare;
  bare.two_mu = 2;
  CHECK(kind_of([&] { h_ab_norm({{bare, s}}, 0.5, 1.0); }) == ErrorKind::Configuration);
}

TEST_CASE("norm comparison constant is uniform in mu") {
  const RadialGrid g = make_grid(40.0, 256);
  std::vector<double> K;
  for (int mu = 1; mu <= 8; ++mu) K.push_back(lemnorms_constant(MetricProfile::flat(), mu, 0.0, g));
  double mean = 0;
  for (double k : K) mean += k / K.size();
  for (double k : K) {
    CHECK(k > 0.0);
    CHECK(std::abs(k - mean) <= 0.2 * mean);
  }
}

TEST_CASE("mu scan") {
  ScanSettings settings;
  settings.grid = make_grid(40.0, 256);
  settings.time_samples = 9;
  const SpinorState data = gaussian_state(settings.grid, 12.0, 1.5);
  const NormScanResult one = mu_scan(MetricProfile::flat(), {4, 4, 0}, 0.0, {1.0}, data, settings);
  CHECK(one.modes.size() == 1);
  CHECK_FALSE(one.slope_strichartz.has_value());
  CHECK(one.passes());
  CHECK(one.t_end == doctest::Approx(causal_limit(data)));
  CHECK(one.strichartz_gate == doctest::Approx(1.25 + 0.1 + 0.25));
  CHECK(one.modes[0].norm_drift <= 1e-10);

  const NormScanResult four = mu_scan(MetricProfile::flat(), {4, 4, 0}, 0.0, {1.0, 2.0, 3.0, 4.0}, data, settings);
  REQUIRE(four.slope_strichartz.has_value());
  REQUIRE(four.slope_smoothing.has_value());
  CHECK(four.modes[0].strichartz_norm == doctest::Approx(one.modes[0].strichartz_norm).epsilon(1e-12));

  CHECK_THROWS_AS(mu_scan(MetricProfile::sinh(), {4, 4, 0}, 0.0, {1.0, -1.0}, data, settings), NonAdmissibleError);
  CHECK(kind_of([&] { mu_scan(MetricProfile::flat(), {4, 1.5, 0}, 0.0, {1.0}, data, settings); }) ==
        ErrorKind::Contract);
  ScanSettings too_long = settings;
  too_long.t_end = 100.0;
  CHECK(kind_of([&] { mu_scan(MetricProfile::flat(), {4, 4, 0}, 0.0, {1.0}, data, too_long); }) == ErrorKind::Policy);
}

TEST_CASE("aggregate estimate surrogate") {
  CHECK(kind_of([] { teo2_exponent_condition({4, 4, 0}, 1.0, 1.2, 3); }) == ErrorKind::Contract);
  CHECK(kind_of([] { teo2_exponent_condition({4, 4, 0}, 1.0, 2.0, 3); }) == ErrorKind::Contract);
  CHECK(teo2_exponent_condition({4, 4, 0}, 1.0, 4.0, 3) == doctest::Approx(0.8125));
  // Equality is allowed when the strict case does not apply.
  CHECK(teo2_exponent_condition({kInfinity, 2, 1}, 0.5, 1.0, 3) == doctest::Approx(1.0));

  ScanSettings settings;
  settings.grid = make_grid(40.0, 256);
  settings.time_samples = 9;
  const SpinorState data = gaussian_state(settings.grid, 12.0, 1.5);
  const ModeIndex m1 = make_mode(2, 3);
  const Teo2Result single = teo2_surrogate(MetricProfile::flat(), {4, 4, 0}, 1.0, 4.0, {{m1, data}}, settings);
  const SpinorTrajectory traj = evolve(assemble_dirac(MetricProfile::flat(), 1.0, 0.0, settings.grid), data,
                                       uniform_times(0.0, causal_limit(data), 9));
  CHECK(single.lhs_bound == doctest::Approx(strichartz_norm(traj, {4, 4, 0}, MetricProfile::flat())).epsilon(1e-12));
  CHECK(single.rhs == doctest::Approx(h_ab_norm({{m1, data}}, 1.0, 4.0)).epsilon(1e-12));

  // The ratio stays bounded as more modes are included.
  std::vector<double> ratios;
  for (double cutoff : {4.0, 8.0, 16.0}) {
    std::vector<std::pair<ModeIndex, SpinorState>> modes;
    for (const ModeIndex& m : sphere_spectrum(3, cutoff)) modes.emplace_back(m, data);
    ratios.push_back(teo2_surrogate(MetricProfile::flat(), {4, 4, 0}, 1.0, 4.0, modes, settings).ratio());
  }
  for (double r : ratios) CHECK(r <= 2.0 * ratios.front());
}
