#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "warpdirac/admissibility.hpp"
#include "warpdirac/evolution.hpp"
#include "warpdirac/mode_spectrum.hpp"

namespace warpdirac {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ExponentTriple {
  double p = 4.0;  // may be +inf
  double q = 4.0;
  double m = 0.0;
  [[nodiscard]] double s() const { return 1.0 / q - (std::isinf(p) ? 0.0 : 1.0 / p); }
};

// m = 0: 2/p + (n-1)/q = (n-1)/2; m != 0: 2/p + n/q = n/2; always p >= 2 and q >= 2
// (q finite in the massless case). Tolerance 1e-12 on the scaling relation.
bool is_admissible_triple(double p, double q, double m, int n);
inline bool is_admissible_triple(const ExponentTriple& t, int n) { return is_admissible_triple(t.p, t.q, t.m, n); }

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

// sqrt of the double integral of |w / r|^2 dr dt (trapezoid in t over the
// samples inside the window). Policy error when the window leaves the causal window.
double smoothing_norm(const SpinorTrajectory& traj, const TimeWindow& window);

// L^p in time of the weighted spatial W^{s,q} norm. The spatial quantity is
// X = (1 + H0)^{s/2} [omega sigma_n w], omega = (phi/r)^((n-1)/2 (1 - 2/q)), measured by
// (sum_i h |X_i|^q r_i^(-(n-1)q/2) phi_i^(n-1))^(1/q), summed over both components.
// Contract error for non-admissible triples, policy error outside the causal window.
double strichartz_norm(const SpinorTrajectory& traj, const ExponentTriple& triple, const MetricProfile& profile);

// Same norm with the weight omega forced to one.
double strichartz_norm_unweighted(const SpinorTrajectory& traj, const ExponentTriple& triple,
                                  const MetricProfile& profile);

// s = 0 evaluation by direct quadrature of the unflattened spinor v = phi^(-(n-1)/2) w.
double strichartz_norm_direct(const SpinorTrajectory& traj, const ExponentTriple& triple, const MetricProfile& profile);

// |(1 + H0)^{e/2} w| with the h-weighted l2 norm over both components; |e| <= 1.
double h_sobolev_norm(const SpinorState& state, double exponent, int n = 3);

// sqrt(sum over modes of |w|_{H^a}^2 + sum over components (l (l + n - 2))^b |w_c|^2).
double h_ab_norm(const std::vector<std::pair<ModeIndex, SpinorState>>& modes, double a, double b);

// K such that |(m^2 + H_c)^{1/4} v| <= K (1 + mu^2)^{1/4} |(1 + H0)^{1/4} v| for both
// channels on the grid (largest generalised eigenvalue, maximised over the channels).
double lemnorms_constant(const MetricProfile& profile, double mu, double m, const RadialGrid& grid);

// Least-squares slope of log y against log x; nullopt with fewer than two distinct x.
std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ScanSettings {
  RadialGrid grid{40.0, 2048};
  double epsilon = 0.1;
  int time_samples = 65;
  double t_end = -1.0;  // negative: use the full causal window of the data
  double strichartz_slack = 0.25;
  double smoothing_exponent = 0.5;
  double smoothing_slack = 0.25;
  int threads = 1;
  InfimumScanPolicy scan{};
};

struct ModeScanEntry {
  double mu = 0.0;
  double strichartz_norm = 0.0;
  double h_half_norm = 0.0;
  double smoothing_norm = 0.0;
  double ratio_strichartz = 0.0;
  double ratio_smoothing = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double norm_drift = 0.0;
};

struct NormScanResult {
  ExponentTriple triple;
  std::vector<ModeScanEntry> modes;
  std::optional<double> slope_strichartz;
  std::optional<double> slope_smoothing;
  double strichartz_gate = 0.0;  // 5/p + epsilon + slack
  double smoothing_gate = 0.0;   // 1/2 + slack
  double t_end = 0.0;
  [[nodiscard]] bool passes() const;
};

// Evolves the same radial data in every mode and fits the growth of the norm
// ratios in |mu|. Throws NonAdmissibleError when a mode fails admissibility.
NormScanResult mu_scan(const MetricProfile& profile, const ExponentTriple& triple, double m,
                       const std::vector<double>& mu_list, const SpinorState& data_template,
                       const ScanSettings& settings = {});

struct Teo2Result {
  double lhs_bound = 0.0;  // sum over modes of the per-mode Strichartz norms
  double rhs = 0.0;        // H^{a,b} norm of the data
  double exponent_condition = 0.0;
  [[nodiscard]] double ratio() const { return lhs_bound / rhs; }
};

// Contract error unless 5/(p b) + 1/(2a) < 1 (massless, n = 3) or <= 1 otherwise.
double teo2_exponent_condition(const ExponentTriple& triple, double a, double b, int n);

Teo2Result teo2_surrogate(const MetricProfile& profile, const ExponentTriple& triple, double a, double b,
                          const std::vector<std::pair<ModeIndex, SpinorState>>& mode_data,
                          const ScanSettings& settings = {});

}  // namespace warpdirac
