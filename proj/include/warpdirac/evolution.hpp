#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "warpdirac/linalg.hpp"
#include "warpdirac/mode_spectrum.hpp"
#include "warpdirac/radial_operators.hpp"

namespace warpdirac {

// Two-component radial spinor in flattened variables w = r^((n-1)/2) v.
struct SpinorState {
  RadialGrid grid;
  Eigen::VectorXcd plus;
  Eigen::VectorXcd minus;
  bool flattened = true;

  static SpinorState zero(const RadialGrid& grid);
  // h-weighted l2 norm over both components.
  [[nodiscard]] double norm() const;
  [[nodiscard]] Eigen::VectorXcd stacked() const;
  static SpinorState from_stacked(const RadialGrid& grid, const Eigen::VectorXcd& v);
  SpinorState& operator*=(std::complex<double> a);
};

SpinorState operator-(const SpinorState& a, const SpinorState& b);
SpinorState operator*(std::complex<double> a, const SpinorState& s);

// amplitude * exp(-(r - r0)^2 / width^2) in one component, zero in the other.
SpinorState gaussian_state(const RadialGrid& grid, double r0, double width, double amplitude = 1.0,
                           SpinorComponent component = SpinorComponent::Plus);

// Largest node where |w| exceeds 1e-8 of its maximum, over both components.
double support_radius(const SpinorState& state);
// Reflection-free time horizon r_max - R_support - 2 (propagation speed at most 1).
double causal_limit(const SpinorState& state);

struct SpinorTrajectory {
  std::vector<double> times;
  std::vector<SpinorState> states;
  ModeParams mode;
  double causal_limit = 0.0;

  [[nodiscard]] int n() const { return mode.profile.n; }
  [[nodiscard]] double max_norm_drift() const;
};

// exp(-i t h) for a Dirac mode operator. The default method uses the singular
// value decomposition of the off-diagonal block B = U S W^T, on which h splits
// into 2x2 blocks [[m, s_k], [s_k, -m]] that are exponentiated in closed form.
// Grids with more than 2048 cells fall back to Crank-Nicolson steps.
class Propagator {
 public:
  enum class Method { Spectral, CrankNicolson };

  explicit Propagator(const DiscreteRadialOperator& dirac);
  Propagator(const DiscreteRadialOperator& dirac, Method method, double max_step = 0.005);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  [[nodiscard]] std::vector<SpinorState> apply(const SpinorState& initial, const std::vector<double>& times) const;
  [[nodiscard]] SpinorState apply(const SpinorState& initial, double t) const;
  [[nodiscard]] Method method() const { return method_; }
  [[nodiscard]] const DiscreteRadialOperator& op() const { return op_; }
  // Singular values of B (spectral method only).
  [[nodiscard]] const Eigen::VectorXd& singular_values() const;
  [[nodiscard]] const SvdResult& svd_data() const;

 private:
  struct CrankNicolsonData;
  [[nodiscard]] std::vector<SpinorState> apply_spectral(const SpinorState& initial, const std::vector<double>& times) const;
  [[nodiscard]] std::vector<SpinorState> apply_cn(const SpinorState& initial, const std::vector<double>& times) const;

  DiscreteRadialOperator op_;
  Method method_;
  double max_step_;
  SvdResult svd_;
  std::unique_ptr<CrankNicolsonData> cn_;
};

// Shared propagator for the operator, reusing a previous decomposition of an
// identical operator when one is cached. Thread-safe.
std::shared_ptr<const Propagator> cached_propagator(const DiscreteRadialOperator& dirac);

SpinorTrajectory evolve(const DiscreteRadialOperator& dirac, const SpinorState& initial,
                        const std::vector<double>& times);
SpinorTrajectory evolve(const Propagator& propagator, const SpinorState& initial, const std::vector<double>& times);

// Composite Gauss-Legendre rule in the frequency variable rho on [0, rho_max].
struct HankelQuadrature {
  double rho_max = 16.0;
  int panels = 96;
  int order = 16;
};

// Exact flat-space flow via the Bessel transform: the plus component is expanded
// in sqrt(rho r) J_nu(rho r) with nu = |2 mu + 1| / 2 and the minus component with
// nu = |2 mu - 1| / 2; each frequency evolves by the 2x2 symbol [[m, s rho], [s rho, -m]],
// s = sign(mu). Unsupported-family error for non-flat profiles.
std::vector<SpinorState> flat_exact_solution(const MetricProfile& profile, double mu, double m,
                                             const SpinorState& initial, const std::vector<double>& times,
                                             const HankelQuadrature& quad = {});
SpinorState flat_exact_solution(const MetricProfile& profile, double mu, double m, const SpinorState& initial, double t,
                                const HankelQuadrature& quad = {});

// Bessel orders (plus component, minus component) used by the exact solution.
std::pair<double, double> bessel_orders(double mu);

// max over interior times of |D_t^2 v + K v| / |v| on interior rows, with
// K = diag(kg_minus, kg_plus) acting on (v_plus, v_minus).
double kg_crosscheck(const SpinorTrajectory& traj, const DiscreteRadialOperator& kg_minus,
                     const DiscreteRadialOperator& kg_plus);

std::vector<double> uniform_times(double t0, double t1, int samples);

}  // namespace warpdirac
