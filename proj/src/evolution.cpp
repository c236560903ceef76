#include "warpdirac/evolution.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "warpdirac/errors.hpp"

namespace warpdirac {

using cd = std::complex<double>;

SpinorState SpinorState::zero(const RadialGrid& grid) {
  return {grid, Eigen::VectorXcd::Zero(grid.N), Eigen::VectorXcd::Zero(grid.N), true};
}

double SpinorState::norm() const {
  return std::sqrt(grid.h() * (plus.squaredNorm() + minus.squaredNorm()));
}

Eigen::VectorXcd SpinorState::stacked() const {
  Eigen::VectorXcd v(2 * grid.N);
  v << plus, minus;
  return v;
}

SpinorState SpinorState::from_stacked(const RadialGrid& grid, const Eigen::VectorXcd& v) {
  require(v.size() == 2 * grid.N, ErrorKind::Configuration, "stacked spinor has the wrong length");
  return {grid, v.head(grid.N), v.tail(grid.N), true};
}

SpinorState& SpinorState::operator*=(cd a) {
  plus *= a;
  minus *= a;
  return *this;
}

SpinorState operator-(const SpinorState& a, const SpinorState& b) {
  require(a.grid == b.grid, ErrorKind::Configuration, "spinor states live on different grids");
  return {a.grid, a.plus - b.plus, a.minus - b.minus, a.flattened};
}

SpinorState operator*(cd a, const SpinorState& s) {
  SpinorState out = s;
  out *= a;
  return out;
}

SpinorState gaussian_state(const RadialGrid& grid, double r0, double width, double amplitude,
                           SpinorComponent component) {
  require(width > 0.0, ErrorKind::Configuration, "Gaussian width must be positive");
  SpinorState s = SpinorState::zero(grid);
  Eigen::VectorXcd& target = component == SpinorComponent::Plus ? s.plus : s.minus;
  for (int i = 0; i < grid.N; ++i) {
    const double x = (grid.r(i) - r0) / width;
    target[i] = amplitude * std::exp(-x * x);
  }
  return s;
}

double support_radius(const SpinorState& state) {
  const Eigen::VectorXd mag = state.plus.cwiseAbs().cwiseMax(state.minus.cwiseAbs());
  const double peak = mag.maxCoeff();
  if (peak == 0.0) return 0.0;
  for (int i = state.grid.N - 1; i >= 0; --i) {
    if (mag[i] > 1e-8 * peak) return state.grid.r(i);
  }
  return 0.0;
}

double causal_limit(const SpinorState& state) {
  return state.grid.r_max - support_radius(state) - 2.0;
}

double SpinorTrajectory::max_norm_drift() const {
  if (states.empty()) return 0.0;
  const double n0 = states.front().norm();
  double drift = 0.0;
  for (const SpinorState& s : states) drift = std::max(drift, std::abs(s.norm() / n0 - 1.0));
  return drift;
}

struct Propagator::CrankNicolsonData {
  std::mutex mutex;
  double cached_step = 0.0;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cd>>> lu;
  Eigen::SparseMatrix<cd> h;
};

Propagator::Propagator(const DiscreteRadialOperator& dirac)
    : Propagator(dirac, dirac.grid.N <= 2048 ? Method::Spectral : Method::CrankNicolson) {}

Propagator::Propagator(const DiscreteRadialOperator& dirac, Method method, double max_step)
    : op_(dirac), method_(method), max_step_(max_step) {
  require(dirac.kind == OperatorKind::DiracMode, ErrorKind::Configuration, "propagator needs a Dirac mode operator");
  require(max_step > 0.0, ErrorKind::Configuration, "Crank-Nicolson step must be positive");
  if (dirac.hermiticity_defect() > 1e-13) fail(ErrorKind::Numerical, "Dirac matrix is not Hermitian");
  if (method_ == Method::Spectral) {
    svd_ = svd(dirac_offdiagonal_block(dirac));
    if (!svd_.s.allFinite()) fail(ErrorKind::Numerical, "non-finite singular values");
  } else {
    cn_ = std::make_unique<CrankNicolsonData>();
    cn_->h = dirac.matrix.cast<cd>();
  }
}

Propagator::~Propagator() = default;

const Eigen::VectorXd& Propagator::singular_values() const {
  require(method_ == Method::Spectral, ErrorKind::Configuration, "singular values exist only for the spectral method");
  return svd_.s;
}

const SvdResult& Propagator::svd_data() const {
  require(method_ == Method::Spectral, ErrorKind::Configuration, "SVD exists only for the spectral method");
  return svd_;
}

std::vector<SpinorState> Propagator::apply(const SpinorState& initial, const std::vector<double>& times) const {
  require(initial.grid == op_.grid, ErrorKind::Configuration, "initial data and operator use different grids");
  for (double t : times) require(std::isfinite(t), ErrorKind::Configuration, "times must be finite");
  return method_ == Method::Spectral ? apply_spectral(initial, times) : apply_cn(initial, times);
}

SpinorState Propagator::apply(const SpinorState& initial, double t) const {
  return apply(initial, std::vector<double>{t}).front();
}

std::vector<SpinorState> Propagator::apply_spectral(const SpinorState& initial,
                                                    const std::vector<double>& times) const {
  const int N = op_.grid.N;
  const int T = static_cast<int>(times.size());
  const double m = op_.params.m;
  const Eigen::MatrixXd& U = svd_.U;
  const Eigen::MatrixXd& W = svd_.W;
  const Eigen::VectorXd& s = svd_.s;

  Eigen::MatrixXd x0(N, 2), y0(N, 2);
  x0 << initial.plus.real(), initial.plus.imag();
  y0 << initial.minus.real(), initial.minus.imag();
  const Eigen::MatrixXd ab = U.transpose() * x0;
  const Eigen::MatrixXd bb = W.transpose() * y0;
  const Eigen::VectorXcd a = ab.col(0).cast<cd>() + cd(0, 1) * ab.col(1).cast<cd>();
  const Eigen::VectorXcd b = bb.col(0).cast<cd>() + cd(0, 1) * bb.col(1).cast<cd>();

  // Columns 0..T-1 hold real parts, T..2T-1 imaginary parts.
  Eigen::MatrixXd xc(N, 2 * T), yc(N, 2 * T);
  const cd I(0, 1);
  for (int k = 0; k < T; ++k) {
    const double t = times[k];
    for (int j = 0; j < N; ++j) {
      const double E = std::sqrt(m * m + s[j] * s[j]);
      const double c = std::cos(E * t);
      const double sn = E > 0.0 ? std::sin(E * t) / E : t;
      const cd at = (c - I * m * sn) * a[j] - I * s[j] * sn * b[j];
      const cd bt = -I * s[j] * sn * a[j] + (c + I * m * sn) * b[j];
      xc(j, k) = at.real();
      xc(j, T + k) = at.imag();
      yc(j, k) = bt.real();
      yc(j, T + k) = bt.imag();
    }
  }
  const Eigen::MatrixXd x = U * xc;
  const Eigen::MatrixXd y = W * yc;
  std::vector<SpinorState> out;
  out.reserve(T);
  for (int k = 0; k < T; ++k) {
    SpinorState st = SpinorState::zero(op_.grid);
    st.plus = x.col(k).cast<cd>() + I * x.col(T + k).cast<cd>();
    st.minus = y.col(k).cast<cd>() + I * y.col(T + k).cast<cd>();
    if (times[k] == 0.0) st = initial;
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<SpinorState> Propagator::apply_cn(const SpinorState& initial, const std::vector<double>& times) const {
  std::vector<int> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<SpinorState> out(times.size(), initial);
  const int dim = 2 * op_.grid.N;
  Eigen::SparseMatrix<cd> id(dim, dim);
  id.setIdentity();

  std::lock_guard<std::mutex> lock(cn_->mutex);
  auto step_to = [&](Eigen::VectorXcd v, double from, double to) {
    const double span = to - from;
    if (span == 0.0) return v;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step_ - 1e-12)));
    const double dt = span / steps;
    if (!cn_->lu || cn_->cached_step != dt) {
      const Eigen::SparseMatrix<cd> lhs = id + cd(0, 0.5 * dt) * cn_->h;
      cn_->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cd>>>();
      cn_->lu->compute(lhs);
      if (cn_->lu->info() != Eigen::Success) fail(ErrorKind::Numerical, "Crank-Nicolson factorization failed");
      cn_->cached_step = dt;
    }
    const Eigen::SparseMatrix<cd> rhs = id - cd(0, 0.5 * dt) * cn_->h;
    for (int k = 0; k < steps; ++k) v = cn_->lu->solve(rhs * v);
    return v;
  };

  // Forward and backward times are each integrated outward from t = 0.
  std::vector<int> fwd, bwd;
  for (int i : order) (times[i] >= 0.0 ? fwd : bwd).push_back(i);
  std::sort(fwd.begin(), fwd.end(), [&](int a, int b) { return times[a] < times[b]; });
  std::sort(bwd.begin(), bwd.end(), [&](int a, int b) { return times[a] > times[b]; });
  for (const auto* list : {&fwd, &bwd}) {
    Eigen::VectorXcd v = initial.stacked();
    double t = 0.0;
    for (int i : *list) {
      v = step_to(v, t, times[i]);
      t = times[i];
      out[i] = SpinorState::from_stacked(op_.grid, v);
    }
  }
  return out;
}

std::shared_ptr<const Propagator> cached_propagator(const DiscreteRadialOperator& dirac) {
  static std::mutex mutex;
  static std::vector<std::shared_ptr<const Propagator>> cache;
  constexpr std::size_t kCapacity = 2;
  {
    std::lock_guard<std::mutex> lock(mutex);
    for (const auto& p : cache) {
      const DiscreteRadialOperator& o = p->op();
      if (o.grid == dirac.grid && same_profile(o.params.profile, dirac.params.profile) &&
          o.params.mu == dirac.params.mu && o.params.m == dirac.params.m) {
        return p;
      }
    }
  }
  auto fresh = std::make_shared<const Propagator>(dirac);
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() >= kCapacity) cache.erase(cache.begin());
  cache.push_back(fresh);
  return fresh;
}

SpinorTrajectory evolve(const Propagator& propagator, const SpinorState& initial, const std::vector<double>& times) {
  require(initial.grid == propagator.op().grid, ErrorKind::Configuration,
          "initial data and operator use different grids");
  require(initial.norm() > 0.0, ErrorKind::Configuration, "initial data must be nonzero");
  SpinorTrajectory traj;
  traj.times = times;
  traj.mode = propagator.op().params;
  traj.causal_limit = causal_limit(initial);
  traj.states = propagator.apply(initial, times);
  for (const SpinorState& s : traj.states) {
    if (!s.plus.allFinite() || !s.minus.allFinite()) fail(ErrorKind::Numerical, "non-finite state in trajectory");
  }
  return traj;
}

SpinorTrajectory evolve(const DiscreteRadialOperator& dirac, const SpinorState& initial,
                        const std::vector<double>& times) {
  return evolve(*cached_propagator(dirac), initial, times);
}

double kg_crosscheck(const SpinorTrajectory& traj, const DiscreteRadialOperator& kg_minus,
                     const DiscreteRadialOperator& kg_plus) {
  const std::size_t T = traj.times.size();
  require(T >= 3, ErrorKind::Configuration, "Klein-Gordon cross-check needs at least three time samples");
  require(kg_minus.kind == OperatorKind::KleinGordonMinus && kg_plus.kind == OperatorKind::KleinGordonPlus,
          ErrorKind::Configuration, "expected the minus and plus Klein-Gordon operators");
  const RadialGrid& grid = traj.states.front().grid;
  require(kg_minus.grid == grid && kg_plus.grid == grid, ErrorKind::Configuration,
          "Klein-Gordon operators and trajectory use different grids");
  const double dt = traj.times[1] - traj.times[0];
  require(dt != 0.0, ErrorKind::Configuration, "time samples must be distinct");
  for (std::size_t k = 1; k < T; ++k) {
    const double step = traj.times[k] - traj.times[k - 1];
    require(std::abs(step - dt) <= 1e-9 * std::abs(dt), ErrorKind::Configuration,
            "Klein-Gordon cross-check needs uniformly spaced times");
  }
  const Eigen::SparseMatrix<cd> km = kg_minus.matrix.cast<cd>();
  const Eigen::SparseMatrix<cd> kp = kg_plus.matrix.cast<cd>();
  const int len = grid.N - 2 * kBoundaryCells;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < T; ++k) {
    const SpinorState& prev = traj.states[k - 1];
    const SpinorState& cur = traj.states[k];
    const SpinorState& next = traj.states[k + 1];
    const Eigen::VectorXcd rp = (next.plus - 2.0 * cur.plus + prev.plus) / (dt * dt) + km * cur.plus;
    const Eigen::VectorXcd rm = (next.minus - 2.0 * cur.minus + prev.minus) / (dt * dt) + kp * cur.minus;
    const double num = std::sqrt(rp.segment(kBoundaryCells, len).squaredNorm() +
                                 rm.segment(kBoundaryCells, len).squaredNorm());
    const double den = std::sqrt(cur.plus.squaredNorm() + cur.minus.squaredNorm());
    if (den > 0.0) worst = std::max(worst, num / den);
  }
  return worst;
}

std::vector<double> uniform_times(double t0, double t1, int samples) {
  require(samples >= 1, ErrorKind::Configuration, "at least one time sample is required");
  std::vector<double> t(samples);
  if (samples == 1) {
    t[0] = t0;
    return t;
  }
  for (int k = 0; k < samples; ++k) t[k] = t0 + (t1 - t0) * k / (samples - 1);
  return t;
}

}  // namespace warpdirac
