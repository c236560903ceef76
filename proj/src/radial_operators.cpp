#include "warpdirac/radial_operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <tuple>
#include <vector>

#include "warpdirac/errors.hpp"

namespace warpdirac {

namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::SparseMatrix<double> from_triplets(Eigen::Index rows, const std::vector<Triplet>& t) {
  Eigen::SparseMatrix<double> m(rows, rows);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void check_grid(const RadialGrid& grid) {
  require(grid.r_max > 0.0 && std::isfinite(grid.r_max), ErrorKind::Configuration, "grid r_max must be positive");
  require(grid.N >= 16, ErrorKind::Configuration,
          "grid too coarse: N = " + std::to_string(grid.N) + " but at least 16 cells are required");
}

double interior_norm(const Eigen::MatrixXd& x, int block_size, int blocks) {
  double sum = 0.0;
  const int len = block_size - 2 * kBoundaryCells;
  for (int b = 0; b < blocks; ++b) {
    sum += x.middleRows(b * block_size + kBoundaryCells, len).squaredNorm();
  }
  return std::sqrt(sum);
}

void check_same_mode(const DiscreteRadialOperator& a, const DiscreteRadialOperator& b) {
  require(a.grid == b.grid, ErrorKind::Configuration, "operators live on different grids");
  require(same_profile(a.params.profile, b.params.profile), ErrorKind::Configuration,
          "operators use different metric profiles");
  require(a.params.mu == b.params.mu, ErrorKind::Configuration, "operators use different angular eigenvalues");
  require(a.params.m == b.params.m, ErrorKind::Configuration, "operators use different masses");
}

}  // namespace

Eigen::VectorXd RadialGrid::nodes() const {
  Eigen::VectorXd r(N);
  for (int i = 0; i < N; ++i) r[i] = this->r(i);
  return r;
}

RadialGrid make_grid(double r_max, int N) {
  RadialGrid g{r_max, N};
  check_grid(g);
  return g;
}

bool same_profile(const MetricProfile& a, const MetricProfile& b) {
  return a.family == b.family && a.epsilon == b.epsilon && a.alpha == b.alpha && a.beta == b.beta &&
         a.degree == b.degree && a.n == b.n;
}

double DiscreteRadialOperator::hermiticity_defect() const {
  const Eigen::SparseMatrix<double> t = matrix.transpose();
  const Eigen::SparseMatrix<double> diff = matrix - t;
  double num = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) num = std::max(num, std::abs(it.value()));
  }
  double den = 0.0;
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) den = std::max(den, std::abs(it.value()));
  }
  return den > 0.0 ? num / den : num;
}

Eigen::VectorXd potential_on_grid(const MetricProfile& profile, double mu, const RadialGrid& grid) {
  Eigen::VectorXd v(grid.N);
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.r(i);
    v[i] = mu * eval_scaled(profile, r).sigma / r;
  }
  return v;
}

Eigen::VectorXd potential_derivative_on_grid(const MetricProfile& profile, double mu, const RadialGrid& grid) {
  Eigen::VectorXd v(grid.N);
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.r(i);
    const ScaledPhi s = eval_scaled(profile, r);
    v[i] = -mu * s.sigma * s.r_l1 / (r * r);
  }
  return v;
}

Eigen::SparseMatrix<double> centered_difference(const RadialGrid& grid) {
  check_grid(grid);
  const double c = 0.5 / grid.h();
  std::vector<Triplet> t;
  t.reserve(2 * grid.N);
  for (int i = 0; i < grid.N; ++i) {
    if (i + 1 < grid.N) t.emplace_back(i, i + 1, c);
    if (i > 0) t.emplace_back(i, i - 1, -c);
  }
  return from_triplets(grid.N, t);
}

Eigen::SparseMatrix<double> second_difference(const RadialGrid& grid) {
  check_grid(grid);
  const double c = 1.0 / (grid.h() * grid.h());
  std::vector<Triplet> t;
  t.reserve(3 * grid.N);
  for (int i = 0; i < grid.N; ++i) {
    t.emplace_back(i, i, -2.0 * c);
    if (i + 1 < grid.N) t.emplace_back(i, i + 1, c);
    if (i > 0) t.emplace_back(i, i - 1, c);
  }
  return from_triplets(grid.N, t);
}

DiscreteRadialOperator assemble_dirac(const MetricProfile& profile, double mu, double m, const RadialGrid& grid) {
  check_grid(grid);
  profile.validate();
  require(mu != 0.0 && std::isfinite(mu), ErrorKind::Configuration, "angular eigenvalue mu must be nonzero");
  require(std::isfinite(m), ErrorKind::Configuration, "mass must be finite");
  const int N = grid.N;
  const Eigen::VectorXd V = potential_on_grid(profile, mu, grid);
  const double c = 0.5 / grid.h();
  std::vector<Triplet> t;
  t.reserve(8 * N);
  for (int i = 0; i < N; ++i) {
    t.emplace_back(i, i, m);
    t.emplace_back(N + i, N + i, -m);
    // B = -D + diag(V) in the upper right block, B^T = D + diag(V) in the lower left.
    t.emplace_back(i, N + i, V[i]);
    t.emplace_back(N + i, i, V[i]);
    if (i + 1 < N) {
      t.emplace_back(i, N + i + 1, -c);
      t.emplace_back(N + i, i + 1, c);
    }
    if (i > 0) {
      t.emplace_back(i, N + i - 1, c);
      t.emplace_back(N + i, i - 1, -c);
    }
  }
  DiscreteRadialOperator op;
  op.grid = grid;
  op.kind = OperatorKind::DiracMode;
  op.params = {profile, mu, m};
  op.matrix = from_triplets(2 * N, t);
  return op;
}

DiscreteRadialOperator assemble_kg(const MetricProfile& profile, double mu, double m, int sign,
                                   const RadialGrid& grid) {
  check_grid(grid);
  profile.validate();
  require(mu != 0.0 && std::isfinite(mu), ErrorKind::Configuration, "angular eigenvalue mu must be nonzero");
  require(sign == 1 || sign == -1, ErrorKind::Configuration, "Klein-Gordon sign must be +1 or -1");
  const Eigen::VectorXd V = potential_on_grid(profile, mu, grid);
  const Eigen::VectorXd Vp = potential_derivative_on_grid(profile, mu, grid);
  const double c = 1.0 / (grid.h() * grid.h());
  std::vector<Triplet> t;
  t.reserve(3 * grid.N);
  for (int i = 0; i < grid.N; ++i) {
    t.emplace_back(i, i, 2.0 * c + V[i] * V[i] + sign * Vp[i] + m * m);
    if (i + 1 < grid.N) t.emplace_back(i, i + 1, -c);
    if (i > 0) t.emplace_back(i, i - 1, -c);
  }
  DiscreteRadialOperator op;
  op.grid = grid;
  op.kind = sign > 0 ? OperatorKind::KleinGordonPlus : OperatorKind::KleinGordonMinus;
  op.params = {profile, mu, m};
  op.matrix = from_triplets(grid.N, t);
  return op;
}

DiscreteRadialOperator assemble_flat_laplacian(int n, const RadialGrid& grid) {
  check_grid(grid);
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  const double c = 1.0 / (grid.h() * grid.h());
  const double k = (n - 1.0) * (n - 3.0) / 4.0;
  std::vector<Triplet> t;
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.r(i);
    t.emplace_back(i, i, 2.0 * c + k / (r * r));
    if (i + 1 < grid.N) t.emplace_back(i, i + 1, -c);
    if (i > 0) t.emplace_back(i, i - 1, -c);
  }
  DiscreteRadialOperator op;
  op.grid = grid;
  op.kind = OperatorKind::FlatLaplacianShift;
  op.params = {MetricProfile::flat(n), 1.0, 0.0};
  op.matrix = from_triplets(grid.N, t);
  return op;
}

Eigen::MatrixXd dirac_offdiagonal_block(const DiscreteRadialOperator& dirac) {
  require(dirac.kind == OperatorKind::DiracMode, ErrorKind::Configuration, "expected a Dirac operator");
  const int N = dirac.grid.N;
  return Eigen::MatrixXd(dirac.matrix.block(0, N, N, N));
}

Eigen::MatrixXd probe_functions(const RadialGrid& grid) {
  const double width = grid.r_max / 20.0;
  const double centers[] = {0.3, 0.5, 0.7};
  Eigen::MatrixXd p(grid.N, 3);
  for (int j = 0; j < 3; ++j) {
    const double c = centers[j] * grid.r_max;
    for (int i = 0; i < grid.N; ++i) {
      const double x = (grid.r(i) - c) / width;
      p(i, j) = std::exp(-x * x);
    }
  }
  return p;
}

double verify_square(const DiscreteRadialOperator& dirac, const DiscreteRadialOperator& kg_minus,
                     const DiscreteRadialOperator& kg_plus) {
  require(dirac.kind == OperatorKind::DiracMode, ErrorKind::Configuration, "first operator must be a Dirac operator");
  require(kg_minus.kind == OperatorKind::KleinGordonMinus && kg_plus.kind == OperatorKind::KleinGordonPlus,
          ErrorKind::Configuration, "expected the minus and plus Klein-Gordon operators");
  check_same_mode(dirac, kg_minus);
  check_same_mode(dirac, kg_plus);
  const int N = dirac.grid.N;
  const double m2 = dirac.params.m * dirac.params.m;
  const Eigen::MatrixXd g = probe_functions(dirac.grid);
  Eigen::MatrixXd F(2 * N, g.cols());
  F.topRows(N) = g;
  F.bottomRows(N) = g;

  const Eigen::MatrixXd hF = dirac.matrix * F;
  const Eigen::MatrixXd h2F = dirac.matrix * hF;
  Eigen::MatrixXd kF(2 * N, g.cols());
  kF.topRows(N) = kg_minus.matrix * g;
  kF.bottomRows(N) = kg_plus.matrix * g;
  const Eigen::MatrixXd massless = kF - m2 * F;
  return interior_norm(h2F - kF, N, 2) / interior_norm(massless, N, 2);
}

FactorizationResiduals factorization_check(const MetricProfile& profile, double mu, double m,
                                           const RadialGrid& grid) {
  check_grid(grid);
  require(std::isfinite(m), ErrorKind::Configuration, "mass must be finite");
  const Eigen::VectorXd V = potential_on_grid(profile, mu, grid);
  const Eigen::SparseMatrix<double> D = centered_difference(grid);
  Eigen::SparseMatrix<double> Vd(grid.N, grid.N);
  Vd.reserve(Eigen::VectorXi::Constant(grid.N, 1));
  for (int i = 0; i < grid.N; ++i) Vd.insert(i, i) = V[i];
  const Eigen::SparseMatrix<double> Vplus = Vd + D;
  const Eigen::SparseMatrix<double> Vminus = Vd - D;
  // The identities are mass free, so the Klein-Gordon operators are assembled without m.
  const DiscreteRadialOperator hm = assemble_kg(profile, mu, 0.0, -1, grid);
  const DiscreteRadialOperator hp = assemble_kg(profile, mu, 0.0, +1, grid);
  const Eigen::MatrixXd g = probe_functions(grid);

  const Eigen::MatrixXd hmg = hm.matrix * g;
  const Eigen::MatrixXd hpg = hp.matrix * g;
  const Eigen::MatrixXd minus_lhs = Vminus * (Vplus * g);
  const Eigen::MatrixXd plus_lhs = Vplus * (Vminus * g);
  FactorizationResiduals out;
  out.res_minus = interior_norm(minus_lhs - hmg, grid.N, 1) / interior_norm(hmg, grid.N, 1);
  out.res_plus = interior_norm(plus_lhs - hpg, grid.N, 1) / interior_norm(hpg, grid.N, 1);
  return out;
}

SigmaValues sigma(const MetricProfile& profile, double r) {
  profile.validate();
  const double s = eval_scaled(profile, r).sigma;
  return {s, s * log_derivative_sigma(profile, r)};
}

double sigma_n(const MetricProfile& profile, double r) {
  return std::pow(sigma(profile, r).sigma, 0.5 * (profile.n - 1));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> warped_laplacian_shift(const MetricProfile& profile,
                                                                   const RadialGrid& grid) {
  check_grid(grid);
  const double c = 1.0 / (grid.h() * grid.h());
  const int n = profile.n;
  Eigen::VectorXd d(grid.N), e = Eigen::VectorXd::Constant(grid.N - 1, -c);
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.r(i);
    const ScaledPhi s = eval_scaled(profile, r);
    const double second_over_phi = s.r2_l2 / (r * r);
    const double l1 = s.r_l1 / r;
    d[i] = 1.0 + 2.0 * c + 0.5 * (n - 1) * second_over_phi + 0.25 * (n - 1.0) * (n - 3.0) * l1 * l1;
  }
  return {d, e};
}

std::shared_ptr<const SpectralCalculus> flat_reference_calculus(const RadialGrid& grid, int n) {
  static std::mutex mutex;
  static std::map<std::tuple<double, int, int>, std::shared_ptr<const SpectralCalculus>> cache;
  check_grid(grid);
  const auto key = std::make_tuple(grid.r_max, grid.N, n);
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const auto [d, e] = warped_laplacian_shift(MetricProfile::flat(n), grid);
  auto calc = std::make_shared<const SpectralCalculus>(d, e);
  if (cache.size() >= 6) cache.clear();
  cache.emplace(key, calc);
  return calc;
}

NormEquivalenceResult norm_equivalence_check(const MetricProfile& profile, double s, int trials, std::uint64_t seed,
                                             const RadialGrid& grid) {
  profile.validate();
  check_grid(grid);
  require(s >= 0.0 && s <= 1.0, ErrorKind::Contract, "norm equivalence exponent s must lie in [0, 1]");
  require(trials >= 1, ErrorKind::Configuration, "at least one trial function is required");
  const int n = profile.n;
  const double half = 0.5 * (n - 1);

  NormEquivalenceResult out;
  out.c_phi = c_phi(profile);
  out.bound = std::pow(1.0 + out.c_phi * half, s) + 1e-3;

  std::shared_ptr<const SpectralCalculus> flat;
  std::unique_ptr<SpectralCalculus> warped;
  if (s > 0.0) {
    flat = flat_reference_calculus(grid, n);
    const auto [d, e] = warped_laplacian_shift(profile, grid);
    warped = std::make_unique<SpectralCalculus>(d, e);
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(1, 3);
  std::uniform_real_distribution<double> center_dist(0.1 * grid.r_max, 0.75 * grid.r_max);
  std::uniform_real_distribution<double> width_dist(0.02 * grid.r_max, 0.1 * grid.r_max);
  std::normal_distribution<double> amp_dist(0.0, 1.0);
  const Eigen::VectorXd r = grid.nodes();

  for (int trial = 0; trial < trials; ++trial) {
    // Flattened test function F = r^((n-1)/2) f, a sum of smooth compactly supported bumps.
    Eigen::VectorXd F = Eigen::VectorXd::Zero(grid.N);
    const int bumps = count_dist(rng);
    for (int b = 0; b < bumps; ++b) {
      const double c = center_dist(rng);
      const double w = width_dist(rng);
      const double a = amp_dist(rng);
      for (int i = 0; i < grid.N; ++i) {
        const double x = (r[i] - c) / w;
        if (std::abs(x) < 1.0) F[i] += a * std::exp(1.0 - 1.0 / (1.0 - x * x));
      }
    }
    if (F.norm() == 0.0) F[grid.N / 2] = 1.0;

    double ratio = 1.0;
    if (s == 0.0) {
      // Unflattened quadrature: |sigma_n f| in L^2(phi^(n-1) dr) against |f| in L^2(r^(n-1) dr).
      double num = 0.0, den = 0.0;
      for (int i = 0; i < grid.N; ++i) {
        const double f = F[i] * std::pow(r[i], -half);
        const double g = sigma_n(profile, r[i]) * f;
        const double phi = eval_phi(profile, r[i]).phi;
        num += g * g * std::pow(phi, n - 1);
        den += f * f * std::pow(r[i], n - 1);
      }
      ratio = std::sqrt(num / den);
    } else {
      const double num = warped->apply_power(F, 0.5 * s).norm();
      const double den = flat->apply_power(F, 0.5 * s).norm();
      ratio = num / den;
    }
    out.worst_forward = std::max(out.worst_forward, ratio);
    out.worst_inverse = std::max(out.worst_inverse, 1.0 / ratio);
  }
  out.worst_ratio = std::max(out.worst_forward, out.worst_inverse);
  return out;
}

}  // namespace warpdirac
