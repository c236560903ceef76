#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <utility>

#include "warpdirac/linalg.hpp"
#include "warpdirac/metric_profiles.hpp"

namespace warpdirac {

// Cell-centred grid r_i = (i + 1/2) h on (0, r_max), h = r_max / N.
struct RadialGrid {
  double r_max = 40.0;
  int N = 2048;

  [[nodiscard]] double h() const { return r_max / N; }
  [[nodiscard]] double r(int i) const { return (i + 0.5) * h(); }
  [[nodiscard]] Eigen::VectorXd nodes() const;
  bool operator==(const RadialGrid& other) const = default;
};

// Configuration error when N < 16 or r_max <= 0.
RadialGrid make_grid(double r_max, int N);

enum class OperatorKind { DiracMode, KleinGordonPlus, KleinGordonMinus, FlatLaplacianShift };

struct ModeParams {
  MetricProfile profile;
  double mu = 1.0;
  double m = 0.0;
};

bool same_profile(const MetricProfile& a, const MetricProfile& b);

// All operators act on the flattened unknowns w = r^((n-1)/2) u on plain L^2(dr).
// The Dirac matrix uses block ordering: rows 0..N-1 hold v_plus, rows N..2N-1 hold v_minus.
struct DiscreteRadialOperator {
  RadialGrid grid;
  OperatorKind kind = OperatorKind::DiracMode;
  ModeParams params;
  Eigen::SparseMatrix<double> matrix;
  bool flattened = true;

  [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }
  // max |M - M^T| / max |M|
  [[nodiscard]] double hermiticity_defect() const;
  [[nodiscard]] Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

// V = mu / phi at the grid nodes.
Eigen::VectorXd potential_on_grid(const MetricProfile& profile, double mu, const RadialGrid& grid);
// V' = -mu phi' / phi^2 at the grid nodes.
Eigen::VectorXd potential_derivative_on_grid(const MetricProfile& profile, double mu, const RadialGrid& grid);

// Centred first difference (f_{i+1} - f_{i-1}) / (2h) with zero ghost values; exactly antisymmetric.
Eigen::SparseMatrix<double> centered_difference(const RadialGrid& grid);
// Three-point second difference with zero ghost values.
Eigen::SparseMatrix<double> second_difference(const RadialGrid& grid);

// [[m, -d/dr + V], [d/dr + V, -m]]
DiscreteRadialOperator assemble_dirac(const MetricProfile& profile, double mu, double m, const RadialGrid& grid);

// -d^2/dr^2 + V^2 + sign V' + m^2; sign = -1 gives the operator acting on v_plus.
DiscreteRadialOperator assemble_kg(const MetricProfile& profile, double mu, double m, int sign, const RadialGrid& grid);

// Flattened flat Laplacian H0 = -d^2/dr^2 + (n-1)(n-3)/(4 r^2).
DiscreteRadialOperator assemble_flat_laplacian(int n, const RadialGrid& grid);

// Off-diagonal block B = -D + diag(V) of the Dirac matrix, dense.
Eigen::MatrixXd dirac_offdiagonal_block(const DiscreteRadialOperator& dirac);

// Smooth probe spinor columns used by the residual checks: Gaussians centred at
// 0.3, 0.5 and 0.7 r_max with width r_max / 20.
Eigen::MatrixXd probe_functions(const RadialGrid& grid);

// Number of cells excluded at each boundary in interior residuals.
inline constexpr int kBoundaryCells = 4;

// Interior relative residual of h^2 F against diag(m^2 + H_c-, m^2 + H_c+) F on
// the probe spinors, normalised by the mass-free |diag(H_c-, H_c+) F|.
double verify_square(const DiscreteRadialOperator& dirac, const DiscreteRadialOperator& kg_minus,
                     const DiscreteRadialOperator& kg_plus);

struct FactorizationResiduals {
  double res_minus = 0.0;  // V_- V_+ against H_c-
  double res_plus = 0.0;   // V_+ V_- against H_c+
};

// Discrete first-order factors V_pm = V pm d/dr compared with the Klein-Gordon operators.
FactorizationResiduals factorization_check(const MetricProfile& profile, double mu, double m, const RadialGrid& grid);

struct SigmaValues {
  double sigma;
  double sigma_prime;
};

// sigma = r / phi with sigma(0) = 1.
SigmaValues sigma(const MetricProfile& profile, double r);
// sigma^((n-1)/2)
double sigma_n(const MetricProfile& profile, double r);

// Tridiagonal (diagonal, off-diagonal) of 1 + H_phi, where H_phi is the flattened
// Laplace-Beltrami operator of the warped metric.
std::pair<Eigen::VectorXd, Eigen::VectorXd> warped_laplacian_shift(const MetricProfile& profile,
                                                                   const RadialGrid& grid);

// Spectral calculus of 1 + H0 on the grid, cached per (grid, n). Thread-safe.
std::shared_ptr<const SpectralCalculus> flat_reference_calculus(const RadialGrid& grid, int n);

struct NormEquivalenceResult {
  double worst_ratio = 0.0;          // max of the forward ratio and its inverse
  double worst_forward = 0.0;        // max |sigma_n f|_{H^s_phi} / |f|_{H^s_r}
  double worst_inverse = 0.0;        // max |f|_{H^s_r} / |sigma_n f|_{H^s_phi}
  double bound = 0.0;                // (1 + c_phi (n-1)/2)^s + 1e-3
  double c_phi = 0.0;
  [[nodiscard]] bool within_bound() const { return worst_ratio <= bound; }
};

NormEquivalenceResult norm_equivalence_check(const MetricProfile& profile, double s, int trials,
                                             std::uint64_t seed = 20240611, const RadialGrid& grid = {40.0, 1024});

}  // namespace warpdirac
