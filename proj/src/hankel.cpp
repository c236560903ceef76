#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "warpdirac/errors.hpp"
#include "warpdirac/evolution.hpp"

namespace warpdirac {

namespace {

using cd = std::complex<double>;

struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Legendre nodes on [-1, 1] from the Jacobi matrix eigenproblem.
Rule gauss_legendre(int order) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd e(order - 1);
  for (int k = 1; k < order; ++k) e[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  const SymEig eig = tridiagonal_eig(d, e);
  Rule r;
  r.nodes = eig.values;
  r.weights = 2.0 * eig.vectors.row(0).transpose().array().square();
  return r;
}

Rule composite_rule(const HankelQuadrature& q) {
  require(q.rho_max > 0.0 && q.panels >= 1 && q.order >= 2, ErrorKind::Configuration, "invalid Hankel quadrature");
  const Rule base = gauss_legendre(q.order);
  Rule out;
  out.nodes.resize(q.panels * q.order);
  out.weights.resize(q.panels * q.order);
  const double width = q.rho_max / q.panels;
  for (int p = 0; p < q.panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int k = 0; k < q.order; ++k) {
      out.nodes[p * q.order + k] = mid + 0.5 * width * base.nodes[k];
      out.weights[p * q.order + k] = 0.5 * width * base.weights[k];
    }
  }
  return out;
}

// K(rho_k, r_i) = sqrt(rho_k r_i) J_nu(rho_k r_i)
Eigen::MatrixXd bessel_kernel(double nu, const Eigen::VectorXd& rho, const Eigen::VectorXd& r) {
  Eigen::MatrixXd k(rho.size(), r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    for (Eigen::Index j = 0; j < rho.size(); ++j) {
      const double x = rho[j] * r[i];
      k(j, i) = std::sqrt(x) * boost::math::cyl_bessel_j(nu, x);
    }
  }
  return k;
}

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& k, const Eigen::VectorXcd& v) {
  return (k * v.real()).cast<cd>() + cd(0, 1) * (k * v.imag()).cast<cd>();
}

}  // namespace

std::pair<double, double> bessel_orders(double mu) {
  return {std::abs(2.0 * mu + 1.0) / 2.0, std::abs(2.0 * mu - 1.0) / 2.0};
}

std::vector<SpinorState> flat_exact_solution(const MetricProfile& profile, double mu, double m,
                                             const SpinorState& initial, const std::vector<double>& times,
                                             const HankelQuadrature& quad) {
  require(profile.family == ProfileFamily::Flat, ErrorKind::UnsupportedFamily,
          "the exact Bessel solution exists only for the flat profile");
  require(mu != 0.0, ErrorKind::Configuration, "angular eigenvalue mu must be nonzero");
  const RadialGrid& grid = initial.grid;
  const Rule rule = composite_rule(quad);
  const Eigen::VectorXd r = grid.nodes();
  const auto [nu_top, nu_bot] = bessel_orders(mu);
  const Eigen::MatrixXd k_top = bessel_kernel(nu_top, rule.nodes, r);
  const Eigen::MatrixXd k_bot = bessel_kernel(nu_bot, rule.nodes, r);
  const double sgn = mu > 0.0 ? 1.0 : -1.0;

  // Forward transform by the midpoint rule on the grid.
  const Eigen::VectorXcd A = grid.h() * apply_real(k_top, initial.plus);
  const Eigen::VectorXcd B = grid.h() * apply_real(k_bot, initial.minus);
  const Eigen::MatrixXd k_top_w = rule.weights.asDiagonal() * k_top;
  const Eigen::MatrixXd k_bot_w = rule.weights.asDiagonal() * k_bot;

  const cd I(0, 1);
  std::vector<SpinorState> out;
  out.reserve(times.size());
  for (double t : times) {
    Eigen::VectorXcd At(A.size()), Bt(B.size());
    for (Eigen::Index j = 0; j < A.size(); ++j) {
      const double rho = rule.nodes[j];
      const double E = std::sqrt(m * m + rho * rho);
      const double c = std::cos(E * t);
      const double s = E > 0.0 ? std::sin(E * t) / E : t;
      At[j] = (c - I * m * s) * A[j] - I * sgn * rho * s * B[j];
      Bt[j] = -I * sgn * rho * s * A[j] + (c + I * m * s) * B[j];
    }
    SpinorState st = SpinorState::zero(grid);
    st.plus = apply_real(k_top_w.transpose(), At);
    st.minus = apply_real(k_bot_w.transpose(), Bt);
    out.push_back(std::move(st));
  }
  return out;
}

SpinorState flat_exact_solution(const MetricProfile& profile, double mu, double m, const SpinorState& initial, double t,
                                const HankelQuadrature& quad) {
  return flat_exact_solution(profile, mu, m, initial, std::vector<double>{t}, quad).front();
}

}  // namespace warpdirac
