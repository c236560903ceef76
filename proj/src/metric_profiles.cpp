#include "warpdirac/metric_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpdirac/errors.hpp"

namespace warpdirac {

namespace {

constexpr int kMaxPolynomialDegree = 20;

struct Poly {
  double P, dP, d2P;  // P(r) = 1 + r + ... + r^(p-1) and derivatives
};

Poly eval_poly_factor(int p, double r) {
  // Horner on coefficients all equal to one.
  double P = 0.0, dP = 0.0, d2P = 0.0;
  for (int k = p - 1; k >= 0; --k) {
    d2P = d2P * r + 2.0 * dP;
    dP = dP * r + P;
    P = P * r + 1.0;
  }
  return {P, dP, d2P};
}

}  // namespace

std::string to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::Flat: return "flat";
    case ProfileFamily::AsymptoticallyFlat: return "asymptotically_flat";
    case ProfileFamily::Sinh: return "sinh";
    case ProfileFamily::Polynomial: return "polynomial";
  }
  return "unknown";
}

ProfileFamily parse_family(const std::string& name) {
  if (name == "flat") return ProfileFamily::Flat;
  if (name == "asymptotically_flat") return ProfileFamily::AsymptoticallyFlat;
  if (name == "sinh") return ProfileFamily::Sinh;
  if (name == "polynomial") return ProfileFamily::Polynomial;
  fail(ErrorKind::Configuration, "unknown profile family '" + name +
                                     "' (expected flat, asymptotically_flat, sinh or polynomial)");
}

MetricProfile MetricProfile::flat(int n) {
  MetricProfile p;
  p.family = ProfileFamily::Flat;
  p.n = n;
  p.validate();
  return p;
}

MetricProfile MetricProfile::asymptotically_flat(double epsilon, int alpha, int beta, int n) {
  MetricProfile p;
  p.family = ProfileFamily::AsymptoticallyFlat;
  p.epsilon = epsilon;
  p.alpha = alpha;
  p.beta = beta;
  p.n = n;
  p.validate();
  return p;
}

MetricProfile MetricProfile::sinh(int n) {
  MetricProfile p;
  p.family = ProfileFamily::Sinh;
  p.n = n;
  p.validate();
  return p;
}

MetricProfile MetricProfile::polynomial(int degree, int n) {
  MetricProfile p;
  p.family = ProfileFamily::Polynomial;
  p.degree = degree;
  p.n = n;
  p.validate();
  return p;
}

void MetricProfile::validate() const {
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  switch (family) {
    case ProfileFamily::AsymptoticallyFlat:
      require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorKind::Configuration,
              "asymptotically flat profile needs epsilon >= 0");
      require(alpha >= 1 && beta >= 1, ErrorKind::Configuration,
              "asymptotically flat exponents alpha, beta must be positive integers");
      require(beta >= alpha, ErrorKind::Configuration,
              "asymptotically flat profile needs beta >= alpha");
      break;
    case ProfileFamily::Polynomial:
      require(degree >= 2 && degree <= kMaxPolynomialDegree, ErrorKind::Configuration,
              "polynomial profile degree must lie in [2, 20]");
      break;
    default:
      break;
  }
}

PhiValues eval_phi1(const MetricProfile& profile, double r) {
  require(profile.has_phi1(), ErrorKind::UnsupportedFamily,
          "profile family '" + to_string(profile.family) + "' has no phi = r(1 + phi1) decomposition");
  require(r >= 0.0, ErrorKind::Configuration, "radius must be nonnegative");
  if (profile.family == ProfileFamily::Flat || profile.epsilon == 0.0) return {0.0, 0.0, 0.0};
  const double eps = profile.epsilon;
  const int a = profile.alpha;
  const int b = profile.beta;
  const double s = 1.0 + r * r;
  const double g0 = std::pow(s, -0.5 * b);
  const double g1 = g0 / s;
  const double g2 = g1 / s;
  const double ra = std::pow(r, a);
  const double ra_m1 = std::pow(r, a - 1);  // r^0 = 1 at r = 0 when a = 1
  const double phi1 = eps * ra * g0;
  const double d1 = eps * (a * ra_m1 * g0 - b * ra * r * g1);
  double second_lead = 0.0;
  if (a >= 2) second_lead = a * (a - 1) * std::pow(r, a - 2) * g0;
  const double d2 = eps * (second_lead - a * b * ra * g1 - b * (a + 1) * ra * g1 + b * (b + 2.0) * ra * r * r * g2);
  return {phi1, d1, d2};
}

PhiValues eval_phi(const MetricProfile& profile, double r) {
  profile.validate();
  require(r >= 0.0, ErrorKind::Configuration, "radius must be nonnegative");
  switch (profile.family) {
    case ProfileFamily::Flat:
      return {r, 1.0, 0.0};
    case ProfileFamily::AsymptoticallyFlat: {
      const PhiValues p1 = eval_phi1(profile, r);
      return {r * (1.0 + p1.phi), 1.0 + p1.phi + r * p1.phi_prime, 2.0 * p1.phi_prime + r * p1.phi_second};
    }
    case ProfileFamily::Sinh:
      return {std::sinh(r), std::cosh(r), std::sinh(r)};
    case ProfileFamily::Polynomial: {
      const Poly q = eval_poly_factor(profile.degree, r);
      return {r * q.P, q.P + r * q.dP, 2.0 * q.dP + r * q.d2P};
    }
  }
  fail(ErrorKind::Configuration, "invalid profile family");
}

ScaledPhi eval_scaled(const MetricProfile& profile, double r) {
  require(r >= 0.0, ErrorKind::Configuration, "radius must be nonnegative");
  switch (profile.family) {
    case ProfileFamily::Flat:
      return {1.0, 1.0, 0.0};
    case ProfileFamily::AsymptoticallyFlat: {
      const PhiValues p1 = eval_phi1(profile, r);
      const double inv = 1.0 / (1.0 + p1.phi);
      return {inv, (1.0 + p1.phi + r * p1.phi_prime) * inv, r * (2.0 * p1.phi_prime + r * p1.phi_second) * inv};
    }
    case ProfileFamily::Sinh: {
      if (r == 0.0) return {1.0, 1.0, 0.0};
      // r / sinh r underflows gracefully to zero for large r.
      const double sigma = r < 1e-4 ? 1.0 / (1.0 + r * r / 6.0) : (r > 700.0 ? 0.0 : r / std::sinh(r));
      const double r_l1 = r < 1e-4 ? 1.0 + r * r / 3.0 : r / std::tanh(r);
      return {sigma, r_l1, r * r};
    }
    case ProfileFamily::Polynomial: {
      const Poly q = eval_poly_factor(profile.degree, r);
      return {1.0 / q.P, (q.P + r * q.dP) / q.P, r * (2.0 * q.dP + r * q.d2P) / q.P};
    }
  }
  fail(ErrorKind::Configuration, "invalid profile family");
}

ScaledPhi scaled_limit_at_infinity(const MetricProfile& profile) {
  switch (profile.family) {
    case ProfileFamily::Flat:
      return {1.0, 1.0, 0.0};
    case ProfileFamily::AsymptoticallyFlat: {
      const double phi1_inf = profile.alpha == profile.beta ? profile.epsilon : 0.0;
      return {1.0 / (1.0 + phi1_inf), 1.0, 0.0};
    }
    case ProfileFamily::Sinh:
    case ProfileFamily::Polynomial:
      return {0.0, 0.0, 0.0};
  }
  fail(ErrorKind::Configuration, "invalid profile family");
}

double log_derivative_sigma(const MetricProfile& profile, double r) {
  require(r >= 0.0, ErrorKind::Configuration, "radius must be nonnegative");
  switch (profile.family) {
    case ProfileFamily::Flat:
      return 0.0;
    case ProfileFamily::AsymptoticallyFlat: {
      const PhiValues p1 = eval_phi1(profile, r);
      return -p1.phi_prime / (1.0 + p1.phi);
    }
    case ProfileFamily::Sinh: {
      if (r < 1e-2) {
        const double r2 = r * r;
        return -r / 3.0 + r * r2 / 45.0 - 2.0 * r * r2 * r2 / 945.0;
      }
      return 1.0 / r - 1.0 / std::tanh(r);
    }
    case ProfileFamily::Polynomial: {
      const Poly q = eval_poly_factor(profile.degree, r);
      return -q.dP / q.P;
    }
  }
  fail(ErrorKind::Configuration, "invalid profile family");
}

double c_phi(const MetricProfile& profile, const InfimumScanPolicy& scan) {
  profile.validate();
  const double at_zero = std::abs(log_derivative_sigma(profile, 0.0));
  const double at_inf = profile.family == ProfileFamily::Sinh ? 1.0 : 0.0;
  auto f = [&profile](double r) { return std::abs(log_derivative_sigma(profile, r)); };
  return scan_supremum(f, scan, at_zero, at_inf).value;
}

ProfileConstants profile_constants(const MetricProfile& profile, const InfimumScanPolicy& scan) {
  profile.validate();
  require(profile.has_phi1(), ErrorKind::UnsupportedFamily,
          "profile constants need a phi = r(1 + phi1) decomposition; family '" + to_string(profile.family) +
              "' has none");
  ProfileConstants out;
  if (profile.family == ProfileFamily::Flat || profile.epsilon == 0.0) return out;

  const bool tends_to_eps = profile.alpha == profile.beta;
  const double phi1_inf = tends_to_eps ? profile.epsilon : 0.0;

  auto a_term = [&profile](double r) {
    const PhiValues p = eval_phi1(profile, r);
    return std::abs(p.phi + r * p.phi_prime);
  };
  auto b_first = [&profile](double r) {
    const PhiValues p = eval_phi1(profile, r);
    return std::abs(r * p.phi_prime + (1.0 + p.phi) * (p.phi + r * p.phi_prime));
  };
  auto b_second = [&profile](double r) {
    const PhiValues p = eval_phi1(profile, r);
    return std::abs(2.0 * r * r * p.phi_prime * p.phi_prime + (1.0 + p.phi) * r * r * p.phi_second);
  };

  const ScanExtremum A = scan_supremum(a_term, scan, 0.0, phi1_inf);
  const ScanExtremum B1 = scan_supremum(b_first, scan, 0.0, (1.0 + phi1_inf) * phi1_inf);
  const ScanExtremum B2 = scan_supremum(b_second, scan, 0.0, 0.0);

  out.A_phi = A.value;
  out.A_witness_r = A.arg;
  out.B_phi = B1.value + B2.value;
  out.B_witness_r = B1.value >= B2.value ? B1.arg : B2.arg;

  const double at_zero = std::abs(log_derivative_sigma(profile, 0.0));
  auto c_term = [&profile](double r) { return std::abs(log_derivative_sigma(profile, r)); };
  const ScanExtremum C = scan_supremum(c_term, scan, at_zero, 0.0);
  out.c_phi = C.value;
  out.c_witness_r = C.arg;
  return out;
}

A2Verdict check_A2(const ProfileConstants& constants, double mu0) {
  require(mu0 > 0.5, ErrorKind::Hypothesis,
          "the smallest angular eigenvalue mu0 must exceed 1/2 (got " + std::to_string(mu0) + ")");
  A2Verdict v;
  v.achieved = std::max(constants.A_phi, constants.B_phi);
  if (mu0 >= 2.0) {
    v.threshold = 1.0;
    v.strict = false;
    v.pass = v.achieved <= v.threshold;
  } else {
    v.threshold = std::min(0.25 + mu0 * mu0 - mu0, 0.125);
    v.strict = true;
    v.pass = v.achieved < v.threshold;
  }
  return v;
}

A2Verdict check_A2(const MetricProfile& profile, double mu0, const InfimumScanPolicy& scan) {
  require(mu0 > 0.5, ErrorKind::Hypothesis,
          "the smallest angular eigenvalue mu0 must exceed 1/2 (got " + std::to_string(mu0) + ")");
  return check_A2(profile_constants(profile, scan), mu0);
}

}  // namespace warpdirac
