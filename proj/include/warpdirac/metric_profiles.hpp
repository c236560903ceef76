#pragma once

#include <string>

#include "warpdirac/scan.hpp"

namespace warpdirac {

enum class ProfileFamily { Flat, AsymptoticallyFlat, Sinh, Polynomial };

std::string to_string(ProfileFamily family);
ProfileFamily parse_family(const std::string& name);

// Warped factor phi(r) of the metric dr^2 + phi(r)^2 dw^2.
//   Flat:               phi = r
//   AsymptoticallyFlat: phi = r (1 + phi1), phi1 = eps r^alpha <r>^-beta, <r> = sqrt(1 + r^2)
//   Sinh:               phi = sinh r
//   Polynomial:         phi = r + r^2 + ... + r^p
struct MetricProfile {
  ProfileFamily family = ProfileFamily::Flat;
  double epsilon = 0.0;
  int alpha = 1;
  int beta = 1;
  int degree = 2;
  int n = 3;

  static MetricProfile flat(int n = 3);
  static MetricProfile asymptotically_flat(double epsilon, int alpha, int beta, int n = 3);
  static MetricProfile sinh(int n = 3);
  static MetricProfile polynomial(int degree, int n = 3);

  // Throws a configuration error on invalid parameters.
  void validate() const;
  [[nodiscard]] bool has_phi1() const {
    return family == ProfileFamily::Flat || family == ProfileFamily::AsymptoticallyFlat;
  }
};

struct PhiValues {
  double phi;
  double phi_prime;
  double phi_second;
};

PhiValues eval_phi(const MetricProfile& profile, double r);

// phi1 and its first two derivatives. Only for Flat and AsymptoticallyFlat.
PhiValues eval_phi1(const MetricProfile& profile, double r);

// Scale-free ratios that stay finite on the whole half-line:
//   sigma = r / phi,  r_l1 = r phi' / phi,  r2_l2 = r^2 phi'' / phi.
// At r = 0 they equal (1, 1, 0) for every family.
struct ScaledPhi {
  double sigma;
  double r_l1;
  double r2_l2;
};

ScaledPhi eval_scaled(const MetricProfile& profile, double r);

// Limits as r -> inf of the scaled ratios, valid for every product that
// carries at least one factor sigma (which is how they enter the potentials).
// For Sinh and Polynomial sigma decays faster than any growth of r_l1, r2_l2,
// so all such products vanish and the triple (0, 0, 0) is returned.
ScaledPhi scaled_limit_at_infinity(const MetricProfile& profile);

// sigma'/sigma = 1/r - phi'/phi, evaluated without cancellation near r = 0.
double log_derivative_sigma(const MetricProfile& profile, double r);

struct ProfileConstants {
  double A_phi = 0.0;
  double B_phi = 0.0;
  double c_phi = 0.0;
  double A_witness_r = 0.0;
  double B_witness_r = 0.0;
  double c_witness_r = 0.0;
};

// Sup-norm constants of the phi1 decomposition. Unsupported-family error for
// Sinh and Polynomial.
ProfileConstants profile_constants(const MetricProfile& profile, const InfimumScanPolicy& scan = {});

// sup |sigma'/sigma| over (0, inf), defined for every family.
double c_phi(const MetricProfile& profile, const InfimumScanPolicy& scan = {});

struct A2Verdict {
  bool pass = false;
  double threshold = 0.0;
  double achieved = 0.0;  // max(A_phi, B_phi)
  bool strict = true;     // strict inequality required (mu0 < 2)
};

A2Verdict check_A2(const ProfileConstants& constants, double mu0);
A2Verdict check_A2(const MetricProfile& profile, double mu0, const InfimumScanPolicy& scan = {});

}  // namespace warpdirac
