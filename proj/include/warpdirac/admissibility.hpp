#pragma once

#include <optional>
#include <string>

#include "warpdirac/errors.hpp"
#include "warpdirac/metric_profiles.hpp"
#include "warpdirac/scan.hpp"

namespace warpdirac {

// Mode potential V = mu / phi with the Klein-Gordon channels
//   c_pm = -(n-1)(n-3)/(4 r^2) + V^2 pm V'.
struct ModePotential {
  double mu;
  MetricProfile profile;

  ModePotential(double mu, MetricProfile profile);

  [[nodiscard]] int n() const { return profile.n; }
  [[nodiscard]] double V(double r) const;
  [[nodiscard]] double V_prime(double r) const;
  [[nodiscard]] double V_second(double r) const;
  // V^2 + sign * V' (sign = +1 or -1)
  [[nodiscard]] double channel(double r, int sign) const;
  [[nodiscard]] double c(double r, int sign) const;
  [[nodiscard]] double c_prime(double r, int sign) const;
  // mu (mu + phi') / phi^2, which equals V^2 - V'.
  [[nodiscard]] double V_combined(double r) const;
};

struct TermInfimum {
  double value;
  double arg;
  bool diverges;
};

struct DeltaTerms {
  double delta;
  TermInfimum first;   // inf of 1/4 + r^2 (V^2 pm V')
  TermInfimum second;  // inf of 1/4 - r^3 (2 V V' pm V'') - r^2 (V^2 pm V')
};

struct DeltaPair {
  DeltaTerms plus;
  DeltaTerms minus;
  [[nodiscard]] double delta_plus() const { return plus.delta; }
  [[nodiscard]] double delta_minus() const { return minus.delta; }
};

DeltaPair delta_pm(const ModePotential& pot, const InfimumScanPolicy& scan = {});

// min(1, inf(4 r^2 W + 1), inf(-4 r^2 W - 4 r^3 W' + 1)) with W = mu (mu + phi') / phi^2.
DeltaTerms delta_phi_terms(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan = {});
double delta_phi(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan = {});

// A radial potential c(r) with its derivative and its r -> 0 / r -> inf limits
// of r^2 c and r^3 c'.
struct RadialFunction {
  std::function<double(double)> c;
  std::function<double(double)> c_prime;
  std::optional<double> r2c_at_zero;
  std::optional<double> r2c_at_infinity;
  std::optional<double> r3c_prime_at_zero;
  std::optional<double> r3c_prime_at_infinity;
};

RadialFunction channel_function(const ModePotential& pot, int sign);
RadialFunction zero_function();

double delta_c(const RadialFunction& c, int n, const InfimumScanPolicy& scan = {});

struct AdmissibilityReport {
  double mu = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double delta_phi_mu = 0.0;
  double delta_phi_neg_mu = 0.0;
  double sup_4r2V = 0.0;
  bool limit_at_infinity_ok = false;
  bool admissible = false;
  std::optional<double> witness_r;
  std::string reason;
};

AdmissibilityReport check_admissible(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan = {});

// Guaranteed lower bound on delta_pm(mu) for every mu >= mu0 under the smallness
// condition on A_phi, B_phi. Hypothesis error if that condition fails.
double deltalemma_lower_bound(const ProfileConstants& constants, double mu0);

class NonAdmissibleError : public Error {
 public:
  NonAdmissibleError(AdmissibilityReport report, const std::string& what)
      : Error(ErrorKind::NonAdmissible, what), report_(std::move(report)) {}
  [[nodiscard]] const AdmissibilityReport& report() const noexcept { return report_; }

 private:
  AdmissibilityReport report_;
};

}  // namespace warpdirac
