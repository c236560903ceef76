#include "warpdirac/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpdirac {

namespace {

// r^2 (V^2 + sign V') and r^3 (2 V V' + sign V'') in terms of the scaled ratios.
double r2_channel(double mu, const ScaledPhi& s, int sign) {
  return mu * mu * s.sigma * s.sigma - sign * mu * s.sigma * s.r_l1;
}

double r3_channel_prime(double mu, const ScaledPhi& s, int sign) {
  return -2.0 * mu * mu * s.sigma * s.sigma * s.r_l1 + sign * mu * s.sigma * (2.0 * s.r_l1 * s.r_l1 - s.r2_l2);
}

TermInfimum to_term(const ScanExtremum& e) { return {e.value, e.arg, e.diverges}; }

DeltaTerms delta_terms_for_sign(const ModePotential& pot, int sign, const InfimumScanPolicy& scan) {
  const MetricProfile& prof = pot.profile;
  const double mu = pot.mu;
  auto t1 = [&](const ScaledPhi& s) { return 0.25 + r2_channel(mu, s, sign); };
  auto t2 = [&](const ScaledPhi& s) { return 0.25 - r3_channel_prime(mu, s, sign) - r2_channel(mu, s, sign); };
  const ScaledPhi at0{1.0, 1.0, 0.0};
  const ScaledPhi atinf = scaled_limit_at_infinity(prof);

  DeltaTerms out{};
  out.first = to_term(scan_infimum([&](double r) { return t1(eval_scaled(prof, r)); }, scan, t1(at0), t1(atinf)));
  out.second = to_term(scan_infimum([&](double r) { return t2(eval_scaled(prof, r)); }, scan, t2(at0), t2(atinf)));
  out.delta = std::min({0.25, out.first.value, out.second.value});
  return out;
}

}  // namespace

ModePotential::ModePotential(double mu_, MetricProfile profile_) : mu(mu_), profile(profile_) {
  require(mu != 0.0 && std::isfinite(mu), ErrorKind::Configuration, "angular eigenvalue mu must be nonzero");
  profile.validate();
}

double ModePotential::V(double r) const {
  const ScaledPhi s = eval_scaled(profile, r);
  return mu * s.sigma / r;
}

double ModePotential::V_prime(double r) const {
  const ScaledPhi s = eval_scaled(profile, r);
  return -mu * s.sigma * s.r_l1 / (r * r);
}

double ModePotential::V_second(double r) const {
  const ScaledPhi s = eval_scaled(profile, r);
  return mu * s.sigma * (2.0 * s.r_l1 * s.r_l1 - s.r2_l2) / (r * r * r);
}

double ModePotential::channel(double r, int sign) const {
  const double v = V(r);
  return v * v + sign * V_prime(r);
}

double ModePotential::c(double r, int sign) const {
  const double k = (n() - 1.0) * (n() - 3.0) / 4.0;
  return -k / (r * r) + channel(r, sign);
}

double ModePotential::c_prime(double r, int sign) const {
  const double k = (n() - 1.0) * (n() - 3.0) / 4.0;
  return 2.0 * k / (r * r * r) + 2.0 * V(r) * V_prime(r) + sign * V_second(r);
}

double ModePotential::V_combined(double r) const {
  const PhiValues p = eval_phi(profile, r);
  if (std::isfinite(p.phi) && std::isfinite(p.phi_prime) && p.phi > 0.0) {
    return mu * (mu + p.phi_prime) / (p.phi * p.phi);
  }
  const ScaledPhi s = eval_scaled(profile, r);
  return (mu * mu * s.sigma * s.sigma + mu * s.sigma * s.r_l1) / (r * r);
}

DeltaPair delta_pm(const ModePotential& pot, const InfimumScanPolicy& scan) {
  return {delta_terms_for_sign(pot, +1, scan), delta_terms_for_sign(pot, -1, scan)};
}

DeltaTerms delta_phi_terms(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan) {
  require(mu != 0.0, ErrorKind::Configuration, "angular eigenvalue mu must be nonzero");
  profile.validate();
  // W = mu (mu + phi') / phi^2,
  // r^2 W  = mu^2 sigma^2 + mu sigma r_l1,
  // r^3 W' = mu sigma r2_l2 - 2 mu^2 sigma^2 r_l1 - 2 mu sigma r_l1^2.
  auto r2W = [mu](const ScaledPhi& s) { return mu * mu * s.sigma * s.sigma + mu * s.sigma * s.r_l1; };
  auto r3Wp = [mu](const ScaledPhi& s) {
    return mu * s.sigma * s.r2_l2 - 2.0 * mu * mu * s.sigma * s.sigma * s.r_l1 - 2.0 * mu * s.sigma * s.r_l1 * s.r_l1;
  };
  auto f1 = [&](const ScaledPhi& s) { return 4.0 * r2W(s) + 1.0; };
  auto f2 = [&](const ScaledPhi& s) { return -4.0 * r2W(s) - 4.0 * r3Wp(s) + 1.0; };
  const ScaledPhi at0{1.0, 1.0, 0.0};
  const ScaledPhi atinf = scaled_limit_at_infinity(profile);

  DeltaTerms out{};
  out.first = to_term(scan_infimum([&](double r) { return f1(eval_scaled(profile, r)); }, scan, f1(at0), f1(atinf)));
  out.second = to_term(scan_infimum([&](double r) { return f2(eval_scaled(profile, r)); }, scan, f2(at0), f2(atinf)));
  out.delta = std::min({1.0, out.first.value, out.second.value});
  return out;
}

double delta_phi(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan) {
  return delta_phi_terms(profile, mu, scan).delta;
}

RadialFunction channel_function(const ModePotential& pot, int sign) {
  require(sign == 1 || sign == -1, ErrorKind::Configuration, "channel sign must be +1 or -1");
  RadialFunction f;
  f.c = [pot, sign](double r) { return pot.c(r, sign); };
  f.c_prime = [pot, sign](double r) { return pot.c_prime(r, sign); };
  const double k = (pot.n() - 1.0) * (pot.n() - 3.0) / 4.0;
  const ScaledPhi at0{1.0, 1.0, 0.0};
  const ScaledPhi atinf = scaled_limit_at_infinity(pot.profile);
  f.r2c_at_zero = -k + r2_channel(pot.mu, at0, sign);
  f.r2c_at_infinity = -k + r2_channel(pot.mu, atinf, sign);
  f.r3c_prime_at_zero = 2.0 * k + r3_channel_prime(pot.mu, at0, sign);
  f.r3c_prime_at_infinity = 2.0 * k + r3_channel_prime(pot.mu, atinf, sign);
  return f;
}

RadialFunction zero_function() {
  RadialFunction f;
  f.c = [](double) { return 0.0; };
  f.c_prime = [](double) { return 0.0; };
  f.r2c_at_zero = f.r2c_at_infinity = f.r3c_prime_at_zero = f.r3c_prime_at_infinity = 0.0;
  return f;
}

double delta_c(const RadialFunction& c, int n, const InfimumScanPolicy& scan) {
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  const double hardy = (n - 2.0) * (n - 2.0) / 4.0;
  auto lim1 = [&](std::optional<double> r2c) { return r2c ? std::optional<double>(*r2c + hardy) : std::nullopt; };
  auto lim2 = [&](std::optional<double> r3cp, std::optional<double> r2c) {
    return (r3cp && r2c) ? std::optional<double>(-*r3cp - *r2c + hardy) : std::nullopt;
  };
  const ScanExtremum a = scan_infimum([&](double r) { return c.c(r) * r * r + hardy; }, scan,
                                      lim1(c.r2c_at_zero), lim1(c.r2c_at_infinity));
  const ScanExtremum b = scan_infimum([&](double r) { return -r * r * r * c.c_prime(r) - r * r * c.c(r) + hardy; },
                                      scan, lim2(c.r3c_prime_at_zero, c.r2c_at_zero),
                                      lim2(c.r3c_prime_at_infinity, c.r2c_at_infinity));
  return std::min({0.25, a.value, b.value});
}

AdmissibilityReport check_admissible(const MetricProfile& profile, double mu, const InfimumScanPolicy& scan) {
  const ModePotential pot(mu, profile);
  AdmissibilityReport rep;
  rep.mu = mu;
  const DeltaPair d = delta_pm(pot, scan);
  rep.delta_plus = d.delta_plus();
  rep.delta_minus = d.delta_minus();
  const DeltaTerms pos = delta_phi_terms(profile, mu, scan);
  const DeltaTerms neg = delta_phi_terms(profile, -mu, scan);
  rep.delta_phi_mu = pos.delta;
  rep.delta_phi_neg_mu = neg.delta;

  auto r2W = [mu](const ScaledPhi& s) { return 4.0 * std::abs(mu * mu * s.sigma * s.sigma + mu * s.sigma * s.r_l1); };
  const ScanExtremum sup = scan_supremum([&](double r) { return r2W(eval_scaled(profile, r)); }, scan,
                                         r2W({1.0, 1.0, 0.0}), r2W(scaled_limit_at_infinity(profile)));
  rep.sup_4r2V = sup.diverges ? std::numeric_limits<double>::infinity() : sup.value;

  const double w4 = std::abs(pot.V_combined(1e4));
  const double w5 = std::abs(pot.V_combined(1e5));
  const double w6 = std::abs(pot.V_combined(1e6));
  rep.limit_at_infinity_ok = w5 <= w4 && w6 <= w5 && w6 < 1e-6;

  rep.admissible = rep.delta_phi_mu > 0.0 && rep.delta_phi_neg_mu > 0.0 && std::isfinite(rep.sup_4r2V) &&
                   rep.limit_at_infinity_ok;

  // The witness is the arg-inf of the first violated term, in the order of the definition.
  auto first_failure = [](const DeltaTerms& t) -> std::optional<double> {
    if (t.first.value <= 0.0) return t.first.arg;
    if (t.second.value <= 0.0) return t.second.arg;
    return std::nullopt;
  };
  if (!rep.admissible) {
    if (auto w = first_failure(pos); rep.delta_phi_mu <= 0.0 && w) {
      rep.witness_r = *w;
      rep.reason = "delta_phi(mu) is not positive";
    } else if (auto w2 = first_failure(neg); rep.delta_phi_neg_mu <= 0.0 && w2) {
      rep.witness_r = *w2;
      rep.reason = "delta_phi(-mu) is not positive";
    } else if (!std::isfinite(rep.sup_4r2V)) {
      rep.witness_r = sup.arg;
      rep.reason = "4 r^2 V is unbounded";
    } else {
      rep.witness_r = 1e6;
      rep.reason = "V does not decay to zero at infinity";
    }
  }
  return rep;
}

double deltalemma_lower_bound(const ProfileConstants& constants, double mu0) {
  const A2Verdict v = check_A2(constants, mu0);
  require(v.pass, ErrorKind::Hypothesis,
          "smallness condition on A_phi, B_phi fails: max(A, B) = " + std::to_string(v.achieved) +
              " against threshold " + std::to_string(v.threshold));
  if (mu0 >= 2.0) return 0.25;
  return std::min(0.25 + mu0 * mu0 - mu0, 0.125) - v.achieved;
}

}  // namespace warpdirac
