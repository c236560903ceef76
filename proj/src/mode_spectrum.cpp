#include "warpdirac/mode_spectrum.hpp"

#include <cmath>
#include <cstdlib>

#include "warpdirac/errors.hpp"

namespace warpdirac {

bool in_sphere_spectrum(int two_mu, int n) {
  if (n < 3) return false;
  const int k2 = std::abs(two_mu) - (n - 1);
  return k2 >= 0 && k2 % 2 == 0;
}

ModeIndex make_mode(int two_mu, int n, const MultiplicityTable* table) {
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  require(in_sphere_spectrum(two_mu, n), ErrorKind::Configuration,
          "mu = " + std::to_string(two_mu / 2.0) + " is not an eigenvalue of the sphere Dirac operator in dimension " +
              std::to_string(n) + " (|mu| must lie in (n-1)/2 + N)");
  ModeIndex m;
  m.two_mu = two_mu;
  m.n = n;
  const int k = (std::abs(two_mu) - (n - 1)) / 2;
  if (two_mu > 0) {
    m.degree_plus = k;
    m.degree_minus = k + 1;
  } else {
    m.degree_plus = k + 1;
    m.degree_minus = k;
  }
  if (n == 3) {
    m.multiplicity = std::abs(two_mu);
  } else if (table) {
    if (auto it = table->by_two_abs_mu.find(std::abs(two_mu)); it != table->by_two_abs_mu.end()) {
      m.multiplicity = it->second;
    }
  }
  return m;
}

std::vector<ModeIndex> sphere_spectrum(int n, double mu_max, const MultiplicityTable* table) {
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  std::vector<ModeIndex> out;
  const int two_max = static_cast<int>(std::floor(2.0 * mu_max + 1e-9));
  for (int two_abs = n - 1; two_abs <= two_max; two_abs += 2) {
    out.push_back(make_mode(-two_abs, n, table));
    out.push_back(make_mode(two_abs, n, table));
  }
  return out;
}

LPBand lp_band(int n, int j) {
  require(n >= 3, ErrorKind::Configuration, "dimension n must be at least 3");
  require(j >= 0 && j < 28, ErrorKind::Configuration, "band index j out of range");
  LPBand b;
  b.j = j;
  b.two_a = (n - 1) + (1 << (j + 1)) - 2;
  b.two_b = (n - 1) + (1 << (j + 2));
  return b;
}

std::vector<ModeIndex> modes_in_band(int n, int j, const MultiplicityTable* table) {
  const LPBand band = lp_band(n, j);
  std::vector<ModeIndex> out;
  for (const ModeIndex& m : sphere_spectrum(n, band.b(), table)) {
    const int a = std::abs(m.two_mu);
    if (a >= band.two_a && a <= band.two_b) out.push_back(m);
  }
  return out;
}

int band_index(const ModeIndex& mode) {
  const int a = std::abs(mode.two_mu);
  for (int j = 0;; ++j) {
    const LPBand band = lp_band(mode.n, j);
    if (a >= band.two_a && a <= band.two_b) return j;
  }
}

LaplaceCheck laplace_eigenvalue_check(const ModeIndex& mode, SpinorComponent component) {
  const std::int64_t tm = mode.two_mu;
  const std::int64_t k = mode.n - 1;  // twice (n-1)/2
  LaplaceCheck out;
  std::optional<int> degree;
  if (component == SpinorComponent::Plus) {
    out.lhs4 = (tm - k) * (tm + k - 2);
    degree = mode.degree_plus;
  } else {
    out.lhs4 = (tm + k) * (tm - k + 2);
    degree = mode.degree_minus;
  }
  require(degree.has_value(), ErrorKind::Configuration, "mode has no harmonic degree metadata");
  const std::int64_t l = *degree;
  out.rhs4 = 4 * l * (l + mode.n - 2);
  return out;
}

}  // namespace warpdirac
