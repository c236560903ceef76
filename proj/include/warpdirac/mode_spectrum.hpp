#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace warpdirac {

// Angular eigenvalues are half-integers or integers; they are stored exactly
// as twice their value.
struct ModeIndex {
  int two_mu = 0;
  int n = 3;
  std::optional<std::int64_t> multiplicity;
  std::optional<int> degree_plus;
  std::optional<int> degree_minus;

  [[nodiscard]] double mu() const { return two_mu / 2.0; }
};

// Multiplicities for n > 3, keyed by 2|mu|, together with a description of
// where the numbers come from.
struct MultiplicityTable {
  std::string source;
  std::map<int, std::int64_t> by_two_abs_mu;
};

// Is |mu| in (n-1)/2 + N ?
bool in_sphere_spectrum(int two_mu, int n);

// Builds the ModeIndex for an eigenvalue of the sphere Dirac operator;
// configuration error when two_mu is not in the spectrum.
ModeIndex make_mode(int two_mu, int n, const MultiplicityTable* table = nullptr);

// All modes with |mu| <= mu_max, ordered by |mu| then sign (negative first).
std::vector<ModeIndex> sphere_spectrum(int n, double mu_max, const MultiplicityTable* table = nullptr);

struct LPBand {
  int j = 0;
  int two_a = 0;
  int two_b = 0;
  [[nodiscard]] double a() const { return two_a / 2.0; }
  [[nodiscard]] double b() const { return two_b / 2.0; }
};

LPBand lp_band(int n, int j);

// Modes with |mu| in [a_j, b_j].
std::vector<ModeIndex> modes_in_band(int n, int j, const MultiplicityTable* table = nullptr);

// Smallest j whose band contains |mu|.
int band_index(const ModeIndex& mode);

enum class SpinorComponent { Plus, Minus };

// Both sides multiplied by four so everything stays integral:
// lhs = 4 (mu - (n-1)/2)(mu + (n-1)/2 - 1) for the plus component,
//       4 (mu + (n-1)/2)(mu - (n-1)/2 + 1) for the minus component,
// rhs = 4 l (l + n - 2) with l the stored degree.
struct LaplaceCheck {
  std::int64_t lhs4 = 0;
  std::int64_t rhs4 = 0;
  [[nodiscard]] double lhs() const { return lhs4 / 4.0; }
  [[nodiscard]] double rhs() const { return rhs4 / 4.0; }
  [[nodiscard]] bool holds() const { return lhs4 == rhs4; }
};

LaplaceCheck laplace_eigenvalue_check(const ModeIndex& mode, SpinorComponent component);

}  // namespace warpdirac
