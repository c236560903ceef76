#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "warpdirac/errors.hpp"
#include "warpdirac/mode_spectrum.hpp"

using namespace warpdirac;

TEST_CASE("sphere spectrum examples") {
  const auto s3 = sphere_spectrum(3, 3);
  std::multiset<int> got;
  for (const auto& m : s3) got.insert(m.two_mu);
  CHECK(got == std::multiset<int>{-6, -4, -2, 2, 4, 6});

  const ModeIndex two = make_mode(4, 3);
  REQUIRE(two.multiplicity.has_value());
  CHECK(*two.multiplicity == 4);

  const auto s5 = sphere_spectrum(5, 2);
  REQUIRE(s5.size() == 2);
  CHECK(std::abs(s5[0].two_mu) == 4);
  CHECK(std::abs(s5[1].two_mu) == 4);

  const auto s4 = sphere_spectrum(4, 3.5);
  std::set<int> abs4;
  for (const auto& m : s4) abs4.insert(std::abs(m.two_mu));
  CHECK(abs4 == std::set<int>{3, 5, 7});
  CHECK_FALSE(s4.front().multiplicity.has_value());

  CHECK(sphere_spectrum(5, 1.5).empty());
}

TEST_CASE("half eigenvalues outside the spectrum are rejected") {
  CHECK_THROWS_AS(make_mode(1, 3), Error);
  CHECK_THROWS_AS(make_mode(3, 3), Error);
  CHECK_THROWS_AS(make_mode(4, 4), Error);
  CHECK_FALSE(in_sphere_spectrum(1, 3));
  CHECK(in_sphere_spectrum(-3, 4));
}

TEST_CASE("multiplicity table for higher dimensions") {
  MultiplicityTable t;
  t.source = "user supplied";
  t.by_two_abs_mu[3] = 4;
  const ModeIndex m = make_mode(-3, 4, &t);
  REQUIRE(m.multiplicity.has_value());
  CHECK(*m.multiplicity == 4);
  CHECK_FALSE(make_mode(5, 4, &t).multiplicity.has_value());
}

TEST_CASE("degrees follow the sign case split") {
  const ModeIndex p = make_mode(4, 3);  // mu = 2
  CHECK(*p.degree_plus == 1);
  CHECK(*p.degree_minus == 2);
  const ModeIndex n = make_mode(-4, 3);  // mu = -2
  CHECK(*n.degree_plus == 2);
  CHECK(*n.degree_minus == 1);
  const ModeIndex h = make_mode(5, 4);  // mu = 5/2, (n-1)/2 = 3/2
  CHECK(*h.degree_plus == 1);
  CHECK(*h.degree_minus == 2);
}

TEST_CASE("Littlewood-Paley band examples") {
  const LPBand b30 = lp_band(3, 0);
  CHECK(b30.a() == 1.0);
  CHECK(b30.b() == 3.0);
  const LPBand b32 = lp_band(3, 2);
  CHECK(b32.a() == 4.0);
  CHECK(b32.b() == 9.0);
  const LPBand b41 = lp_band(4, 1);
  CHECK(b41.a() == 2.5);
  CHECK(b41.b() == 5.5);
  for (const ModeIndex& m : modes_in_band(3, 1)) {
    CHECK(std::abs(m.mu()) >= 2.0);
    CHECK(std::abs(m.mu()) <= 5.0);
  }
  CHECK(modes_in_band(3, 1).size() == 8);
  CHECK(band_index(make_mode(2, 3)) == 0);
  CHECK(band_index(make_mode(8, 3)) == 1);
}

TEST_CASE("Laplace eigenvalue check examples") {
  const LaplaceCheck a = laplace_eigenvalue_check(make_mode(4, 3), SpinorComponent::Plus);
  CHECK(a.lhs() == 2.0);
  CHECK(a.rhs() == 2.0);
  const LaplaceCheck b = laplace_eigenvalue_check(make_mode(2, 3), SpinorComponent::Plus);
  CHECK(b.lhs() == 0.0);
  CHECK(b.rhs() == 0.0);
  const LaplaceCheck c = laplace_eigenvalue_check(make_mode(-2, 3), SpinorComponent::Minus);
  CHECK(c.lhs() == 0.0);
  CHECK(c.rhs() == 0.0);
  ModeIndex bare;
  bare.two_mu = 2;
  CHECK_THROWS_AS(laplace_eigenvalue_check(bare, SpinorComponent::Plus), Error);
}

TEST_CASE("combinatorial identities for all modes up to 64") {
  for (int n : {3, 4, 5}) {
    const auto modes = sphere_spectrum(n, 64);
    REQUIRE_FALSE(modes.empty());
    std::multiset<int> twos;
    for (const ModeIndex& m : modes) {
      twos.insert(m.two_mu);
      // Independent evaluation of the eigenvalue products in exact integers (times 4).
      const long tm = m.two_mu, k = n - 1;
      const long lp = *m.degree_plus, lm = *m.degree_minus;
      CHECK((tm - k) * (tm + k - 2) == 4 * lp * (lp + n - 2));
      CHECK((tm + k) * (tm - k + 2) == 4 * lm * (lm + n - 2));
      CHECK(laplace_eigenvalue_check(m, SpinorComponent::Plus).holds());
      CHECK(laplace_eigenvalue_check(m, SpinorComponent::Minus).holds());

      for (int j = 0; j < 8; ++j) {
        const LPBand band = lp_band(n, j);
        CHECK(band.two_a < band.two_b);
        const int a = std::abs(m.two_mu);
        // 2|mu| > 2 b_j => both degrees >= 2^(j+1); 2|mu| < 2 a_j => both degrees < 2^j.
        if (a > band.two_b) {
          CHECK(lp >= (1L << (j + 1)));
          CHECK(lm >= (1L << (j + 1)));
        }
        if (a < band.two_a) {
          CHECK(lp < (1L << j));
          CHECK(lm < (1L << j));
        }
      }
    }
    for (int t : twos) {
      CHECK(twos.count(t) == twos.count(-t));
    }
  }
}
