#include "kht/rings.hpp"

#include "doctest.h"
#include "support/testring.hpp"

using namespace kht;
using khttest::rng_t;

TEST_CASE("cli ring selection") {
  auto s = ring_from_cli("z", "2");
  CHECK(s.kind == ring_spec::kind_t::zz);
  CHECK(s.c_text == "2");
  CHECK(s.snf_capable());

  CHECK_THROWS_WITH_AS(ring_from_cli("z", "1"), doctest::Contains("InvalidPrime"), error);
  CHECK_THROWS_WITH_AS(ring_from_cli("z", "4"), doctest::Contains("InvalidPrime"), error);
  CHECK_THROWS_WITH_AS(ring_from_cli("z", "x"), doctest::Contains("InvalidPrime"), error);

  auto gs = ring_from_cli("gauss", "1+i");
  CHECK(gs.kind == ring_spec::kind_t::gauss);
  CHECK(gs.c_text == "1+i");

  CHECK_THROWS_WITH_AS(ring_from_cli("q-poly", "H+1"),
                       doctest::Contains("UnsupportedCForRing"), error);
  CHECK_THROWS_WITH_AS(ring_from_cli("foo", "2"), doctest::Contains("UnknownRing"), error);
  CHECK_THROWS_WITH_AS(ring_from_cli("f4-poly", "H"), doctest::Contains("InvalidPrime"),
                       error);

  auto f3 = ring_from_cli("f3-poly", "H");
  CHECK(f3.p == 3);
  CHECK(f3.type_flag() == "f3-poly");
  auto zp = ring_from_cli("z-poly", "H");
  CHECK(!zp.snf_capable());
}

TEST_CASE("gaussian integers") {
  gauss_ring R;
  gint one_plus_i{1, 1}, one_minus_i{1, -1};
  CHECK(R.eq(R.mul(one_plus_i, one_minus_i), R.from_int(2)));  // norm identity

  // 2 = -i * (1+i)^2, -i a unit, so valuation(2, 1+i) = 2
  gint minus_i{0, -1};
  CHECK(R.is_unit(minus_i));
  CHECK(R.eq(R.mul(minus_i, R.mul(one_plus_i, one_plus_i)), R.from_int(2)));
  CHECK(valuation(R, R.from_int(2), one_plus_i) == 2);
  CHECK(valuation(R, R.zero(), one_plus_i) == val_inf);

  // euclid step for 3+2i by 1+i: some remainder of norm < 2 must exist, and
  // divmod must find one (nearest-quotient enumeration as the oracle)
  gint x{3, 2};
  bool witness = false;
  for (long qa = -4; qa <= 4; ++qa)
    for (long qb = -4; qb <= 4; ++qb) {
      gint q{qa, qb};
      if (R.norm(R.sub(x, R.mul(q, one_plus_i))) < 2) witness = true;
    }
  CHECK(witness);
  auto [q, r] = R.divmod(x, one_plus_i);
  CHECK(R.eq(x, R.add(R.mul(q, one_plus_i), r)));
  CHECK(R.norm(r) < R.norm(one_plus_i));

  CHECK(R.str(gint{3, -2}) == "3-2i");
  CHECK(R.str(gint{0, 1}) == "i");
  CHECK(R.str(gint{-1, -1}) == "-1-i");
}

TEST_CASE("eisenstein integers") {
  eisen_ring R;
  gint c{1, 1};  // 1+w
  // (1+w)(2-w) = 3 once w^2 = w-1 is applied; both routes checked
  gint two_minus_w{2, -1};
  CHECK(R.eq(R.mul(c, two_minus_w), R.from_int(3)));
  auto d = R.exact_div(R.from_int(3), c);
  REQUIRE(d.has_value());
  CHECK(R.eq(*d, two_minus_w));

  CHECK(R.norm(c) == 3);
  CHECK(valuation(R, R.from_int(3), c) == 2);  // 3 = -w^2 (1+w)^2 up to unit

  // the six units are exactly the norm-1 elements in a small grid
  int units = 0;
  for (long a = -2; a <= 2; ++a)
    for (long b = -2; b <= 2; ++b)
      if (R.norm(gint{a, b}) == 1) ++units;
  CHECK(units == 6);

  // canonical sector hits exactly one associate of every nonzero element
  for (long a = -5; a <= 5; ++a)
    for (long b = -5; b <= 5; ++b) {
      gint x{a, b};
      if (R.is_zero(x)) continue;
      gint canon = R.mul(R.canonical_unit(x), x);
      CHECK(sgn(canon.a) > 0);
      CHECK(sgn(canon.b) >= 0);
      CHECK(R.eq(R.mul(R.canonical_unit(canon), canon), canon));
    }
  CHECK(R.str(gint{1, 1}) == "1+w");
}

TEST_CASE("integers and polynomials") {
  zz_ring Z;
  auto [q7, r7] = Z.divmod(Z.from_int(7), Z.from_int(3));
  CHECK(q7 == 2);
  CHECK(r7 == 1);
  CHECK(*Z.exact_div(Z.from_int(12), Z.from_int(2)) == 6);
  CHECK(!Z.exact_div(Z.from_int(7), Z.from_int(2)).has_value());
  CHECK(valuation(Z, Z.from_int(12), Z.from_int(2)) == 2);
  CHECK(valuation(Z, Z.from_int(0), Z.from_int(2)) == val_inf);

  qpoly_ring Q;
  CHECK(!Q.is_unit(Q.gen()));
  CHECK(Q.is_unit(Q.from_int(5)));
  // (H^3 + H)/H = H^2 + 1
  auto h3h = Q.add(Q.monomial(Q.cf.one(), 3), Q.gen());
  auto dv = Q.exact_div(h3h, Q.gen());
  REQUIRE(dv.has_value());
  CHECK(Q.eq(*dv, Q.add(Q.monomial(Q.cf.one(), 2), Q.one())));

  fppoly_ring F2{fp_field{2}};
  auto h2p1 = F2.add(F2.monomial(F2.cf.one(), 2), F2.one());
  auto [qf, rf] = F2.divmod(h2p1, F2.gen());
  CHECK(F2.eq(qf, F2.gen()));
  CHECK(F2.eq(rf, F2.one()));

  zpoly_ring ZH;
  CHECK_THROWS_WITH_AS(ZH.divmod(ZH.gen(), ZH.from_int(2)),
                       doctest::Contains("NotEuclidean"), error);
  CHECK(ZH.exact_div(ZH.monomial(ZH.cf.from_int(2), 1), ZH.from_int(2)).has_value());
  CHECK(!ZH.exact_div(ZH.one(), ZH.from_int(2)).has_value());
  CHECK(!ZH.is_unit(ZH.from_int(2)));
  CHECK(ZH.is_unit(ZH.from_int(-1)));

  CHECK(ZH.str(ZH.add(ZH.monomial(ZH.cf.one(), 2), ZH.one())) == "H^2 + 1");
  qpoly_ring QP;
  CHECK(QP.str(QP.monomial(mpq_class(-1, 2), 5)) == "-(1/2)H^5");
}

TEST_CASE("fp field exhaustive p=31") {
  fp_field F{31};
  for (uint64_t a = 1; a < 31; ++a) {
    CHECK(F.mul(a, F.inv_unit(a)) == 1);
  }
  CHECK(F.from_int(-1) == 30);
}

template <class R>
static void ring_properties(const R& rg, const typename R::elem& c, unsigned seed) {
  rng_t g(seed);
  for (int it = 0; it < 300; ++it) {
    auto x = khttest::rand_elem(rg, g);
    auto y = khttest::rand_elem(rg, g);
    auto u = khttest::rand_unit(rg, g);

    // exact_div(x*y, y) = x
    if (!rg.is_zero(y)) {
      auto d = rg.exact_div(rg.mul(x, y), y);
      REQUIRE(d.has_value());
      CHECK(rg.eq(*d, x));
    }

    // euclidean contract
    if constexpr (R::snf_capable) {
      if (!rg.is_zero(y)) {
        auto [q, r] = rg.divmod(x, y);
        CHECK(rg.eq(x, rg.add(rg.mul(q, y), r)));
        CHECK((rg.is_zero(r) || rg.euclid_size(r) < rg.euclid_size(y)));
      }
    }

    // valuation additivity (c prime)
    if (!rg.is_zero(x) && !rg.is_zero(y)) {
      CHECK(valuation(rg, rg.mul(x, y), c) ==
            valuation(rg, x, c) + valuation(rg, y, c));
    }

    // canonical associates: unit-invariant and idempotent
    auto cx = rg.mul(rg.canonical_unit(x), x);
    auto cux = rg.mul(rg.canonical_unit(rg.mul(u, x)), rg.mul(u, x));
    CHECK(rg.eq(cx, cux));
    CHECK(rg.eq(rg.mul(rg.canonical_unit(cx), cx), cx));
    CHECK(rg.is_unit(rg.canonical_unit(x)));

    // unit arithmetic
    CHECK(rg.eq(rg.mul(u, rg.inv_unit(u)), rg.one()));
  }
}

TEST_CASE("randomized ring properties over the five snf-capable rings") {
  ring_properties(zz_ring{}, mpz_class(2), 101);
  ring_properties(zz_ring{}, mpz_class(3), 102);
  ring_properties(qpoly_ring{}, qpoly_ring{}.gen(), 103);
  ring_properties(fppoly_ring{fp_field{2}}, fppoly_ring{fp_field{2}}.gen(), 104);
  ring_properties(fppoly_ring{fp_field{3}}, fppoly_ring{fp_field{3}}.gen(), 105);
  ring_properties(gauss_ring{}, gint{1, 1}, 106);
  ring_properties(eisen_ring{}, gint{1, 1}, 107);
  // Z[H]: not euclidean but the other contracts still apply
  ring_properties(zpoly_ring{}, zpoly_ring{}.gen(), 108);
}
