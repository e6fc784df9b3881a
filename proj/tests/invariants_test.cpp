#include <doctest.h>

#include <vector>

#include "kht/invariants.hpp"
#include "support/mkdiagram.hpp"

using namespace kht;
using khttest::braid_closure;
using khttest::poke_pairs;
using khttest::r1_twist;
using khttest::r2_poke;
using khttest::random_diagram;
using khttest::torus_knot;

namespace {

const char* tre_pd = "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]";
const char* fig8_pd = "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]";

void check_formula(const invariant_report& rep) {
  CHECK(rep.s == 2 * rep.d_c + rep.w - rep.r + 1);
  CHECK(((rep.s - (rep.components - 1)) % 2 + 2) % 2 == 0);
}

}  // namespace

TEST_CASE("golden invariant values on small knots") {
  diagram tre = parse_pd(tre_pd);
  diagram fig8 = parse_pd(fig8_pd);
  diagram unk = parse_pd("[]");

  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");

  auto rt = reduced_s(tre, z2);
  CHECK(rt.s == -2);
  CHECK(rt.d_c == 1);
  CHECK(rt.w == -3);
  CHECK(rt.r == 2);
  CHECK(rt.components == 1);
  check_formula(rt);

  CHECK(reduced_s(tre, z3).s == -2);
  CHECK(unreduced_s(tre, z2).s == -2);
  CHECK(reduced_s(mirror(tre), z2).s == 2);

  for (auto& spec : {z2, z3}) {
    CHECK(reduced_s(unk, spec).s == 0);
    CHECK(unreduced_s(unk, spec).s == 0);
    CHECK(reduced_s(fig8, spec).s == 0);
  }

  for (const char* t : {"q-poly", "f2-poly", "f3-poly"}) {
    auto spec = ring_spec::from_cli(t, "H");
    CHECK(reduced_s(tre, spec).s == -2);
    CHECK(reduced_s(fig8, spec).s == 0);
  }
  CHECK(reduced_s(tre, ring_spec::from_cli("gauss", "")).s == -2);
  CHECK(reduced_s(tre, ring_spec::from_cli("eisen", "")).s == -2);

  // no homology without a euclidean ring
  try {
    reduced_s(tre, ring_spec::from_cli("z-poly", "H"));
    CHECK(false);
  } catch (const error& e) {
    CHECK(e.code == errc::not_euclidean);
  }
}

TEST_CASE("epsilon is 0 or 2 and vanishes where the theory says so") {
  diagram tre = parse_pd(tre_pd);
  diagram fig8 = parse_pd(fig8_pd);

  for (const char* t : {"z", "q-poly", "f2-poly", "f3-poly"}) {
    auto spec = ring_spec::from_cli(t, t[0] == 'z' ? "2" : "H");
    CHECK(epsilon_c(tre, spec) == 0);
    CHECK(epsilon_c(fig8, spec) == 0);
  }
  for (const char* t : {"z", "gauss", "eisen"}) {
    auto spec = ring_spec::from_cli(t, t[0] == 'z' ? "3" : "");
    int e1 = epsilon_c(tre, spec);
    int e8 = epsilon_c(fig8, spec);
    CHECK((e1 == 0 || e1 == 2));
    CHECK((e8 == 0 || e8 == 2));
  }
}

TEST_CASE("the refined class generates a free summand") {
  diagram tre = parse_pd(tre_pd);
  diagram fig8 = parse_pd(fig8_pd);
  diagram unk = parse_pd("[]");
  unk.ensure_mark();

  auto z2 = ring_spec::from_cli("z", "2");
  auto rc = refined_class(tre, z2);
  REQUIRE(rc.coords.size() == 1);
  CHECK((rc.coords[0] == "1" || rc.coords[0] == "-1"));
  CHECK(rc.gcd_unit);

  auto ru = refined_class(unk, z2);
  REQUIRE(ru.coords.size() == 1);
  CHECK(ru.coords[0] == "1");
  CHECK(ru.gcd_unit);

  for (const char* t : {"z", "gauss", "eisen"}) {
    auto spec = ring_spec::from_cli(t, t[0] == 'z' ? "2" : "");
    CHECK(refined_class(tre, spec).gcd_unit);
    CHECK(refined_class(fig8, spec).gcd_unit);
  }
}

TEST_CASE("mirror reports") {
  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");

  auto mt = mirror_check(parse_pd(tre_pd), z2);
  CHECK(mt.s == -2);
  CHECK(mt.s_mirror == 2);
  CHECK(mt.antisymmetric);

  auto mu = mirror_check(parse_pd("[]"), z3);
  CHECK(mu.s == 0);
  CHECK(mu.s_mirror == 0);
  CHECK(mu.antisymmetric);

  auto m8 = mirror_check(parse_pd(fig8_pd), z2);
  CHECK(m8.s == 0);
  CHECK(m8.antisymmetric);
}

TEST_CASE("a split unknot drops s by one and keeps the divisibility") {
  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");
  diagram tre = parse_pd(tre_pd);
  diagram split = from_tuples({{1, 4, 2, 5}, {3, 6, 4, 1}, {5, 2, 6, 3}}, 1, 0,
                              -1, "trefoil plus circle");

  for (auto& spec : {z2, z3}) {
    auto a = reduced_s(tre, spec);
    auto b = reduced_s(split, spec);
    CHECK(b.components == 2);
    CHECK(b.d_c == a.d_c);
    CHECK(b.s == a.s - 1);
    check_formula(b);
  }
}

TEST_CASE("the unreduced theory is the reduced theory of the pointed sum") {
  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");
  diagram tre = parse_pd(tre_pd);
  diagram fig8 = parse_pd(fig8_pd);
  diagram thopf = braid_closure({1, 1}, 2, "positive hopf");

  for (auto& spec : {z2, z3})
    for (auto* d : {&tre, &fig8, &thopf}) {
      auto un = unreduced_s(*d, spec);
      auto plus = reduced_s(add_pointed_unknot(*d), spec);
      CHECK(un.d_c == plus.d_c);
      CHECK(un.s == plus.s + 1);
      check_formula(un);
    }
}

TEST_CASE("reidemeister twists and pokes shift the divisibility by the "
          "writhe and circle count change") {
  auto z2 = ring_spec::from_cli("z", "2");
  khttest::rng_t g(271828);

  std::vector<diagram> seeds = {parse_pd(tre_pd), parse_pd(fig8_pd),
                                braid_closure({1, 1, 1}, 2, "t23")};
  for (int i = 0; i < 4; ++i) seeds.push_back(random_diagram(g, 5, true));

  int cases = 0;
  for (auto& d0 : seeds) {
    auto base = reduced_s(d0, z2);
    std::vector<diagram> moved;
    moved.push_back(r1_twist(d0, 1 + (int)(g() % d0.n_edges), +1, g() % 2));
    moved.push_back(r1_twist(d0, 1 + (int)(g() % d0.n_edges), -1, g() % 2));
    auto ps = poke_pairs(d0);
    for (int t = 0; t < 2 && !ps.empty(); ++t) {
      auto [e, f] = ps[g() % ps.size()];
      moved.push_back(r2_poke(d0, e, f));
    }
    for (auto& d1 : moved) {
      auto rep = reduced_s(d1, z2);
      int j = ((rep.r - base.r) - (rep.w - base.w)) / 2;
      CHECK(rep.s == base.s);
      CHECK(rep.d_c == base.d_c + j);
      check_formula(rep);
      ++cases;
    }
  }
  CHECK(cases >= 20);
}

TEST_CASE("positive diagrams have divisibility zero and torus knots reach "
          "the expected values") {
  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");

  struct row {
    int p, q;
    long s;
  };
  for (auto [p, q, s] : {row{2, 3, 2}, row{2, 5, 4}, row{3, 4, 6}}) {
    diagram t = torus_knot(p, q);
    for (auto& spec : {z2, z3}) {
      auto rep = reduced_s(t, spec);
      CHECK(rep.d_c == 0);
      CHECK(rep.s == s);
      CHECK(rep.s == (p - 1) * (q - 1));
    }
  }

  khttest::rng_t g(997);
  for (int i = 0; i < 6; ++i) {
    std::vector<int> word;
    int strands = 2 + (int)(g() % 2);
    int len = 3 + (int)(g() % 4);
    for (int j = 0; j < len; ++j) word.push_back(1 + (int)(g() % (strands - 1)));
    diagram d = braid_closure(word, strands, "positive braid");
    auto rep = reduced_s(d, z2);
    CHECK(rep.d_c == 0);
    CHECK(rep.s == rep.w - rep.r + 1);
  }
}

TEST_CASE("connected sums add the invariant") {
  auto z2 = ring_spec::from_cli("z", "2");
  auto z3 = ring_spec::from_cli("z", "3");
  diagram tre = parse_pd(tre_pd);
  tre.ensure_mark();
  diagram mtre = mirror(tre);
  mtre.ensure_mark();
  diagram fig8 = parse_pd(fig8_pd);
  fig8.ensure_mark();

  std::vector<const diagram*> pool = {&tre, &mtre, &fig8};
  for (auto& spec : {z2, z3})
    for (auto* a : pool)
      for (auto* b : pool) {
        auto sum = connected_sum(*a, *b);
        CHECK(reduced_s(sum, spec).s ==
              reduced_s(*a, spec).s + reduced_s(*b, spec).s);
      }
}
