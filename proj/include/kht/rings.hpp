#pragma once
#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kht/errors.hpp"

// Exact arithmetic contexts for the supported coefficient rings. Every
// context exposes the same surface (elem type plus pure methods) so the
// complex/simplify/homology pipelines can be templated over it:
//
//   elem zero/one/from_int; add/sub/neg/mul; is_zero/eq/is_unit/inv_unit;
//   exact_div(x,y) -> optional quotient; divmod(x,y) euclidean (throws
//   NotEuclidean where unsupported); euclid_size; canonical_unit(x) = the
//   unit u with u*x the canonical associate; str.
//
// Canonical associates: nonnegative (Z), monic (polynomials over a field),
// positive leading coefficient (Z[H]), first-quadrant a>0,b>=0 (Z[i]),
// first-sextant a>0,b>=0 on the basis {1,w} with w^2 = w-1 (Z[w]).

namespace kht {

inline constexpr long val_inf = LONG_MAX / 2;

// ---------------------------------------------------------------- integers

struct zz_ring {
  using elem = mpz_class;
  static constexpr bool snf_capable = true;
  static constexpr bool is_field = false;
  static constexpr bool graded = false;  // true when c carries a q-degree

  elem zero() const { return elem(0); }
  elem one() const { return elem(1); }
  elem from_int(long n) const { return elem(n); }
  elem add(const elem& x, const elem& y) const { return x + y; }
  elem sub(const elem& x, const elem& y) const { return x - y; }
  elem neg(const elem& x) const { return -x; }
  elem mul(const elem& x, const elem& y) const { return x * y; }
  bool is_zero(const elem& x) const { return sgn(x) == 0; }
  bool eq(const elem& x, const elem& y) const { return x == y; }
  bool is_unit(const elem& x) const { return x == 1 || x == -1; }
  elem inv_unit(const elem& u) const { return u; }

  std::optional<elem> exact_div(const elem& x, const elem& y) const {
    if (sgn(y) == 0) fail(errc::division_by_zero, "exact_div by zero");
    if (!mpz_divisible_p(x.get_mpz_t(), y.get_mpz_t())) return std::nullopt;
    elem q;
    mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    return q;
  }

  // round-to-nearest: |r| <= |y|/2
  std::pair<elem, elem> divmod(const elem& x, const elem& y) const {
    if (sgn(y) == 0) fail(errc::division_by_zero, "divmod by zero");
    elem ay = abs(y), q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), ay.get_mpz_t());
    if (2 * r > ay) {
      q += 1;
      r -= ay;
    }
    if (sgn(y) < 0) q = -q;
    return {q, r};
  }

  mpz_class euclid_size(const elem& x) const { return abs(x); }
  elem canonical_unit(const elem& x) const { return elem(sgn(x) < 0 ? -1 : 1); }
  std::string str(const elem& x) const { return x.get_str(); }
};

// ---------------------------------------------------------------- rationals

struct qq_field {
  using elem = mpq_class;
  static constexpr bool snf_capable = true;
  static constexpr bool is_field = true;
  static constexpr bool graded = false;

  elem zero() const { return elem(0); }
  elem one() const { return elem(1); }
  elem from_int(long n) const { return elem(n); }
  elem add(const elem& x, const elem& y) const { return x + y; }
  elem sub(const elem& x, const elem& y) const { return x - y; }
  elem neg(const elem& x) const { return -x; }
  elem mul(const elem& x, const elem& y) const { return x * y; }
  bool is_zero(const elem& x) const { return sgn(x) == 0; }
  bool eq(const elem& x, const elem& y) const { return x == y; }
  bool is_unit(const elem& x) const { return sgn(x) != 0; }
  elem inv_unit(const elem& u) const { return 1 / u; }

  std::optional<elem> exact_div(const elem& x, const elem& y) const {
    if (sgn(y) == 0) fail(errc::division_by_zero, "exact_div by zero");
    return elem(x / y);
  }
  std::pair<elem, elem> divmod(const elem& x, const elem& y) const {
    if (sgn(y) == 0) fail(errc::division_by_zero, "divmod by zero");
    return {x / y, elem(0)};
  }
  mpz_class euclid_size(const elem& x) const { return sgn(x) == 0 ? 0 : 1; }
  elem canonical_unit(const elem& x) const { return sgn(x) == 0 ? elem(1) : elem(1 / x); }
  std::string str(const elem& x) const { return x.get_str(); }
};

// ------------------------------------------------------------ prime fields

struct fp_field {
  // modulus below 2^31 so products fit in uint64
  std::uint64_t p;
  using elem = std::uint64_t;
  static constexpr bool snf_capable = true;
  static constexpr bool is_field = true;
  static constexpr bool graded = false;

  explicit fp_field(std::uint64_t p_) : p(p_) {}

  elem zero() const { return 0; }
  elem one() const { return 1 % p; }
  elem from_int(long n) const {
    long m = n % (long)p;
    return (elem)(m < 0 ? m + (long)p : m);
  }
  elem add(elem x, elem y) const { return (x + y) % p; }
  elem sub(elem x, elem y) const { return (x + p - y) % p; }
  elem neg(elem x) const { return x == 0 ? 0 : p - x; }
  elem mul(elem x, elem y) const { return (x * y) % p; }
  bool is_zero(elem x) const { return x == 0; }
  bool eq(elem x, elem y) const { return x == y; }
  bool is_unit(elem x) const { return x != 0; }
  elem inv_unit(elem u) const {
    // p is prime: u^(p-2)
    elem r = 1, b = u;
    for (std::uint64_t e = p - 2; e; e >>= 1) {
      if (e & 1) r = (r * b) % p;
      b = (b * b) % p;
    }
    return r;
  }
  std::optional<elem> exact_div(elem x, elem y) const {
    if (y == 0) fail(errc::division_by_zero, "exact_div by zero");
    return mul(x, inv_unit(y));
  }
  std::pair<elem, elem> divmod(elem x, elem y) const {
    if (y == 0) fail(errc::division_by_zero, "divmod by zero");
    return {mul(x, inv_unit(y)), 0};
  }
  mpz_class euclid_size(elem x) const { return x == 0 ? 0 : 1; }
  elem canonical_unit(elem x) const { return x == 0 ? 1 : inv_unit(x); }
  std::string str(elem x) const { return std::to_string(x); }
};

// ----------------------------------------------- quadratic integer rings
// Z[i] on the basis {1,i}; Z[w] on the basis {1,w} with w^2 = w - 1
// (w = exp(i*pi/3), norm(a+bw) = a^2 + ab + b^2).

struct gint {
  mpz_class a, b;
  bool operator==(const gint& o) const { return a == o.a && b == o.b; }
};

namespace detail {
inline mpz_class round_div(const mpz_class& num, const mpz_class& den) {
  // nearest integer to num/den, den > 0
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (2 * r > den) q += 1;
  return q;
}
inline std::string gint_str(const mpz_class& a, const mpz_class& b, const char* sym) {
  if (sgn(b) == 0) return a.get_str();
  std::string bs;
  if (b == 1) bs = sym;
  else if (b == -1) bs = std::string("-") + sym;
  else bs = b.get_str() + sym;
  if (sgn(a) == 0) return bs;
  return a.get_str() + (sgn(b) > 0 ? "+" : "") + bs;
}
}  // namespace detail

struct gauss_ring {
  using elem = gint;
  static constexpr bool snf_capable = true;
  static constexpr bool is_field = false;
  static constexpr bool graded = false;

  elem zero() const { return {0, 0}; }
  elem one() const { return {1, 0}; }
  elem from_int(long n) const { return {n, 0}; }
  elem add(const elem& x, const elem& y) const { return {x.a + y.a, x.b + y.b}; }
  elem sub(const elem& x, const elem& y) const { return {x.a - y.a, x.b - y.b}; }
  elem neg(const elem& x) const { return {-x.a, -x.b}; }
  elem mul(const elem& x, const elem& y) const {
    return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a};
  }
  elem conj(const elem& x) const { return {x.a, -x.b}; }
  mpz_class norm(const elem& x) const { return x.a * x.a + x.b * x.b; }
  bool is_zero(const elem& x) const { return sgn(x.a) == 0 && sgn(x.b) == 0; }
  bool eq(const elem& x, const elem& y) const { return x == y; }
  bool is_unit(const elem& x) const { return norm(x) == 1; }
  elem inv_unit(const elem& u) const { return conj(u); }

  std::optional<elem> exact_div(const elem& x, const elem& y) const {
    if (is_zero(y)) fail(errc::division_by_zero, "exact_div by zero");
    elem num = mul(x, conj(y));
    mpz_class n = norm(y);
    auto [qa, ra] = zz_ring().divmod(num.a, n);
    auto [qb, rb] = zz_ring().divmod(num.b, n);
    if (sgn(ra) != 0 || sgn(rb) != 0) return std::nullopt;
    return elem{qa, qb};
  }
  std::pair<elem, elem> divmod(const elem& x, const elem& y) const {
    if (is_zero(y)) fail(errc::division_by_zero, "divmod by zero");
    elem num = mul(x, conj(y));
    mpz_class n = norm(y);
    elem q{detail::round_div(num.a, n), detail::round_div(num.b, n)};
    return {q, sub(x, mul(q, y))};
  }
  mpz_class euclid_size(const elem& x) const { return norm(x); }
  elem canonical_unit(const elem& x) const {
    if (is_zero(x)) return one();
    elem u = one(), y = x;
    for (int k = 0; k < 4; ++k) {
      if (sgn(y.a) > 0 && sgn(y.b) >= 0) return u;
      y = mul(y, elem{0, 1});
      u = mul(u, elem{0, 1});
    }
    throw internal_error("gauss canonical_unit");
  }
  std::string str(const elem& x) const { return detail::gint_str(x.a, x.b, "i"); }
};

struct eisen_ring {
  using elem = gint;  // a + b*w
  static constexpr bool snf_capable = true;
  static constexpr bool is_field = false;
  static constexpr bool graded = false;

  elem zero() const { return {0, 0}; }
  elem one() const { return {1, 0}; }
  elem from_int(long n) const { return {n, 0}; }
  elem add(const elem& x, const elem& y) const { return {x.a + y.a, x.b + y.b}; }
  elem sub(const elem& x, const elem& y) const { return {x.a - y.a, x.b - y.b}; }
  elem neg(const elem& x) const { return {-x.a, -x.b}; }
  elem mul(const elem& x, const elem& y) const {
    // (a+bw)(c+dw) = ac + (ad+bc)w + bd(w-1)
    return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a + x.b * y.b};
  }
  elem conj(const elem& x) const { return {x.a + x.b, -x.b}; }  // conj(w) = 1-w
  mpz_class norm(const elem& x) const { return x.a * x.a + x.a * x.b + x.b * x.b; }
  bool is_zero(const elem& x) const { return sgn(x.a) == 0 && sgn(x.b) == 0; }
  bool eq(const elem& x, const elem& y) const { return x == y; }
  bool is_unit(const elem& x) const { return norm(x) == 1; }
  elem inv_unit(const elem& u) const { return conj(u); }

  std::optional<elem> exact_div(const elem& x, const elem& y) const {
    if (is_zero(y)) fail(errc::division_by_zero, "exact_div by zero");
    elem num = mul(x, conj(y));
    mpz_class n = norm(y);
    auto [qa, ra] = zz_ring().divmod(num.a, n);
    auto [qb, rb] = zz_ring().divmod(num.b, n);
    if (sgn(ra) != 0 || sgn(rb) != 0) return std::nullopt;
    return elem{qa, qb};
  }
  std::pair<elem, elem> divmod(const elem& x, const elem& y) const {
    // nearest lattice point: rounding error has norm <= 3/4 < 1
    if (is_zero(y)) fail(errc::division_by_zero, "divmod by zero");
    elem num = mul(x, conj(y));
    mpz_class n = norm(y);
    elem q{detail::round_div(num.a, n), detail::round_div(num.b, n)};
    return {q, sub(x, mul(q, y))};
  }
  mpz_class euclid_size(const elem& x) const { return norm(x); }
  elem canonical_unit(const elem& x) const {
    if (is_zero(x)) return one();
    elem u = one(), y = x;
    const elem w{0, 1};
    for (int k = 0; k < 6; ++k) {
      if (sgn(y.a) > 0 && sgn(y.b) >= 0) return u;
      y = mul(y, w);
      u = mul(u, w);
    }
    throw internal_error("eisen canonical_unit");
  }
  std::string str(const elem& x) const { return detail::gint_str(x.a, x.b, "w"); }
};

// ------------------------------------------------------------- polynomials
// Coefficients ascending, no trailing zeros. Euclidean iff C is a field.

template <class C>
struct poly_ring {
  C cf;
  using celem = typename C::elem;
  using elem = std::vector<celem>;
  static constexpr bool snf_capable = C::is_field;
  static constexpr bool is_field = false;
  static constexpr bool graded = true;  // deg H = -2 in the quantum grading

  poly_ring() : cf() {}
  explicit poly_ring(C c) : cf(std::move(c)) {}

  elem zero() const { return {}; }
  elem one() const { return {cf.one()}; }
  elem from_int(long n) const {
    elem e{cf.from_int(n)};
    trim(e);
    return e;
  }
  elem gen() const { return {cf.zero(), cf.one()}; }  // H
  elem monomial(const celem& c, int k) const {
    if (cf.is_zero(c)) return {};
    elem e((size_t)k, cf.zero());
    e.push_back(c);
    return e;
  }
  void trim(elem& e) const {
    while (!e.empty() && cf.is_zero(e.back())) e.pop_back();
  }
  int deg(const elem& x) const { return (int)x.size() - 1; }  // -1 for 0

  elem add(const elem& x, const elem& y) const {
    elem r = x.size() >= y.size() ? x : y;
    const elem& s = x.size() >= y.size() ? y : x;
    for (size_t i = 0; i < s.size(); ++i) r[i] = cf.add(r[i], s[i]);
    trim(r);
    return r;
  }
  elem neg(const elem& x) const {
    elem r = x;
    for (auto& c : r) c = cf.neg(c);
    return r;
  }
  elem sub(const elem& x, const elem& y) const { return add(x, neg(y)); }
  elem mul(const elem& x, const elem& y) const {
    if (x.empty() || y.empty()) return {};
    elem r(x.size() + y.size() - 1, cf.zero());
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t j = 0; j < y.size(); ++j)
        r[i + j] = cf.add(r[i + j], cf.mul(x[i], y[j]));
    trim(r);
    return r;
  }
  bool is_zero(const elem& x) const { return x.empty(); }
  bool eq(const elem& x, const elem& y) const {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!cf.eq(x[i], y[i])) return false;
    return true;
  }
  bool is_unit(const elem& x) const { return x.size() == 1 && cf.is_unit(x[0]); }
  elem inv_unit(const elem& u) const { return {cf.inv_unit(u[0])}; }

  // exact division works in any integral domain: peel leading terms
  std::optional<elem> exact_div(const elem& x, const elem& y) const {
    if (y.empty()) fail(errc::division_by_zero, "exact_div by zero");
    if (x.empty()) return elem{};
    if (x.size() < y.size()) return std::nullopt;
    elem rem = x, q(x.size() - y.size() + 1, cf.zero());
    while (rem.size() >= y.size()) {
      auto qc = cf.exact_div(rem.back(), y.back());
      if (!qc || cf.is_zero(*qc)) {
        if (!qc) return std::nullopt;
        // zero leading quotient coefficient only possible if rem.back()==0
        return std::nullopt;
      }
      size_t shift = rem.size() - y.size();
      q[shift] = *qc;
      for (size_t i = 0; i < y.size(); ++i)
        rem[shift + i] = cf.sub(rem[shift + i], cf.mul(*qc, y[i]));
      if (!cf.is_zero(rem.back())) return std::nullopt;
      trim(rem);
      if (rem.empty()) break;
    }
    return rem.empty() ? std::optional<elem>(q) : std::nullopt;
  }

  std::pair<elem, elem> divmod(const elem& x, const elem& y) const {
    if constexpr (!C::is_field)
      fail(errc::not_euclidean, "divmod needs field coefficients");
    if (y.empty()) fail(errc::division_by_zero, "divmod by zero");
    elem rem = x, q;
    if (x.size() >= y.size()) q.assign(x.size() - y.size() + 1, cf.zero());
    celem ilc = cf.inv_unit(y.back());
    while (rem.size() >= y.size()) {
      celem qc = cf.mul(rem.back(), ilc);
      size_t shift = rem.size() - y.size();
      q[shift] = qc;
      for (size_t i = 0; i < y.size(); ++i)
        rem[shift + i] = cf.sub(rem[shift + i], cf.mul(qc, y[i]));
      rem.pop_back();
      trim(rem);
    }
    trim(q);
    return {q, rem};
  }

  mpz_class euclid_size(const elem& x) const {
    return x.empty() ? 0 : mpz_class((unsigned long)x.size());
  }
  elem canonical_unit(const elem& x) const {
    if (x.empty()) return one();
    return {cf.canonical_unit(x.back())};
  }

  std::string str(const elem& x) const {
    if (x.empty()) return "0";
    std::string out;
    for (int k = (int)x.size() - 1; k >= 0; --k) {
      if (cf.is_zero(x[(size_t)k])) continue;
      std::string cs = cf.str(x[(size_t)k]);
      bool neg_term = !cs.empty() && cs[0] == '-';
      if (neg_term) cs = cs.substr(1);
      std::string var = k == 0 ? "" : (k == 1 ? "H" : "H^" + std::to_string(k));
      std::string term;
      if (var.empty()) term = cs;
      else if (cs == "1") term = var;
      else if (cs.find('/') != std::string::npos) term = "(" + cs + ")" + var;
      else term = cs + var;
      if (out.empty()) out = (neg_term ? "-" : "") + term;
      else out += (neg_term ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
  }
};

using qpoly_ring = poly_ring<qq_field>;
using fppoly_ring = poly_ring<fp_field>;
using zpoly_ring = poly_ring<zz_ring>;

// ------------------------------------------------------------ generic bits

template <class R>
long valuation(const R& rg, typename R::elem x, const typename R::elem& c) {
  if (rg.is_zero(x)) return val_inf;
  KHT_ASSERT(!rg.is_unit(c) && !rg.is_zero(c), "valuation needs a prime c");
  long k = 0;
  for (;;) {
    auto q = rg.exact_div(x, c);
    if (!q) return k;
    x = std::move(*q);
    ++k;
  }
}

template <class R>
typename R::elem gcd(const R& rg, typename R::elem x, typename R::elem y) {
  while (!rg.is_zero(y)) {
    auto [q, r] = rg.divmod(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  if (rg.is_zero(x)) return x;
  return rg.mul(rg.canonical_unit(x), x);
}

template <class R>
typename R::elem pow(const R& rg, const typename R::elem& x, long n) {
  typename R::elem r = rg.one(), b = x;
  for (; n > 0; n >>= 1) {
    if (n & 1) r = rg.mul(r, b);
    if (n > 1) b = rg.mul(b, b);
  }
  return r;
}

// ------------------------------------------------------- runtime dispatch

struct ring_spec {
  enum class kind_t { zz, q_poly, fp_poly, z_poly, gauss, eisen };
  kind_t kind = kind_t::zz;
  unsigned long p = 0;      // fp_poly modulus
  std::string c_text = "2";

  bool snf_capable() const { return kind != kind_t::z_poly; }
  std::string type_flag() const {
    switch (kind) {
      case kind_t::zz: return "z";
      case kind_t::q_poly: return "q-poly";
      case kind_t::fp_poly: return "f" + std::to_string(p) + "-poly";
      case kind_t::z_poly: return "z-poly";
      case kind_t::gauss: return "gauss";
      case kind_t::eisen: return "eisen";
    }
    return "?";
  }

  static ring_spec from_cli(const std::string& type_flag, const std::string& c_flag);
};

ring_spec ring_from_cli(const std::string& type_flag, const std::string& c_flag);

// bundles a context with the distinguished prime c
template <class R>
struct coeffs {
  R rg;
  typename R::elem c;
  ring_spec spec;
};

template <class F>
decltype(auto) with_ring(const ring_spec& spec, F&& f) {
  using K = ring_spec::kind_t;
  switch (spec.kind) {
    case K::zz: {
      zz_ring rg;
      return f(coeffs<zz_ring>{rg, mpz_class(spec.c_text), spec});
    }
    case K::q_poly: {
      qpoly_ring rg;
      return f(coeffs<qpoly_ring>{rg, rg.gen(), spec});
    }
    case K::fp_poly: {
      fppoly_ring rg{fp_field{spec.p}};
      return f(coeffs<fppoly_ring>{rg, rg.gen(), spec});
    }
    case K::z_poly: {
      zpoly_ring rg;
      return f(coeffs<zpoly_ring>{rg, rg.gen(), spec});
    }
    case K::gauss: {
      gauss_ring rg;
      return f(coeffs<gauss_ring>{rg, gint{1, 1}, spec});
    }
    case K::eisen: {
      eisen_ring rg;
      return f(coeffs<eisen_ring>{rg, gint{1, 1}, spec});
    }
  }
  throw internal_error("unreachable ring kind");
}

inline bool is_rational_prime(const mpz_class& n) {
  mpz_class a = abs(n);
  return a > 1 && mpz_probab_prime_p(a.get_mpz_t(), 40) != 0;
}

inline ring_spec ring_spec::from_cli(const std::string& type_flag, const std::string& c_flag) {
  ring_spec s;
  auto want_H = [&](kind_t k) {
    s.kind = k;
    if (!c_flag.empty() && c_flag != "H" && c_flag != "h")
      fail(errc::unsupported_c_for_ring, "only c = H is supported over " + type_flag);
    s.c_text = "H";
  };
  if (type_flag == "z") {
    s.kind = kind_t::zz;
    std::string c = c_flag.empty() ? "2" : c_flag;
    mpz_class v;
    try {
      v = mpz_class(c);
    } catch (const std::invalid_argument&) {
      fail(errc::invalid_prime, "cannot parse '" + c + "' as an integer");
    }
    if (!is_rational_prime(v))
      fail(errc::invalid_prime, "c = " + c + " is not a rational prime");
    s.c_text = v.get_str();
  } else if (type_flag == "q-poly") {
    want_H(kind_t::q_poly);
  } else if (type_flag == "z-poly") {
    want_H(kind_t::z_poly);
  } else if (type_flag.size() > 6 && type_flag[0] == 'f' &&
             type_flag.substr(type_flag.size() - 5) == "-poly") {
    std::string ps = type_flag.substr(1, type_flag.size() - 6);
    if (ps.empty() || ps.find_first_not_of("0123456789") != std::string::npos)
      fail(errc::unknown_ring, "bad modulus in '" + type_flag + "'");
    mpz_class v(ps);
    if (!is_rational_prime(v) || v >= mpz_class(1) << 31)
      fail(errc::invalid_prime, "modulus " + ps + " must be a prime below 2^31");
    want_H(kind_t::fp_poly);
    s.p = v.get_ui();
  } else if (type_flag == "gauss") {
    s.kind = kind_t::gauss;
    if (!c_flag.empty() && c_flag != "1+i")
      fail(errc::unsupported_c_for_ring, "only c = 1+i is supported over gauss");
    s.c_text = "1+i";
  } else if (type_flag == "eisen") {
    s.kind = kind_t::eisen;
    if (!c_flag.empty() && c_flag != "1+w")
      fail(errc::unsupported_c_for_ring, "only c = 1+w is supported over eisen");
    s.c_text = "1+w";
  } else {
    fail(errc::unknown_ring, "unknown ring type '" + type_flag + "'");
  }
  return s;
}

inline ring_spec ring_from_cli(const std::string& t, const std::string& c) {
  return ring_spec::from_cli(t, c);
}

}  // namespace kht
