#pragma once
// Alexander polynomial of a knot diagram from the arc presentation of its
// group: one generator per overpass arc, one relation per crossing, free
// derivatives abelianized to Z[t], then one column dropped and the
// determinant taken fraction-free. Normalized so the top coefficient is
// positive and the lowest degree is zero. Completely separate route from the
// cube of resolutions, so it can vouch for table entries.

#include <gmpxx.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "kht/diagram.hpp"

namespace khttest {

using zpoly = std::vector<mpz_class>;  // coefficients, low degree first

inline void ztrim(zpoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline zpoly zadd(const zpoly& a, const zpoly& b) {
  zpoly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  ztrim(r);
  return r;
}

inline zpoly zmul(const zpoly& a, const zpoly& b) {
  if (a.empty() || b.empty()) return {};
  zpoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline zpoly zsub(const zpoly& a, const zpoly& b) {
  zpoly nb = b;
  for (auto& c : nb) c = -c;
  return zadd(a, nb);
}

// exact division, valid when b divides a in Z[t]
inline zpoly zdivexact(zpoly a, const zpoly& b) {
  if (b.empty()) throw std::runtime_error("poly division by zero");
  if (a.empty()) return {};
  if (a.size() < b.size()) throw std::runtime_error("poly division not exact");
  zpoly q(a.size() - b.size() + 1, 0);
  for (int k = (int)q.size() - 1; k >= 0; --k) {
    mpz_class& lead = a[k + b.size() - 1];
    if (!mpz_divisible_p(lead.get_mpz_t(), b.back().get_mpz_t()))
      throw std::runtime_error("poly division not exact");
    mpz_class c;
    mpz_divexact(c.get_mpz_t(), lead.get_mpz_t(), b.back().get_mpz_t());
    q[k] = c;
    for (size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  for (auto& c : a)
    if (c != 0) throw std::runtime_error("poly division not exact");
  return q;
}

inline zpoly zdet_bareiss(std::vector<std::vector<zpoly>> a) {
  int n = (int)a.size();
  if (n == 0) return {1};
  zpoly prev{1};
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (a[k][k].empty()) {
      int j = -1;
      for (int i = k + 1; i < n; ++i)
        if (!a[i][k].empty()) {
          j = i;
          break;
        }
      if (j < 0) return {};
      std::swap(a[k], a[j]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        a[i][j] = zdivexact(
            zsub(zmul(a[i][j], a[k][k]), zmul(a[i][k], a[k][j])), prev);
    prev = a[k][k];
  }
  zpoly det = a[n - 1][n - 1];
  if (sign < 0)
    for (auto& c : det) c = -c;
  return det;
}

// arcs: edges merged wherever the strand passes over a crossing
inline std::vector<int> arc_classes(const kht::diagram& d) {
  std::vector<int> up(d.n_edges + 1);
  for (int e = 0; e <= d.n_edges; ++e) up[e] = e;
  auto find = [&](int e) {
    while (up[e] != e) e = up[e] = up[up[e]];
    return e;
  };
  for (int i = 0; i < d.n(); ++i) {
    int oi = d.over_in[i];
    int a = find(d.xs[i][oi]), b = find(d.xs[i][4 - oi]);
    up[a] = b;
  }
  std::vector<int> cls(d.n_edges + 1, -1);
  int m = 0;
  for (int e = 1; e <= d.n_edges; ++e) {
    int r = find(e);
    if (cls[r] < 0) cls[r] = m++;
    cls[e] = cls[r];
  }
  return cls;
}

// normalized coefficients, lowest degree first, positive top coefficient
inline std::vector<long> alexander_poly(const kht::diagram& d) {
  if (d.n_components() != 1 || d.free_loops != 0)
    throw std::runtime_error("alexander oracle wants a knot");
  if (d.n() == 0) return {1};
  auto cls = arc_classes(d);
  int n = d.n();
  if (*std::max_element(cls.begin() + 1, cls.end()) + 1 != n)
    throw std::runtime_error("arc count is off");
  std::vector<std::vector<zpoly>> m(n, std::vector<zpoly>(n));
  const zpoly one{1}, t{0, 1}, minus_one{-1}, minus_t{0, -1};
  const zpoly one_minus_t{1, -1}, t_minus_one{-1, 1};
  for (int i = 0; i < n; ++i) {
    int a = cls[d.xs[i][0]];           // under in
    int b = cls[d.xs[i][d.over_in[i]]];  // over
    int c = cls[d.xs[i][2]];           // under out
    if (d.sign[i] > 0) {
      m[i][a] = zadd(m[i][a], t);
      m[i][b] = zadd(m[i][b], one_minus_t);
      m[i][c] = zadd(m[i][c], minus_one);
    } else {
      m[i][a] = zadd(m[i][a], one);
      m[i][b] = zadd(m[i][b], t_minus_one);
      m[i][c] = zadd(m[i][c], minus_t);
    }
  }
  // drop the column of arc 0 and one redundant relation
  for (auto& row : m) row.erase(row.begin());
  std::vector<std::vector<zpoly>> sq(m.begin() + 1, m.end());
  zpoly det = zdet_bareiss(std::move(sq));
  if (det.empty()) throw std::runtime_error("alexander determinant vanished");
  size_t lo = 0;
  while (det[lo] == 0) ++lo;
  std::vector<long> out;
  for (size_t i = lo; i < det.size(); ++i) out.push_back(det[i].get_si());
  if (out.back() < 0)
    for (auto& c : out) c = -c;
  return out;
}

// |Delta(-1)|, the knot determinant by the second route
inline long alexander_det(const std::vector<long>& poly) {
  long v = 0, s = 1;
  for (long c : poly) {
    v += s * c;
    s = -s;
  }
  return v < 0 ? -v : v;
}

}  // namespace khttest
