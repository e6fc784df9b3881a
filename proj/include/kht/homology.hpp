#pragma once

#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "complex.hpp"

namespace kht {

// Smith normal form over a euclidean ring, in two phases:
//   1. sparse elimination of unit pivots (Markowitz-scored), which disposes
//      of almost all generators of a state-sum complex;
//   2. dense euclidean reduction of the small remaining core.
// The engine applies every elementary operation to the optional carries, so
// callers get exactly the transform products they asked for:
//   qvecs: w  -> Qinv w      (for expressing cycles in the kernel basis)
//   qmat:  M  -> Qinv M      (row-sparse, for pushing a differential along)
//   pvecs: v  -> P v         (for tracking classes through a cokernel)
//   full:  P, Pinv, Q, Qinv  (dense, P A Q = S)
template <class R>
struct snf_engine {
    using E = typename R::elem;

    const R& rg;
    int m, n;
    std::vector<std::map<int, E>> col;  // col[j]: row -> value, nonzeros only
    std::vector<std::set<int>> rows_of;  // row i -> columns with a nonzero

    std::vector<std::vector<E>>* qvecs = nullptr;
    std::vector<std::map<int, E>>* qmat = nullptr;
    std::vector<std::vector<E>>* pvecs = nullptr;
    bool full = false;
    std::vector<std::vector<E>> P, Pinv, Q, Qinv;

    int rank = 0;
    std::vector<E> factors;

    snf_engine(const R& r, int m_, int n_)
        : rg(r), m(m_), n(n_), col((size_t)n_), rows_of((size_t)m_) {}

    void load(const sparse_mat<R>& a) {
        KHT_ASSERT(a.rows == m && a.cols() == n, "matrix shape mismatch");
        for (int j = 0; j < n; ++j)
            for (auto& [i, v] : a.col[j]) {
                col[j].emplace(i, v);
                rows_of[i].insert(j);
            }
    }

    void init_full() {
        full = true;
        auto ident = [&](int s) {
            std::vector<std::vector<E>> id((size_t)s,
                                           std::vector<E>((size_t)s, rg.zero()));
            for (int i = 0; i < s; ++i) id[i][i] = rg.one();
            return id;
        };
        P = ident(m);
        Pinv = ident(m);
        Q = ident(n);
        Qinv = ident(n);
    }

    const E* at(int i, int j) const {
        auto it = col[j].find(i);
        return it == col[j].end() ? nullptr : &it->second;
    }

    void set_entry(int i, int j, E v) {
        if (rg.is_zero(v)) {
            if (col[j].erase(i)) rows_of[i].erase(j);
        } else {
            auto [it, fresh] = col[j].insert_or_assign(i, std::move(v));
            (void)it;
            if (fresh) rows_of[i].insert(j);
        }
    }

    // col_dst += lambda * col_src
    void col_axpy(int dst, int src, const E& lam) {
        for (auto& [i, v] : col[src]) {
            auto it = col[dst].find(i);
            if (it == col[dst].end()) {
                col[dst].emplace(i, rg.mul(lam, v));
                rows_of[i].insert(dst);
            } else {
                it->second = rg.add(it->second, rg.mul(lam, v));
                if (rg.is_zero(it->second)) {
                    col[dst].erase(it);
                    rows_of[i].erase(dst);
                }
            }
        }
        if (qvecs)
            for (auto& w : *qvecs)
                w[src] = rg.sub(w[src], rg.mul(lam, w[dst]));
        if (qmat) {
            auto& rs = (*qmat)[src];
            for (auto& [j, v] : (*qmat)[dst]) {
                auto it = rs.find(j);
                if (it == rs.end()) {
                    rs.emplace(j, rg.neg(rg.mul(lam, v)));
                } else {
                    it->second = rg.sub(it->second, rg.mul(lam, v));
                    if (rg.is_zero(it->second)) rs.erase(it);
                }
            }
        }
        if (full) {
            for (int i = 0; i < n; ++i)
                Q[i][dst] = rg.add(Q[i][dst], rg.mul(lam, Q[i][src]));
            for (int j = 0; j < n; ++j)
                Qinv[src][j] = rg.sub(Qinv[src][j], rg.mul(lam, Qinv[dst][j]));
        }
    }

    // row_dst += lambda * row_src
    void row_axpy(int dst, int src, const E& lam) {
        auto cs = rows_of[src];  // copy: set_entry mutates rows_of
        for (int j : cs) {
            const E* s = at(src, j);
            const E* d = at(dst, j);
            E v = d ? rg.add(*d, rg.mul(lam, *s)) : rg.mul(lam, *s);
            set_entry(dst, j, std::move(v));
        }
        if (pvecs)
            for (auto& v : *pvecs) v[dst] = rg.add(v[dst], rg.mul(lam, v[src]));
        if (full) {
            for (int j = 0; j < m; ++j)
                P[dst][j] = rg.add(P[dst][j], rg.mul(lam, P[src][j]));
            for (int i = 0; i < m; ++i)
                Pinv[i][src] = rg.sub(Pinv[i][src], rg.mul(lam, Pinv[i][dst]));
        }
    }

    void col_swap(int a, int b) {
        if (a == b) return;
        std::swap(col[a], col[b]);
        for (auto& [i, v] : col[a]) {
            (void)v;
            if (!col[b].count(i)) {
                rows_of[i].erase(b);
                rows_of[i].insert(a);
            }
        }
        for (auto& [i, v] : col[b]) {
            (void)v;
            if (!col[a].count(i)) {
                rows_of[i].erase(a);
                rows_of[i].insert(b);
            }
        }
        if (qvecs)
            for (auto& w : *qvecs) std::swap(w[a], w[b]);
        if (qmat) std::swap((*qmat)[a], (*qmat)[b]);
        if (full) {
            for (int i = 0; i < n; ++i) std::swap(Q[i][a], Q[i][b]);
            std::swap(Qinv[a], Qinv[b]);
        }
    }

    void row_swap(int a, int b) {
        if (a == b) return;
        auto ca = rows_of[a], cb = rows_of[b];
        std::vector<std::pair<int, E>> ea, eb;
        for (int j : ca) ea.emplace_back(j, *at(a, j));
        for (int j : cb) eb.emplace_back(j, *at(b, j));
        for (int j : ca) set_entry(a, j, rg.zero());
        for (int j : cb) set_entry(b, j, rg.zero());
        for (auto& [j, v] : ea) set_entry(b, j, std::move(v));
        for (auto& [j, v] : eb) set_entry(a, j, std::move(v));
        if (pvecs)
            for (auto& v : *pvecs) std::swap(v[a], v[b]);
        if (full) {
            std::swap(P[a], P[b]);
            for (int i = 0; i < m; ++i) std::swap(Pinv[i][a], Pinv[i][b]);
        }
    }

    void col_scale(int j, const E& u) {  // u must be a unit
        E ui = rg.inv_unit(u);
        for (auto& [i, v] : col[j]) {
            (void)i;
            v = rg.mul(u, v);
        }
        if (qvecs)
            for (auto& w : *qvecs) w[j] = rg.mul(ui, w[j]);
        if (qmat)
            for (auto& [t, v] : (*qmat)[j]) {
                (void)t;
                v = rg.mul(ui, v);
            }
        if (full) {
            for (int i = 0; i < n; ++i) Q[i][j] = rg.mul(u, Q[i][j]);
            for (int t = 0; t < n; ++t) Qinv[j][t] = rg.mul(ui, Qinv[j][t]);
        }
    }

    void run() {
        int k = 0;
        // phase 1: unit pivots, cheapest fill first
        for (;;) {
            int bi = -1, bj = -1;
            long best = -1;
            for (int j = k; j < n; ++j)
                for (auto& [i, v] : col[j]) {
                    if (!rg.is_unit(v)) continue;
                    long sc = (long)(rows_of[i].size() - 1) *
                              (long)(col[j].size() - 1);
                    if (best < 0 || sc < best) {
                        best = sc;
                        bi = i;
                        bj = j;
                    }
                }
            if (bj < 0) break;
            col_swap(bj, k);
            row_swap(bi, k);
            E u = *at(k, k);
            E ui = rg.inv_unit(u);
            auto rcols = rows_of[k];
            for (int j : rcols) {
                if (j == k) continue;
                col_axpy(j, k, rg.neg(rg.mul(*at(k, j), ui)));
            }
            std::vector<int> risen;
            for (auto& [i, v] : col[k]) {
                (void)v;
                if (i != k) risen.push_back(i);
            }
            for (int i : risen) row_axpy(i, k, rg.neg(rg.mul(*at(i, k), ui)));
            col_scale(k, ui);
            ++k;
        }
        // phase 2: euclidean reduction of what is left
        for (;;) {
            int bi = -1, bj = -1;
            mpz_class best;
            for (int j = k; j < n; ++j)
                for (auto& [i, v] : col[j]) {
                    mpz_class sz = rg.euclid_size(v);
                    if (bj < 0 || sz < best) {
                        best = sz;
                        bi = i;
                        bj = j;
                    }
                }
            if (bj < 0) break;
            col_swap(bj, k);
            row_swap(bi, k);
            for (;;) {
                // smallest entry in the pivot cross goes to (k, k)
                int si = k, sj = k;
                mpz_class ps = rg.euclid_size(*at(k, k));
                for (auto& [i, v] : col[k])
                    if (i != k && rg.euclid_size(v) < ps) {
                        ps = rg.euclid_size(v);
                        si = i;
                        sj = k;
                    }
                for (int j : rows_of[k])
                    if (j != k && rg.euclid_size(*at(k, j)) < ps) {
                        ps = rg.euclid_size(*at(k, j));
                        si = k;
                        sj = j;
                    }
                row_swap(si, k);
                col_swap(sj, k);
                E piv = *at(k, k);
                bool dirty = false;
                std::vector<int> below;
                for (auto& [i, v] : col[k]) {
                    (void)v;
                    if (i != k) below.push_back(i);
                }
                for (int i : below) {
                    auto [q, rem] = rg.divmod(*at(i, k), piv);
                    if (!rg.is_zero(q)) row_axpy(i, k, rg.neg(q));
                    if (!rg.is_zero(rem)) dirty = true;
                }
                if (dirty) continue;
                std::vector<int> right(rows_of[k].begin(), rows_of[k].end());
                for (int j : right) {
                    if (j == k) continue;
                    auto [q, rem] = rg.divmod(*at(k, j), piv);
                    if (!rg.is_zero(q)) col_axpy(j, k, rg.neg(q));
                    if (!rg.is_zero(rem)) dirty = true;
                }
                if (dirty) continue;
                // pivot must divide everything still active
                int fi = -1;
                for (int j = k + 1; j < n && fi < 0; ++j)
                    for (auto& [i, v] : col[j])
                        if (!rg.exact_div(v, piv)) {
                            fi = i;
                            break;
                        }
                if (fi < 0) break;
                row_axpy(k, fi, rg.one());
            }
            E u = rg.canonical_unit(*at(k, k));
            if (!rg.eq(u, rg.one())) col_scale(k, u);
            ++k;
        }
        rank = k;
        factors.clear();
        for (int t = 0; t < k; ++t) factors.push_back(*at(t, t));
        if (check_level() >= 1) {
            for (int t = 0; t + 1 < k; ++t)
                KHT_ASSERT(rg.exact_div(factors[t + 1], factors[t]).has_value(),
                           "invariant factors do not form a chain");
            int extra = 0;
            for (int j = 0; j < n; ++j) extra += (int)col[j].size();
            KHT_ASSERT(extra == k, "reduction left off-diagonal entries");
        }
    }
};

template <class R>
struct snf_result {
    int rank = 0;
    std::vector<typename R::elem> factors;
    std::vector<std::vector<typename R::elem>> P, Pinv, Q, Qinv;
};

template <class R>
snf_result<R> snf(const R& rg, const sparse_mat<R>& a) {
    if constexpr (!R::snf_capable) {
        fail(errc::not_euclidean,
             "smith normal form is not available over this ring");
    } else {
        snf_engine<R> e(rg, a.rows, a.cols());
        e.load(a);
        e.init_full();
        e.run();
        return {e.rank, std::move(e.factors), std::move(e.P), std::move(e.Pinv),
                std::move(e.Q), std::move(e.Qinv)};
    }
}

// homology at one degree, with class vectorization for the requested cycles:
// coordinates are reported in a basis of the free quotient H / torsion
template <class R>
struct homology_result {
    int free_rank = 0;
    std::vector<typename R::elem> torsion;  // non-unit invariant factors
    std::vector<std::vector<typename R::elem>> class_free;  // per class
};

template <class R>
homology_result<R> homology_at(const chain_complex<R>& C, int deg,
                               const std::vector<cycle_vec<R>>& classes = {},
                               bool audit = true) {
    if constexpr (!R::snf_capable) {
        fail(errc::not_euclidean,
             "homology needs a euclidean coefficient ring; over Z[H] use the "
             "divisibility pipeline instead");
    } else {
        using E = typename R::elem;
        const R& rg = C.k.rg;
        int idx = C.index_of(deg);
        KHT_ASSERT(idx >= 0 && idx < C.degrees(), "degree out of range");
        int n = C.gens[idx];
        int m = idx + 1 < C.degrees() ? C.gens[idx + 1] : 0;
        int p = idx > 0 ? C.gens[idx - 1] : 0;

        snf_engine<R> e1(rg, m, n);
        if (m) e1.load(C.d[idx]);
        std::vector<std::vector<E>> ws;
        for (auto& z : classes) {
            KHT_ASSERT(z.deg == deg, "class degree mismatch");
            std::vector<E> w((size_t)n, rg.zero());
            for (auto& [i, v] : z.coords) w[i] = v;
            ws.push_back(std::move(w));
        }
        e1.qvecs = &ws;
        std::vector<std::map<int, E>> M((size_t)n);
        if (p)
            for (int j = 0; j < p; ++j)
                for (auto& [i, v] : C.d[idx - 1].col[j]) M[i].emplace(j, v);
        e1.qmat = &M;
        e1.run();
        int r = e1.rank;

        for (auto& w : ws)
            for (int t = 0; t < r; ++t)
                if (!rg.is_zero(w[t]))
                    fail(errc::not_a_cycle,
                         "requested class is not in the kernel");
        if (check_level() >= 1)
            for (int t = 0; t < r; ++t)
                KHT_ASSERT(M[t].empty(), "boundary escapes the kernel");

        int n2 = n - r;
        snf_engine<R> e2(rg, n2, p);
        for (int i = r; i < n; ++i)
            for (auto& [j, v] : M[i]) {
                e2.col[j].emplace(i - r, v);
                e2.rows_of[i - r].insert(j);
            }
        std::vector<std::vector<E>> vs;
        for (auto& w : ws) vs.emplace_back(w.begin() + r, w.end());
        e2.pvecs = &vs;
        e2.run();
        int r2 = e2.rank;

        homology_result<R> res;
        res.free_rank = n2 - r2;
        for (auto& t : e2.factors)
            if (!rg.is_unit(t)) res.torsion.push_back(t);
        for (auto& v : vs)
            res.class_free.emplace_back(v.begin() + r2, v.end());

        if (audit && check_level() >= 2 && p > 0 && !classes.empty()) {
            // coordinates in the free quotient must not depend on the cycle
            // representative: shift each class by a boundary and recompute
            std::mt19937 rr(0xb0a7u + (unsigned)deg);
            std::vector<cycle_vec<R>> shifted;
            for (auto& z : classes) {
                std::vector<std::pair<int, E>> rho;
                for (int t = 0; t < std::min(p, 6); ++t)
                    rho.emplace_back((int)(rr() % (unsigned)p),
                                     rg.from_int((long)(rr() % 5) - 2));
                auto img = mat_apply(rg, C.d[idx - 1], rho);
                cycle_vec<R> z2;
                z2.deg = deg;
                std::vector<E> dense((size_t)n, rg.zero());
                for (auto& [i, v] : z.coords) dense[i] = v;
                for (int i = 0; i < n; ++i) dense[i] = rg.add(dense[i], img[i]);
                for (int i = 0; i < n; ++i)
                    if (!rg.is_zero(dense[i])) z2.coords.emplace_back(i, dense[i]);
                shifted.push_back(std::move(z2));
            }
            auto res2 = homology_at(C, deg, shifted, false);
            KHT_ASSERT(res2.free_rank == res.free_rank &&
                           res2.torsion.size() == res.torsion.size(),
                       "homology not reproducible");
            for (size_t c = 0; c < classes.size(); ++c)
                for (int t = 0; t < res.free_rank; ++t)
                    KHT_ASSERT(
                        rg.eq(res.class_free[c][t], res2.class_free[c][t]),
                        "class coordinates depend on the representative");
        }
        return res;
    }
}

// largest d with [z] in c^d (H / torsion); the class must survive there
template <class R>
long class_divisibility(const coeffs<R>& k, const homology_result<R>& h,
                        size_t ci) {
    long best = val_inf;
    for (auto& x : h.class_free[ci])
        best = std::min(best, valuation(k.rg, x, k.c));
    if (best >= val_inf)
        fail(errc::zero_class_mod_torsion,
             "class vanishes in the free part of homology");
    return best;
}

}  // namespace kht
