#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "frobenius.hpp"

namespace kht {

// column-major sparse matrix; each column sorted by row index
template <class R>
struct sparse_mat {
    int rows = 0;
    std::vector<std::vector<std::pair<int, typename R::elem>>> col;

    int cols() const { return (int)col.size(); }
    int nnz() const {
        int s = 0;
        for (auto& c : col) s += (int)c.size();
        return s;
    }
};

template <class R>
void sort_column(const R& rg, std::vector<std::pair<int, typename R::elem>>& c) {
    std::sort(c.begin(), c.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t out = 0;
    for (size_t i = 0; i < c.size();) {
        auto v = c[i].second;
        size_t j = i + 1;
        for (; j < c.size() && c[j].first == c[i].first; ++j) v = rg.add(v, c[j].second);
        if (!rg.is_zero(v)) c[out++] = {c[i].first, v};
        i = j;
    }
    c.resize(out);
}

template <class R>
std::vector<typename R::elem> mat_apply(
    const R& rg, const sparse_mat<R>& m,
    const std::vector<std::pair<int, typename R::elem>>& v) {
    std::vector<typename R::elem> out((size_t)m.rows, rg.zero());
    for (auto& [j, a] : v)
        for (auto& [i, b] : m.col[j]) out[i] = rg.add(out[i], rg.mul(b, a));
    return out;
}

template <class R>
bool mat_mul_is_zero(const R& rg, const sparse_mat<R>& a, const sparse_mat<R>& b) {
    for (auto& c : b.col) {
        auto w = mat_apply(rg, a, c);
        for (auto& x : w)
            if (!rg.is_zero(x)) return false;
    }
    return true;
}

// cochain complex concentrated in degrees deg_min .. deg_min + gens.size() - 1
template <class R>
struct chain_complex {
    coeffs<R> k;
    int deg_min = 0;
    std::vector<int> gens;               // generator count per degree
    std::vector<std::vector<int>> qdeg;  // per degree, per generator
    std::vector<sparse_mat<R>> d;        // d[i]: degree deg_min+i -> deg_min+i+1

    int degrees() const { return (int)gens.size(); }
    int index_of(int deg) const { return deg - deg_min; }
};

template <class R>
struct cycle_vec {
    int deg = 0;  // homological degree, not an index into gens
    std::vector<std::pair<int, typename R::elem>> coords;
};

template <class R>
struct cube_result {
    chain_complex<R> C;
    cycle_vec<R> alpha;
};

namespace detail {

// q-degree of a monomial in H (deg H = -2); entries of the cube differential
// over a graded ring are always monomials
template <class P>
int mono_qdeg(const P& rg, const typename P::elem& v) {
    int k = -1;
    for (int i = 0; i < (int)v.size(); ++i)
        if (!rg.cf.is_zero(v[i])) {
            KHT_ASSERT(k < 0, "differential entry is not a monomial");
            k = i;
        }
    KHT_ASSERT(k >= 0, "zero entry stored in differential");
    return -2 * k;
}

}  // namespace detail

// The state-sum complex of a diagram: one group of generators per smoothing
// state u (crossing i resolved by bit i of u), one tensor factor {1, X} per
// circle. Generators are ordered by state (ascending within each weight),
// then by label mask (bit set = X, bit positions skip the marked circle).
// In the reduced flavor the marked circle always carries the degree-0 marked
// generator; a dot arriving there becomes a factor of c.
//
// Also returns the orientation cycle: the all-(a/b) labelling of the
// orientation preserving state, expanded via X_b = X - c.
template <class R>
cube_result<R> build_cube(const diagram& dg, const coeffs<R>& k, bool reduced) {
    const R& rg = k.rg;
    using E = typename R::elem;

    int n = dg.n();
    if (n > 12)
        fail(errc::too_large_for_cube,
             "state-sum complex capped at 12 crossings (got " + std::to_string(n) +
                 "); use the scan pipeline");

    lee_chain_data lc = lee_chain(dg, reduced);  // validates the mark if reduced

    int nstates = 1 << n;
    std::vector<resolution> res((size_t)nstates);
    std::vector<int> mark_c((size_t)nstates, -1), nbits((size_t)nstates);
    std::vector<int> state_bits(n);
    for (int u = 0; u < nstates; ++u) {
        for (int i = 0; i < n; ++i) state_bits[i] = (u >> i) & 1;
        res[u] = resolve(dg, state_bits);
        int nc = res[u].n_circles();
        if (reduced) {
            mark_c[u] = dg.marked_edge ? res[u].circle_of[dg.marked_edge]
                                       : nc - dg.free_loops + dg.marked_loop;
        }
        nbits[u] = nc - (mark_c[u] >= 0 ? 1 : 0);
        KHT_ASSERT(nbits[u] <= 30, "too many circles in one state");
    }

    // skip the marked circle when assigning mask bit positions
    auto bit_of = [](int j, int mark) { return mark >= 0 && j > mark ? j - 1 : j; };

    chain_complex<R> C{k};
    C.deg_min = -dg.n_neg;
    C.gens.assign((size_t)n + 1, 0);
    C.qdeg.resize((size_t)n + 1);
    std::vector<int> offset((size_t)nstates, 0);
    for (int u = 0; u < nstates; ++u) {  // ascending u within each weight
        int w = __builtin_popcount((unsigned)u);
        offset[u] = C.gens[w];
        C.gens[w] += 1 << nbits[u];
    }
    int q_shift = dg.n_pos - 2 * dg.n_neg;
    for (int u = 0; u < nstates; ++u) {
        int w = __builtin_popcount((unsigned)u);
        auto& q = C.qdeg[w];
        if ((int)q.size() < C.gens[w]) q.resize((size_t)C.gens[w]);
        for (int m = 0; m < (1 << nbits[u]); ++m)
            q[offset[u] + m] =
                nbits[u] - 2 * __builtin_popcount((unsigned)m) + w + q_shift;
    }

    C.d.resize((size_t)n);
    for (int w = 0; w < n; ++w) {
        C.d[w].rows = C.gens[w + 1];
        C.d[w].col.resize((size_t)C.gens[w]);
    }

    struct edge_case {
        int v, A, B, C1, C2;
        bool merge, negate;
        uint32_t moved;  // src mask bits that transfer unchanged, by src position
        std::vector<int> shift;  // src bit position -> tgt bit position
    };
    E cc = k.c, ncc = rg.neg(k.c);

    for (int u = 0; u < nstates; ++u) {
        int w = __builtin_popcount((unsigned)u);
        const resolution& sr = res[u];
        int nc_s = sr.n_circles(), ms = mark_c[u];

        std::vector<edge_case> ec;
        ec.reserve((size_t)n);
        for (int i = 0; i < n; ++i) {
            if ((u >> i) & 1) continue;
            edge_case e;
            e.v = u | (1 << i);
            const resolution& tr = res[e.v];
            int e0 = dg.xs[i][0], e1 = dg.xs[i][1], e2 = dg.xs[i][2];
            e.A = sr.circle_of[e0];
            e.B = sr.circle_of[e2];
            e.C1 = tr.circle_of[e0];
            e.C2 = tr.circle_of[e1];
            e.merge = e.A != e.B;
            e.negate = (__builtin_popcount((unsigned)(u & ((1u << i) - 1))) & 1) != 0;
            int mt = mark_c[e.v];
            e.moved = 0;
            e.shift.assign((size_t)nc_s, -1);
            for (int j = 0; j < nc_s; ++j) {
                if (j == e.A || j == e.B || j == ms) continue;
                int tj = sr.circles[j].empty()
                             ? tr.n_circles() - dg.free_loops +
                                   (j - (nc_s - dg.free_loops))
                             : tr.circle_of[sr.circles[j].front()];
                e.moved |= 1u << bit_of(j, ms);
                e.shift[j] = bit_of(tj, mt);
            }
            if (ms >= 0 && ms != e.A && ms != e.B) {
                int tm = dg.marked_edge
                             ? tr.circle_of[dg.marked_edge]
                             : tr.n_circles() - dg.free_loops + dg.marked_loop;
                KHT_ASSERT(tm == mt, "marked circle lost across an edge");
            }
            ec.push_back(std::move(e));
        }

        for (int m = 0; m < (1 << nbits[u]); ++m) {
            for (const auto& e : ec) {
                int mt = mark_c[e.v];
                auto& colv = C.d[w].col[offset[u] + m];
                uint32_t base = 0;
                uint32_t mv = (uint32_t)m & e.moved;
                while (mv) {
                    int p = __builtin_ctz(mv);
                    mv &= mv - 1;
                    // recover the src circle owning bit p
                    int j = ms >= 0 && p >= ms ? p + 1 : p;
                    base |= 1u << e.shift[j];
                }
                auto emit = [&](uint32_t tmask, const E& coef) {
                    colv.emplace_back(offset[e.v] + (int)tmask,
                                      e.negate ? rg.neg(coef) : coef);
                };
                int la = e.A == ms ? -1 : (m >> bit_of(e.A, ms)) & 1;
                if (e.merge) {
                    int lb = e.B == ms ? -1 : (m >> bit_of(e.B, ms)) & 1;
                    if (la < 0 || lb < 0) {
                        // m(marked, 1) = marked, m(marked, X) = c marked
                        emit(base, (la < 0 ? lb : la) ? cc : rg.one());
                    } else {
                        int l = la | lb;
                        emit(base | (l ? 1u << bit_of(e.C1, mt) : 0u),
                             la && lb ? cc : rg.one());
                    }
                } else if (la < 0) {
                    // Delta(marked) = marked (x) X
                    int other = e.C1 == mt ? e.C2 : e.C1;
                    KHT_ASSERT(e.C1 == mt || e.C2 == mt,
                               "marked circle lost in a split");
                    emit(base | 1u << bit_of(other, mt), rg.one());
                } else if (la == 1) {
                    emit(base | (1u << bit_of(e.C1, mt)) | (1u << bit_of(e.C2, mt)),
                         rg.one());
                } else {
                    // Delta(1) = X (x) 1 + 1 (x) X - c (1 (x) 1)
                    emit(base | (1u << bit_of(e.C1, mt)), rg.one());
                    emit(base | (1u << bit_of(e.C2, mt)), rg.one());
                    emit(base, ncc);
                }
            }
        }
    }
    for (auto& mat : C.d)
        for (auto& c : mat.col) sort_column(rg, c);

    // the orientation cycle, in homological degree 0
    cycle_vec<R> al;
    al.deg = 0;
    uint32_t su = 0;
    for (int i = 0; i < n; ++i)
        if (lc.state[i]) su |= 1u << i;
    int msu = mark_c[su];
    uint32_t abits = 0;
    std::vector<int> bpos;
    for (int j = 0; j < res[su].n_circles(); ++j) {
        if (j == msu) continue;
        if (lc.factor[j] == 0)
            abits |= 1u << bit_of(j, msu);
        else
            bpos.push_back(bit_of(j, msu));
    }
    for (uint32_t s = 0; s < (1u << bpos.size()); ++s) {
        uint32_t mask = abits;
        E coef = rg.one();
        for (size_t t = 0; t < bpos.size(); ++t) {
            if ((s >> t) & 1)
                mask |= 1u << bpos[t];
            else
                coef = rg.mul(coef, ncc);
        }
        al.coords.emplace_back(offset[su] + (int)mask, coef);
    }
    std::sort(al.coords.begin(), al.coords.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    if (check_level() >= 1) {
        for (int w = 0; w + 1 < n; ++w)
            KHT_ASSERT(mat_mul_is_zero(rg, C.d[w + 1], C.d[w]),
                       "differential does not square to zero");
        if constexpr (R::graded) {
            for (int w = 0; w < n; ++w)
                for (int j = 0; j < C.d[w].cols(); ++j)
                    for (auto& [i, v] : C.d[w].col[j])
                        KHT_ASSERT(C.qdeg[w + 1][i] + detail::mono_qdeg(rg, v) ==
                                       C.qdeg[w][j],
                                   "differential is not q-homogeneous");
        }
    }

    return {std::move(C), std::move(al)};
}

}  // namespace kht
