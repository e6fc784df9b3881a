#pragma once

#include "diagram.hpp"
#include "rings.hpp"

namespace kht {

// The rank-2 Frobenius algebra A = R[X]/(X^2 - cX) with counit e(1) = 0,
// e(X) = 1. The roots of X^2 - cX are 0 and c, so X_a = X and X_b = X - c
// diagonalize multiplication and comultiplication:
//   m(X_a (x) X_a) = c X_a,  m(X_b (x) X_b) = -c X_b,  m(X_a (x) X_b) = 0,
//   Delta(X_a) = X_a (x) X_a,  Delta(X_b) = X_b (x) X_b.
template <class R>
struct alg_elem {
    typename R::elem u, v;  // u*1 + v*X
};

// element of A (x) A on the basis {1(x)1, 1(x)X, X(x)1, X(x)X}
template <class R>
struct alg_tensor {
    typename R::elem c11, c1x, cx1, cxx;
};

template <class R>
struct frobenius {
    const coeffs<R>& k;

    using A = alg_elem<R>;
    using E = typename R::elem;

    A zero() const { return {k.rg.zero(), k.rg.zero()}; }
    A unit() const { return {k.rg.one(), k.rg.zero()}; }
    A x_a() const { return {k.rg.zero(), k.rg.one()}; }
    A x_b() const { return {k.rg.neg(k.c), k.rg.one()}; }

    bool eq(const A& z, const A& w) const {
        return k.rg.eq(z.u, w.u) && k.rg.eq(z.v, w.v);
    }
    A add(const A& z, const A& w) const {
        return {k.rg.add(z.u, w.u), k.rg.add(z.v, w.v)};
    }
    A scale(const E& a, const A& z) const {
        return {k.rg.mul(a, z.u), k.rg.mul(a, z.v)};
    }
    // (u + vX)(u' + v'X) with X^2 = cX
    A multiply(const A& z, const A& w) const {
        const R& r = k.rg;
        E xx = r.mul(z.v, w.v);
        E v = r.add(r.add(r.mul(z.u, w.v), r.mul(z.v, w.u)), r.mul(k.c, xx));
        return {r.mul(z.u, w.u), v};
    }
    // Delta(1) = X(x)1 + 1(x)X - c(1(x)1), Delta(X) = X(x)X
    alg_tensor<R> comultiply(const A& z) const {
        return {k.rg.neg(k.rg.mul(k.c, z.u)), z.u, z.u, z.v};
    }
    E counit(const A& z) const { return z.v; }
};

// The Lee cycle of a diagram in its given orientation: the orientation
// preserving state with tensor factor X_a on a-colored and X_b on b-colored
// Seifert circles. In the reduced theory the marked circle's factor is
// dropped; the coloring is flipped if needed so that the marked circle is
// colored a, which amounts to reading the diagram with the reversed
// orientation.
struct lee_chain_data {
    std::vector<int> state;
    std::vector<int> factor;  // per circle: 0 = X_a, 1 = X_b
    int marked_circle = -1;
    bool reduced = false;
};

inline lee_chain_data lee_chain(const diagram& d, bool reduced) {
    lee_chain_data lc;
    lc.reduced = reduced;
    seifert_info s = seifert_data(d);
    lc.state = std::move(s.state);
    lc.factor = ab_coloring(d);
    if (!reduced) return lc;
    if (!d.has_mark())
        fail(errc::mark_required_for_reduced, "the reduced theory needs a marked edge");
    if (d.marked_edge) {
        lc.marked_circle = resolve(d, lc.state).circle_of[d.marked_edge];
    } else {
        // free loops trail the circle list
        lc.marked_circle = (int)lc.factor.size() - d.free_loops + d.marked_loop;
    }
    if (lc.factor[lc.marked_circle] == 1)
        for (auto& f : lc.factor) f ^= 1;
    return lc;
}

}  // namespace kht
