#pragma once

#include <string>
#include <vector>

#include "diagram.hpp"
#include "homology.hpp"
#include "simplify.hpp"

namespace kht {

struct degree_summary {
    int deg = 0;
    int gens = 0;       // generators of the simplified complex
    int free_rank = 0;  // free rank of homology
    std::vector<std::string> torsion;  // non-unit invariant factors, printed
};

struct invariant_report {
    ring_spec ring;
    bool reduced = true;
    long d_c = 0;
    int w = 0;
    int r = 0;
    int components = 1;
    long s = 0;  // 2 d_c + w - r + 1
    int width = 0;
    std::vector<std::string> lee_coords;  // class in H^0 / torsion, printed
    std::vector<degree_summary> summary;
};

namespace invariant_detail {

template <class R>
invariant_report run_pipeline(const diagram& d, const coeffs<R>& k,
                              bool reduced) {
    auto sc = scan_reduce(d, k, reduced);
    auto sd = seifert_data(d);

    invariant_report rep;
    rep.ring = k.spec;
    rep.reduced = reduced;
    rep.w = sd.w;
    rep.r = sd.r;
    rep.components = d.n_components();
    rep.width = sc.width;

    auto h0 = homology_at(sc.C, 0, {sc.alpha});
    rep.d_c = class_divisibility(k, h0, 0);
    rep.s = 2 * rep.d_c + rep.w - rep.r + 1;
    for (auto& x : h0.class_free[0]) rep.lee_coords.push_back(k.rg.str(x));

    for (int i = 0; i < sc.C.degrees(); ++i) {
        int deg = sc.C.deg_min + i;
        auto h = deg == 0 ? h0 : homology_at(sc.C, deg);
        degree_summary line{deg, sc.C.gens[i], h.free_rank, {}};
        for (auto& t : h.torsion) line.torsion.push_back(k.rg.str(t));
        rep.summary.push_back(std::move(line));
    }

    if (check_level() >= 1)
        KHT_ASSERT(((rep.s - (rep.components - 1)) % 2 + 2) % 2 == 0,
                   "s has the wrong parity for the component count");
    return rep;
}

}  // namespace invariant_detail

inline invariant_report reduced_s(const diagram& d, const ring_spec& spec) {
    diagram dm = d;
    if (!dm.has_mark()) dm.ensure_mark();
    return with_ring(spec, [&](const auto& k) -> invariant_report {
        using R = std::decay_t<decltype(k.rg)>;
        if constexpr (!R::snf_capable) {
            fail(errc::not_euclidean,
                 "invariants need homology; over Z[H] use the complex dump");
        } else {
            return invariant_detail::run_pipeline(dm, k, true);
        }
    });
}

inline invariant_report unreduced_s(const diagram& d, const ring_spec& spec) {
    return with_ring(spec, [&](const auto& k) -> invariant_report {
        using R = std::decay_t<decltype(k.rg)>;
        if constexpr (!R::snf_capable) {
            fail(errc::not_euclidean,
                 "invariants need homology; over Z[H] use the complex dump");
        } else {
            return invariant_detail::run_pipeline(d, k, false);
        }
    });
}

inline int epsilon_c(const diagram& d, const ring_spec& spec) {
    long e = unreduced_s(d, spec).s - reduced_s(d, spec).s;
    KHT_ASSERT(e == 0 || e == 2, "ss - s~s must be 0 or 2");
    return (int)e;
}

// the class c^{-d_c} alpha in H^0 / torsion; its coordinate gcd is a unit
// exactly when the class generates a free summand
struct refined_class_data {
    std::vector<std::string> coords;
    bool gcd_unit = false;
};

inline refined_class_data refined_class(const diagram& d,
                                        const ring_spec& spec) {
    diagram dm = d;
    if (!dm.has_mark()) dm.ensure_mark();
    return with_ring(spec, [&](const auto& k) -> refined_class_data {
        using R = std::decay_t<decltype(k.rg)>;
        if constexpr (!R::snf_capable) {
            fail(errc::not_euclidean,
                 "invariants need homology; over Z[H] use the complex dump");
        } else {
            const R& rg = k.rg;
            auto sc = scan_reduce(dm, k, true);
            auto h0 = homology_at(sc.C, 0, {sc.alpha});
            long dc = class_divisibility(k, h0, 0);
            auto ck = pow(rg, k.c, dc);

            refined_class_data out;
            auto g = rg.zero();
            for (auto& x : h0.class_free[0]) {
                auto q = rg.exact_div(x, ck);
                KHT_ASSERT(q.has_value(), "divisibility lied about the class");
                out.coords.push_back(rg.str(*q));
                g = gcd(rg, g, *q);
            }
            out.gcd_unit = rg.is_unit(g);
            return out;
        }
    });
}

struct mirror_report {
    long s = 0;
    long s_mirror = 0;
    bool antisymmetric = false;
};

inline mirror_report mirror_check(const diagram& d, const ring_spec& spec) {
    long a = reduced_s(d, spec).s;
    long b = reduced_s(mirror(d), spec).s;
    return {a, b, a == -b};
}

}  // namespace kht
