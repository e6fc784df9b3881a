#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "frobenius.hpp"

namespace kht {

// Crossing-by-crossing construction of the simplified complex.
//
// The partial complex after a prefix of the crossings is a complex of planar
// tangles: every generator is a perfect matching of the currently open edge
// ends, and every differential entry is an R-linear combination of dotted
// genus-zero surfaces between two matchings. A surface is stored in its
// neck-cut normal form: one disk per component of the overlay of the two
// matchings (plus one disk per transient closed circle), with at most one
// dot per disk; c-powers and signs live in the coefficient.
//
// Attaching the next crossing forms the mapping cone over the saddle map,
// new closed circles are split into two generators of adjacent quantum
// degree, and isolated unit entries between generators with equal matchings
// are cancelled. The orientation cycle rides along: it is a combination of
// generators in the seifert layer whose arcs carry 0/1 labels recording the
// X part of each eventual circle factor.
//
// In the reduced flavor the marked edge is cut: its two ends stay open to
// the very end, the disk containing them never takes a dot (a dot there
// becomes a factor of c), and the cut circle is never delooped.

struct scan_plan {
    std::vector<int> order;
    int width = 0;  // max number of open ends after a step
};

// crossing order for the scan, greedy on the number of open ends; in the
// reduced flavor the width counts the cut ends of the marked edge, which
// stay open to the last step
inline scan_plan scan_order(const diagram& dg, bool reduced) {
    int n = dg.n();
    int cut = reduced ? dg.marked_edge : 0;
    scan_plan pl;
    std::vector<char> done((size_t)n, 0);
    std::set<int> open;
    int mark_ends = (reduced && !dg.marked_edge && dg.marked_loop >= 0) ? 2 : 0;
    pl.width = mark_ends;
    for (int step = 0; step < n; ++step) {
        int best = -1, best_after = 0;
        for (int c = 0; c < n; ++c) {
            if (done[c]) continue;
            std::map<int, int> occ;
            for (int k = 0; k < 4; ++k) occ[dg.xs[c][k]]++;
            int after = (int)open.size();
            for (auto& [e, cnt] : occ) {
                if (e == cut)
                    after += cnt;  // cut ends never close
                else if (cnt == 1)
                    after += open.count(e) ? -1 : 1;
            }
            if (best < 0 || after < best_after) {
                best = c;
                best_after = after;
            }
        }
        pl.order.push_back(best);
        done[best] = 1;
        std::map<int, int> occ;
        for (int k = 0; k < 4; ++k) occ[dg.xs[best][k]]++;
        for (auto& [e, cnt] : occ) {
            if (e == cut)
                mark_ends += cnt;
            else if (cnt == 1) {
                if (open.count(e))
                    open.erase(e);
                else
                    open.insert(e);
            }
        }
        pl.width = std::max(pl.width, (int)open.size() + mark_ends);
    }
    return pl;
}

namespace scan_detail {

struct overlay_info {
    int n = 0;
    std::map<int, int> idx;  // slot -> cycle, cycles numbered by min slot
};

using arcs_t = std::vector<std::pair<int, int>>;

inline overlay_info overlay(const arcs_t& A, const arcs_t& B) {
    std::map<int, int> pa, pb;
    for (auto& [x, y] : A) {
        pa[x] = y;
        pa[y] = x;
    }
    for (auto& [x, y] : B) {
        pb[x] = y;
        pb[y] = x;
    }
    KHT_ASSERT(pa.size() == pb.size(), "matchings on different boundaries");
    overlay_info o;
    for (auto& [s0, p0] : pa) {
        (void)p0;
        if (o.idx.count(s0)) continue;
        int c = o.n++;
        int cur = s0;
        for (;;) {
            o.idx[cur] = c;
            int nxt = pa.at(cur);
            o.idx[nxt] = c;
            auto it = pb.find(nxt);
            KHT_ASSERT(it != pb.end(), "boundary mismatch in overlay");
            cur = it->second;
            if (cur == s0) break;
        }
    }
    return o;
}

struct uf_small {
    std::vector<int> p;
    explicit uf_small(int n) : p(n) {
        for (int i = 0; i < n; ++i) p[i] = i;
    }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace scan_detail

template <class R>
struct scan_result {
    chain_complex<R> C;
    cycle_vec<R> alpha;
    int width = 0;
};

template <class R>
class scan_state {
    using E = typename R::elem;
    using entry_t = std::map<uint32_t, E>;
    using arcs_t = scan_detail::arcs_t;

    const coeffs<R>& kk;
    const diagram& dg;
    bool reduced;

    struct sgen {
        arcs_t arcs;  // sorted pairs (a < b), ascending by first
        int ncirc = 0;
        int h = 0, q = 0;
        bool alive = false;
        std::map<int, entry_t> out;
        std::set<int> in;
    };
    std::vector<sgen> gens;

    // the tracked class is a stack of cobordisms from the partial seifert
    // smoothing (sigma) into the generators: dots sit on the overlay cycles
    // of (sigma, gen arcs), then on the generator's transient circles
    struct lee_term {
        int gen;
        uint32_t dots;
        E coef;
    };
    std::vector<lee_term> lee;

    lee_chain_data lc;
    arcs_t sigma;                // open arcs of the partial seifert smoothing
    std::vector<int> circle_of;  // seifert circle per edge
    int mark_slot = 0;  // the cut ends are +mark_slot and -mark_slot; 0 = none
    int neg_done = 0;   // negative crossings attached so far; lee layer h
    int width_seen = 0;

  public:
    scan_state(const coeffs<R>& k, const diagram& d, bool red)
        : kk(k), dg(d), reduced(red) {}

    scan_result<R> run() {
        lc = lee_chain(dg, reduced);
        circle_of = resolve(dg, lc.state).circle_of;
        if (reduced) mark_slot = dg.marked_edge ? dg.marked_edge : dg.n_edges + 1;

        sgen g0;
        g0.alive = true;
        if (reduced && dg.marked_loop >= 0) {
            g0.arcs.push_back({-mark_slot, mark_slot});
            sigma.push_back({-mark_slot, mark_slot});
        }
        gens.push_back(std::move(g0));
        lee.push_back({0, 0, kk.rg.one()});

        int n_circ = (int)lc.factor.size();
        for (int l = 0; l < dg.free_loops; ++l) {
            int ci = n_circ - dg.free_loops + l;
            if (reduced && ci == lc.marked_circle) continue;
            split_loop(lc.factor[ci]);
        }

        scan_plan pl = scan_order(dg, reduced);
        for (int cr : pl.order) {
            attach(cr);
            deloop_all();
            eliminate_all();
            if (check_level() >= 2) audit();
        }
        return assemble(pl);
    }

  private:
    // ---------------------------------------------------------------- util

    static uint32_t drop_bit(uint32_t m, int p) {
        return (m & ((1u << p) - 1)) | ((m >> (p + 1)) << p);
    }

    bool is_mark(int slot) const {
        return mark_slot && (slot == mark_slot || slot == -mark_slot);
    }
    bool marked_arc(const std::pair<int, int>& a) const {
        return is_mark(a.first) || is_mark(a.second);
    }

    void put_term(entry_t& e, uint32_t mask, const E& v) {
        auto it = e.find(mask);
        if (it == e.end()) {
            if (!kk.rg.is_zero(v)) e.emplace(mask, v);
        } else {
            it->second = kk.rg.add(it->second, v);
            if (kk.rg.is_zero(it->second)) e.erase(it);
        }
    }

    void link(int a, int b, entry_t e) {
        if (e.empty()) return;
        gens[a].out[b] = std::move(e);
        gens[b].in.insert(a);
    }

    void kill(int g) {
        auto& G = gens[g];
        G.alive = false;
        for (auto& [t, e] : G.out) {
            (void)e;
            gens[t].in.erase(g);
        }
        for (int s : G.in) gens[s].out.erase(g);
        G.out.clear();
        G.in.clear();
    }

    // X^m (2X - c)^g as u*1 + v*X
    std::pair<E, E> handle_elem(int m, int g) const {
        const R& rg = kk.rg;
        E u = m == 0 ? rg.one() : rg.zero();
        E v = m == 0 ? rg.zero() : kht::pow(rg, kk.c, m - 1);
        for (int t = 0; t < g; ++t) {
            E nu = rg.neg(rg.mul(kk.c, u));
            E nv = rg.add(rg.add(u, u), rg.mul(kk.c, v));
            u = std::move(nu);
            v = std::move(nv);
        }
        return {u, v};
    }

    // all dot patterns of a connected surface with invariants (m, g) spread
    // over the sheets listed in pos (32-bit) or pos64
    template <class F>
    void spread(int m, int g, const std::vector<int>& pos, F&& fn) const {
        const R& rg = kk.rg;
        auto [u, v] = handle_elem(m, g);
        int k = (int)pos.size();
        KHT_ASSERT(k >= 1, "closed component in a surface composition");
        uint64_t full = 0;
        for (int p : pos) full |= 1ull << p;
        if (!rg.is_zero(v)) fn(full, v);
        if (rg.is_zero(u)) return;
        E nc = rg.neg(kk.c);
        for (uint32_t s = 0; s + 1 < (1u << k); ++s) {
            uint64_t mask = 0;
            for (int t = 0; t < k; ++t)
                if ((s >> t) & 1) mask |= 1ull << pos[t];
            fn(mask, kk.rg.mul(u, kht::pow(rg, nc, k - 1 - __builtin_popcount(s))));
        }
    }

    // -------------------------------------------------------- free circles

    // tensor the whole complex with one circle labelled X (factor 0 = X_a)
    // or X - c (factor 1 = X_b) and deloop it on the spot
    void split_loop(int factor) {
        size_t old_n = gens.size();
        std::vector<int> to1(old_n, -1), toX(old_n, -1);
        for (size_t g = 0; g < old_n; ++g) {
            if (!gens[g].alive) continue;
            sgen g1 = gens[g], gX = gens[g];
            g1.q += 1;
            gX.q -= 1;
            g1.out.clear();
            g1.in.clear();
            gX.out.clear();
            gX.in.clear();
            to1[g] = (int)gens.size();
            gens.push_back(std::move(g1));
            toX[g] = (int)gens.size();
            gens.push_back(std::move(gX));
        }
        for (size_t g = 0; g < old_n; ++g) {
            if (to1[g] < 0) continue;
            for (auto& [t, e] : gens[g].out) {
                // identity on the circle: plain birth into the 1 part,
                // dotted birth into the X part (see the deloop rules)
                link(to1[g], to1[t], e);
                link(toX[g], toX[t], e);
            }
        }
        for (size_t g = 0; g < old_n; ++g)
            if (to1[g] >= 0) kill((int)g);
        std::vector<lee_term> nl;
        for (auto& t : lee) {
            // the loop carries X^1 (factor a) or X - c (factor b)
            nl.push_back({toX[t.gen], t.dots, t.coef});
            if (factor == 1)
                nl.push_back({to1[t.gen], t.dots, kk.rg.neg(kk.rg.mul(kk.c, t.coef))});
        }
        lee = std::move(nl);
    }

    // -------------------------------------------------------------- attach

    struct glued {
        arcs_t arcs;
        std::vector<std::vector<int>> arc_from;   // constituents per new arc
        std::vector<std::vector<int>> circ_from;  // constituents per circle
        // constituents: old arc index, or ~s for the smoothing arc s (0/1)
    };

    // stitch one generator's matching through the gluing; smooth holds the
    // two smoothing arcs as stub pairs, glue the identifications
    glued stitch(const arcs_t& old_arcs,
                 const std::vector<std::pair<int, int>>& smooth,
                 const std::vector<std::pair<int, int>>& glue,
                 const std::map<int, int>& stub_slot) const {
        std::map<int, std::pair<int, int>> mate;  // slot -> (partner, origin)
        for (int i = 0; i < (int)old_arcs.size(); ++i) {
            mate[old_arcs[i].first] = {old_arcs[i].second, i};
            mate[old_arcs[i].second] = {old_arcs[i].first, i};
        }
        for (int s = 0; s < 2; ++s) {
            mate[smooth[s].first] = {smooth[s].second, ~s};
            mate[smooth[s].second] = {smooth[s].first, ~s};
        }
        std::map<int, int> gl;
        for (auto& [a, b] : glue) {
            gl[a] = b;
            gl[b] = a;
        }
        glued out;
        std::set<int> seen;
        // open walks first: start at every unglued end (external slots)
        std::vector<int> starts;
        for (auto& [s, mp] : mate) {
            (void)mp;
            if (!gl.count(s)) starts.push_back(s);
        }
        for (int s0 : starts) {
            if (seen.count(s0)) continue;
            std::vector<int> from;
            int cur = s0;
            int last = cur;
            for (;;) {
                seen.insert(cur);
                auto [nxt, origin] = mate.at(cur);
                from.push_back(origin);
                seen.insert(nxt);
                last = nxt;
                auto it = gl.find(nxt);
                if (it == gl.end()) break;
                cur = it->second;
            }
            auto ext = [&](int s) {
                auto it = stub_slot.find(s);
                return it == stub_slot.end() ? s : it->second;
            };
            int a = ext(s0), b = ext(last);
            out.arcs.push_back({std::min(a, b), std::max(a, b)});
            out.arc_from.push_back(std::move(from));
        }
        // leftover cycles are transient circles
        for (auto& [s0, mp] : mate) {
            (void)mp;
            if (seen.count(s0)) continue;
            std::vector<int> from;
            int cur = s0;
            for (;;) {
                seen.insert(cur);
                auto [nxt, origin] = mate.at(cur);
                from.push_back(origin);
                seen.insert(nxt);
                auto it = gl.find(nxt);
                KHT_ASSERT(it != gl.end(), "unterminated walk in stitch");
                cur = it->second;
                if (cur == s0) break;
            }
            out.circ_from.push_back(std::move(from));
        }
        // canonical order: arcs by first slot; circles in discovery order
        // (already ascending by smallest slot, since mate iterates sorted)
        std::vector<int> perm(out.arcs.size());
        for (size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
            return out.arcs[(size_t)a] < out.arcs[(size_t)b];
        });
        glued srt;
        for (int i : perm) {
            srt.arcs.push_back(out.arcs[(size_t)i]);
            srt.arc_from.push_back(std::move(out.arc_from[(size_t)i]));
        }
        srt.circ_from = std::move(out.circ_from);
        return srt;
    }

    void attach(int cr) {
        const R& rg = kk.rg;
        const int S = 1 << 28;  // stub node ids S..S+3
        std::array<int, 4> edge{};
        for (int k = 0; k < 4; ++k) edge[k] = dg.xs[cr][k];

        // gluing plan
        std::set<int> open_now;
        if (!gens.empty())
            for (auto& g : gens)
                if (g.alive) {
                    for (auto& a : g.arcs) {
                        if (!is_mark(a.first)) open_now.insert(a.first);
                        if (!is_mark(a.second)) open_now.insert(a.second);
                    }
                    break;
                }
        int cut = reduced ? dg.marked_edge : 0;
        bool cut_before = false;  // first cut end already created earlier
        if (cut)
            for (auto& g : gens)
                if (g.alive) {
                    for (auto& a : g.arcs)
                        if (a.first == cut || a.second == cut) cut_before = true;
                    break;
                }
        std::vector<std::pair<int, int>> glue;
        std::map<int, int> stub_slot;  // stub node -> external slot id
        std::map<int, int> kink_seen;  // edge -> stub for in-crossing pairs
        for (int k = 0; k < 4; ++k) {
            int e = edge[k];
            if (e == cut && cut) {
                // cut edge: the first end keeps the label, the second is
                // negated, and they are never glued to each other
                stub_slot[S + k] = cut_before ? -e : e;
                cut_before = true;
                continue;
            }
            int cnt = (int)std::count(edge.begin(), edge.end(), e);
            if (cnt == 2) {
                auto it = kink_seen.find(e);
                if (it == kink_seen.end())
                    kink_seen[e] = S + k;
                else
                    glue.push_back({it->second, S + k});
            } else if (open_now.count(e)) {
                glue.push_back({e, S + k});
            } else {
                stub_slot[S + k] = e;
            }
        }

        std::array<std::vector<std::pair<int, int>>, 2> smooth;
        smooth[0] = {{S + 0, S + 1}, {S + 2, S + 3}};
        smooth[1] = {{S + 1, S + 2}, {S + 0, S + 3}};
        int ss = dg.sign[cr] > 0 ? 0 : 1;  // seifert layer
        if (ss) ++neg_done;

        size_t old_n = gens.size();
        std::vector<std::array<int, 2>> nid(old_n, {-1, -1});
        std::vector<std::array<glued, 2>> gl(old_n);
        for (size_t g = 0; g < old_n; ++g) {
            if (!gens[g].alive) continue;
            KHT_ASSERT(gens[g].ncirc == 0, "circle survived a round");
            for (int L = 0; L < 2; ++L) {
                gl[g][L] = stitch(gens[g].arcs, smooth[L], glue, stub_slot);
                sgen ng;
                ng.arcs = gl[g][L].arcs;
                ng.ncirc = (int)gl[g][L].circ_from.size();
                ng.h = gens[g].h + L;
                ng.q = gens[g].q + L;
                ng.alive = true;
                nid[g][L] = (int)gens.size();
                gens.push_back(std::move(ng));
            }
            int w = 2 * (int)gl[g][0].arcs.size();
            width_seen = std::max(width_seen, w);
            if (w > 32)
                fail(errc::width_exceeded,
                     "scan front exceeds 32 open ends; reorder or give up");
        }

        // entries: d_old (x) id on both layers, then the saddle
        for (size_t x = 0; x < old_n; ++x) {
            if (nid[x][0] < 0) continue;
            std::vector<std::pair<int, const entry_t*>> outs;
            for (auto& [y, e] : gens[x].out) outs.push_back({y, &e});
            for (auto& [y, e] : outs)
                for (int L = 0; L < 2; ++L)
                    cone_entry(x, y, *e, L, nid, gl, smooth[L], glue, stub_slot,
                               rg.one(), false);
            // saddle component with the koszul sign
            E sg = (gens[x].h & 1) ? rg.neg(rg.one()) : rg.one();
            cone_entry(x, x, entry_t{}, 0, nid, gl, smooth[0], glue, stub_slot,
                       sg, true);
        }

        // the tracked class extends by the identity over the seifert-layer
        // smoothing; seifert circles closing up in sigma get capped with
        // their label
        arcs_t sig_old = sigma;
        glued sgl = stitch(sigma, smooth[ss], glue, stub_slot);
        std::vector<lee_term> nl;
        for (auto& t : lee)
            attach_tau(nl, t, nid[t.gen][ss], gl[t.gen][ss], sgl, sig_old,
                       gens[t.gen].arcs, smooth[ss], glue, edge);
        lee = std::move(nl);
        sigma = sgl.arcs;

        for (size_t g = 0; g < old_n; ++g)
            if (nid[g][0] >= 0) kill((int)g);
        normalize_lee();
    }

    // push one tracked term through the attach: old sheets fuse along the
    // gluing together with one identity square per smoothing arc, genus is
    // spread out again, and closed-up seifert circles are capped with X or
    // X - c according to their coloring
    void attach_tau(std::vector<lee_term>& nl, const lee_term& t, int ngen,
                    const glued& GM, const glued& GS, const arcs_t& sig_old,
                    const arcs_t& MO,
                    const std::vector<std::pair<int, int>>& smoothL,
                    const std::vector<std::pair<int, int>>& glue,
                    const std::array<int, 4>& edge) {
        using scan_detail::overlay;
        const R& rg = kk.rg;
        const int S = 1 << 28;
        auto ovO = overlay(sig_old, MO);
        int n_base = ovO.n;  // pieces: old sheets, then the two squares
        scan_detail::uf_small uf(n_base + 2);
        auto owner = [&](int s) -> int {
            if (s >= S) {
                for (int q = 0; q < 2; ++q)
                    if (smoothL[(size_t)q].first == s ||
                        smoothL[(size_t)q].second == s)
                        return n_base + q;
                KHT_ASSERT(false, "stub without a square");
            }
            return ovO.idx.at(s);
        };
        for (auto& [a, b] : glue) uf.unite(owner(a), owner(b));
        std::map<int, int> piece_cnt, joint_cnt, piece_dots;
        for (int p = 0; p < n_base + 2; ++p) piece_cnt[uf.find(p)]++;
        for (auto& [a, b] : glue) {
            (void)b;
            joint_cnt[uf.find(owner(a))]++;
        }
        for (int p = 0; p < n_base; ++p)
            if ((t.dots >> p) & 1) piece_dots[uf.find(p)]++;

        // new items: overlay cycles, then the generator's circles, then the
        // closed seifert circles (capped right after the spread)
        auto ovN = overlay(GS.arcs, GM.arcs);
        int n_mc = (int)GM.circ_from.size();
        int n_sc = (int)GS.circ_from.size();
        std::map<int, std::vector<int>> piece_items;
        auto add_item = [&](int piece, int pos) {
            piece_items[piece].push_back(pos);
        };
        // overlay cycles: locate through any constituent of either side
        {
            std::vector<int> cyc_piece((size_t)ovN.n, -1);
            auto scan_side = [&](const glued& G, const arcs_t& old_arcs) {
                for (size_t j = 0; j < G.arcs.size(); ++j) {
                    auto it = ovN.idx.find(G.arcs[j].first);
                    KHT_ASSERT(it != ovN.idx.end(), "arc missing from overlay");
                    int cyc = it->second;
                    if (cyc_piece[(size_t)cyc] >= 0) continue;
                    int o = G.arc_from[j][0];
                    cyc_piece[(size_t)cyc] =
                        o < 0 ? uf.find(n_base + ~o)
                              : uf.find(ovO.idx.at(old_arcs[(size_t)o].first));
                }
            };
            scan_side(GS, sig_old);
            scan_side(GM, MO);
            for (int cyc = 0; cyc < ovN.n; ++cyc) {
                KHT_ASSERT(cyc_piece[(size_t)cyc] >= 0, "unplaced overlay cycle");
                add_item(cyc_piece[(size_t)cyc], cyc);
            }
        }
        for (int ci = 0; ci < n_mc; ++ci) {
            int o = GM.circ_from[(size_t)ci][0];
            add_item(o < 0 ? uf.find(n_base + ~o)
                           : uf.find(ovO.idx.at(MO[(size_t)o].first)),
                     ovN.n + ci);
        }
        for (int si = 0; si < n_sc; ++si) {
            int o = GS.circ_from[(size_t)si][0];
            add_item(o < 0 ? uf.find(n_base + ~o)
                           : uf.find(ovO.idx.at(sig_old[(size_t)o].first)),
                     ovN.n + n_mc + si);
        }

        uint32_t marked_bm = 0;
        if (mark_slot)
            for (int s : {mark_slot, -mark_slot}) {
                auto it = ovN.idx.find(s);
                if (it != ovN.idx.end()) marked_bm |= 1u << it->second;
            }

        std::vector<std::pair<uint32_t, E>> part{{0u, t.coef}};
        for (auto& [root, cnt] : piece_cnt) {
            auto ii = piece_items.find(root);
            KHT_ASSERT(ii != piece_items.end(), "closed piece in the class");
            int chi = cnt - (joint_cnt.count(root) ? joint_cnt[root] : 0);
            int b = (int)ii->second.size();
            int g2 = 2 - chi - b;
            KHT_ASSERT(g2 >= 0 && g2 % 2 == 0, "bad genus in the class");
            int m = piece_dots.count(root) ? piece_dots[root] : 0;
            std::vector<std::pair<uint32_t, E>> nxt;
            spread(m, g2 / 2, ii->second, [&](uint64_t mm, const E& cc) {
                for (auto& [pm, pv] : part)
                    nxt.push_back({pm | (uint32_t)mm, rg.mul(pv, cc)});
            });
            part = std::move(nxt);
            if (part.empty()) break;
        }

        for (auto& [pm, pv] : part) {
            uint32_t mask = pm;
            E coef = pv;
            uint32_t hit = mask & marked_bm;
            while (hit) {
                coef = rg.mul(coef, kk.c);
                hit &= hit - 1;
            }
            mask &= ~marked_bm;
            // cap the closed seifert circles with their label
            bool dead = false;
            for (int si = 0; si < n_sc && !dead; ++si) {
                int pos = ovN.n + n_mc + si;
                bool beta = (mask >> pos) & 1;
                int o = GS.circ_from[(size_t)si][0];
                int e = o < 0 ? edge[(size_t)(smoothL[(size_t)~o].first - S)]
                              : std::abs(sig_old[(size_t)o].first);
                int fac = lc.factor[(size_t)circle_of[(size_t)e]];
                if (fac == 0) {
                    if (beta) coef = rg.mul(coef, kk.c);
                } else if (beta) {
                    dead = true;  // (X - c) X caps to zero
                }
                mask &= ~(1u << pos);
            }
            if (dead || rg.is_zero(coef)) continue;
            nl.push_back({ngen, mask, std::move(coef)});
        }
    }


    // build the cone entry nid[x][L] -> nid[y][L] extending alpha, or the
    // saddle nid[x][0] -> nid[x][1] when saddle = true
    void cone_entry(size_t x, size_t y, const entry_t& alpha, int L,
                    const std::vector<std::array<int, 2>>& nid,
                    const std::vector<std::array<glued, 2>>& gl,
                    const std::vector<std::pair<int, int>>& smoothL,
                    const std::vector<std::pair<int, int>>& glue,
                    const std::map<int, int>& stub_slot, const E& scale,
                    bool saddle) {
        using scan_detail::overlay;
        const R& rg = kk.rg;
        int src = saddle ? nid[x][0] : nid[x][L];
        int tgt = saddle ? nid[x][1] : nid[y][L];
        const glued& GX = saddle ? gl[x][0] : gl[x][L];
        const glued& GY = saddle ? gl[x][1] : gl[y][L];
        const sgen& A = gens[src];
        const sgen& B = gens[tgt];

        // base sheets: overlay cycles of the old entry (or one sheet per old
        // arc for the identity under the saddle)
        scan_detail::overlay_info ov_old;
        if (saddle) {
            ov_old = overlay(gens[x].arcs, gens[x].arcs);
        } else {
            ov_old = overlay(gens[x].arcs, gens[y].arcs);
        }
        int n_base = ov_old.n;
        int n_sq = saddle ? 1 : 2;
        scan_detail::uf_small uf(n_base + n_sq);
        int joints = 0;
        auto stub_square = [&](int stub) {
            if (saddle) return n_base;
            // which smoothing arc of this layer holds the stub
            return n_base +
                   ((smoothL[0].first == stub || smoothL[0].second == stub) ? 0
                                                                            : 1);
        };
        auto node_piece = [&](int node) {
            if (node >= (1 << 28)) return stub_square(node);
            return ov_old.idx.at(node);
        };
        for (auto& [a, b] : glue) {
            int pa = node_piece(a), pb = node_piece(b);
            uf.unite(pa, pb);
            ++joints;
        }
        std::vector<int> piece_cnt(n_base + n_sq, 0);
        for (int p = 0; p < n_base + n_sq; ++p) piece_cnt[uf.find(p)]++;
        std::vector<int> joint_cnt(n_base + n_sq, 0);
        for (auto& [a, b] : glue) joint_cnt[uf.find(node_piece(a))]++;

        // boundary items of the new entry
        auto ov_new = overlay(A.arcs, B.arcs);
        int n_items = ov_new.n + A.ncirc + B.ncirc;
        KHT_ASSERT(n_items <= 32, "entry has too many sheets");
        // assign each item to a component: follow any constituent, either a
        // smoothing arc (~s, lives on its square) or an old arc index
        auto origin_piece = [&](const std::vector<int>& from, bool is_src) {
            int o = from.front();
            if (o < 0) return uf.find(saddle ? n_base : n_base + ~o);
            const arcs_t& oa = is_src ? gens[x].arcs : gens[saddle ? x : y].arcs;
            return uf.find(ov_old.idx.at(oa[(size_t)o].first));
        };
        std::vector<int> item_comp((size_t)n_items, -1);
        for (size_t j = 0; j < GX.arcs.size(); ++j) {
            int cyc = ov_new.idx.at(GX.arcs[j].first);
            if (item_comp[(size_t)cyc] < 0)
                item_comp[(size_t)cyc] = origin_piece(GX.arc_from[j], true);
        }
        for (size_t j = 0; j < GY.arcs.size(); ++j) {
            int cyc = ov_new.idx.at(GY.arcs[j].first);
            if (item_comp[(size_t)cyc] < 0)
                item_comp[(size_t)cyc] = origin_piece(GY.arc_from[j], false);
        }
        for (int j = 0; j < A.ncirc; ++j)
            item_comp[(size_t)(ov_new.n + j)] =
                origin_piece(GX.circ_from[(size_t)j], true);
        for (int j = 0; j < B.ncirc; ++j)
            item_comp[(size_t)(ov_new.n + A.ncirc + j)] =
                origin_piece(GY.circ_from[(size_t)j], false);
        for (int j = 0; j < n_items; ++j)
            KHT_ASSERT(item_comp[(size_t)j] >= 0, "unassigned boundary item");

        // marked positions among the new cycles
        uint32_t marked_bm = 0;
        if (mark_slot) {
            for (int s : {mark_slot, -mark_slot}) {
                auto it = ov_new.idx.find(s);
                if (it != ov_new.idx.end()) marked_bm |= 1u << it->second;
            }
        }

        // per component: items, chi, genus skeleton
        std::map<int, std::vector<int>> comp_items;
        for (int j = 0; j < n_items; ++j)
            comp_items[item_comp[(size_t)j]].push_back(j);
        struct comp_info {
            std::vector<int> items;
            std::vector<int> base_sheets;
            int chi = 0;
        };
        std::map<int, comp_info> comps;
        for (auto& [root, items] : comp_items) {
            comp_info ci;
            ci.items = items;
            ci.chi = piece_cnt[root] - joint_cnt[root];
            comps.emplace(root, std::move(ci));
        }
        for (int p = 0; p < n_base; ++p) {
            auto it = comps.find(uf.find(p));
            KHT_ASSERT(it != comps.end(), "base sheet in a closed component");
            it->second.base_sheets.push_back(p);
        }
        // every piece root must own items (no closed pieces at an attach)
        for (int p = 0; p < n_base + n_sq; ++p)
            KHT_ASSERT(comps.count(uf.find(p)),
                       "closed surface component at attach");

        entry_t acc = gens[src].out.count(tgt) ? gens[src].out[tgt] : entry_t{};
        auto emit_term = [&](uint32_t mask, E coef) {
            uint32_t hit = mask & marked_bm;
            while (hit) {
                coef = rg.mul(coef, kk.c);
                hit &= hit - 1;
            }
            mask &= ~marked_bm;
            put_term(acc, mask, coef);
        };

        std::vector<std::pair<uint32_t, E>> base_terms;
        if (saddle)
            base_terms.push_back({0u, scale});
        else
            for (auto& [dots, v] : alpha) base_terms.push_back({dots, rg.mul(scale, v)});

        for (auto& [dots, v0] : base_terms) {
            // partial tensor across components
            std::vector<std::pair<uint32_t, E>> part{{0u, v0}};
            for (auto& [root, ci] : comps) {
                (void)root;
                int m = 0;
                for (int p : ci.base_sheets) m += (int)((dots >> p) & 1);
                int b = (int)ci.items.size();
                int g2 = 2 - ci.chi - b;
                KHT_ASSERT(g2 >= 0 && g2 % 2 == 0, "bad genus in attach");
                std::vector<std::pair<uint32_t, E>> nxt;
                spread(m, g2 / 2, ci.items, [&](uint64_t mm, const E& cc) {
                    for (auto& [pm, pv] : part)
                        nxt.push_back({pm | (uint32_t)mm, rg.mul(pv, cc)});
                });
                part = std::move(nxt);
                if (part.empty()) break;
            }
            for (auto& [pm, pv] : part) emit_term(pm, pv);
        }
        if (acc.empty()) {
            if (gens[src].out.count(tgt)) {
                gens[src].out.erase(tgt);
                gens[tgt].in.erase(src);
            }
            return;
        }
        gens[src].out[tgt] = std::move(acc);
        gens[tgt].in.insert(src);
    }

    // -------------------------------------------------------------- deloop

    void deloop_all() {
        for (;;) {
            int g = -1;
            for (size_t i = 0; i < gens.size(); ++i)
                if (gens[i].alive && gens[i].ncirc > 0) {
                    g = (int)i;
                    break;
                }
            if (g < 0) return;
            deloop_one(g);
        }
    }

    void deloop_one(int g) {
        const R& rg = kk.rg;
        sgen& G = gens[g];
        int ci = G.ncirc - 1;

        sgen g1, gX;
        g1.arcs = G.arcs;
        gX.arcs = G.arcs;
        g1.ncirc = gX.ncirc = ci;
        g1.h = gX.h = G.h;
        g1.q = G.q + 1;
        gX.q = G.q - 1;
        g1.alive = gX.alive = true;
        int n1 = (int)gens.size();
        gens.push_back(std::move(g1));
        int nX = (int)gens.size();
        gens.push_back(std::move(gX));
        sgen& GG = gens[g];  // re-acquire after push_back

        for (auto& [t, e] : GG.out) {
            int p = scan_detail::overlay(GG.arcs, gens[t].arcs).n + ci;
            entry_t e1, eX;
            for (auto& [dots, v] : e) {
                bool bit = (dots >> p) & 1;
                uint32_t nd = drop_bit(dots, p);
                if (bit) {
                    put_term(e1, nd, v);           // birth then cap-with-dot
                    put_term(eX, nd, rg.mul(kk.c, v));
                } else {
                    put_term(eX, nd, v);
                }
            }
            link(n1, t, std::move(e1));
            link(nX, t, std::move(eX));
        }
        for (int s : GG.in) {
            auto& e = gens[s].out.at(g);
            int p = scan_detail::overlay(gens[s].arcs, GG.arcs).n +
                    gens[s].ncirc + ci;
            entry_t e1, eX;
            for (auto& [dots, v] : e) {
                bool bit = (dots >> p) & 1;
                uint32_t nd = drop_bit(dots, p);
                if (bit)
                    put_term(eX, nd, v);
                else
                    put_term(e1, nd, v);
            }
            link(s, n1, std::move(e1));
            link(s, nX, std::move(eX));
        }
        int bitpos = scan_detail::overlay(sigma, GG.arcs).n + ci;
        for (auto& t : lee)
            if (t.gen == g) {
                bool bit = (t.dots >> bitpos) & 1;
                t.gen = bit ? nX : n1;
                t.dots = drop_bit(t.dots, bitpos);
            }
        kill(g);
    }

    // ----------------------------------------------------------- eliminate

    bool valid_pivot(int f, int t, const entry_t& e) const {
        if (gens[f].arcs != gens[t].arcs) return false;
        if (gens[f].ncirc || gens[t].ncirc) return false;
        if (e.size() != 1) return false;
        auto& [dots, v] = *e.begin();
        return dots == 0 && kk.rg.is_unit(v);
    }

    void eliminate_all() {
        for (;;) {
            int bf = -1, bt = -1;
            long best = 0;
            for (size_t f = 0; f < gens.size(); ++f) {
                if (!gens[f].alive) continue;
                for (auto& [t, e] : gens[f].out) {
                    if (!valid_pivot((int)f, t, e)) continue;
                    long sc = (long)(gens[f].out.size() - 1) *
                              (long)(gens[t].in.size() - 1);
                    if (bf < 0 || sc < best) {
                        bf = (int)f;
                        bt = t;
                        best = sc;
                    }
                }
            }
            if (bf < 0) return;
            eliminate(bf, bt);
        }
    }

    void eliminate(int f, int t) {
        const R& rg = kk.rg;
        E u = gens[f].out.at(t).begin()->second;
        E mui = rg.neg(rg.inv_unit(u));

        std::vector<int> srcs(gens[t].in.begin(), gens[t].in.end());
        std::vector<std::pair<int, entry_t>> dsts;
        for (auto& [b, e] : gens[f].out)
            if (b != t) dsts.push_back({b, e});

        for (int a : srcs) {
            if (a == f) continue;
            const entry_t alpha = gens[a].out.at(t);
            for (auto& [b, delta] : dsts) {
                entry_t& acc = gens[a].out[b];
                compose_into(acc, a, f, b, alpha, delta, mui);
                if (acc.empty()) {
                    gens[a].out.erase(b);
                    gens[b].in.erase(a);
                } else {
                    gens[b].in.insert(a);
                }
            }
        }

        if (!lee.empty()) {
            int h_lee = neg_done;
            if (gens[f].h == h_lee) {
                std::vector<lee_term> nl;
                for (auto& z : lee)
                    if (z.gen != f) nl.push_back(z);
                lee = std::move(nl);
            } else if (gens[t].h == h_lee) {
                std::vector<lee_term> nl;
                for (auto& z : lee) {
                    if (z.gen != t) {
                        nl.push_back(z);
                        continue;
                    }
                    for (auto& [b, delta] : dsts) {
                        entry_t acc;
                        compose_mm(acc, sigma, gens[t].arcs, gens[b].arcs,
                                   entry_t{{z.dots, z.coef}}, delta, mui);
                        for (auto& [dd, vv] : acc) nl.push_back({b, dd, vv});
                    }
                }
                lee = std::move(nl);
                normalize_lee();
            }
        }
        kill(f);
        kill(t);
    }

    // acc += scale * (delta after alpha), alpha: a -> mid, delta: mid -> b
    void compose_into(entry_t& acc, int a, int mid, int b, const entry_t& alpha,
                      const entry_t& delta, const E& scale) {
        compose_mm(acc, gens[a].arcs, gens[mid].arcs, gens[b].arcs, alpha,
                   delta, scale);
    }

    void compose_mm(entry_t& acc, const arcs_t& MA, const arcs_t& MM,
                    const arcs_t& MB, const entry_t& alpha,
                    const entry_t& delta, const E& scale) {
        using scan_detail::overlay;
        const R& rg = kk.rg;
        auto ovA = overlay(MA, MM);
        auto ovD = overlay(MM, MB);
        auto ovR = overlay(MA, MB);

        scan_detail::uf_small uf(ovA.n + ovD.n);
        for (auto& [x, y] : MM) {
            (void)y;
            uf.unite(ovA.idx.at(x), ovA.n + ovD.idx.at(x));
        }
        std::map<int, std::vector<int>> comp_sheets;  // root -> sheets
        for (int p = 0; p < ovA.n + ovD.n; ++p)
            comp_sheets[uf.find(p)].push_back(p);
        std::map<int, int> comp_mids;
        for (auto& [x, y] : MM) {
            (void)y;
            comp_mids[uf.find(ovA.idx.at(x))]++;
        }
        std::map<int, std::vector<int>> comp_items;
        for (auto& [slot, cyc] : ovR.idx) {
            int root = uf.find(ovA.idx.count(slot) ? ovA.idx.at(slot)
                                                   : ovA.n + ovD.idx.at(slot));
            auto& v = comp_items[root];
            if (std::find(v.begin(), v.end(), cyc) == v.end()) v.push_back(cyc);
        }
        uint32_t marked_bm = 0;
        if (mark_slot)
            for (int s : {mark_slot, -mark_slot}) {
                auto it = ovR.idx.find(s);
                if (it != ovR.idx.end()) marked_bm |= 1u << it->second;
            }

        for (auto& [da, va] : alpha)
            for (auto& [dd, vd] : delta) {
                std::vector<std::pair<uint32_t, E>> part{
                    {0u, rg.mul(scale, rg.mul(va, vd))}};
                for (auto& [root, sheets] : comp_sheets) {
                    int m = 0;
                    for (int p : sheets)
                        m += p < ovA.n ? (int)((da >> p) & 1)
                                       : (int)((dd >> (p - ovA.n)) & 1);
                    auto ii = comp_items.find(root);
                    KHT_ASSERT(ii != comp_items.end(),
                               "closed component in elimination");
                    int bcnt = (int)ii->second.size();
                    int g2 = 2 - ((int)sheets.size() -
                                  (comp_mids.count(root) ? comp_mids[root] : 0)) -
                             bcnt;
                    KHT_ASSERT(g2 >= 0 && g2 % 2 == 0, "bad genus in compose");
                    std::vector<std::pair<uint32_t, E>> nxt;
                    spread(m, g2 / 2, ii->second, [&](uint64_t mm, const E& cc) {
                        for (auto& [pm, pv] : part)
                            nxt.push_back({pm | (uint32_t)mm, rg.mul(pv, cc)});
                    });
                    part = std::move(nxt);
                    if (part.empty()) break;
                }
                for (auto& [pm, pv] : part) {
                    uint32_t mask = pm;
                    E coef = pv;
                    uint32_t hit = mask & marked_bm;
                    while (hit) {
                        coef = rg.mul(coef, kk.c);
                        hit &= hit - 1;
                    }
                    put_term(acc, mask & ~marked_bm, coef);
                }
            }
    }

    void normalize_lee() {
        std::map<std::pair<int, uint32_t>, E> m;
        for (auto& t : lee) {
            auto key = std::make_pair(t.gen, t.dots);
            auto it = m.find(key);
            if (it == m.end())
                m.emplace(key, t.coef);
            else
                it->second = kk.rg.add(it->second, t.coef);
        }
        lee.clear();
        for (auto& [key, v] : m)
            if (!kk.rg.is_zero(v)) lee.push_back({key.first, key.second, v});
    }

    // ---------------------------------------------------------------- audit

    // the tracked class only becomes a cycle once every seifert circle
    // closes and contributes its label, so only d . d = 0 can be checked
    // round by round; the final complex checks d(alpha) = 0 on assembly
    void audit() {
        const R& rg = kk.rg;
        for (size_t a = 0; a < gens.size(); ++a) {
            if (!gens[a].alive) continue;
            std::map<int, entry_t> sq;
            for (auto& [b, ab] : gens[a].out)
                for (auto& [c, bc] : gens[b].out)
                    compose_into(sq[c], (int)a, b, c, ab, bc, rg.one());
            for (auto& [c, e] : sq)
                KHT_ASSERT(e.empty(), "differential squared is nonzero");
        }
    }

    // ------------------------------------------------------------- assemble

    scan_result<R> assemble(const scan_plan& pl) {
        const R& rg = kk.rg;
        int n = dg.n();
        scan_result<R> out{chain_complex<R>{kk}, {}, pl.width};
        chain_complex<R>& C = out.C;
        C.deg_min = -dg.n_neg;
        C.gens.assign((size_t)n + 1, 0);
        C.qdeg.resize((size_t)n + 1);
        C.d.resize((size_t)n);

        std::map<int, std::pair<int, int>> pos;  // gen -> (level, index)
        for (size_t g = 0; g < gens.size(); ++g) {
            if (!gens[g].alive) continue;
            const sgen& G = gens[g];
            KHT_ASSERT(G.ncirc == 0, "transient circle at the end of the scan");
            if (reduced)
                KHT_ASSERT(G.arcs.size() == 1 && marked_arc(G.arcs[0]),
                           "leftover open ends after the scan");
            else
                KHT_ASSERT(G.arcs.empty(), "leftover open ends after the scan");
            KHT_ASSERT(G.h >= 0 && G.h <= n, "raw degree out of range");
            pos[(int)g] = {G.h, C.gens[(size_t)G.h]++};
            C.qdeg[(size_t)G.h].push_back(G.q + dg.n_pos - 2 * dg.n_neg);
        }
        for (int lv = 0; lv < n; ++lv) {
            C.d[(size_t)lv].rows = C.gens[(size_t)lv + 1];
            C.d[(size_t)lv].col.resize((size_t)C.gens[(size_t)lv]);
        }
        for (auto& [g, pq] : pos) {
            for (auto& [t, e] : gens[(size_t)g].out) {
                KHT_ASSERT(e.size() == 1 && e.begin()->first == 0,
                           "non-scalar differential after the scan");
                auto [lv, j] = pq;
                auto [lt, i] = pos.at(t);
                KHT_ASSERT(lt == lv + 1, "entry skips a degree");
                C.d[(size_t)lv].col[(size_t)j].emplace_back(i,
                                                            e.begin()->second);
            }
        }
        for (auto& mat : C.d)
            for (auto& cl : mat.col) sort_column(rg, cl);

        KHT_ASSERT(!lee.empty(), "orientation class vanished during the scan");
        out.alpha.deg = 0;
        std::map<int, E> coords;
        for (auto& z : lee) {
            KHT_ASSERT(gens[z.gen].h == dg.n_neg,
                       "orientation class in the wrong degree");
            KHT_ASSERT(z.dots == 0, "unconsumed dot at the end of the scan");
            auto it = coords.find(pos.at(z.gen).second);
            if (it == coords.end())
                coords.emplace(pos.at(z.gen).second, z.coef);
            else
                it->second = rg.add(it->second, z.coef);
        }
        for (auto& [i, v] : coords)
            if (!rg.is_zero(v)) out.alpha.coords.emplace_back(i, v);
        KHT_ASSERT(!out.alpha.coords.empty(), "orientation class vanished");

        if (check_level() >= 1) {
            for (int lv = 0; lv + 1 < n; ++lv)
                KHT_ASSERT(mat_mul_is_zero(rg, C.d[(size_t)lv + 1], C.d[(size_t)lv]),
                           "assembled differential fails d.d = 0");
            int ai = C.index_of(0);
            if (ai + 1 < C.degrees()) {
                auto img = mat_apply(rg, C.d[(size_t)ai], out.alpha.coords);
                for (auto& x : img)
                    KHT_ASSERT(rg.is_zero(x), "assembled class is not a cycle");
            }
            if constexpr (R::graded) {
                for (int lv = 0; lv < n; ++lv)
                    for (int j = 0; j < C.d[(size_t)lv].cols(); ++j)
                        for (auto& [i, v] : C.d[(size_t)lv].col[(size_t)j])
                            KHT_ASSERT(C.qdeg[(size_t)lv + 1][(size_t)i] +
                                               detail::mono_qdeg(rg, v) ==
                                           C.qdeg[(size_t)lv][(size_t)j],
                                       "scan differential not q-homogeneous");
            }
        }
        return out;
    }
};

template <class R>
scan_result<R> scan_reduce(const diagram& d, const coeffs<R>& k, bool reduced) {
    scan_state<R> st(k, d, reduced);
    return st.run();
}

}  // namespace kht
