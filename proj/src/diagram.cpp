#include "kht/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

namespace kht {

namespace {

struct uf {
    std::vector<int> p;
    explicit uf(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int x, int y) {
        x = find(x), y = find(y);
        if (x != y) p[std::max(x, y)] = std::min(x, y);
    }
};

// the two (crossing, position) slots where each edge label occurs
std::vector<std::vector<std::pair<int, int>>> slot_occurrences(const diagram& d) {
    std::vector<std::vector<std::pair<int, int>>> occ(d.n_edges + 1);
    for (int i = 0; i < d.n(); i++)
        for (int k = 0; k < 4; k++) occ[d.xs[i][k]].push_back({i, k});
    return occ;
}

}  // namespace

int diagram::succ(int e) const {
    const auto& c = comps[comp_of[e]];
    auto it = std::upper_bound(c.begin(), c.end(), e);
    return it == c.end() ? c.front() : *it;
}

void diagram::ensure_mark() {
    if (has_mark()) return;
    if (n_edges > 0)
        marked_edge = 1;
    else if (free_loops > 0)
        marked_loop = 0;
}

diagram from_tuples(std::vector<std::array<int, 4>> tuples, int free_loops,
                    int marked_edge, int marked_loop, std::string name) {
    diagram d;
    d.xs = std::move(tuples);
    d.free_loops = free_loops;
    d.marked_edge = marked_edge;
    d.marked_loop = marked_loop;
    d.name = std::move(name);
    int n = d.n();
    d.n_edges = 2 * n;

    std::vector<int> count(d.n_edges + 1, 0);
    for (auto& t : d.xs)
        for (int e : t) {
            if (e < 1 || e > d.n_edges)
                fail(errc::malformed_pd, "edge label " + std::to_string(e) +
                                             " outside 1.." + std::to_string(d.n_edges));
            count[e]++;
        }
    for (int e = 1; e <= d.n_edges; e++)
        if (count[e] != 2)
            fail(errc::edge_label_not_twice,
                 "edge " + std::to_string(e) + " appears " + std::to_string(count[e]) + " times");
    if (d.marked_edge < 0 || d.marked_edge > d.n_edges)
        fail(errc::malformed_pd, "marked edge out of range");

    // link components: a-c joined under, b-d joined over
    uf comp(d.n_edges + 1);
    for (auto& t : d.xs) {
        comp.unite(t[0], t[2]);
        comp.unite(t[1], t[3]);
    }
    d.comp_of.assign(d.n_edges + 1, -1);
    for (int e = 1; e <= d.n_edges; e++) {
        int r = comp.find(e);
        if (d.comp_of[r] < 0) {
            d.comp_of[r] = (int)d.comps.size();
            d.comps.emplace_back();
        }
        d.comp_of[e] = d.comp_of[r];
        d.comps[d.comp_of[e]].push_back(e);
    }

    // Direction of each edge end: +1 entering the crossing, -1 leaving.
    // Under-strand ends are fixed by the tuple convention; over ends follow
    // from each edge entering once and leaving once and each over strand
    // passing straight through.
    auto occ = slot_occurrences(d);
    std::vector<int> dir(4 * n, 0);
    std::vector<int> queue;
    auto set_dir = [&](int s, int v) {
        if (dir[s] == -v) fail(errc::inconsistent_orientation, "edge directions conflict");
        if (dir[s] == 0) {
            dir[s] = v;
            queue.push_back(s);
        }
    };
    auto propagate = [&] {
        while (!queue.empty()) {
            int s = queue.back();
            queue.pop_back();
            int i = s / 4, k = s % 4;
            for (auto [j, l] : occ[d.xs[i][k]])
                if (4 * j + l != s) set_dir(4 * j + l, -dir[s]);
            if (k == 1 || k == 3) set_dir(4 * i + (4 - k), -dir[s]);
        }
    };
    for (int i = 0; i < n; i++) {
        set_dir(4 * i + 0, +1);
        set_dir(4 * i + 2, -1);
    }
    propagate();
    for (int i = 0; i < n; i++) {
        if (dir[4 * i + 1] != 0) continue;
        // a closed strand running over at all its crossings: orient by labels
        int b = d.xs[i][1], dd = d.xs[i][3];
        if (d.succ(b) == dd)
            set_dir(4 * i + 1, +1);
        else if (d.succ(dd) == b)
            set_dir(4 * i + 3, +1);
        else
            fail(errc::inconsistent_orientation,
                 "over strand at crossing " + std::to_string(i) + " matches neither direction");
        propagate();
    }
    for (int e = 1; e <= d.n_edges; e++)
        if (dir[4 * occ[e][0].first + occ[e][0].second] +
                dir[4 * occ[e][1].first + occ[e][1].second] !=
            0)
            fail(errc::inconsistent_orientation,
                 "edge " + std::to_string(e) + " would need two directions");

    for (int i = 0; i < n; i++) {
        auto& t = d.xs[i];
        if (d.succ(t[0]) != t[2])
            fail(errc::inconsistent_orientation,
                 "under strand at crossing " + std::to_string(i) + " decreases labels");
        int oi = dir[4 * i + 1] > 0 ? 1 : 3;
        if (d.succ(t[oi]) != t[4 - oi])
            fail(errc::inconsistent_orientation,
                 "over strand at crossing " + std::to_string(i) + " decreases labels");
        d.over_in.push_back(oi);
        d.sign.push_back(oi == 3 ? +1 : -1);
        (oi == 3 ? d.n_pos : d.n_neg)++;
    }
    return d;
}

diagram parse_pd(const std::string& text) {
    size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace((unsigned char)text[i])) i++;
    };
    auto expect = [&](char c) {
        skip();
        if (i >= text.size() || text[i] != c)
            fail(errc::malformed_pd,
                 "expected '" + std::string(1, c) + "' at position " + std::to_string(i));
        i++;
    };
    auto number = [&]() -> int {
        skip();
        size_t j = i;
        long v = 0;
        while (j < text.size() && std::isdigit((unsigned char)text[j])) {
            v = v * 10 + (text[j] - '0');
            if (v > 100000000) fail(errc::malformed_pd, "edge label out of range");
            j++;
        }
        if (j == i) fail(errc::malformed_pd, "expected an edge label at position " + std::to_string(i));
        i = j;
        return (int)v;
    };

    expect('[');
    skip();
    if (i < text.size() && text[i] == ']') {
        i++;
        skip();
        if (i != text.size()) fail(errc::malformed_pd, "trailing input");
        return from_tuples({}, 1, 0, -1, "");  // "[]" is the 0-crossing unknot
    }
    std::vector<std::array<int, 4>> tuples;
    for (;;) {
        expect('[');
        std::array<int, 4> t;
        for (int k = 0; k < 4; k++) {
            if (k) expect(',');
            t[k] = number();
        }
        expect(']');
        tuples.push_back(t);
        skip();
        if (i < text.size() && text[i] == ',') {
            i++;
            continue;
        }
        break;
    }
    expect(']');
    skip();
    if (i != text.size()) fail(errc::malformed_pd, "trailing input");
    return from_tuples(std::move(tuples), 0, 0, -1, "");
}

std::string pd_string(const diagram& d) {
    std::string s = "[";
    for (int i = 0; i < d.n(); i++) {
        if (i) s += ",";
        s += "[";
        for (int k = 0; k < 4; k++) {
            if (k) s += ",";
            s += std::to_string(d.xs[i][k]);
        }
        s += "]";
    }
    return s + "]";
}

resolution resolve(const diagram& d, const std::vector<int>& state) {
    KHT_ASSERT((int)state.size() == d.n(), "state length differs from crossing count");
    int n = d.n();
    auto occ = slot_occurrences(d);
    uf u(std::max(4 * n, 1));
    for (int e = 1; e <= d.n_edges; e++)
        u.unite(4 * occ[e][0].first + occ[e][0].second, 4 * occ[e][1].first + occ[e][1].second);
    for (int i = 0; i < n; i++) {
        int k = state[i] == 0 ? 0 : 1;
        u.unite(4 * i + k, 4 * i + (k + 1) % 4);
        u.unite(4 * i + (k + 2) % 4, 4 * i + (k + 3) % 4);
    }
    resolution r;
    r.circle_of.assign(d.n_edges + 1, -1);
    std::vector<int> root_circle(4 * n, -1);
    for (int e = 1; e <= d.n_edges; e++) {
        int root = u.find(4 * occ[e][0].first + occ[e][0].second);
        if (root_circle[root] < 0) {
            root_circle[root] = (int)r.circles.size();
            r.circles.emplace_back();
            r.arcs.emplace_back();
        }
        r.circle_of[e] = root_circle[root];
        r.circles[r.circle_of[e]].push_back(e);
    }
    for (int i = 0; i < n; i++)
        for (int k = state[i] == 0 ? 0 : 1; k < 4; k += 2)
            r.arcs[root_circle[u.find(4 * i + k)]].push_back({i, k});
    for (int l = 0; l < d.free_loops; l++) {
        r.circles.emplace_back();
        r.arcs.emplace_back();
    }
    return r;
}

seifert_info seifert_data(const diagram& d) {
    seifert_info s;
    s.w = d.writhe();
    for (int i = 0; i < d.n(); i++) s.state.push_back(d.sign[i] > 0 ? 0 : 1);
    s.r = resolve(d, s.state).n_circles();
    return s;
}

face_data faces(const diagram& d) {
    int n = d.n();
    face_data f;
    f.sector_face.assign(n, {-1, -1, -1, -1});
    f.crossing_piece.assign(n, -1);
    if (n == 0) return f;

    auto occ = slot_occurrences(d);
    std::vector<int> partner(4 * n);
    for (int e = 1; e <= d.n_edges; e++) {
        int s1 = 4 * occ[e][0].first + occ[e][0].second;
        int s2 = 4 * occ[e][1].first + occ[e][1].second;
        partner[s1] = s2;
        partner[s2] = s1;
    }
    // trace boundaries: leave along a stub, arrive at the partner stub, turn
    // to the counterclockwise-next stub
    std::vector<int> face_of(4 * n, -1);
    for (int s0 = 0; s0 < 4 * n; s0++) {
        if (face_of[s0] >= 0) continue;
        int id = f.n_faces++;
        int s = s0;
        do {
            face_of[s] = id;
            int t = partner[s];
            s = (t & ~3) | ((t + 1) & 3);
        } while (s != s0);
    }
    // the corner between stubs k and k+1 lies in the face traced through stub k+1
    for (int i = 0; i < n; i++)
        for (int k = 0; k < 4; k++) f.sector_face[i][k] = face_of[4 * i + (k + 1) % 4];

    uf piece(n);
    for (int e = 1; e <= d.n_edges; e++) piece.unite(occ[e][0].first, occ[e][1].first);
    for (int i = 0; i < n; i++) {
        int r = piece.find(i);
        if (f.crossing_piece[r] < 0) f.crossing_piece[r] = f.n_pieces++;
        f.crossing_piece[i] = f.crossing_piece[r];
    }
    std::vector<int> face_piece(f.n_faces, -1), pv(f.n_pieces, 0), pf(f.n_pieces, 0);
    for (int s = 0; s < 4 * n; s++) face_piece[face_of[s]] = f.crossing_piece[s / 4];
    for (int i = 0; i < n; i++) pv[f.crossing_piece[i]]++;
    for (int fc = 0; fc < f.n_faces; fc++) pf[face_piece[fc]]++;
    for (int p = 0; p < f.n_pieces; p++)
        if (pv[p] - 2 * pv[p] + pf[p] != 2)
            fail(errc::nonplanar_pd, "PD code does not describe a planar diagram");

    f.outer_face.assign(f.n_pieces, -1);
    for (int i = 0; i < n; i++) {
        int p = f.crossing_piece[i];
        if (f.outer_face[p] < 0) f.outer_face[p] = face_of[4 * i];
    }
    return f;
}

std::vector<int> ab_coloring(const diagram& d) {
    seifert_info s = seifert_data(d);
    resolution res = resolve(d, s.state);
    int nc = res.n_circles();
    // free loops sit in the unbounded region oriented counterclockwise: the
    // region to their left is their inside, colored black, so they get a
    std::vector<int> color(nc, 0);
    if (d.n() == 0) return color;

    face_data f = faces(d);
    // regions of the smoothed picture: at each crossing the two corners
    // between the smoothing arcs join up
    uf region(f.n_faces);
    for (int i = 0; i < d.n(); i++) {
        int k = s.state[i] == 0 ? 1 : 0;
        region.unite(f.sector_face[i][k], f.sector_face[i][k + 2]);
    }
    for (int p = 1; p < f.n_pieces; p++) region.unite(f.outer_face[0], f.outer_face[p]);
    int outer = region.find(f.outer_face[0]);

    // regions to the left and right of each circle, read off at every arc:
    // an arc hugging the corner k/k+1 runs counterclockwise around the
    // crossing when the strand enters at stub k, so its left side is the
    // region between the two arcs
    std::vector<std::array<int, 2>> side(nc, {-1, -1});
    for (int c = 0; c < nc; c++)
        for (auto [i, k] : res.arcs[c]) {
            int k1 = (k + 1) & 3;
            bool in_at_k = k == 0 || k == d.over_in[i];
            int mid = region.find(f.sector_face[i][k1]);
            int hug = region.find(f.sector_face[i][k]);
            int lf = in_at_k ? mid : hug, rf = in_at_k ? hug : mid;
            if (side[c][0] < 0)
                side[c] = {lf, rf};
            else if (side[c][0] != lf || side[c][1] != rf)
                fail(errc::nonplanar_pd, "sides of a Seifert circle do not match up");
        }

    // checkerboard the regions from the unbounded one
    std::vector<int> parity(f.n_faces, -1);
    std::vector<std::vector<int>> adj(f.n_faces);
    for (int c = 0; c < nc; c++)
        if (!res.circles[c].empty()) {
            adj[side[c][0]].push_back(side[c][1]);
            adj[side[c][1]].push_back(side[c][0]);
        }
    parity[outer] = 0;
    std::vector<int> bfs{outer};
    while (!bfs.empty()) {
        int r = bfs.back();
        bfs.pop_back();
        for (int o : adj[r]) {
            if (parity[o] < 0) {
                parity[o] = parity[r] ^ 1;
                bfs.push_back(o);
            } else if (parity[o] != (parity[r] ^ 1))
                fail(errc::nonplanar_pd, "regions admit no checkerboard coloring");
        }
    }
    for (int c = 0; c < nc; c++) {
        if (res.circles[c].empty()) continue;
        KHT_ASSERT(parity[side[c][0]] >= 0, "unreached region beside a circle");
        color[c] = parity[side[c][0]] == 1 ? 0 : 1;
    }
    if (check_level() >= 1)
        for (int i = 0; i < d.n(); i++) {
            int k = s.state[i] == 0 ? 0 : 1;
            int c1 = res.circle_of[d.xs[i][k]];
            int c2 = res.circle_of[d.xs[i][(k + 2) & 3]];
            if (c1 == c2 || color[c1] == color[c2])
                fail(errc::nonplanar_pd, "crossing joins equally colored circles");
        }
    return color;
}

diagram mirror(const diagram& d) {
    std::vector<std::array<int, 4>> t;
    t.reserve(d.n());
    for (int i = 0; i < d.n(); i++) {
        auto& x = d.xs[i];
        int s = d.over_in[i];  // new tuple starts at the old incoming over end
        t.push_back({x[s], x[(s + 1) & 3], x[(s + 2) & 3], x[(s + 3) & 3]});
    }
    return from_tuples(std::move(t), d.free_loops, d.marked_edge, d.marked_loop, "");
}

diagram reverse_orientation(const diagram& d) {
    // relabel so labels increase along the reversed orientation
    std::vector<int> relab(d.n_edges + 1, 0);
    for (auto& comp : d.comps)
        for (size_t j = 0; j < comp.size(); j++) relab[comp[j]] = comp[comp.size() - 1 - j];
    std::vector<std::array<int, 4>> t;
    t.reserve(d.n());
    for (auto& x : d.xs) t.push_back({relab[x[2]], relab[x[3]], relab[x[0]], relab[x[1]]});
    return from_tuples(std::move(t), d.free_loops, d.marked_edge ? relab[d.marked_edge] : 0,
                       d.marked_loop, "");
}

diagram connected_sum(const diagram& d1, const diagram& d2) {
    if (d1.marked_edge == 0 || d2.marked_edge == 0)
        fail(errc::missing_marked_edge, "connected sum needs a marked edge on both diagrams");

    int off = d1.n_edges, n1 = d1.n();
    std::vector<std::array<int, 4>> t = d1.xs;
    for (auto x : d2.xs) {
        for (auto& e : x) e += off;
        t.push_back(x);
    }
    auto is_in = [&](int i, int k) {
        if (k == 0) return true;
        if (k == 2) return false;
        return k == (i < n1 ? d1.over_in[i] : d2.over_in[i - n1]);
    };
    // cut both marked edges and splice them crosswise: the strand leaving
    // d1's mark runs into where d2's mark entered, and back
    int e1 = d1.marked_edge, e2 = d2.marked_edge + off;
    int fresh_a = off + d2.n_edges + 1, fresh_b = fresh_a + 1;
    for (int i = 0; i < (int)t.size(); i++)
        for (int k = 0; k < 4; k++) {
            if (t[i][k] == e1) t[i][k] = is_in(i, k) ? fresh_b : fresh_a;
            if (t[i][k] == e2) t[i][k] = is_in(i, k) ? fresh_a : fresh_b;
        }
    // walk every component along the strand directions and relabel
    std::map<int, std::pair<int, int>> head;
    for (int i = 0; i < (int)t.size(); i++)
        for (int k = 0; k < 4; k++)
            if (is_in(i, k)) head[t[i][k]] = {i, k};
    std::map<int, int> newlab;
    int next = 1;
    for (auto& [start, slot] : head) {
        if (newlab.count(start)) continue;
        int cur = start;
        do {
            newlab[cur] = next++;
            auto [i, k] = head.at(cur);
            cur = t[i][k == 0 ? 2 : 4 - k];
        } while (cur != start);
    }
    for (auto& x : t)
        for (auto& e : x) e = newlab.at(e);
    return from_tuples(std::move(t), d1.free_loops + d2.free_loops, newlab.at(fresh_a), -1, "");
}

diagram add_pointed_unknot(const diagram& d) {
    diagram r = d;
    r.marked_edge = 0;
    r.marked_loop = r.free_loops++;
    r.name.clear();
    return r;
}

}  // namespace kht
