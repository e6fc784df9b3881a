#pragma once

#include <array>
#include <string>
#include <vector>

#include "errors.hpp"

namespace kht {

// Oriented link diagram given by a PD code. A crossing [a,b,c,d] lists the
// four edge ends counterclockwise starting at the incoming under-strand a;
// the strand a->c runs under the strand on b/d. Orientation of a component
// is the direction of increasing edge label, wrapping at the component's
// largest label.
struct diagram {
    std::vector<std::array<int, 4>> xs;
    std::vector<int> sign;      // +1 / -1 per crossing
    std::vector<int> over_in;   // tuple position (1 or 3) of the incoming over edge
    int n_edges = 0;
    int free_loops = 0;         // crossingless components
    int marked_edge = 0;        // 0 = unmarked
    int marked_loop = -1;       // marked crossingless component, -1 = none
    std::string name;
    std::vector<std::vector<int>> comps;  // sorted edge labels per component
    std::vector<int> comp_of;             // edge label (1-based) -> component index
    int n_pos = 0, n_neg = 0;

    int n() const { return (int)xs.size(); }
    int writhe() const { return n_pos - n_neg; }
    int n_components() const { return (int)comps.size() + free_loops; }
    bool has_mark() const { return marked_edge != 0 || marked_loop >= 0; }
    int succ(int e) const;  // next edge along the orientation
    void ensure_mark();     // default mark: edge 1, or the first free loop
};

diagram parse_pd(const std::string& text);
diagram from_tuples(std::vector<std::array<int, 4>> tuples, int free_loops,
                    int marked_edge, int marked_loop, std::string name);
std::string pd_string(const diagram& d);

// Resolution of all crossings by a 0/1 state (crossing order = PD order).
// Smoothing of [p0,p1,p2,p3]: state 0 joins (p0-p1)(p2-p3), state 1 joins
// (p0-p3)(p1-p2). Circles are ordered by smallest contained edge label;
// free loops come last as empty edge lists.
struct resolution {
    std::vector<std::vector<int>> circles;
    std::vector<int> circle_of;  // edge label -> circle index
    // per circle: (crossing, corner) where the smoothing arc hugs the corner
    // between tuple positions corner and corner+1
    std::vector<std::vector<std::pair<int, int>>> arcs;
    int n_circles() const { return (int)circles.size(); }
};

resolution resolve(const diagram& d, const std::vector<int>& state);

struct seifert_info {
    int r;
    int w;
    std::vector<int> state;  // 0 on positive, 1 on negative crossings
};

seifert_info seifert_data(const diagram& d);

// Faces of the 4-valent map defined by the PD code's counterclockwise tuple
// order. sector_face[i][k] is the face touching the corner of crossing i
// between tuple positions k and k+1. Throws NonplanarPD when some connected
// piece fails Euler's formula.
struct face_data {
    int n_faces = 0;
    std::vector<std::array<int, 4>> sector_face;
    std::vector<int> crossing_piece;  // connected piece per crossing
    int n_pieces = 0;
    std::vector<int> outer_face;      // chosen unbounded face per piece
};

face_data faces(const diagram& d);

// Color (0 = a, 1 = b) per Seifert circle of d: checkerboard the regions cut
// out by the Seifert circles with the unbounded region white, then give each
// circle a if the region to its left is black, else b. Free loops count as
// counterclockwise circles in the unbounded region.
std::vector<int> ab_coloring(const diagram& d);

diagram mirror(const diagram& d);
diagram reverse_orientation(const diagram& d);
diagram connected_sum(const diagram& d1, const diagram& d2);
diagram add_pointed_unknot(const diagram& d);

}  // namespace kht
