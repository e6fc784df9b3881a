// Timing comparison between the two homology routes: the full state-sum
// cube (the serial reference, capped at 12 crossings) and the scan pipeline
// that simplifies crossing by crossing. Also times batch-row throughput,
// which is the one OpenMP-parallel code path.
//
// usage: kht_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef KHT_HAVE_OPENMP
#include <omp.h>
#endif

#include "../tests/support/mkdiagram.hpp"
#include "kht/invariants.hpp"
#include "kht/knot_table.hpp"

using namespace kht;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// the same outputs the scan route produces, but through the cube
long cube_route(const diagram& d, const coeffs<zz_ring>& k) {
    auto cu = build_cube(d, k, true);
    long sum = 0;
    for (int i = 0; i < cu.C.degrees(); ++i)
        sum += homology_at(cu.C, cu.C.deg_min + i).free_rank;
    auto h0 = homology_at(cu.C, 0, {cu.alpha});
    return sum + class_divisibility(k, h0, 0);
}

long scan_route(const diagram& d, const coeffs<zz_ring>& k) {
    auto sc = scan_reduce(d, k, true);
    long sum = 0;
    for (int i = 0; i < sc.C.degrees(); ++i)
        sum += homology_at(sc.C, sc.C.deg_min + i).free_rank;
    auto h0 = homology_at(sc.C, 0, {sc.alpha});
    return sum + class_divisibility(k, h0, 0);
}

template <class F>
double best_of(int repeats, F&& f) {
    double best = 0;
    for (int i = 0; i < repeats; ++i) {
        double t0 = now_ms();
        f();
        double dt = now_ms() - t0;
        if (i == 0 || dt < best) best = dt;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    if (repeats < 1) repeats = 1;

    zz_ring rg;
    coeffs<zz_ring> k{rg, mpz_class(2), ring_spec::from_cli("z", "2")};

    std::vector<std::pair<std::string, diagram>> cases;
    for (const char* name : {"3_1", "4_1", "5_2", "6_1", "7_4", "8_18"}) {
        diagram d = parse_pd(lookup_knot(name));
        d.ensure_mark();
        cases.emplace_back(name, std::move(d));
    }
    for (auto [p, q] : {std::pair{2, 9}, {3, 5}, {2, 11}}) {
        diagram d = khttest::torus_knot(p, q);
        d.ensure_mark();
        cases.emplace_back("t(" + std::to_string(p) + "," + std::to_string(q) + ")",
                           std::move(d));
    }
    {
        diagram d = parse_pd(
            "[[1,19,2,18],[19,1,20,28],[20,13,21,14],[12,17,13,18],[16,21,17,22],"
            "[5,15,6,14],[15,5,16,4],[6,27,7,28],[2,7,3,8],[26,3,27,4],"
            "[25,23,26,22],[11,9,12,8],[23,10,24,11],[9,24,10,25]]");
        d.ensure_mark();
        cases.emplace_back("k14n19265", std::move(d));
    }

    std::printf("cube vs scan, reduced homology over (z,2), best of %d\n", repeats);
    std::printf("%-12s %3s %10s %10s %8s\n", "name", "n", "cube_ms", "scan_ms",
                "ratio");
    for (auto& [name, d] : cases) {
        double scan_ms = best_of(repeats, [&] { scan_route(d, k); });
        if (d.n() <= 12) {
            double cube_ms = best_of(repeats, [&] { cube_route(d, k); });
            std::printf("%-12s %3d %10.2f %10.2f %7.1fx\n", name.c_str(), d.n(),
                        cube_ms, scan_ms, cube_ms / scan_ms);
        } else {
            std::printf("%-12s %3d %10s %10.2f %8s\n", name.c_str(), d.n(), "--",
                        scan_ms, "--");
        }
    }

    // batch rows: per row strictly serial, rows spread over OpenMP threads
    std::vector<diagram> rows;
    for (int i = 0; i < 24; ++i) rows.push_back(cases[i % 9].second);
    auto spec = ring_spec::from_cli("z", "2");

    double serial_ms = best_of(repeats, [&] {
        for (auto& d : rows) reduced_s(d, spec);
    });
    double par_ms = best_of(repeats, [&] {
        int n = (int)rows.size();
#ifdef KHT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < n; ++i) reduced_s(rows[(size_t)i], spec);
    });
    int threads = 1;
#ifdef KHT_HAVE_OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("\nbatch of %zu rows over (z,2): serial %.1f ms, "
                "parallel %.1f ms on %d thread%s\n",
                rows.size(), serial_ms, par_ms, threads, threads == 1 ? "" : "s");
    return 0;
}
