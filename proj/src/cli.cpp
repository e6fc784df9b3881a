#include "kht/cli.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kht/invariants.hpp"
#include "kht/knot_table.hpp"

namespace kht {
namespace {

struct ring_flags {
    std::string type = "z";
    std::string c;
    bool reduced = false;
};

void add_ring_flags(CLI::App* cmd, ring_flags& rf) {
    cmd->add_option("-t,--ring", rf.type,
                    "coefficient ring: z, q-poly, f<p>-poly, z-poly, gauss, eisen")
        ->capture_default_str();
    cmd->add_option("-c,--prime", rf.c,
                    "distinguished prime: an integer over z, H over the "
                    "polynomial rings, 1+i over gauss, 1+w over eisen");
    cmd->add_flag("-r,--reduced", rf.reduced, "reduced flavor (marked basepoint)");
}

diagram resolve_target(const std::string& target, bool mirror_flag) {
    diagram d;
    if (!target.empty() && target[0] == '[') {
        d = parse_pd(target);
    } else {
        d = parse_pd(lookup_knot(target));
        d.name = target;
    }
    if (mirror_flag) d = mirror(d);
    return d;
}

std::string tuple_str(const std::vector<std::string>& xs) {
    std::string out = "(";
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += xs[i];
    }
    return out + ")";
}

int cmd_ss(const std::string& target, bool mirror_flag, const ring_flags& rf,
           std::ostream& out) {
    ring_spec spec = ring_spec::from_cli(rf.type, rf.c);
    diagram d = resolve_target(target, mirror_flag);
    invariant_report rep = rf.reduced ? reduced_s(d, spec) : unreduced_s(d, spec);
    out << rep.s << "\n";
    return 0;
}

template <class R>
void print_complex(std::ostream& out, const coeffs<R>& k, const scan_result<R>& sc,
                   bool all) {
    const R& rg = k.rg;
    const chain_complex<R>& C = sc.C;
    out << "complex:\n";
    for (int i = 0; i < C.degrees(); ++i) {
        out << "  deg " << C.deg_min + i << ": " << C.gens[i];
        if (all && C.gens[i]) {
            out << "  q:";
            for (int q : C.qdeg[(size_t)i]) out << " " << q;
        }
        out << "\n";
    }
    for (int i = 0; i + 1 < C.degrees(); ++i) {
        const sparse_mat<R>& m = C.d[(size_t)i];
        out << "d[" << C.deg_min + i << "] (" << m.rows << "x" << m.cols() << "):\n";
        if (m.rows == 0 || m.cols() == 0) continue;
        std::vector<std::vector<std::string>> cell(
            (size_t)m.rows, std::vector<std::string>((size_t)m.cols(), "0"));
        size_t wmax = 1;
        for (int j = 0; j < m.cols(); ++j)
            for (auto& [r, v] : m.col[(size_t)j]) {
                cell[(size_t)r][(size_t)j] = rg.str(v);
                wmax = std::max(wmax, cell[(size_t)r][(size_t)j].size());
            }
        for (auto& row : cell) {
            out << " ";
            for (auto& s : row) out << " " << std::string(wmax - s.size(), ' ') << s;
            out << "\n";
        }
    }
    int i0 = C.index_of(sc.alpha.deg);
    std::vector<std::string> dense((size_t)C.gens[(size_t)i0], "0");
    for (auto& [j, v] : sc.alpha.coords) dense[(size_t)j] = rg.str(v);
    out << "lee cycle (deg " << sc.alpha.deg << "): " << tuple_str(dense) << "\n";
}

template <class R>
void print_homology(std::ostream& out, const coeffs<R>& k, const scan_result<R>& sc,
                    const seifert_info& sd) {
    const R& rg = k.rg;
    const chain_complex<R>& C = sc.C;
    auto h0 = homology_at(C, 0, {sc.alpha});
    out << "homology:\n";
    for (int i = 0; i < C.degrees(); ++i) {
        int deg = C.deg_min + i;
        auto h = deg == 0 ? h0 : homology_at(C, deg);
        std::string pres;
        if (h.free_rank == 1) pres = "R";
        else if (h.free_rank > 1) pres = "R^" + std::to_string(h.free_rank);
        for (auto& t : h.torsion) {
            if (!pres.empty()) pres += " + ";
            pres += "R/(" + rg.str(t) + ")";
        }
        out << "  H[" << deg << "] = " << (pres.empty() ? "0" : pres) << "\n";
    }
    std::vector<std::string> coords;
    for (auto& x : h0.class_free[0]) coords.push_back(rg.str(x));
    out << "lee class in H^0/torsion: " << tuple_str(coords) << "\n";
    long dc = class_divisibility(k, h0, 0);
    out << "d_c = " << dc << "\n";
    out << "s = " << 2 * dc + sd.w - sd.r + 1 << "\n";
}

int cmd_ckh(const std::string& target, bool mirror_flag, bool all,
            const ring_flags& rf, std::ostream& out) {
    ring_spec spec = ring_spec::from_cli(rf.type, rf.c);
    diagram d = resolve_target(target, mirror_flag);
    if (rf.reduced && !d.has_mark()) d.ensure_mark();
    seifert_info sd = seifert_data(d);
    with_ring(spec, [&](const auto& k) {
        auto sc = scan_reduce(d, k, rf.reduced);
        out << (d.name.empty() ? "pd" : d.name) << "  " << spec.type_flag()
            << "  c=" << spec.c_text << "  " << (rf.reduced ? "reduced" : "unreduced")
            << "\n";
        out << "crossings " << d.n() << "  components " << d.n_components()
            << "  writhe " << sd.w << "  seifert circles " << sd.r << "  width "
            << sc.width << "\n";
        print_complex(out, k, sc, all);
        using R = std::decay_t<decltype(k.rg)>;
        if constexpr (R::snf_capable) print_homology(out, k, sc, sd);
    });
    return 0;
}

std::string csv_safe(std::string s) {
    for (char& ch : s) {
        if (ch == ',') ch = ';';
        if (ch == '\n' || ch == '\r') ch = ' ';
    }
    return s;
}

int cmd_batch(const std::string& path, const ring_flags& rf,
              const std::string& out_path, std::ostream& out) {
    ring_spec spec = ring_spec::from_cli(rf.type, rf.c);
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");

    struct row_t {
        std::string name, pd;
    };
    std::vector<row_t> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(errc::io_error,
                 path + ":" + std::to_string(lineno) + ": expected name,pdcode");
        rows.push_back({line.substr(0, comma), line.substr(comma + 1)});
    }

    std::vector<std::string> csv(rows.size());
    std::vector<char> ok(rows.size(), 1);
    int n = (int)rows.size();
#ifdef KHT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < n; ++i) {
        std::ostringstream os;
        os << csv_safe(rows[(size_t)i].name) << "," << spec.type_flag() << ","
           << spec.c_text << "," << (rf.reduced ? "true" : "false") << ",";
        auto t0 = std::chrono::steady_clock::now();
        try {
            diagram d = parse_pd(rows[(size_t)i].pd);
            invariant_report rep =
                rf.reduced ? reduced_s(d, spec) : unreduced_s(d, spec);
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            os << rep.d_c << "," << rep.w << "," << rep.r << "," << rep.s << ","
               << ms << ",";
        } catch (const std::exception& e) {
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            os << ",,,," << ms << "," << csv_safe(e.what());
            ok[(size_t)i] = 0;
        }
        csv[(size_t)i] = os.str();
    }

    std::ofstream fout;
    if (!out_path.empty()) {
        fout.open(out_path);
        if (!fout) fail(errc::io_error, "cannot write '" + out_path + "'");
    }
    std::ostream& sink = out_path.empty() ? out : fout;
    sink << "name,ring,c,reduced,d_c,writhe,seifert_circles,s,ms,error\n";
    for (auto& r : csv) sink << r << "\n";

    for (char o : ok)
        if (!o) return 1;
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"khovanov-type slice-torus invariants over exact coefficient rings"};
    app.name("kht");
    app.require_subcommand(1);

    ring_flags rf;
    std::string target, out_path;
    bool mirror_flag = false, dump_all = false;

    CLI::App* ss = app.add_subcommand("ss", "print the slice-torus invariant");
    ss->add_option("target", target, "knot name or PD code")->required();
    add_ring_flags(ss, rf);
    ss->add_flag("-m,--mirror", mirror_flag, "mirror the diagram first");

    CLI::App* ckh =
        app.add_subcommand("ckh", "dump the simplified complex and the lee class");
    ckh->add_option("target", target, "knot name or PD code")->required();
    add_ring_flags(ckh, rf);
    ckh->add_flag("-m,--mirror", mirror_flag, "mirror the diagram first");
    ckh->add_flag("-a,--all", dump_all, "also print per-generator q-degrees");

    CLI::App* batch =
        app.add_subcommand("batch", "CSV report over a file of name,pdcode lines");
    batch->add_option("file", target, "input file, one name,pdcode per line")
        ->required();
    add_ring_flags(batch, rf);
    batch->add_option("-o,--output", out_path, "write the CSV here instead of stdout");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(ss)) return cmd_ss(target, mirror_flag, rf, out);
        if (app.got_subcommand(ckh))
            return cmd_ckh(target, mirror_flag, dump_all, rf, out);
        return cmd_batch(target, rf, out_path, out);
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace kht
