#pragma once
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace kht {

enum class errc {
  malformed_pd,
  edge_label_not_twice,
  inconsistent_orientation,
  nonplanar_pd,
  missing_marked_edge,
  mark_required_for_reduced,
  too_large_for_cube,
  unknown_ring,
  invalid_prime,
  unsupported_c_for_ring,
  mixed_rings,
  division_by_zero,
  not_euclidean,
  non_unit_pivot,
  not_a_cycle,
  zero_class_mod_torsion,
  marked_circle_deloop,
  unknown_name,
  bad_invocation,
  io_error,
  width_exceeded,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::malformed_pd: return "MalformedPD";
    case errc::edge_label_not_twice: return "EdgeLabelNotTwice";
    case errc::inconsistent_orientation: return "InconsistentOrientation";
    case errc::nonplanar_pd: return "NonplanarPD";
    case errc::missing_marked_edge: return "MissingMarkedEdge";
    case errc::mark_required_for_reduced: return "MarkRequiredForReduced";
    case errc::too_large_for_cube: return "TooLargeForCube";
    case errc::unknown_ring: return "UnknownRing";
    case errc::invalid_prime: return "InvalidPrime";
    case errc::unsupported_c_for_ring: return "UnsupportedCForRing";
    case errc::mixed_rings: return "MixedRings";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::not_euclidean: return "NotEuclidean";
    case errc::non_unit_pivot: return "NonUnitPivot";
    case errc::not_a_cycle: return "NotACycle";
    case errc::zero_class_mod_torsion: return "ZeroClassModTorsion";
    case errc::marked_circle_deloop: return "MarkedCircleDeloop";
    case errc::unknown_name: return "UnknownName";
    case errc::bad_invocation: return "BadInvocation";
    case errc::io_error: return "IOError";
    case errc::width_exceeded: return "WidthExceeded";
  }
  return "?";
}

// user-facing errors (bad input, unsupported request): CLI exit code 1
struct error : std::runtime_error {
  errc code;
  error(errc c, const std::string& msg)
      : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code(c) {}
};

// broken internal invariant: CLI exit code 2
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& msg)
      : std::logic_error("internal: " + msg) {}
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

// KHT_CHECKS: 0 = off, 1 = cheap invariants (default), 2 = per-step complex audits
inline int check_level() {
  static int lvl = [] {
    const char* e = std::getenv("KHT_CHECKS");
    if (!e || !*e) return 1;
    return std::atoi(e);
  }();
  return lvl;
}

#define KHT_ASSERT(cond, msg) \
  do { if (!(cond)) throw ::kht::internal_error(msg); } while (0)
#define KHT_CHECK1(cond, msg) \
  do { if (::kht::check_level() >= 1 && !(cond)) throw ::kht::internal_error(msg); } while (0)

}  // namespace kht
