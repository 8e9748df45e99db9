#pragma once

#include <cstddef>
#include <cstdint>

#include "critfiber/polynomial.hpp"
#include "critfiber/solution_set.hpp"
#include "critfiber/tracker.hpp"

namespace critfiber {

struct TotalDegreeReport {
    SolutionSet solutions;
    std::size_t bezout_number = 0;
    std::size_t paths_tracked = 0;
    /// Paths that stopped before the endgame zone (t < 0.999).
    std::size_t path_failures = 0;
    /// More than 20% of paths failed; the solution list may be incomplete.
    bool excessive_failures = false;
};

/// Product of the polynomial degrees.
std::size_t bezout_number(const PolySystem& system);

/// Independent oracle for small square systems without parameters: tracks
/// every path of the gamma-twisted total-degree homotopy in projective
/// coordinates and keeps the finite, nonsingular endpoints.
///
/// Requires at most 6 unknowns and a Bezout number of at most 200.
TotalDegreeReport total_degree_solve(const PolySystem& system, std::uint64_t seed = 1,
                                     const TrackerConfig& cfg = {});

}  // namespace critfiber
