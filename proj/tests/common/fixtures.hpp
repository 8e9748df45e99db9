#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "critfiber/critical_system.hpp"
#include "critfiber/monodromy.hpp"
#include "critfiber/parser.hpp"
#include "critfiber/seed.hpp"

namespace critfiber::testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(CRITFIBER_DATA_DIR) + "/problems/" + name + ".crit";
}

inline Problem load_fixture(const std::string& name) { return load_problem(fixture_path(name)); }

inline CriticalSystem critical_system_for(const Problem& problem, Rng& rng) {
    const Model model = model_from_problem(problem, rng);
    return build_critical_system(model, Objective{*problem.objective, model.ambient_dimension()});
}

inline CriticalSystem critical_system_for(const std::string& name, std::uint64_t seed = 7) {
    Rng rng(seed);
    return critical_system_for(load_fixture(name), rng);
}

inline VectorXc real_vector(std::initializer_list<double> values) {
    VectorXc v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

struct FiberRun {
    SeedResult seed;
    MonodromyResult monodromy;
};

/// Seed plus monodromy with every random choice derived from `seed`.
inline FiberRun solve_fiber(const CriticalSystem& cs, const VectorXc& u, std::uint64_t seed,
                            MonodromyConfig mcfg = {}, const TrackerConfig& tcfg = {}) {
    Rng rng(seed);
    FiberRun run;
    run.seed = find_seed(cs, u, rng, tcfg);
    mcfg.rng_seed = rng();
    run.monodromy = collect_fiber(cs, run.seed, mcfg, tcfg);
    return run;
}

/// Points in the fiber with the x coordinates of `x`, within tol.
inline bool fiber_has_x(const CriticalSystem& cs, const SolutionSet& fiber, const VectorXc& x, double tol) {
    for (const auto& p : fiber) {
        if (inf_norm(cs.x_of(p.z) - x) <= tol) return true;
    }
    return false;
}

/// Ellipse fiber over (0.75, -0.29) as printed to six digits: (x1, x2, lam1).
inline const std::vector<std::array<double, 3>>& ellipse_reference() {
    static const std::vector<std::array<double, 3>> rows{{0.252902, -0.814004, -5.38676},
                                                         {0.598568, -0.0941507, -0.869654},
                                                         {0.83295, -0.00662553, -2.09671},
                                                         {0.844456, -0.333067, -0.346872}};
    return rows;
}

inline VectorXc ellipse_u() { return real_vector({0.75, -0.29}); }

/// Data point of the twisted cubic cone fixture.
inline VectorXc twisted_cubic_u() { return real_vector({2.0 / 5.0, -2.0 / 7.0, 5.0 / 6.0, 3.0 / 7.0}); }

}  // namespace critfiber::testing
