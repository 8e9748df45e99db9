#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "critfiber/critical_system.hpp"
#include "critfiber/seed.hpp"
#include "critfiber/solution_set.hpp"
#include "critfiber/tracker.hpp"

namespace critfiber {

struct MonodromyConfig {
    int max_loops = 100;
    std::optional<std::size_t> solution_bound;
    /// Consecutive loops without a new point before stopping.
    int stall_limit = 15;
    std::uint64_t rng_seed = 0;
    double dedup_tol = 1e-6;
    /// Scale of the loop vertices; 1 + |u0| when unset.
    std::optional<double> loop_scale;

    void validate() const;
};

enum class Termination { SolutionBound, Stalled, MaxLoops };

std::string to_string(Termination t);

struct MonodromyDiagnostics {
    int loops_run = 0;
    std::vector<std::size_t> new_points_per_loop;
    /// Set size after each loop.
    std::vector<std::size_t> set_sizes;
    std::size_t path_failures = 0;
    /// Endpoints near a stored point that neither matched it after polishing
    /// nor separated from it; they are dropped.
    std::size_t unresolved_collisions = 0;
    Termination termination = Termination::MaxLoops;
};

struct MonodromyResult {
    SolutionSet solutions;
    MonodromyDiagnostics diagnostics;
};

/// u0 -> u' -> u'' -> u0 with u', u'' complex Gaussian of scale 1 + |u0|
/// (or `scale` when given).
std::vector<PathSegment> triangular_loop(const VectorXc& u0, Rng& rng, std::optional<double> scale = std::nullopt);

/// Tracks every start through the consecutive segments, one batch per
/// segment. Entries are std::nullopt for paths that failed on some segment.
std::vector<std::optional<VectorXc>> transport(const std::shared_ptr<const PolySystem>& system,
                                               const std::vector<PathSegment>& segments,
                                               const std::vector<VectorXc>& starts, const TrackerConfig& cfg = {});

struct LoopOutcome {
    std::size_t added = 0;
    std::size_t failures = 0;
    std::size_t unresolved_collisions = 0;
};

/// Merges z into the set at base parameters u0. A near match is polished
/// by Newton and rechecked at 1e-9 before being declared a duplicate.
/// Returns 1 when added, 0 when duplicate, -1 when unresolved.
int merge_point(const PolySystem& system, const VectorXc& u0, SolutionSet& set, const VectorXc& z);

/// Tracks all points of `current` around `loop` and merges the endpoints.
LoopOutcome run_loop(const std::shared_ptr<const PolySystem>& system, const VectorXc& u0,
                     const std::vector<PathSegment>& loop, SolutionSet& current, const TrackerConfig& cfg = {});

/// Convenience form over the critical system: draws a random loop at u0
/// and returns the enlarged set.
SolutionSet run_loop(const CriticalSystem& cs, const VectorXc& u0, const SolutionSet& current, Rng& rng,
                     const TrackerConfig& cfg = {});

/// Random triangular loops at u0 starting from `start` until the solution
/// bound is reached, stall_limit loops add nothing, or max_loops run.
MonodromyResult monodromy_collect(const std::shared_ptr<const PolySystem>& system, const VectorXc& u0,
                                  SolutionSet start, const MonodromyConfig& mcfg, const TrackerConfig& tcfg,
                                  Rng& rng);

/// Fiber of the critical system over the seed's u.
MonodromyResult collect_fiber(const CriticalSystem& cs, const SeedResult& seed, const MonodromyConfig& mcfg = {},
                              const TrackerConfig& tcfg = {});

}  // namespace critfiber
