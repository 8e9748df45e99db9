#include "critfiber/monodromy.hpp"

#include <stdexcept>

namespace critfiber {

void MonodromyConfig::validate() const {
    if (max_loops < 1) throw std::invalid_argument("max_loops must be at least 1");
    if (stall_limit < 1) throw std::invalid_argument("stall_limit must be at least 1");
    if (!(dedup_tol > 0.0)) throw std::invalid_argument("dedup_tol must be positive");
    if (solution_bound && *solution_bound == 0) throw std::invalid_argument("solution_bound must be positive");
    if (loop_scale && !(*loop_scale > 0.0)) throw std::invalid_argument("loop_scale must be positive");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::SolutionBound: return "solution_bound";
        case Termination::Stalled: return "stalled";
        case Termination::MaxLoops: return "max_loops";
    }
    return "unknown";
}

std::vector<PathSegment> triangular_loop(const VectorXc& u0, Rng& rng, std::optional<double> scale) {
    if (!u0.allFinite()) throw std::invalid_argument("loop base point must be finite");
    const double r = scale.value_or(1.0 + u0.norm());
    VectorXc u1 = random_complex_vector(u0.size(), rng, r);
    VectorXc u2 = random_complex_vector(u0.size(), rng, r);
    return {{u0, u1}, {u1, u2}, {u2, u0}};
}

std::vector<std::optional<VectorXc>> transport(const std::shared_ptr<const PolySystem>& system,
                                               const std::vector<PathSegment>& segments,
                                               const std::vector<VectorXc>& starts, const TrackerConfig& cfg) {
    std::vector<std::optional<VectorXc>> current(starts.begin(), starts.end());
    for (const auto& seg : segments) {
        std::vector<VectorXc> batch;
        std::vector<std::size_t> owner;
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (current[i]) {
                batch.push_back(*current[i]);
                owner.push_back(i);
            }
        }
        if (batch.empty()) break;
        const auto results = track_many(Homotopy(system, seg), batch, cfg);
        for (std::size_t b = 0; b < results.size(); ++b) {
            if (results[b].ok()) {
                current[owner[b]] = results[b].endpoint;
            } else {
                current[owner[b]].reset();
            }
        }
    }
    return current;
}

int merge_point(const PolySystem& system, const VectorXc& u0, SolutionSet& set, const VectorXc& z) {
    const double res = residual(system, as_span(u0), z);
    if (res > 1e-8 * (1.0 + inf_norm(z))) return -1;
    const auto hit = set.find(z);
    if (!hit) {
        set.insert(z, res);
        return 1;
    }
    if (point_distance(z, set[*hit].z) <= 1e-9) return 0;

    const auto polished = newton_refine(system, as_span(u0), z, 1e-13, 6);
    if (!polished.point.allFinite()) return -1;
    const auto again = set.find(polished.point);
    if (!again) {
        set.insert(polished.point, polished.residual);
        return 1;
    }
    if (point_distance(polished.point, set[*again].z) <= 1e-9) return 0;
    return -1;
}

LoopOutcome run_loop(const std::shared_ptr<const PolySystem>& system, const VectorXc& u0,
                     const std::vector<PathSegment>& loop, SolutionSet& current, const TrackerConfig& cfg) {
    LoopOutcome out;
    const auto ends = transport(system, loop, current.vectors(), cfg);
    for (const auto& e : ends) {
        if (!e) {
            ++out.failures;
            continue;
        }
        const int r = merge_point(*system, u0, current, *e);
        if (r > 0) ++out.added;
        if (r < 0) ++out.unresolved_collisions;
    }
    return out;
}

SolutionSet run_loop(const CriticalSystem& cs, const VectorXc& u0, const SolutionSet& current, Rng& rng,
                     const TrackerConfig& cfg) {
    SolutionSet next = current;
    run_loop(cs.system, u0, triangular_loop(u0, rng), next, cfg);
    return next;
}

MonodromyResult monodromy_collect(const std::shared_ptr<const PolySystem>& system, const VectorXc& u0,
                                  SolutionSet start, const MonodromyConfig& mcfg, const TrackerConfig& tcfg,
                                  Rng& rng) {
    mcfg.validate();
    if (start.empty()) throw std::invalid_argument("monodromy needs at least one start point");
    MonodromyResult result{std::move(start), {}};
    auto& diag = result.diagnostics;
    int stalled = 0;
    while (true) {
        if (mcfg.solution_bound && result.solutions.size() >= *mcfg.solution_bound) {
            diag.termination = Termination::SolutionBound;
            break;
        }
        if (stalled >= mcfg.stall_limit) {
            diag.termination = Termination::Stalled;
            break;
        }
        if (diag.loops_run >= mcfg.max_loops) {
            diag.termination = Termination::MaxLoops;
            break;
        }
        const auto outcome = run_loop(system, u0, triangular_loop(u0, rng, mcfg.loop_scale), result.solutions, tcfg);
        ++diag.loops_run;
        diag.new_points_per_loop.push_back(outcome.added);
        diag.set_sizes.push_back(result.solutions.size());
        diag.path_failures += outcome.failures;
        diag.unresolved_collisions += outcome.unresolved_collisions;
        stalled = outcome.added == 0 ? stalled + 1 : 0;
    }
    return result;
}

MonodromyResult collect_fiber(const CriticalSystem& cs, const SeedResult& seed, const MonodromyConfig& mcfg,
                              const TrackerConfig& tcfg) {
    SolutionSet start(mcfg.dedup_tol);
    start.insert(seed.point(), seed.residual);
    Rng rng(mcfg.rng_seed);
    return monodromy_collect(cs.system, seed.u, std::move(start), mcfg, tcfg, rng);
}

}  // namespace critfiber
