#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "critfiber/polynomial.hpp"
#include "critfiber/types.hpp"

namespace critfiber {

struct TrackerConfig {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.1;
    double newton_tol = 1e-10;
    int max_newton_iters = 3;
    double step_increase_factor = 2.0;
    double step_cut_factor = 0.5;
    int successes_before_increase = 5;
    double endpoint_tol = 1e-11;
    double divergence_threshold = 1e12;
    double singular_threshold = 1e12;
    /// A path that stops on StepTooSmall is retracked from its start up to
    /// this many times, each with the in-path Newton tolerance multiplied by
    /// retry_tol_factor and max_step halved. The endpoint tolerance is unchanged.
    int retries = 1;
    double retry_tol_factor = 100.0;
    /// Worker threads for track_many; 0 means hardware concurrency.
    unsigned threads = 1;

    /// Throws std::invalid_argument when the step or tolerance ordering is violated.
    void validate() const;
};

enum class PathStatus { Success, Diverged, StepTooSmall, SingularEndpoint, InvalidStart };

std::string to_string(PathStatus status);

struct PathResult {
    PathStatus status = PathStatus::InvalidStart;
    VectorXc endpoint;
    double residual = 0.0;
    int steps_taken = 0;
    /// Condition number of the Jacobian with rows equilibrated and column j
    /// scaled by max(1, |z_j|).
    double condition_estimate = 0.0;
    /// Path parameter reached before stopping (1 on success).
    double t_reached = 0.0;

    bool ok() const { return status == PathStatus::Success; }
};

/// Straight parameter segment from -> to.
struct PathSegment {
    VectorXc from;
    VectorXc to;
};

/// H(z, t) = system(z; (1 - t) * from + t * to).
///
/// A homotopy with an explicit path variable t is the special case of a
/// single parameter moving from 0 to 1.
struct Homotopy {
    std::shared_ptr<const PolySystem> system;
    PathSegment segment;

    Homotopy(std::shared_ptr<const PolySystem> sys, PathSegment seg);
    Homotopy(std::shared_ptr<const PolySystem> sys, VectorXc from, VectorXc to)
        : Homotopy(std::move(sys), PathSegment{std::move(from), std::move(to)}) {}

    VectorXc parameters_at(double t) const;
};

/// Predictor-corrector continuation from t = 0 to t = 1: explicit Euler on
/// the Davidenko equation, Newton correction at fixed t, step halving on
/// corrector failure and doubling after a run of successes. Retries follow
/// TrackerConfig::retries.
PathResult track(const Homotopy& h, std::span<const Complex> start, const TrackerConfig& cfg = {});

/// Maps track over starts, preserving order. Paths are independent and may
/// run on several threads; per-path failures never abort the batch.
std::vector<PathResult> track_many(const Homotopy& h, const std::vector<VectorXc>& starts,
                                   const TrackerConfig& cfg = {});

/// Tracks through consecutive segments, stopping at the first failure.
PathResult track_segments(const std::shared_ptr<const PolySystem>& system,
                          const std::vector<PathSegment>& segments, std::span<const Complex> start,
                          const TrackerConfig& cfg = {});

struct NewtonResult {
    VectorXc point;
    double residual = 0.0;
    double condition_estimate = 0.0;
    bool converged = false;
};

/// Newton iteration at fixed parameters until the residual drops below
/// tol * (1 + |z|) or max_iters is reached.
NewtonResult newton_refine(const PolySystem& system, std::span<const Complex> parameters,
                           const VectorXc& start, double tol = 1e-11, int max_iters = 8);

/// Infinity-norm residual of the system at (z; params).
double residual(const PolySystem& system, std::span<const Complex> parameters, const VectorXc& z);

}  // namespace critfiber
