#include "critfiber/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace critfiber {

void TrackerConfig::validate() const {
    if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step && max_step < 1.0)) {
        throw std::invalid_argument("tracker steps must satisfy 0 < min_step <= initial_step <= max_step < 1");
    }
    if (!(newton_tol > 0.0 && endpoint_tol > 0.0) || max_newton_iters < 1 || successes_before_increase < 1) {
        throw std::invalid_argument("tracker tolerances and iteration counts must be positive");
    }
    if (!(step_cut_factor > 0.0 && step_cut_factor < 1.0 && step_increase_factor > 1.0)) {
        throw std::invalid_argument("step factors must satisfy 0 < cut < 1 < increase");
    }
    if (retries < 0 || !(retry_tol_factor >= 1.0)) {
        throw std::invalid_argument("retries must be non-negative and retry_tol_factor at least 1");
    }
}

std::string to_string(PathStatus status) {
    switch (status) {
        case PathStatus::Success: return "success";
        case PathStatus::Diverged: return "diverged";
        case PathStatus::StepTooSmall: return "step_too_small";
        case PathStatus::SingularEndpoint: return "singular_endpoint";
        case PathStatus::InvalidStart: return "invalid_start";
    }
    return "unknown";
}

Homotopy::Homotopy(std::shared_ptr<const PolySystem> sys, PathSegment seg)
    : system(std::move(sys)), segment(std::move(seg)) {
    if (!system) throw std::invalid_argument("homotopy needs a system");
    if (!system->is_square()) throw std::invalid_argument("homotopy system must be square in its unknowns");
    const auto p = static_cast<Eigen::Index>(system->num_parameters());
    if (segment.from.size() != p || segment.to.size() != p) {
        throw DimensionError("segment endpoints must match the parameter count");
    }
    if (!segment.from.allFinite() || !segment.to.allFinite()) {
        throw std::invalid_argument("segment endpoints must be finite");
    }
}

VectorXc Homotopy::parameters_at(double t) const { return (1.0 - t) * segment.from + t * segment.to; }

namespace {

double condition_of(const Eigen::PartialPivLU<MatrixXc>& lu) {
    const double rc = lu.rcond();
    if (!(rc > 0.0) || !std::isfinite(rc)) return std::numeric_limits<double>::infinity();
    return 1.0 / rc;
}

// Condition number of the Jacobian after equilibrating rows and scaling
// column j by max(1, |z_j|), so that large multipliers with small partials
// do not read as singular.
double scaled_condition(const MatrixXc& jac, const VectorXc& z) {
    MatrixXc a = jac;
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) *= std::max(1.0, std::abs(z(j)));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double m = a.row(i).cwiseAbs().maxCoeff();
        if (m > 0.0) a.row(i) /= m;
    }
    return condition_of(Eigen::PartialPivLU<MatrixXc>(a));
}

class PathTracker {
  public:
    PathTracker(const Homotopy& h, const TrackerConfig& cfg)
        : sys_(*h.system), h_(h), cfg_(cfg), direction_(h.segment.to - h.segment.from) {}

    PathResult run(std::span<const Complex> start) {
        PathResult result;
        const auto n = static_cast<Eigen::Index>(sys_.num_unknowns());
        if (static_cast<Eigen::Index>(start.size()) != n) throw DimensionError("start point has wrong length");
        VectorXc z = to_vector(start);
        result.endpoint = z;

        if (!z.allFinite()) return result;
        evaluate(z, 0.0, /*with_time=*/false);
        result.residual = inf_norm(values_);
        if (result.residual > cfg_.newton_tol * (1.0 + inf_norm(z))) return result;
        result.condition_estimate = scaled_condition(jz_, z);
        if (result.condition_estimate > cfg_.singular_threshold) return result;

        double t = 0.0;
        double h = cfg_.initial_step;
        int successes = 0;
        while (t < 1.0) {
            const double remaining = 1.0 - t;
            double step = std::min(h, remaining);
            if (remaining - step < 1e-14) step = remaining;
            const double t_next = (step == remaining) ? 1.0 : t + step;

            // Euler predictor: dz/dt = -Hz^{-1} Ht.
            evaluate(z, t, /*with_time=*/true);
            lu_.compute(jz_);
            VectorXc dz = lu_.solve(-ht_);
            VectorXc candidate = z + step * dz;

            bool converged = dz.allFinite() && correct(candidate, t_next);
            if (converged) {
                z = std::move(candidate);
                t = t_next;
                ++result.steps_taken;
                if (inf_norm(z) > cfg_.divergence_threshold) {
                    result.status = PathStatus::Diverged;
                    result.endpoint = z;
                    result.t_reached = t;
                    return result;
                }
                if (++successes >= cfg_.successes_before_increase) {
                    h = std::min(h * cfg_.step_increase_factor, cfg_.max_step);
                    successes = 0;
                }
            } else {
                successes = 0;
                h *= cfg_.step_cut_factor;
                if (h < cfg_.min_step) {
                    result.status = PathStatus::StepTooSmall;
                    result.endpoint = z;
                    result.t_reached = t;
                    return result;
                }
            }
        }

        result.t_reached = 1.0;
        finish(z, result);
        return result;
    }

  private:
    void evaluate(const VectorXc& z, double t, bool with_time) {
        const VectorXc p = h_.parameters_at(t);
        sys_.evaluate(as_span(z), as_span(p), values_, &jz_, with_time ? &jp_ : nullptr);
        if (with_time) ht_ = jp_ * direction_;
    }

    bool correct(VectorXc& z, double t) {
        double previous = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg_.max_newton_iters; ++it) {
            evaluate(z, t, false);
            lu_.compute(jz_);
            const VectorXc dz = lu_.solve(-values_);
            if (!dz.allFinite()) return false;
            z += dz;
            const double size = inf_norm(dz);
            if (size <= cfg_.newton_tol * (1.0 + inf_norm(z))) return true;
            if (size >= previous) return false;
            previous = size;
        }
        return false;
    }

    void finish(VectorXc& z, PathResult& result) {
        // Polish at t = 1 to the endpoint tolerance.
        for (int it = 0; it < 8; ++it) {
            evaluate(z, 1.0, false);
            result.residual = inf_norm(values_);
            if (result.residual <= cfg_.endpoint_tol * (1.0 + inf_norm(z))) break;
            lu_.compute(jz_);
            const VectorXc dz = lu_.solve(-values_);
            if (!dz.allFinite()) break;
            z += dz;
        }
        evaluate(z, 1.0, false);
        result.residual = inf_norm(values_);
        result.condition_estimate = scaled_condition(jz_, z);
        result.endpoint = z;
        const bool small_residual = result.residual <= cfg_.endpoint_tol * (1.0 + inf_norm(z));
        if (result.condition_estimate > cfg_.singular_threshold || !small_residual) {
            result.status = PathStatus::SingularEndpoint;
        } else {
            result.status = PathStatus::Success;
        }
    }

    const PolySystem& sys_;
    const Homotopy& h_;
    const TrackerConfig& cfg_;
    VectorXc direction_;
    VectorXc values_;
    VectorXc ht_;
    MatrixXc jz_;
    MatrixXc jp_;
    Eigen::PartialPivLU<MatrixXc> lu_;
};

PathResult track_with_retries(const Homotopy& h, std::span<const Complex> start, const TrackerConfig& cfg) {
    PathResult result = PathTracker(h, cfg).run(start);
    TrackerConfig relaxed = cfg;
    int steps = result.steps_taken;
    for (int r = 0; r < cfg.retries && result.status == PathStatus::StepTooSmall; ++r) {
        relaxed.newton_tol *= cfg.retry_tol_factor;
        relaxed.max_step = std::max(relaxed.max_step / 2.0, relaxed.min_step);
        relaxed.initial_step = std::clamp(relaxed.initial_step, relaxed.min_step, relaxed.max_step);
        result = PathTracker(h, relaxed).run(start);
        steps += result.steps_taken;
    }
    result.steps_taken = steps;
    return result;
}

}  // namespace

PathResult track(const Homotopy& h, std::span<const Complex> start, const TrackerConfig& cfg) {
    cfg.validate();
    return track_with_retries(h, start, cfg);
}

std::vector<PathResult> track_many(const Homotopy& h, const std::vector<VectorXc>& starts,
                                   const TrackerConfig& cfg) {
    cfg.validate();
    std::vector<PathResult> results(starts.size());
    if (starts.empty()) return results;
    unsigned workers = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(starts.size()));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (auto i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1)) {
            results[i] = track_with_retries(h, as_span(starts[i]), cfg);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

PathResult track_segments(const std::shared_ptr<const PolySystem>& system,
                          const std::vector<PathSegment>& segments, std::span<const Complex> start,
                          const TrackerConfig& cfg) {
    VectorXc z = to_vector(start);
    PathResult last;
    last.status = PathStatus::Success;
    last.endpoint = z;
    int steps = 0;
    for (const auto& seg : segments) {
        last = track(Homotopy(system, seg), as_span(z), cfg);
        steps += last.steps_taken;
        if (!last.ok()) break;
        z = last.endpoint;
    }
    last.steps_taken = steps;
    return last;
}

double residual(const PolySystem& system, std::span<const Complex> parameters, const VectorXc& z) {
    return inf_norm(system.values(as_span(z), parameters));
}

NewtonResult newton_refine(const PolySystem& system, std::span<const Complex> parameters,
                           const VectorXc& start, double tol, int max_iters) {
    NewtonResult out;
    out.point = start;
    VectorXc values;
    MatrixXc jac;
    Eigen::PartialPivLU<MatrixXc> lu;
    for (int it = 0;; ++it) {
        system.evaluate(as_span(out.point), parameters, values, &jac, nullptr);
        out.residual = inf_norm(values);
        if (out.residual <= tol * (1.0 + inf_norm(out.point))) {
            out.converged = true;
            break;
        }
        if (it >= max_iters) break;
        lu.compute(jac);
        const VectorXc dz = lu.solve(-values);
        if (!dz.allFinite()) break;
        out.point += dz;
    }
    if (jac.rows() == jac.cols() && jac.rows() > 0) out.condition_estimate = scaled_condition(jac, out.point);
    return out;
}

}  // namespace critfiber
