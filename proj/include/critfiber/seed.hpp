#pragma once

#include <stdexcept>

#include "critfiber/critical_system.hpp"
#include "critfiber/tracker.hpp"

namespace critfiber {

class SeedingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One verified critical point over u.
struct SeedResult {
    VectorXc x_star;
    /// (lam_0, ..., lam_k) on the random affine patch, internal normalization.
    VectorXc lambda_patch;
    /// (lam_1, ..., lam_k) / lam_0: the chart used by the critical system.
    VectorXc lambda_chart;
    VectorXc u;
    double residual = 0.0;
    /// Attempts consumed, counting both homotopies.
    int attempts = 0;
    /// Seeding went through a complex perturbation of u and back.
    bool perturbed = false;
    /// Found by parameter lift instead of the gradient-descent homotopy.
    bool lifted = false;

    /// (x_star, lambda_chart) as one unknown vector of the critical system.
    VectorXc point() const;
};

struct SeedConfig {
    int retry_budget = 5;
    double perturbation = 1e-3;
};

/// Random point on the model: cheater's homotopy F(x) - (1 - t) F(x_hat),
/// squared up with a random affine slice through x_hat that moves to a fresh
/// random slice. Throws SeedingError after the retry budget.
VectorXc point_on_model(const Model& model, Rng& rng, const TrackerConfig& cfg = {},
                        const SeedConfig& scfg = {});

/// One attempt at the same construction from a given starting point x_hat.
/// Returns the endpoint or std::nullopt on path failure, and also when the
/// endpoint satisfies the squared equations but not the original ones.
std::optional<VectorXc> point_on_model_from(const Model& model, const VectorXc& x_hat, Rng& rng,
                                            const TrackerConfig& cfg = {});

/// Gradient-descent homotopy from an on-model point x0 to a critical point
/// over u, on the patch lam_0 + sum a_j lam_j = a_0 with random real a_j.
/// Throws SeedingError when lam_0 vanishes or the path fails on every retry.
SeedResult gradient_descent_start(const CriticalSystem& cs, const VectorXc& x0, const VectorXc& u, Rng& rng,
                                  const TrackerConfig& cfg = {}, const SeedConfig& scfg = {});

/// Parameter lift: picks random multipliers mu and the parameter u0 for
/// which (x0, mu) solves the critical system, then tracks u0 -> u.
/// Throws SeedingError on path failure.
SeedResult lifted_start(const CriticalSystem& cs, const VectorXc& x0, const VectorXc& u, Rng& rng,
                        const TrackerConfig& cfg = {});

/// Full seeding: point_on_model then gradient_descent_start, redrawing x0 on
/// failure. Falls back to the parameter lift, then to a complex perturbation
/// of u followed by a parameter homotopy back to u.
SeedResult find_seed(const CriticalSystem& cs, const VectorXc& u, Rng& rng, const TrackerConfig& cfg = {},
                     const SeedConfig& scfg = {});

}  // namespace critfiber
