#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "critfiber/parser.hpp"
#include "critfiber/polynomial.hpp"
#include "critfiber/solution_set.hpp"
#include "critfiber/tracker.hpp"
#include "critfiber/types.hpp"

namespace critfiber {

/// Objective family Psi_u on C^n.
///
/// Euclidean: Psi_u(x) = sum (x_i - u_i)^2, gradient (x - u), no forbidden locus.
/// Likelihood: Psi_u(x) = prod x_i^u_i, gradient (u_i / x_i), forbidden locus
/// x_1 x_2 ... x_n = 0. Values for the likelihood kind are reported as the
/// log-likelihood sum u_i log x_i.
struct Objective {
    ObjectiveKind kind = ObjectiveKind::Euclidean;
    std::size_t dimension = 0;

    VectorXc gradient(const VectorXc& x, const VectorXc& u) const;
    Complex value(const VectorXc& x, const VectorXc& u) const;
    /// min |x_i| <= tol for the likelihood kind; always false for Euclidean.
    bool on_forbidden_locus(const VectorXc& x, double tol = 1e-8) const;
};

/// Model X given by `original` (m equations in n unknowns), reduced to a
/// square set of `codim` equations by random linear combinations.
struct Model {
    PolySystem original;
    std::size_t codim = 0;
    PolySystem squared;
    MatrixXc randomizer;  // codim x m

    std::size_t ambient_dimension() const { return original.num_unknowns(); }
};

/// Builds squared[i] = sum_j coeffs(i, j) * original[j]. Without coeffs the
/// entries are drawn uniformly from the unit disk minus the disk of radius 0.1.
/// An already-square input with no coeffs is kept as is.
Model randomize_square(const PolySystem& original, std::size_t codim,
                       const std::optional<MatrixXc>& coeffs, Rng& rng);

/// Model from a parsed problem (codim defaults to the equation count).
Model model_from_problem(const Problem& problem, Rng& rng);

/// Numerical rank of the squared system's Jacobian at x (relative tolerance).
std::size_t jacobian_rank(const Model& model, const VectorXc& x, double tol = 1e-8);

/// Square Lagrange system G(x, lambda; u) in the chart lambda_0 = 1.
///
/// Unknowns are (x_1..x_n, lam1..lamk), parameters (u_1..u_n). Rows are the
/// normalized squared equations followed by, for each i,
///   Euclidean:  (x_i - u_i) + sum_j lam_j d g_j / d x_i
///   Likelihood: u_i + x_i * sum_j lam_j d g_j / d x_i
/// where g_j is squared[j] divided by its largest coefficient magnitude.
struct CriticalSystem {
    Model model;
    Objective objective;
    std::shared_ptr<const PolySystem> system;
    /// Multipliers relative to the squared equations are row_scale .* lam.
    Eigen::VectorXd row_scale;

    std::size_t n() const { return objective.dimension; }
    std::size_t k() const { return model.codim; }

    VectorXc x_of(const VectorXc& z) const { return z.head(static_cast<Eigen::Index>(n())); }
    VectorXc lambda_of(const VectorXc& z) const { return z.tail(static_cast<Eigen::Index>(k())); }
    /// Multipliers for the squared equations as the model states them.
    VectorXc model_lambda(const VectorXc& z) const;
    VectorXc join(const VectorXc& x, const VectorXc& lambda) const;
    /// Inverse of model_lambda.
    VectorXc from_model_lambda(const VectorXc& x, const VectorXc& lambda_model) const;

    double residual(const VectorXc& z, const VectorXc& u) const;
};

CriticalSystem build_critical_system(const Model& model, const Objective& objective);

/// max(|F(x)|, sigma_{k+1}[grad Psi, grad g_1, ..., grad g_k]); vanishes exactly
/// at critical points. Throws std::domain_error when x lies on the forbidden locus.
double critical_conditions_residual(const Model& model, const Objective& objective, const VectorXc& x,
                                    const VectorXc& u);

struct ComponentPartition {
    std::vector<std::size_t> on_model;
    std::vector<std::size_t> junk;
};

/// Splits points by whether every original equation vanishes at their
/// x-coordinates (the first n entries), tolerance 1e-8 (1 + |x|).
ComponentPartition classify_by_component(const SolutionSet& points, const Model& model);

/// |<x - u, v>| / (|x - u| |v|) maximized over a basis v of the tangent space
/// (null space of the squared Jacobian); bilinear pairing.
double tangent_orthogonality_defect(const Model& model, const VectorXc& x, const VectorXc& u);

}  // namespace critfiber
