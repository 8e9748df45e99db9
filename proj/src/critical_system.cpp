#include "critfiber/critical_system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace critfiber {

VectorXc Objective::gradient(const VectorXc& x, const VectorXc& u) const {
    if (kind == ObjectiveKind::Euclidean) return x - u;
    return u.cwiseQuotient(x);
}

Complex Objective::value(const VectorXc& x, const VectorXc& u) const {
    Complex v = 0.0;
    if (kind == ObjectiveKind::Euclidean) {
        for (Eigen::Index i = 0; i < x.size(); ++i) v += (x(i) - u(i)) * (x(i) - u(i));
    } else {
        for (Eigen::Index i = 0; i < x.size(); ++i) v += u(i) * std::log(x(i));
    }
    return v;
}

bool Objective::on_forbidden_locus(const VectorXc& x, double tol) const {
    if (kind == ObjectiveKind::Euclidean) return false;
    // Distance to the union of coordinate hyperplanes; the product of all
    // coordinates underflows the tolerance for honest points once n is large.
    return x.size() == 0 || x.cwiseAbs().minCoeff() <= tol;
}

namespace {

void require_model_system(const PolySystem& s) {
    if (s.num_parameters() != 0) throw std::invalid_argument("model equations must not have parameters");
    for (std::size_t i = 0; i < s.num_unknowns(); ++i) {
        if (s.unknown_slots()[i] != i || s.num_slots() != s.num_unknowns()) {
            throw std::invalid_argument("model equations must be over their unknown slots only");
        }
    }
}

Polynomial normalized(const Polynomial& p) {
    const double m = p.max_abs_coefficient();
    return m > 0.0 ? p * Complex(1.0 / m) : p;
}

}  // namespace

Model randomize_square(const PolySystem& original, std::size_t codim, const std::optional<MatrixXc>& coeffs,
                       Rng& rng) {
    require_model_system(original);
    const auto m = original.size();
    if (codim == 0 || codim > m) throw std::invalid_argument("codim must be between 1 and the equation count");
    if (codim > original.num_unknowns()) throw std::invalid_argument("codim exceeds the ambient dimension");

    Model model;
    model.original = original;
    model.codim = codim;
    if (coeffs) {
        if (coeffs->rows() != static_cast<Eigen::Index>(codim) || coeffs->cols() != static_cast<Eigen::Index>(m)) {
            throw DimensionError("randomizer must be codim x m");
        }
        Eigen::FullPivLU<MatrixXc> lu(*coeffs);
        lu.setThreshold(1e-12);
        if (lu.rank() < static_cast<Eigen::Index>(codim)) throw std::invalid_argument("randomizer is rank deficient");
        model.randomizer = *coeffs;
    } else if (codim == m) {
        model.randomizer = MatrixXc::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    } else {
        // Uniform on the unit disk minus a disk of radius 0.1 around 0.
        std::uniform_real_distribution<double> radius2(0.01, 1.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        model.randomizer.resize(static_cast<Eigen::Index>(codim), static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < model.randomizer.rows(); ++i) {
            for (Eigen::Index j = 0; j < model.randomizer.cols(); ++j) {
                const double r = std::sqrt(radius2(rng));
                model.randomizer(i, j) = std::polar(r, angle(rng));
            }
        }
    }

    if (!coeffs && codim == m) {
        model.squared = original;
        return model;
    }
    std::vector<Polynomial> squared;
    for (std::size_t i = 0; i < codim; ++i) {
        Polynomial g(original.num_slots());
        for (std::size_t j = 0; j < m; ++j) {
            const Complex c = model.randomizer(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (c != Complex(0.0)) g += c * original[j];
        }
        squared.push_back(std::move(g));
    }
    model.squared = PolySystem(std::move(squared), original.variable_names(), original.unknown_slots(), {});
    return model;
}

Model model_from_problem(const Problem& problem, Rng& rng) {
    const auto codim = problem.codim.value_or(problem.system.size());
    return randomize_square(problem.system, codim, problem.randomizer, rng);
}

std::size_t jacobian_rank(const Model& model, const VectorXc& x, double tol) {
    const MatrixXc jac = jacobian_eval(model.squared, as_span(x));
    if (jac.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixXc> svd(jac);
    const auto& s = svd.singularValues();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol * std::max(1.0, s(0))) ++rank;
    }
    return rank;
}

VectorXc CriticalSystem::model_lambda(const VectorXc& z) const {
    return lambda_of(z).cwiseProduct(row_scale.cast<Complex>());
}

VectorXc CriticalSystem::join(const VectorXc& x, const VectorXc& lambda) const {
    VectorXc z(x.size() + lambda.size());
    z << x, lambda;
    return z;
}

VectorXc CriticalSystem::from_model_lambda(const VectorXc& x, const VectorXc& lambda_model) const {
    return join(x, lambda_model.cwiseQuotient(row_scale.cast<Complex>()));
}

double CriticalSystem::residual(const VectorXc& z, const VectorXc& u) const {
    return critfiber::residual(*system, as_span(u), z);
}

CriticalSystem build_critical_system(const Model& model, const Objective& objective) {
    const auto n = model.ambient_dimension();
    const auto k = model.codim;
    if (objective.dimension != n) throw DimensionError("objective dimension does not match the model");
    if (model.squared.size() != k) throw std::invalid_argument("squared system must have codim equations");

    CriticalSystem cs;
    cs.model = model;
    cs.objective = objective;
    cs.row_scale.resize(static_cast<Eigen::Index>(k));

    const std::size_t slots = 2 * n + k;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(model.original.variable_names()[i]);
    for (std::size_t j = 0; j < k; ++j) names.push_back("lam" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) names.push_back("u" + std::to_string(i + 1));
    // Guard against model variables that collide with the generated names.
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = a + 1; b < names.size(); ++b) {
            if (names[a] == names[b]) names[b] += "_";
        }
    }

    std::vector<std::size_t> x_map(n);
    for (std::size_t i = 0; i < n; ++i) x_map[i] = i;

    std::vector<Polynomial> g;
    for (std::size_t j = 0; j < k; ++j) {
        const auto& f = model.squared[j];
        const double m = f.max_abs_coefficient();
        cs.row_scale(static_cast<Eigen::Index>(j)) = m > 0.0 ? 1.0 / m : 1.0;
        g.push_back(normalized(f).embed(slots, x_map));
    }

    std::vector<Polynomial> rows = g;
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial combo(slots);
        for (std::size_t j = 0; j < k; ++j) {
            combo += Polynomial::variable(slots, n + j) * differentiate(g[j], i);
        }
        const auto xi = Polynomial::variable(slots, i);
        const auto ui = Polynomial::variable(slots, n + k + i);
        if (objective.kind == ObjectiveKind::Euclidean) {
            rows.push_back(xi - ui + combo);
        } else {
            rows.push_back(ui + xi * combo);
        }
    }

    std::vector<std::size_t> unknowns(n + k);
    for (std::size_t i = 0; i < n + k; ++i) unknowns[i] = i;
    std::vector<std::size_t> params(n);
    for (std::size_t i = 0; i < n; ++i) params[i] = n + k + i;
    cs.system = std::make_shared<const PolySystem>(std::move(rows), std::move(names), std::move(unknowns),
                                                   std::move(params));
    return cs;
}

double critical_conditions_residual(const Model& model, const Objective& objective, const VectorXc& x,
                                    const VectorXc& u) {
    const auto n = model.ambient_dimension();
    const auto k = model.codim;
    if (static_cast<std::size_t>(x.size()) != n || static_cast<std::size_t>(u.size()) != n) {
        throw DimensionError("x and u must have the ambient dimension");
    }
    if (objective.on_forbidden_locus(x)) throw std::domain_error("x lies on the forbidden locus");

    double f_norm = 0.0;
    MatrixXc ext(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + 1));
    ext.col(0) = objective.gradient(x, u);
    for (std::size_t j = 0; j < k; ++j) {
        const auto g = normalized(model.squared[j]);
        f_norm = std::max(f_norm, std::abs(evaluate(g, as_span(x))));
        for (std::size_t i = 0; i < n; ++i) {
            ext(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = evaluate(differentiate(g, i), as_span(x));
        }
    }
    double sigma = 0.0;
    if (n >= k + 1) {
        Eigen::JacobiSVD<MatrixXc> svd(ext);
        sigma = svd.singularValues()(static_cast<Eigen::Index>(k));
    }
    return std::max(f_norm, sigma);
}

ComponentPartition classify_by_component(const SolutionSet& points, const Model& model) {
    ComponentPartition out;
    const auto n = static_cast<Eigen::Index>(model.ambient_dimension());
    std::vector<Polynomial> originals;
    for (const auto& f : model.original.polynomials()) originals.push_back(normalized(f));
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const VectorXc x = points[idx].z.head(n);
        const double tol = 1e-8 * (1.0 + inf_norm(x));
        bool on_model = true;
        for (const auto& f : originals) {
            if (std::abs(evaluate(f, as_span(x))) > tol) {
                on_model = false;
                break;
            }
        }
        (on_model ? out.on_model : out.junk).push_back(idx);
    }
    return out;
}

double tangent_orthogonality_defect(const Model& model, const VectorXc& x, const VectorXc& u) {
    const MatrixXc jt = jacobian_eval(model.squared, as_span(x)).transpose();  // k x n
    Eigen::JacobiSVD<MatrixXc> svd(jt, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const auto n = jt.cols();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-8 * std::max(1.0, s(0))) ++rank;
    }
    const VectorXc w = x - u;
    double worst = 0.0;
    for (Eigen::Index c = rank; c < n; ++c) {
        const VectorXc v = svd.matrixV().col(c);
        const Complex ip = (w.transpose() * v)(0);
        worst = std::max(worst, std::abs(ip) / (w.norm() * v.norm()));
    }
    return worst;
}

}  // namespace critfiber
