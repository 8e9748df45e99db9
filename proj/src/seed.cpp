#include "critfiber/seed.hpp"

#include <cmath>

namespace critfiber {

VectorXc SeedResult::point() const {
    VectorXc z(x_star.size() + lambda_chart.size());
    z << x_star, lambda_chart;
    return z;
}

namespace {

Polynomial normalized(const Polynomial& p) {
    const double m = p.max_abs_coefficient();
    return m > 0.0 ? p * Complex(1.0 / m) : p;
}

double model_residual(const Model& model, const VectorXc& x) {
    double r = 0.0;
    for (const auto& f : model.squared.polynomials()) r = std::max(r, std::abs(evaluate(normalized(f), as_span(x))));
    return r;
}

double original_residual(const Model& model, const VectorXc& x) {
    double r = 0.0;
    for (const auto& f : model.original.polynomials()) r = std::max(r, std::abs(evaluate(normalized(f), as_span(x))));
    return r;
}

// Random real a with |a| in [0.5, 1.5] and random sign.
double random_patch_coefficient(Rng& rng) {
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::bernoulli_distribution sign(0.5);
    const double a = mag(rng);
    return sign(rng) ? a : -a;
}

}  // namespace

std::optional<VectorXc> point_on_model_from(const Model& model, const VectorXc& x_hat, Rng& rng,
                                            const TrackerConfig& cfg) {
    const auto n = model.ambient_dimension();
    const auto k = model.codim;
    const auto d = n - k;  // slice equations
    const auto ni = static_cast<Eigen::Index>(n);
    const auto di = static_cast<Eigen::Index>(d);

    // Slots: x (n), beta (k), A (d*n, row-major), c (d).
    const std::size_t slots = n + k + d * n + d;
    std::vector<std::size_t> x_map(n);
    for (std::size_t i = 0; i < n; ++i) x_map[i] = i;
    std::vector<Polynomial> eqs;
    for (std::size_t j = 0; j < k; ++j) {
        eqs.push_back(normalized(model.squared[j]).embed(slots, x_map) - Polynomial::variable(slots, n + j));
    }
    for (std::size_t l = 0; l < d; ++l) {
        Polynomial row = -Polynomial::variable(slots, n + k + d * n + l);
        for (std::size_t i = 0; i < n; ++i) {
            row += Polynomial::variable(slots, n + k + l * n + i) * Polynomial::variable(slots, i);
        }
        eqs.push_back(std::move(row));
    }
    std::vector<std::string> names;
    for (std::size_t s = 0; s < slots; ++s) names.push_back("s" + std::to_string(s));
    std::vector<std::size_t> unknowns(n);
    for (std::size_t i = 0; i < n; ++i) unknowns[i] = i;
    std::vector<std::size_t> params;
    for (std::size_t s = n; s < slots; ++s) params.push_back(s);
    auto sys = std::make_shared<const PolySystem>(std::move(eqs), std::move(names), std::move(unknowns),
                                                  std::move(params));

    VectorXc alpha(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        alpha(static_cast<Eigen::Index>(j)) = evaluate(normalized(model.squared[j]), as_span(x_hat));
    }
    MatrixXc a1(di, ni);
    MatrixXc a2(di, ni);
    for (Eigen::Index l = 0; l < di; ++l) {
        a1.row(l) = random_complex_vector(ni, rng).transpose();
        a2.row(l) = random_complex_vector(ni, rng).transpose();
    }
    const VectorXc p2 = random_complex_vector(ni, rng);
    const VectorXc c1 = a1 * x_hat;
    const VectorXc c2 = a2 * p2;

    auto pack = [&](const VectorXc& beta, const MatrixXc& a, const VectorXc& c) {
        VectorXc p(static_cast<Eigen::Index>(k + d * n + d));
        Eigen::Index at = 0;
        for (Eigen::Index j = 0; j < beta.size(); ++j) p(at++) = beta(j);
        for (Eigen::Index l = 0; l < di; ++l) {
            for (Eigen::Index i = 0; i < ni; ++i) p(at++) = a(l, i);
        }
        for (Eigen::Index l = 0; l < di; ++l) p(at++) = c(l);
        return p;
    };
    const Homotopy h(sys, pack(alpha, a1, c1), pack(VectorXc::Zero(static_cast<Eigen::Index>(k)), a2, c2));
    const auto res = track(h, as_span(x_hat), cfg);
    if (!res.ok()) return std::nullopt;
    VectorXc x0 = res.endpoint;
    if (model_residual(model, x0) > 1e-10 * (1.0 + inf_norm(x0))) return std::nullopt;
    // Squaring up may add components; only points of the model itself are useful.
    if (original_residual(model, x0) > 1e-8 * (1.0 + inf_norm(x0))) return std::nullopt;
    return x0;
}

VectorXc point_on_model(const Model& model, Rng& rng, const TrackerConfig& cfg, const SeedConfig& scfg) {
    for (int attempt = 0; attempt < scfg.retry_budget; ++attempt) {
        const VectorXc x_hat = random_complex_vector(static_cast<Eigen::Index>(model.ambient_dimension()), rng);
        if (auto x0 = point_on_model_from(model, x_hat, rng, cfg)) return *x0;
    }
    throw SeedingError("could not track a random point onto the model");
}

SeedResult gradient_descent_start(const CriticalSystem& cs, const VectorXc& x0, const VectorXc& u, Rng& rng,
                                  const TrackerConfig& cfg, const SeedConfig& scfg) {
    const auto n = cs.n();
    const auto k = cs.k();
    if (static_cast<std::size_t>(x0.size()) != n || static_cast<std::size_t>(u.size()) != n) {
        throw DimensionError("x0 and u must have the ambient dimension");
    }
    if (model_residual(cs.model, x0) > 1e-10 * (1.0 + inf_norm(x0))) {
        throw std::invalid_argument("x0 is not on the model");
    }
    const bool likelihood = cs.objective.kind == ObjectiveKind::Likelihood;
    if (cs.objective.on_forbidden_locus(x0)) throw SeedingError("x0 lies on the forbidden locus");

    // Slots: x (n), lam_0..lam_k (k + 1), s (path parameter, 1 -> 0).
    const std::size_t slots = n + k + 2;
    const std::size_t s_slot = n + k + 1;
    std::vector<std::size_t> x_map(n);
    for (std::size_t i = 0; i < n; ++i) x_map[i] = i;
    std::vector<Polynomial> g;
    for (std::size_t j = 0; j < k; ++j) g.push_back(normalized(cs.model.squared[j]).embed(slots, x_map));
    const auto lam0 = Polynomial::variable(slots, n);
    const auto s = Polynomial::variable(slots, s_slot);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < slots; ++i) names.push_back("v" + std::to_string(i));
    std::vector<std::size_t> unknowns(n + k + 1);
    for (std::size_t i = 0; i < n + k + 1; ++i) unknowns[i] = i;

    for (int attempt = 0; attempt < scfg.retry_budget; ++attempt) {
        const double a0 = random_patch_coefficient(rng);
        std::vector<double> a(k);
        for (auto& aj : a) aj = random_patch_coefficient(rng);
        const VectorXc kvec = a0 * cs.objective.gradient(x0, u);

        std::vector<Polynomial> eqs = g;
        for (std::size_t i = 0; i < n; ++i) {
            Polynomial combo(slots);
            for (std::size_t j = 0; j < k; ++j) combo += Polynomial::variable(slots, n + 1 + j) * differentiate(g[j], i);
            const auto xi = Polynomial::variable(slots, i);
            const Complex ui = u(static_cast<Eigen::Index>(i));
            const Complex ki = kvec(static_cast<Eigen::Index>(i));
            if (likelihood) {
                eqs.push_back(ui * lam0 + xi * combo - ki * (s * xi));
            } else {
                eqs.push_back(lam0 * (xi - Polynomial::constant(slots, ui)) + combo - ki * s);
            }
        }
        Polynomial patch = lam0 - Polynomial::constant(slots, a0);
        for (std::size_t j = 0; j < k; ++j) patch += a[j] * Polynomial::variable(slots, n + 1 + j);
        eqs.push_back(std::move(patch));

        auto sys = std::make_shared<const PolySystem>(std::move(eqs), names, unknowns, std::vector<std::size_t>{s_slot});
        VectorXc from(1);
        from << 1.0;
        VectorXc to(1);
        to << 0.0;
        VectorXc start = VectorXc::Zero(static_cast<Eigen::Index>(n + k + 1));
        start.head(static_cast<Eigen::Index>(n)) = x0;
        start(static_cast<Eigen::Index>(n)) = a0;

        const auto res = track(Homotopy(sys, from, to), as_span(start), cfg);
        if (!res.ok()) throw SeedingError("gradient-descent path failed: " + to_string(res.status));

        const VectorXc& e = res.endpoint;
        const Complex l0 = e(static_cast<Eigen::Index>(n));
        if (std::abs(l0) <= 1e-8 * (1.0 + inf_norm(e))) continue;  // redraw the patch

        SeedResult out;
        out.u = u;
        out.x_star = e.head(static_cast<Eigen::Index>(n));
        out.lambda_patch = e.tail(static_cast<Eigen::Index>(k + 1));
        out.lambda_chart = e.tail(static_cast<Eigen::Index>(k)) / l0;
        out.attempts = attempt + 1;
        auto refined = newton_refine(*cs.system, as_span(u), out.point(), 1e-13, 6);
        if (!refined.point.allFinite()) continue;
        out.x_star = refined.point.head(static_cast<Eigen::Index>(n));
        out.lambda_chart = refined.point.tail(static_cast<Eigen::Index>(k));
        out.residual = refined.residual;
        if (out.residual > 1e-10 * (1.0 + inf_norm(refined.point) + inf_norm(u))) continue;
        if (cs.objective.on_forbidden_locus(out.x_star)) continue;
        return out;
    }
    throw SeedingError("gradient-descent homotopy ended with lambda_0 = 0 on every patch");
}

SeedResult lifted_start(const CriticalSystem& cs, const VectorXc& x0, const VectorXc& u, Rng& rng,
                        const TrackerConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(cs.n());
    const auto k = static_cast<Eigen::Index>(cs.k());
    if (x0.size() != n || u.size() != n) throw DimensionError("x0 and u must have the ambient dimension");
    if (cs.objective.on_forbidden_locus(x0)) throw SeedingError("x0 lies on the forbidden locus");

    const VectorXc mu = random_complex_vector(k, rng);
    // Rows past the first k are affine in u with unit coefficient, so the
    // residual at u = 0 gives u0 directly.
    const VectorXc zero_u = VectorXc::Zero(n);
    const VectorXc z0 = cs.join(x0, mu);
    const VectorXc rows = cs.system->values(as_span(z0), as_span(zero_u));
    const VectorXc u0 = cs.objective.kind == ObjectiveKind::Euclidean ? VectorXc(rows.tail(n)) : VectorXc(-rows.tail(n));

    const auto res = track(Homotopy(cs.system, u0, u), as_span(z0), cfg);
    if (!res.ok()) throw SeedingError("parameter lift path failed: " + to_string(res.status));
    SeedResult out;
    out.u = u;
    out.x_star = cs.x_of(res.endpoint);
    out.lambda_chart = cs.lambda_of(res.endpoint);
    out.lambda_patch.resize(k + 1);
    out.lambda_patch << Complex(1.0), out.lambda_chart;
    out.residual = res.residual;
    out.lifted = true;
    if (cs.objective.on_forbidden_locus(out.x_star)) throw SeedingError("parameter lift ended on the forbidden locus");
    return out;
}

SeedResult find_seed(const CriticalSystem& cs, const VectorXc& u, Rng& rng, const TrackerConfig& cfg,
                     const SeedConfig& scfg) {
    int attempts = 0;
    auto try_at = [&](const VectorXc& target) -> std::optional<SeedResult> {
        for (int attempt = 0; attempt < scfg.retry_budget; ++attempt) {
            ++attempts;
            try {
                const VectorXc x0 = point_on_model(cs.model, rng, cfg, scfg);
                return gradient_descent_start(cs, x0, target, rng, cfg, scfg);
            } catch (const SeedingError&) {
            }
        }
        return std::nullopt;
    };

    if (auto seed = try_at(u)) {
        seed->attempts = attempts;
        return *seed;
    }

    for (int attempt = 0; attempt < scfg.retry_budget; ++attempt) {
        ++attempts;
        try {
            const VectorXc x0 = point_on_model(cs.model, rng, cfg, scfg);
            SeedResult out = lifted_start(cs, x0, u, rng, cfg);
            out.attempts = attempts;
            return out;
        } catch (const SeedingError&) {
        }
    }

    // Fallback: seed at a nearby complex u, then move the point back to u.
    const auto ni = static_cast<Eigen::Index>(cs.n());
    VectorXc shift(ni);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < ni; ++i) shift(i) = Complex(0.0, scfg.perturbation * normal(rng));
    const VectorXc u_perturbed = u + shift;
    if (auto seed = try_at(u_perturbed)) {
        const auto res = track(Homotopy(cs.system, u_perturbed, u), as_span(seed->point()), cfg);
        if (res.ok()) {
            SeedResult out = *seed;
            out.u = u;
            out.x_star = res.endpoint.head(ni);
            out.lambda_chart = res.endpoint.tail(static_cast<Eigen::Index>(cs.k()));
            out.residual = res.residual;
            out.perturbed = true;
            out.attempts = attempts;
            return out;
        }
    }
    throw SeedingError("seeding failed after " + std::to_string(attempts) + " attempts");
}

}  // namespace critfiber
