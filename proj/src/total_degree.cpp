#include "critfiber/total_degree.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace critfiber {

std::size_t bezout_number(const PolySystem& system) {
    std::size_t b = 1;
    for (const auto& p : system.polynomials()) b *= p.degree();
    return b;
}

namespace {

// f(z) -> z0^deg f(z / z0) in slots (z0, z1, ..., zN, extra...).
Polynomial homogenize(const Polynomial& p, std::size_t total_slots) {
    const auto n = p.num_vars();
    const auto d = p.degree();
    std::vector<Term> terms;
    for (const auto& t : p.terms()) {
        Exponents e(total_slots, 0);
        std::uint32_t deg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            e[i + 1] = t.exponents[i];
            deg += t.exponents[i];
        }
        e[0] = d - deg;
        terms.push_back({std::move(e), t.coeff});
    }
    return Polynomial(total_slots, std::move(terms));
}

}  // namespace

TotalDegreeReport total_degree_solve(const PolySystem& system, std::uint64_t seed, const TrackerConfig& cfg) {
    if (system.num_parameters() != 0) throw std::invalid_argument("bind parameters before total_degree_solve");
    if (!system.is_square()) throw std::invalid_argument("total_degree_solve needs a square system");
    const auto n = system.num_unknowns();
    if (n == 0 || n > 6) throw std::invalid_argument("total_degree_solve supports 1 to 6 unknowns");
    // Unknown slots must be 0..n-1 for homogenization.
    for (std::size_t i = 0; i < n; ++i) {
        if (system.unknown_slots()[i] != i || system.num_slots() != n) {
            throw std::invalid_argument("total_degree_solve needs a system over its unknown slots only");
        }
    }
    for (const auto& p : system.polynomials()) {
        if (p.degree() == 0) throw std::invalid_argument("total_degree_solve needs nonconstant polynomials");
    }
    const auto bezout = bezout_number(system);
    if (bezout > 200) throw std::invalid_argument("Bezout number exceeds 200");

    Rng rng(seed);
    const Complex gamma = random_unit_complex(rng);
    VectorXc r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) r(static_cast<Eigen::Index>(i)) = random_unit_complex(rng);
    const VectorXc patch = random_complex_vector(static_cast<Eigen::Index>(n + 1), rng);

    // Slots: z0, z1..zn, a, b. Equations a*gamma*g_i + b*f_i^h and the patch.
    const std::size_t slots = n + 3;
    const std::size_t a_slot = n + 1;
    const std::size_t b_slot = n + 2;
    const auto a = Polynomial::variable(slots, a_slot);
    const auto b = Polynomial::variable(slots, b_slot);
    const auto z0 = Polynomial::variable(slots, 0);
    std::vector<Polynomial> eqs;
    std::vector<std::uint32_t> degrees;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = system[i];
        const auto d = f.degree();
        degrees.push_back(d);
        const auto zi = Polynomial::variable(slots, i + 1);
        const auto start = zi.pow(d) - r(static_cast<Eigen::Index>(i)) * z0.pow(d);
        eqs.push_back(gamma * (a * start) + b * homogenize(f, slots));
    }
    Polynomial patch_eq = Polynomial::constant(slots, -1.0);
    for (std::size_t j = 0; j <= n; ++j) {
        patch_eq += patch(static_cast<Eigen::Index>(j)) * Polynomial::variable(slots, j);
    }
    eqs.push_back(patch_eq);

    std::vector<std::string> names{"z0"};
    std::vector<std::size_t> unknowns{0};
    for (std::size_t i = 1; i <= n; ++i) {
        names.push_back("z" + std::to_string(i));
        unknowns.push_back(i);
    }
    names.push_back("a");
    names.push_back("b");
    auto homotopy_system = std::make_shared<const PolySystem>(std::move(eqs), names, unknowns,
                                                              std::vector<std::size_t>{a_slot, b_slot});
    VectorXc from(2);
    from << 1.0, 0.0;
    VectorXc to(2);
    to << 0.0, 1.0;
    const Homotopy h(homotopy_system, from, to);

    // Start points: all products of d_i-th roots of r_i, scaled onto the patch.
    std::vector<VectorXc> starts;
    starts.reserve(bezout);
    std::vector<std::uint32_t> index(n, 0);
    while (true) {
        VectorXc z(static_cast<Eigen::Index>(n + 1));
        z(0) = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = degrees[i];
            const auto ri = r(static_cast<Eigen::Index>(i));
            const double angle = (std::arg(ri) + 2.0 * std::numbers::pi * index[i]) / d;
            z(static_cast<Eigen::Index>(i + 1)) = std::polar(std::pow(std::abs(ri), 1.0 / d), angle);
        }
        z /= patch.cwiseProduct(z).sum();
        starts.push_back(std::move(z));
        std::size_t k = 0;
        while (k < n && ++index[k] == degrees[k]) index[k++] = 0;
        if (k == n) break;
    }

    TotalDegreeReport report;
    report.bezout_number = bezout;
    report.paths_tracked = starts.size();
    const auto results = track_many(h, starts, cfg);
    for (const auto& res : results) {
        const bool stalled = res.status == PathStatus::StepTooSmall || res.status == PathStatus::Diverged ||
                             res.status == PathStatus::InvalidStart;
        if (stalled && res.t_reached < 0.999) ++report.path_failures;
        const bool near_end = res.t_reached >= 0.999 && res.endpoint.allFinite();
        if (res.status != PathStatus::Success && res.status != PathStatus::SingularEndpoint && !near_end) {
            continue;
        }
        const auto& zh = res.endpoint;
        const Complex w = zh(0);
        if (std::abs(w) <= 1e-8 * inf_norm(zh)) continue;  // at infinity
        VectorXc x = zh.tail(static_cast<Eigen::Index>(n)) / w;
        auto refined = newton_refine(system, {}, x, 1e-12, 8);
        if (!refined.point.allFinite()) continue;
        const double scale = 1.0 + inf_norm(refined.point);
        if (refined.residual > 1e-10 * scale || refined.condition_estimate > cfg.singular_threshold) continue;
        report.solutions.insert(std::move(refined.point), refined.residual);
    }
    report.excessive_failures = report.path_failures * 5 > report.paths_tracked;
    return report;
}

}  // namespace critfiber
