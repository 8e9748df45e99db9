#include <doctest.h>

#include "../common/fixtures.hpp"
#include "critfiber/trace_test.hpp"

using namespace critfiber;
using testing::real_vector;

namespace {

// Parabola x2 = x1^2 cut by 2 x1 + 4 x2 - 1 + t = 0; unknowns (x1, x2), parameter t.
std::shared_ptr<const PolySystem> parabola_family() {
    const auto sys = parse_problem("vars: x1 x2\nparams: t\nmodel:\nx1^2 - x2\n2*x1 + 4*x2 - 1 + t\n").system;
    return std::make_shared<const PolySystem>(sys);
}

// Closed-form intersection points: x1 = (-1 +- sqrt(5 - 4 t)) / 4.
std::vector<VectorXc> parabola_points(Complex t) {
    std::vector<VectorXc> pts;
    for (double sign : {1.0, -1.0}) {
        const Complex x1 = (-1.0 + sign * std::sqrt(5.0 - 4.0 * t)) / 4.0;
        VectorXc z(2);
        z << x1, x1 * x1;
        pts.push_back(z);
    }
    return pts;
}

TraceSetup ellipse_setup(Rng& rng) {
    TraceSetup s;
    s.u0 = testing::ellipse_u();
    s.slice_u.resize(1, 2);
    s.slice_u << 0.3, -0.1;
    s.l1 = real_vector({0.2, 0.3});
    s.l1_constant = 0.5;
    s.l2 = real_vector({1.0, 0.7});
    s.t_values = random_t_values(rng);
    return s;
}

struct EllipseCurve {
    CriticalSystem cs;
    SolutionSet fiber;
    TraceCurve curve;
    SolutionSet points;
};

EllipseCurve ellipse_curve() {
    EllipseCurve e{testing::critical_system_for("ellipse"), SolutionSet(), TraceCurve(), SolutionSet()};
    MonodromyConfig mcfg;
    mcfg.solution_bound = 4;
    e.fiber = testing::solve_fiber(e.cs, testing::ellipse_u(), 3, mcfg).monodromy.solutions;
    Rng rng(12);
    e.curve = build_trace_curve(e.cs, ellipse_setup(rng), e.fiber[0].z);
    SolutionSet starts;
    for (const auto& p : e.fiber) starts.insert(e.curve.extend(p.z), p.residual);
    MonodromyConfig cm;
    cm.solution_bound = 6;
    cm.loop_scale = 10.0;
    e.points = collect_curve_points(e.curve, starts, cm, {}, rng).solutions;
    return e;
}

}  // namespace

TEST_SUITE("trace") {
    TEST_CASE("setup validation") {
        Rng rng(1);
        auto s = random_trace_setup(testing::ellipse_u(), rng);
        CHECK_NOTHROW(s.validate());
        CHECK(std::abs(s.l2_at(s.u0)) == 0.0);
        CHECK(std::abs((s.t_values[1] - s.t_values[0]) - (s.t_values[2] - s.t_values[1])) < 1e-15);
        CHECK(std::abs(std::abs(s.t_values[1]) - 0.1) < 1e-15);
        auto bad = s;
        bad.t_values[2] = 3.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = s;
        bad.slice_u.resize(2, 2);
        CHECK_THROWS_AS(bad.validate(), DimensionError);
    }

    TEST_CASE("parabola trace is affine with second coordinate 3/4 - t/2") {
        const auto sys = parabola_family();
        const std::array<Complex, 3> ts{0.0, 0.3, 0.6};
        const auto report = trace_test(sys, parabola_points(0.0), ts, {0, 1});
        REQUIRE(report.status != TraceStatus::Inconclusive);
        CHECK(report.passed);
        CHECK(report.max_abs < 1e-12);
        for (int i = 0; i < 3; ++i) {
            const auto oracle = parabola_points(ts[i]);
            const VectorXc sum = oracle[0] + oracle[1];
            CHECK(inf_norm(report.traces[i] - sum) < 1e-9);
            CHECK(std::abs(sum(0) + 0.5) < 1e-14);
            CHECK(std::abs(sum(1) - (0.75 - ts[i] / 2.0)) < 1e-14);
        }
    }

    TEST_CASE("parabola singletons fail the trace test") {
        const auto sys = parabola_family();
        const std::array<Complex, 3> ts{0.0, 0.3, 0.6};
        for (const auto& p : parabola_points(0.0)) {
            const auto report = trace_test(sys, {p}, ts, {0, 1});
            CHECK_FALSE(report.passed);
            // |sqrt(5) - 2 sqrt(3.8) + sqrt(2.6)| / 4, about 1.26e-2.
            const double expect = std::abs(std::sqrt(5.0) - 2.0 * std::sqrt(3.8) + std::sqrt(2.6)) / 4.0;
            CHECK(report.max_abs == doctest::Approx(expect).epsilon(1e-6));
        }
    }

    TEST_CASE("ellipse curve has 5 equations and contains the fiber") {
        const auto cs = testing::critical_system_for("ellipse");
        MonodromyConfig mcfg;
        mcfg.solution_bound = 4;
        const auto fiber = testing::solve_fiber(cs, testing::ellipse_u(), 3, mcfg).monodromy.solutions;
        Rng rng(2);
        const auto curve = build_trace_curve(cs, ellipse_setup(rng), fiber[0].z);
        CHECK(curve.system->size() == 5);
        CHECK(curve.system->num_unknowns() == 5);
        CHECK(curve.system->num_parameters() == 1);
        const VectorXc t0 = VectorXc::Zero(1);
        for (const auto& p : fiber) {
            const VectorXc z = curve.extend(p.z);
            CHECK(residual(*curve.system, as_span(t0), z) < 1e-10);
            CHECK(curve.on_l2(z));
        }
    }

    TEST_CASE("ellipse curve: 6 points, 4 on l2, full set passes, every 5-subset fails") {
        const auto e = ellipse_curve();
        REQUIRE(e.points.size() == 6);
        std::size_t on = 0;
        for (const auto& p : e.points) on += e.curve.on_l2(p.z) ? 1 : 0;
        CHECK(on == 4);
        const auto full = trace_test(e.curve, e.points);
        CHECK(full.passed);
        CHECK(full.on_l2_count == 4);
        CHECK(full.max_abs < 1e-8);
        for (std::size_t drop = 0; drop < e.points.size(); ++drop) {
            SolutionSet sub = e.points;
            sub.erase(drop);
            const auto r = trace_test(e.curve, sub);
            CHECK_FALSE(r.passed);
            CHECK(r.max_abs > 1e-3);
        }
    }

    TEST_CASE("verdict does not depend on the spacing") {
        auto e = ellipse_curve();
        Rng rng(40);
        for (int i = 0; i < 2; ++i) {
            e.curve.setup.t_values = random_t_values(rng);
            CHECK(trace_test(e.curve, e.points).passed);
            SolutionSet sub = e.points;
            sub.erase(0);
            CHECK_FALSE(trace_test(e.curve, sub).passed);
        }
    }

    TEST_CASE("certify_fiber completes a partial fiber") {
        const auto cs = testing::critical_system_for("ellipse");
        const VectorXc u = testing::ellipse_u();
        Rng rng(13);
        const auto seed = find_seed(cs, u, rng);
        SolutionSet partial;
        partial.insert(seed.point(), seed.residual);
        MonodromyConfig mcfg;
        const auto res = certify_fiber(cs, u, partial, mcfg, {}, rng);
        CHECK(res.report.passed);
        CHECK(res.fiber.size() == 4);
        CHECK(res.fiber_additions == 3);
        CHECK(res.report.on_l2_count == 4);
    }

    TEST_CASE("degree-one model passes trivially") {
        const auto cs = testing::critical_system_for("line_likelihood");
        const VectorXc u = real_vector({3.0, 5.0});
        const auto run = testing::solve_fiber(cs, u, 2);
        Rng rng(3);
        const auto res = certify_fiber(cs, u, run.monodromy.solutions, {}, {}, rng);
        CHECK(res.report.passed);
        CHECK(res.fiber.size() == 1);
        CHECK(res.report.on_l2_count == 1);
    }
}
