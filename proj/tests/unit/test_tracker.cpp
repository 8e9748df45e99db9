#include <doctest.h>

#include "critfiber/tracker.hpp"

using namespace critfiber;

namespace {

// x^d - u, unknown x, parameter u.
std::shared_ptr<const PolySystem> root_system(std::uint32_t d) {
    const auto x = Polynomial::variable(2, 0);
    const auto u = Polynomial::variable(2, 1);
    return std::make_shared<const PolySystem>(std::vector<Polynomial>{x.pow(d) - u},
                                              std::vector<std::string>{"x", "u"}, std::vector<std::size_t>{0},
                                              std::vector<std::size_t>{1});
}

VectorXc scalar(Complex c) { return VectorXc::Constant(1, c); }

}  // namespace

TEST_SUITE("tracker") {
    TEST_CASE("config validation") {
        TrackerConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.min_step = 0.5;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.newton_tol = -1.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.retries = -1;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = {};
        cfg.retry_tol_factor = 0.5;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }

    TEST_CASE("square root path") {
        const Homotopy h(root_system(2), scalar(1.0), scalar(4.0));
        const auto r = track(h, as_span(scalar(1.0)));
        REQUIRE(r.ok());
        CHECK(std::abs(r.endpoint(0) - 2.0) < 1e-10);
        CHECK(r.t_reached == 1.0);
        CHECK(r.residual < 1e-10);
        CHECK(r.steps_taken > 0);
    }

    TEST_CASE("cube roots move continuously to a complex target") {
        const Complex target(0.0, 8.0);
        for (int k = 0; k < 3; ++k) {
            const Complex start = std::polar(1.0, 2.0 * 3.14159265358979323846 * k / 3.0);
            const Homotopy h(root_system(3), scalar(1.0), scalar(target));
            const auto r = track(h, as_span(scalar(start)));
            REQUIRE(r.ok());
            CHECK(std::abs(std::pow(r.endpoint(0), 3) - target) < 1e-9);
        }
    }

    TEST_CASE("track_many keeps order and matches threaded runs") {
        const Homotopy h(root_system(4), scalar(1.0), scalar(Complex(2.0, 3.0)));
        std::vector<VectorXc> starts;
        for (const Complex s : {Complex(1.0), Complex(-1.0), Complex(0.0, 1.0), Complex(0.0, -1.0)}) {
            starts.push_back(scalar(s));
        }
        TrackerConfig single;
        TrackerConfig multi;
        multi.threads = 4;
        const auto a = track_many(h, starts, single);
        const auto b = track_many(h, starts, multi);
        REQUIRE(a.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(a[i].ok());
            REQUIRE(b[i].ok());
            CHECK(std::abs(a[i].endpoint(0) - b[i].endpoint(0)) < 1e-14);
        }
        // Four distinct fourth roots.
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) CHECK(std::abs(a[i].endpoint(0) - a[j].endpoint(0)) > 0.1);
        }
    }

    TEST_CASE("a root escaping to infinity is not reported as success") {
        // u x - 1 = 0: x = 1 / u diverges as u -> 0.
        const auto x = Polynomial::variable(2, 0);
        const auto u = Polynomial::variable(2, 1);
        auto sys = std::make_shared<const PolySystem>(
            std::vector<Polynomial>{u * x - Polynomial::constant(2, 1.0)}, std::vector<std::string>{"x", "u"},
            std::vector<std::size_t>{0}, std::vector<std::size_t>{1});
        const auto r = track(Homotopy(sys, scalar(1.0), scalar(0.0)), as_span(scalar(1.0)));
        CHECK_FALSE(r.ok());
        CHECK(r.t_reached < 1.0);
    }

    TEST_CASE("start point off the system is rejected") {
        const Homotopy h(root_system(2), scalar(1.0), scalar(4.0));
        const auto r = track(h, as_span(scalar(3.0)));
        CHECK(r.status == PathStatus::InvalidStart);
    }

    TEST_CASE("consecutive segments") {
        const std::vector<PathSegment> segs{{scalar(1.0), scalar(Complex(0.0, 2.0))},
                                            {scalar(Complex(0.0, 2.0)), scalar(9.0)}};
        const auto r = track_segments(root_system(2), segs, as_span(scalar(1.0)));
        REQUIRE(r.ok());
        CHECK(std::abs(std::abs(r.endpoint(0)) - 3.0) < 1e-10);
    }

    TEST_CASE("newton refinement and residual") {
        const auto sys = root_system(2);
        const VectorXc u = scalar(2.0);
        const auto r = newton_refine(*sys, as_span(u), scalar(1.5), 1e-14, 10);
        CHECK(r.converged);
        CHECK(std::abs(r.point(0) - std::sqrt(2.0)) < 1e-14);
        CHECK(residual(*sys, as_span(u), scalar(1.0)) == doctest::Approx(1.0));
    }
}
