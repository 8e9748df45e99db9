#include <doctest.h>

#include <random>

#include "critfiber/polynomial.hpp"

using namespace critfiber;

namespace {

Polynomial random_polynomial(std::size_t nvars, Rng& rng) {
    std::uniform_int_distribution<int> nterms(1, 8);
    std::uniform_int_distribution<std::uint32_t> expo(0, 4);
    std::vector<Term> terms;
    const int count = nterms(rng);
    for (int i = 0; i < count; ++i) {
        Exponents e(nvars);
        for (auto& v : e) v = expo(rng);
        terms.push_back({e, complex_gaussian(rng)});
    }
    return Polynomial(nvars, std::move(terms));
}

std::vector<Complex> random_point(std::size_t n, Rng& rng) {
    std::vector<Complex> p(n);
    for (auto& v : p) v = complex_gaussian(rng);
    return p;
}

}  // namespace

TEST_SUITE("polynomial") {
    TEST_CASE("canonical form merges and drops terms") {
        const auto x = Polynomial::variable(2, 0);
        const auto y = Polynomial::variable(2, 1);
        CHECK((x + x) == x * Complex(2.0));
        CHECK((x - x).is_zero());
        const Polynomial p(2, {{{1, 0}, 1.0}, {{1, 0}, -1.0}, {{0, 0}, 3.0}});
        CHECK(p.is_constant());
        CHECK(p.constant_term() == Complex(3.0));
        CHECK((x * y - y * x).is_zero());
    }

    TEST_CASE("grlex order puts higher degree first") {
        CHECK(grlex_before({2, 0}, {1, 0}));
        CHECK(grlex_before({1, 1}, {0, 1}));
        CHECK(grlex_before({2, 0}, {1, 1}));
        CHECK_FALSE(grlex_before({1, 1}, {2, 0}));
        const auto x = Polynomial::variable(2, 0);
        const auto y = Polynomial::variable(2, 1);
        const auto p = y + x * x + Polynomial::constant(2, 1.0) + x * y;
        REQUIRE(p.terms().size() == 4);
        CHECK(p.terms()[0].exponents == Exponents{2, 0});
        CHECK(p.terms()[1].exponents == Exponents{1, 1});
        CHECK(p.terms()[2].exponents == Exponents{0, 1});
        CHECK(p.terms()[3].exponents == Exponents{0, 0});
    }

    TEST_CASE("evaluation and degrees") {
        const auto x = Polynomial::variable(2, 0);
        const auto y = Polynomial::variable(2, 1);
        const auto p = x.pow(3) * Complex(2.0) - x * y + Polynomial::constant(2, Complex(0.0, 1.0));
        const std::vector<Complex> pt{Complex(1.0, 1.0), Complex(-2.0, 0.5)};
        const Complex expect = 2.0 * std::pow(pt[0], 3) - pt[0] * pt[1] + Complex(0.0, 1.0);
        CHECK(std::abs(evaluate(p, pt) - expect) < 1e-13);
        CHECK(p.degree() == 3);
        CHECK(p.degree_in(1) == 1);
        CHECK(p.depends_on(1));
        CHECK(p.max_abs_coefficient() == doctest::Approx(2.0));
        CHECK_THROWS_AS(evaluate(p, std::vector<Complex>{1.0}), DimensionError);
    }

    TEST_CASE("differentiation of a known polynomial") {
        const auto x = Polynomial::variable(2, 0);
        const auto y = Polynomial::variable(2, 1);
        const auto p = x.pow(3) * y * y + x * Complex(5.0);
        CHECK(differentiate(p, 0) == x * x * y * y * Complex(3.0) + Polynomial::constant(2, 5.0));
        CHECK(differentiate(p, 1) == x.pow(3) * y * Complex(2.0));
        CHECK(differentiate(Polynomial::constant(2, 4.0), 0).is_zero());
    }

    TEST_CASE("finite differences agree with derivatives on 100 random polynomials") {
        Rng rng(11);
        const double h = 1e-6;
        int checked = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
            const auto p = random_polynomial(n, rng);
            const auto pt = random_point(n, rng);
            for (std::size_t s = 0; s < n; ++s) {
                auto plus = pt;
                auto minus = pt;
                plus[s] += h;
                minus[s] -= h;
                const Complex fd = (evaluate(p, plus) - evaluate(p, minus)) / (2.0 * h);
                const Complex exact = evaluate(differentiate(p, s), pt);
                CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
                ++checked;
            }
        }
        CHECK(checked == 250);
    }

    TEST_CASE("compiled system Jacobians match symbolic derivatives") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Polynomial> polys;
            for (int i = 0; i < 3; ++i) polys.push_back(random_polynomial(4, rng));
            const PolySystem sys(polys, {"a", "b", "c", "p"}, {0, 1, 2}, {3});
            const auto z = random_point(3, rng);
            const auto q = random_point(1, rng);
            VectorXc f(3);
            MatrixXc ju(3, 3);
            MatrixXc jp(3, 1);
            sys.evaluate(z, q, f, &ju, &jp);
            const auto full = sys.assemble(z, q);
            for (int i = 0; i < 3; ++i) {
                CHECK(std::abs(f(i) - evaluate(polys[i], full)) < 1e-9 * (1.0 + std::abs(f(i))));
                for (int j = 0; j < 3; ++j) {
                    const Complex d = evaluate(differentiate(polys[i], j), full);
                    CHECK(std::abs(ju(i, j) - d) < 1e-9 * (1.0 + std::abs(d)));
                }
                const Complex dp = evaluate(differentiate(polys[i], 3), full);
                CHECK(std::abs(jp(i, 0) - dp) < 1e-9 * (1.0 + std::abs(dp)));
            }
            // jacobian_eval is the transpose.
            const MatrixXc jt = jacobian_eval(sys, z, q);
            CHECK((jt - ju.transpose()).norm() < 1e-12 * (1.0 + ju.norm()));
        }
    }

    TEST_CASE("embed and substitute") {
        const auto x = Polynomial::variable(2, 0);
        const auto y = Polynomial::variable(2, 1);
        const auto p = x * x + y;
        const std::vector<std::size_t> map{2, 0};
        const auto e = p.embed(3, map);
        CHECK(e.num_vars() == 3);
        const std::vector<Complex> pt{4.0, 0.0, 3.0};
        CHECK(evaluate(e, pt) == Complex(13.0));
        const std::vector<std::size_t> slots{1};
        const std::vector<Complex> vals{Complex(2.0)};
        const auto s = p.substitute(slots, vals);
        CHECK(s == x * x + Polynomial::constant(2, 2.0));
    }

    TEST_CASE("binding parameters keeps values") {
        const auto x = Polynomial::variable(2, 0);
        const auto u = Polynomial::variable(2, 1);
        const PolySystem sys({x * x - u}, {"x", "u"}, {0}, {1});
        const std::vector<Complex> q{Complex(9.0)};
        const auto bound = sys.bind_parameters(q);
        CHECK(bound.num_parameters() == 0);
        CHECK(bound.is_square());
        const std::vector<Complex> z{Complex(3.0)};
        CHECK(std::abs(bound.values(z, {})(0)) < 1e-14);
    }
}
