#include "critfiber/trace_test.hpp"

#include <algorithm>
#include <cmath>

namespace critfiber {

void TraceSetup::validate() const {
    const auto n = u0.size();
    if (n < 1) throw std::invalid_argument("trace setup needs a base point");
    if (slice_u.rows() != n - 1 || slice_u.cols() != n) throw DimensionError("slice_u must be (n - 1) x n");
    if (l1.size() != n || l2.size() != n) throw DimensionError("l1 and l2 need n coefficients");
    const Complex d1 = t_values[1] - t_values[0];
    const Complex d2 = t_values[2] - t_values[1];
    if (std::abs(d1 - d2) > 1e-12 * (1.0 + std::abs(d1))) throw std::invalid_argument("t values must be equally spaced");
    if (std::abs(d1) == 0.0) throw std::invalid_argument("t values must be distinct");
}

std::array<Complex, 3> random_t_values(Rng& rng) {
    const Complex s = 0.1 * random_unit_complex(rng);
    return {Complex(0.0), s, 2.0 * s};
}

TraceSetup random_trace_setup(const VectorXc& u0, Rng& rng) {
    const auto n = u0.size();
    TraceSetup setup;
    setup.u0 = u0;
    setup.slice_u.resize(n - 1, n);
    for (Eigen::Index r = 0; r < n - 1; ++r) setup.slice_u.row(r) = random_complex_vector(n, rng).transpose();
    setup.l1 = random_complex_vector(n, rng);
    setup.l1_constant = complex_gaussian(rng);
    setup.l2 = random_complex_vector(n, rng);
    setup.t_values = random_t_values(rng);
    return setup;
}

VectorXc TraceCurve::extend(const VectorXc& fiber_point) const {
    VectorXc z(static_cast<Eigen::Index>(2 * n + k));
    z << fiber_point, setup.u0;
    return z;
}

std::vector<std::size_t> TraceCurve::trace_coordinates() const {
    std::vector<std::size_t> coords;
    for (std::size_t i = 0; i < n; ++i) coords.push_back(i);
    for (std::size_t i = 0; i < n; ++i) coords.push_back(n + k + i);
    return coords;
}

bool TraceCurve::on_l2(const VectorXc& z) const {
    return std::abs(setup.l2_at(u_of(z))) <= 1e-8 && std::abs(setup.l1_at(x_of(z))) > 1e-4;
}

TraceCurve build_trace_curve(const CriticalSystem& cs, const TraceSetup& setup,
                             const std::optional<VectorXc>& fiber_point) {
    setup.validate();
    const auto n = cs.n();
    const auto k = cs.k();
    if (static_cast<std::size_t>(setup.u0.size()) != n) throw DimensionError("trace setup dimension mismatch");

    const auto& base = *cs.system;
    const std::size_t slots = base.num_slots() + 1;
    const std::size_t t_slot = slots - 1;
    std::vector<std::size_t> id(base.num_slots());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;

    auto x = [&](std::size_t i) { return Polynomial::variable(slots, i); };
    auto u = [&](std::size_t i) { return Polynomial::variable(slots, n + k + i); };

    std::vector<Polynomial> eqs;
    for (Eigen::Index r = 0; r < setup.slice_u.rows(); ++r) {
        Polynomial row(slots);
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            row += setup.slice_u(r, ii) * (u(i) - Polynomial::constant(slots, setup.u0(ii)));
        }
        eqs.push_back(std::move(row));
    }
    Polynomial l1 = Polynomial::constant(slots, setup.l1_constant);
    Polynomial l2(slots);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        l1 += setup.l1(ii) * x(i);
        l2 += setup.l2(ii) * (u(i) - Polynomial::constant(slots, setup.u0(ii)));
    }
    eqs.push_back(l1 * l2 + Polynomial::variable(slots, t_slot));
    for (const auto& p : base.polynomials()) eqs.push_back(p.embed(slots, id));

    auto names = base.variable_names();
    names.push_back("t");
    std::vector<std::size_t> unknowns(2 * n + k);
    for (std::size_t i = 0; i < unknowns.size(); ++i) unknowns[i] = i;

    TraceCurve curve;
    curve.system = std::make_shared<const PolySystem>(std::move(eqs), std::move(names), std::move(unknowns),
                                                      std::vector<std::size_t>{t_slot});
    curve.setup = setup;
    curve.n = n;
    curve.k = k;

    if (fiber_point) {
        const VectorXc z = curve.extend(*fiber_point);
        const VectorXc t0 = VectorXc::Constant(1, setup.t_values[0]);
        const MatrixXc jac = jacobian_eval(*curve.system, as_span(z), as_span(t0));
        Eigen::JacobiSVD<MatrixXc> svd(jac);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 1e-10 * std::max(1.0, s(0))) {
            throw DegenerateSliceError("trace curve is singular at the fiber point");
        }
    }
    return curve;
}

std::string to_string(TraceStatus s) {
    switch (s) {
        case TraceStatus::Passed: return "passed";
        case TraceStatus::Failed: return "failed";
        case TraceStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

TraceReport trace_test(const std::shared_ptr<const PolySystem>& curve, const std::vector<VectorXc>& points,
                       const std::array<Complex, 3>& t_values, const std::vector<std::size_t>& coords,
                       const TrackerConfig& tcfg) {
    TraceReport report;
    report.t_values = t_values;
    report.curve_point_count = points.size();
    const auto m = static_cast<Eigen::Index>(coords.size());
    for (auto& tr : report.traces) tr = VectorXc::Zero(m);

    auto accumulate = [&](VectorXc& trace, const VectorXc& z) {
        for (Eigen::Index c = 0; c < m; ++c) trace(c) += z(static_cast<Eigen::Index>(coords[c]));
    };
    for (const auto& z : points) accumulate(report.traces[0], z);

    auto param = [](Complex t) { return VectorXc::Constant(1, t); };
    const std::vector<PathSegment> first{{param(t_values[0]), param(t_values[1])}};
    const std::vector<PathSegment> second{{param(t_values[1]), param(t_values[2])}};
    const auto at1 = transport(curve, first, points, tcfg);
    std::vector<VectorXc> mid;
    for (const auto& z : at1) {
        if (z) mid.push_back(*z);
    }
    const auto at2 = transport(curve, second, mid, tcfg);
    report.path_failures = (points.size() - mid.size());
    for (const auto& z : mid) accumulate(report.traces[1], z);
    for (const auto& z : at2) {
        if (z) {
            accumulate(report.traces[2], *z);
        } else {
            ++report.path_failures;
        }
    }

    report.second_difference = (report.traces[0] - report.traces[1]) - (report.traces[1] - report.traces[2]);
    report.max_abs = inf_norm(report.second_difference);
    double scale = 0.0;
    for (const auto& tr : report.traces) scale = std::max(scale, inf_norm(tr));
    report.tolerance = 1e-8 * (1.0 + scale);
    if (report.path_failures > 0) {
        report.status = TraceStatus::Inconclusive;
    } else {
        report.passed = report.max_abs <= report.tolerance;
        report.status = report.passed ? TraceStatus::Passed : TraceStatus::Failed;
    }
    return report;
}

TraceReport trace_test(const TraceCurve& curve, const SolutionSet& points, const TrackerConfig& tcfg) {
    auto report = trace_test(curve.system, points.vectors(), curve.setup.t_values, curve.trace_coordinates(), tcfg);
    for (const auto& p : points) {
        if (curve.on_l2(p.z)) ++report.on_l2_count;
    }
    return report;
}

MonodromyResult collect_curve_points(const TraceCurve& curve, const SolutionSet& starts,
                                     const MonodromyConfig& mcfg, const TrackerConfig& tcfg, Rng& rng) {
    const VectorXc t0 = VectorXc::Constant(1, curve.setup.t_values[0]);
    return monodromy_collect(curve.system, t0, starts, mcfg, tcfg, rng);
}

namespace {

// Branch points of the sliced curve in the t-plane sit well outside the unit
// disk; radius 1 loops rarely enclose them. Each stalled round widens the
// loops, since likelihood curves have branch points at large |t|.
constexpr double kCurveLoopScale = 10.0;
constexpr double kCurveLoopGrowth = 10.0;
constexpr double kMaxCurveLoopScale = 1e4;

}  // namespace

CertifyResult certify_fiber(const CriticalSystem& cs, const VectorXc& u0, const SolutionSet& fiber,
                            const MonodromyConfig& mcfg, const TrackerConfig& tcfg, Rng& rng,
                            const std::optional<TraceSetup>& setup) {
    mcfg.validate();
    if (fiber.empty()) throw std::invalid_argument("certify_fiber needs a nonempty fiber");
    auto curve = build_trace_curve(cs, setup ? *setup : random_trace_setup(u0, rng), fiber[0].z);

    CertifyResult out;
    out.fiber = fiber;
    out.curve_points = SolutionSet(mcfg.dedup_tol);
    for (const auto& p : fiber) out.curve_points.insert(curve.extend(p.z), p.residual);

    double scale = kCurveLoopScale;
    while (true) {
        MonodromyConfig cm = mcfg;
        cm.solution_bound.reset();
        cm.loop_scale = scale;
        cm.max_loops = std::max(1, mcfg.max_loops - out.loops_used);
        if (out.loops_used < mcfg.max_loops) {
            auto res = collect_curve_points(curve, out.curve_points, cm, tcfg, rng);
            out.loops_used += res.diagnostics.loops_run;
            out.curve_points = std::move(res.solutions);
        }
        out.report = trace_test(curve, out.curve_points, tcfg);
        // A lost path says nothing about completeness; retry along other t directions.
        for (int retry = 0; retry < 3 && out.report.status == TraceStatus::Inconclusive; ++retry) {
            curve.setup.t_values = random_t_values(rng);
            out.report = trace_test(curve, out.curve_points, tcfg);
        }
        if (out.report.passed) break;
        scale = std::min(scale * kCurveLoopGrowth, kMaxCurveLoopScale);
        if (out.loops_used >= mcfg.max_loops) {
            out.report.status = TraceStatus::Inconclusive;
            break;
        }
    }

    for (const auto& p : out.curve_points) {
        if (!curve.on_l2(p.z)) continue;
        VectorXc z(static_cast<Eigen::Index>(cs.n() + cs.k()));
        z << curve.x_of(p.z), curve.lambda_of(p.z);
        if (merge_point(*cs.system, u0, out.fiber, z) > 0) ++out.fiber_additions;
    }
    return out;
}

}  // namespace critfiber
