#include "critfiber/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace critfiber {

std::string to_string(Command c) {
    switch (c) {
        case Command::Solve: return "solve";
        case Command::Degree: return "degree";
        case Command::TraceCheck: return "trace-check";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    if (name == "solve") return Command::Solve;
    if (name == "degree") return Command::Degree;
    if (name == "trace-check") return Command::TraceCheck;
    throw std::invalid_argument("unknown command '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

Problem load(const RunRequest& req) {
    try {
        return req.problem_text ? parse_problem(*req.problem_text) : load_problem(req.problem_path);
    } catch (const ParseError& e) {
        throw RunError(kExitParse, e.what());
    } catch (const std::runtime_error& e) {
        throw RunError(kExitParse, e.what());
    }
}

double max_model_coefficient(const Model& model) {
    double m = 0.0;
    for (const auto& p : model.original.polynomials()) m = std::max(m, p.max_abs_coefficient());
    return m;
}

// Likelihood data are counts, so the likelihood kind draws |N(0, 1)|.
VectorXc random_real_u(std::size_t n, double scale, ObjectiveKind kind, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXc u(static_cast<Eigen::Index>(n));
    for (auto& v : u) {
        const double g = normal(rng);
        v = scale * (kind == ObjectiveKind::Likelihood ? std::abs(g) : g);
    }
    return u;
}

// Least-squares multipliers for a given x, then Newton on the full system.
std::optional<VectorXc> lift_to_fiber(const CriticalSystem& cs, const VectorXc& x, const VectorXc& u) {
    const auto n = static_cast<Eigen::Index>(cs.n());
    const auto k = static_cast<Eigen::Index>(cs.k());
    VectorXc z0 = cs.join(x, VectorXc::Zero(k));
    VectorXc f(cs.system->size());
    MatrixXc jac(cs.system->size(), n + k);
    cs.system->evaluate(as_span(z0), as_span(u), f, &jac, nullptr);
    // Rows k.. are affine in lambda: F(z0) + J_lambda * lambda.
    const MatrixXc a = jac.block(k, n, n, k);
    const VectorXc b = -f.tail(n);
    const VectorXc lambda = a.colPivHouseholderQr().solve(b);
    const auto refined = newton_refine(*cs.system, as_span(u), cs.join(x, lambda), 1e-13, 8);
    if (!refined.point.allFinite() || refined.residual > 1e-8 * (1.0 + inf_norm(refined.point))) return std::nullopt;
    // Newton may wander to some other critical point from a bad x.
    if (inf_norm(cs.x_of(refined.point) - x) > 1e-6 * (1.0 + inf_norm(x))) return std::nullopt;
    return refined.point;
}

ReportedPoint report_point(const CriticalSystem& cs, const VectorXc& z, const VectorXc& u) {
    ReportedPoint p;
    VectorXc zz = z;
    const auto n = static_cast<Eigen::Index>(cs.n());
    const bool u_real = inf_norm(VectorXc(u.imag().cast<Complex>())) == 0.0;
    const double imag_x = zz.head(n).imag().cwiseAbs().maxCoeff();
    p.real = u_real && imag_x <= 1e-6;
    if (p.real) {
        VectorXc start = zz;
        start.head(n) = VectorXc(zz.head(n).real().cast<Complex>());
        const auto polished = newton_refine(*cs.system, as_span(u), start, 1e-14, 8);
        if (polished.point.allFinite() && polished.point.head(n).imag().cwiseAbs().maxCoeff() <= 1e-6) {
            zz = polished.point;
            zz.head(n) = VectorXc(zz.head(n).real().cast<Complex>());
        }
    }
    p.x = cs.x_of(zz);
    p.lambda = cs.model_lambda(zz);
    if (p.real) {
        for (auto& l : p.lambda) {
            if (std::abs(l.imag()) <= 1e-9 * (1.0 + std::abs(l))) l = l.real();
        }
    }
    p.residual = cs.residual(zz, u);
    p.psi = cs.objective.value(p.x, u);
    return p;
}

nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

nlohmann::json vector_json(const VectorXc& v) {
    auto arr = nlohmann::json::array();
    for (const auto& c : v) arr.push_back(complex_json(c));
    return arr;
}

VectorXc vector_from_json(const nlohmann::json& j) {
    VectorXc v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        v(static_cast<Eigen::Index>(i)) =
            e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>()) : Complex(e.get<double>(), 0.0);
    }
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(Complex c) {
    if (c.imag() == 0.0) return fmt(c.real());
    return fmt(c.real()) + (c.imag() < 0 ? " - " : " + ") + fmt(std::abs(c.imag())) + "i";
}

std::string fmt(const VectorXc& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
    return s + ")";
}

}  // namespace

void sort_points(std::vector<ReportedPoint>& points, ObjectiveKind kind) {
    const double sign = kind == ObjectiveKind::Likelihood ? -1.0 : 1.0;
    std::stable_sort(points.begin(), points.end(), [sign](const ReportedPoint& a, const ReportedPoint& b) {
        if (a.real != b.real) return a.real;
        return sign * a.psi.real() < sign * b.psi.real();
    });
}

void read_fiber_json(const nlohmann::json& doc, std::vector<VectorXc>& fiber_x, VectorXc& u) {
    u = vector_from_json(doc.at("u"));
    fiber_x.clear();
    for (const auto& p : doc.at("points")) fiber_x.push_back(vector_from_json(p.at("x")));
}

RunReport run(const RunRequest& req) {
    const auto started = Clock::now();
    req.tracker.validate();
    const Problem problem = load(req);
    if (!problem.objective) throw RunError(kExitParse, "problem file declares no objective");

    RunReport report;
    report.command = req.command;
    report.objective = *problem.objective;
    report.seed = req.rng_seed;

    Rng rng(req.rng_seed);
    Model model;
    try {
        model = model_from_problem(problem, rng);
    } catch (const std::exception& e) {
        throw RunError(kExitParse, e.what());
    }
    const auto n = model.ambient_dimension();
    const Objective objective{*problem.objective, n};
    const CriticalSystem cs = build_critical_system(model, objective);

    if (req.u_point) {
        if (static_cast<std::size_t>(req.u_point->size()) != n) {
            throw RunError(kExitParse, "u has " + std::to_string(req.u_point->size()) + " entries, expected " +
                                           std::to_string(n));
        }
        report.u = *req.u_point;
    } else if (req.command == Command::TraceCheck) {
        throw RunError(kExitParse, "trace-check needs the fiber's u");
    } else {
        report.u = random_real_u(n, 1.0 + max_model_coefficient(model), objective.kind, rng);
    }
    const VectorXc& u = report.u;

    MonodromyConfig mcfg = req.monodromy;
    if (req.solution_bound) mcfg.solution_bound = req.solution_bound;
    mcfg.rng_seed = rng();

    SolutionSet fiber(mcfg.dedup_tol);
    if (req.command == Command::TraceCheck) {
        for (const auto& x : req.fiber_x) {
            if (static_cast<std::size_t>(x.size()) != n) throw RunError(kExitParse, "fiber point has wrong dimension");
            auto z = lift_to_fiber(cs, x, u);
            if (!z) throw RunError(kExitParse, "supplied point " + fmt(x) + " is not a critical point over u");
            fiber.insert(*z, cs.residual(*z, u));
        }
        if (fiber.empty()) throw RunError(kExitParse, "trace-check needs at least one fiber point");
        report.termination_reason = "supplied";
    } else {
        SeedResult seed;
        try {
            seed = find_seed(cs, u, rng, req.tracker);
        } catch (const SeedingError& e) {
            throw RunError(kExitSeeding, e.what());
        }
        report.seed_perturbed = seed.perturbed;
        auto collected = collect_fiber(cs, seed, mcfg, req.tracker);
        fiber = std::move(collected.solutions);
        report.diagnostics = collected.diagnostics;
        report.loops_used = collected.diagnostics.loops_run;
        report.termination_reason = to_string(collected.diagnostics.termination);
    }

    if (req.certify || req.command == Command::TraceCheck) {
        MonodromyConfig trace_cfg = mcfg;
        trace_cfg.solution_bound.reset();
        CertifyResult cert;
        try {
            cert = certify_fiber(cs, u, fiber, trace_cfg, req.tracker, rng);
        } catch (const DegenerateSliceError& e) {
            throw RunError(kExitInconclusiveTrace, e.what());
        }
        report.loops_used += cert.loops_used;
        report.fiber_additions = cert.fiber_additions;
        fiber = std::move(cert.fiber);
        report.trace = cert.report;
    }

    for (const auto& p : fiber) report.points.push_back(report_point(cs, p.z, u));
    sort_points(report.points, objective.kind);
    report.degree = report.points.size();
    report.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
    return report;
}

int exit_code(const RunReport& report) {
    if (report.trace) {
        if (report.trace->status != TraceStatus::Passed) return kExitInconclusiveTrace;
        return kExitOk;
    }
    if (report.command != Command::TraceCheck && report.termination_reason == to_string(Termination::MaxLoops)) {
        return kExitBudget;
    }
    return kExitOk;
}

nlohmann::json to_json(const RunReport& report) {
    nlohmann::json j;
    j["command"] = to_string(report.command);
    j["objective"] = to_string(report.objective);
    j["degree"] = report.degree;
    auto pts = nlohmann::json::array();
    for (const auto& p : report.points) {
        pts.push_back({{"x", vector_json(p.x)},
                       {"lambda", vector_json(p.lambda)},
                       {"residual", p.residual},
                       {"real", p.real},
                       {"psi", complex_json(p.psi)}});
    }
    j["points"] = std::move(pts);
    j["loops_used"] = report.loops_used;
    if (report.trace) {
        const auto& t = *report.trace;
        auto traces = nlohmann::json::array();
        for (const auto& tr : t.traces) traces.push_back(vector_json(tr));
        auto tv = nlohmann::json::array();
        for (const auto& c : t.t_values) tv.push_back(complex_json(c));
        j["trace"] = {{"traces", traces},
                      {"second_difference", vector_json(t.second_difference)},
                      {"max_abs", t.max_abs},
                      {"tolerance", t.tolerance},
                      {"passed", t.passed},
                      {"status", to_string(t.status)},
                      {"curve_point_count", t.curve_point_count},
                      {"on_l2_count", t.on_l2_count},
                      {"path_failures", t.path_failures},
                      {"t_values", tv}};
    } else {
        j["trace"] = nullptr;
    }
    j["seed"] = report.seed;
    j["termination_reason"] = report.termination_reason;
    j["u"] = vector_json(report.u);
    j["diagnostics"] = {{"new_points_per_loop", report.diagnostics.new_points_per_loop},
                        {"path_failures", report.diagnostics.path_failures},
                        {"unresolved_collisions", report.diagnostics.unresolved_collisions},
                        {"seed_perturbed", report.seed_perturbed},
                        {"fiber_additions", report.fiber_additions}};
    j["wall_time"] = report.wall_time;
    return j;
}

std::string to_text(const RunReport& report) {
    std::ostringstream out;
    const char* what = report.objective == ObjectiveKind::Euclidean ? "ED" : "ML";
    out << what << " degree: " << report.degree << "\n";
    out << "u: " << fmt(report.u) << "\n";
    if (report.command != Command::Degree) {
        std::size_t idx = 0;
        for (const auto& p : report.points) {
            out << "[" << ++idx << "] " << (p.real ? "real   " : "complex") << " x = " << fmt(p.x)
                << "  lambda = " << fmt(p.lambda) << "  psi = " << fmt(p.psi) << "  residual = " << fmt(p.residual)
                << "\n";
        }
    }
    out << "loops: " << report.loops_used << " (" << report.termination_reason << ")\n";
    if (report.trace) {
        const auto& t = *report.trace;
        out << "trace test: " << to_string(t.status) << ", max |second difference| = " << fmt(t.max_abs)
            << " (tolerance " << fmt(t.tolerance) << "), curve points " << t.curve_point_count << ", on l2 "
            << t.on_l2_count << "\n";
    }
    out << "seed: " << report.seed << ", time: " << fmt(report.wall_time) << " s\n";
    return out.str();
}

}  // namespace critfiber
