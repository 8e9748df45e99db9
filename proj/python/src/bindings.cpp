#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "critfiber/driver.hpp"

namespace py = pybind11;

namespace {

critfiber::VectorXc to_vector(const std::vector<std::complex<double>>& values) {
    return critfiber::to_vector(values);
}

std::string run_json(const std::string& command, const std::optional<std::string>& problem_path,
                     const std::optional<std::string>& problem_text,
                     const std::optional<std::vector<std::complex<double>>>& u, std::uint64_t seed,
                     std::optional<std::size_t> bound, bool certify, unsigned threads,
                     std::optional<double> tol_endpoint, std::optional<double> tol_dedup, int max_loops, int stall,
                     const std::optional<std::vector<std::vector<std::complex<double>>>>& fiber) {
    critfiber::RunRequest req;
    req.command = critfiber::command_from_string(command);
    if (problem_path) req.problem_path = *problem_path;
    req.problem_text = problem_text;
    if (!problem_path && !problem_text) throw std::invalid_argument("give a problem path or problem text");
    if (u) req.u_point = to_vector(*u);
    req.rng_seed = seed;
    req.solution_bound = bound;
    req.certify = certify;
    req.tracker.threads = threads;
    if (tol_endpoint) req.tracker.endpoint_tol = *tol_endpoint;
    if (tol_dedup) req.monodromy.dedup_tol = *tol_dedup;
    req.monodromy.max_loops = max_loops;
    req.monodromy.stall_limit = stall;
    if (fiber) {
        for (const auto& x : *fiber) req.fiber_x.push_back(to_vector(x));
    }
    critfiber::RunReport report;
    try {
        py::gil_scoped_release release;
        report = critfiber::run(req);
    } catch (const critfiber::RunError& e) {
        // Failures with an exit code come back as data; the Python layer raises.
        return nlohmann::json{{"error", e.what()}, {"exit_code", e.code()}}.dump();
    }
    auto j = critfiber::to_json(report);
    j["exit_code"] = critfiber::exit_code(report);
    return j.dump();
}

std::string normalize_problem(const std::string& text) {
    return critfiber::format_problem(critfiber::parse_problem(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Critical points of distance and likelihood objectives by monodromy";

    py::register_exception<critfiber::ParseError>(m, "ParseError", PyExc_ValueError);

    m.attr("DEFAULT_SEED") = critfiber::kDefaultSeed;

    m.def("run_json", &run_json, "Run one command and return the JSON report as a string", py::arg("command"),
          py::arg("problem_path") = py::none(), py::arg("problem_text") = py::none(), py::arg("u") = py::none(),
          py::arg("seed") = critfiber::kDefaultSeed, py::arg("bound") = py::none(), py::arg("certify") = false,
          py::arg("threads") = 1u, py::arg("tol_endpoint") = py::none(), py::arg("tol_dedup") = py::none(),
          py::arg("max_loops") = 100, py::arg("stall") = 15, py::arg("fiber") = py::none());
    m.def("normalize_problem", &normalize_problem, "Parse problem text and print it in canonical form",
          py::arg("text"));
}
