#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "critfiber/driver.hpp"

namespace {

critfiber::VectorXc parse_u(const std::string& text) {
    std::vector<std::string> names;
    std::vector<critfiber::Complex> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // Each entry may be any constant expression, e.g. 2/5 or 1+2*I.
        const auto p = critfiber::parse_expression(item, names);
        values.push_back(p.constant_term());
    }
    return critfiber::to_vector(values);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical points of distance and likelihood objectives on algebraic varieties"};
    app.require_subcommand(1);

    critfiber::RunRequest req;
    std::string u_text;
    std::string fiber_path;
    std::size_t bound = 0;
    bool json = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("problem", req.problem_path, "Problem file")->required()->check(CLI::ExistingFile);
        sub->add_option("--u", u_text, "Data point as comma-separated values");
        sub->add_option("--seed", req.rng_seed, "Random seed");
        sub->add_option("--bound", bound, "Stop monodromy at this many points");
        sub->add_flag("--certify", req.certify, "Run the trace test");
        sub->add_flag("--json", json, "JSON output");
        sub->add_option("--threads", req.tracker.threads, "Worker threads for path tracking (0 = all cores)");
        sub->add_option("--tol-endpoint", req.tracker.endpoint_tol, "Endpoint Newton tolerance");
        sub->add_option("--tol-dedup", req.monodromy.dedup_tol, "Deduplication tolerance");
        sub->add_option("--max-loops", req.monodromy.max_loops, "Monodromy loop budget");
        sub->add_option("--stall", req.monodromy.stall_limit, "Loops without new points before stopping");
    };
    auto* solve = app.add_subcommand("solve", "Compute all critical points");
    auto* degree = app.add_subcommand("degree", "Report the number of critical points");
    auto* trace = app.add_subcommand("trace-check", "Run the trace test on a fiber written by solve --json");
    add_common(solve);
    add_common(degree);
    add_common(trace);
    trace->add_option("--fiber", fiber_path, "JSON output of solve")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : critfiber::kExitParse;
    }

    try {
        if (solve->parsed()) req.command = critfiber::Command::Solve;
        if (degree->parsed()) req.command = critfiber::Command::Degree;
        if (trace->parsed()) req.command = critfiber::Command::TraceCheck;
        if (bound > 0) req.solution_bound = bound;
        if (!u_text.empty()) req.u_point = parse_u(u_text);
        if (req.command == critfiber::Command::TraceCheck) {
            std::ifstream in(fiber_path);
            const auto doc = nlohmann::json::parse(in);
            critfiber::VectorXc u;
            critfiber::read_fiber_json(doc, req.fiber_x, u);
            if (!req.u_point) req.u_point = u;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return critfiber::kExitParse;
    }

    try {
        const auto report = critfiber::run(req);
        if (json) {
            std::cout << critfiber::to_json(report).dump(2) << "\n";
        } else {
            std::cout << critfiber::to_text(report);
        }
        const int code = critfiber::exit_code(report);
        if (code == critfiber::kExitInconclusiveTrace) std::cerr << "trace test inconclusive\n";
        if (code == critfiber::kExitBudget) std::cerr << "monodromy loop budget exhausted\n";
        return code;
    } catch (const critfiber::RunError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return critfiber::kExitBudget;
    }
}
