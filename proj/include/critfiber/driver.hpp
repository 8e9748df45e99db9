#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "critfiber/critical_system.hpp"
#include "critfiber/monodromy.hpp"
#include "critfiber/parser.hpp"
#include "critfiber/seed.hpp"
#include "critfiber/trace_test.hpp"
#include "critfiber/tracker.hpp"

namespace critfiber {

enum class Command { Solve, Degree, TraceCheck };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

inline constexpr std::uint64_t kDefaultSeed = 2019;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 1,
    kExitSeeding = 2,
    kExitInconclusiveTrace = 3,
    kExitBudget = 4,
};

/// Failure that maps to a process exit code.
class RunError : public std::runtime_error {
  public:
    RunError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

  private:
    int code_;
};

struct RunRequest {
    Command command = Command::Solve;
    /// Problem file; ignored when problem_text is set.
    std::string problem_path;
    std::optional<std::string> problem_text;
    std::optional<VectorXc> u_point;
    std::uint64_t rng_seed = kDefaultSeed;
    std::optional<std::size_t> solution_bound;
    bool certify = false;
    TrackerConfig tracker;
    MonodromyConfig monodromy;
    /// trace-check input: x coordinates of a fiber over u_point.
    std::vector<VectorXc> fiber_x;
};

struct ReportedPoint {
    VectorXc x;
    /// Multipliers for the squared model equations, chart lambda_0 = 1.
    VectorXc lambda;
    double residual = 0.0;
    bool real = false;
    /// Objective value: squared distance, or log-likelihood for likelihood.
    Complex psi = 0.0;
};

struct RunReport {
    Command command = Command::Solve;
    ObjectiveKind objective = ObjectiveKind::Euclidean;
    std::size_t degree = 0;
    std::vector<ReportedPoint> points;
    int loops_used = 0;
    std::optional<TraceReport> trace;
    std::uint64_t seed = kDefaultSeed;
    std::string termination_reason;
    VectorXc u;
    double wall_time = 0.0;
    MonodromyDiagnostics diagnostics;
    bool seed_perturbed = false;
    std::size_t fiber_additions = 0;
};

/// Runs one command. Parse and seeding failures throw RunError; an
/// inconclusive trace or an exhausted loop budget is reported through
/// exit_code.
RunReport run(const RunRequest& req);

int exit_code(const RunReport& report);

nlohmann::json to_json(const RunReport& report);
std::string to_text(const RunReport& report);

/// Real points first (ascending squared distance, or descending
/// log-likelihood), then the rest by the real part of psi.
void sort_points(std::vector<ReportedPoint>& points, ObjectiveKind kind);

/// Reads the x rows and u of a JSON report written by `solve --json`.
void read_fiber_json(const nlohmann::json& doc, std::vector<VectorXc>& fiber_x, VectorXc& u);

}  // namespace critfiber
