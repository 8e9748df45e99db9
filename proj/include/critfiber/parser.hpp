#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "critfiber/polynomial.hpp"

namespace critfiber {

enum class ObjectiveKind { Euclidean, Likelihood };

std::string to_string(ObjectiveKind kind);

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Contents of a problem file.
///
///     # comment
///     vars: x1 x2
///     params:
///     objective: euclidean
///     codim: 1
///     randomizer:
///     1/2, 1/3
///     model:
///     1/3000*(1744*x1^2 - 2016*x1*x2 + ...)
///
/// `vars` become unknown slots and `params` parameter slots, in declaration
/// order. `codim` and `randomizer` are optional and only meaningful for
/// overdetermined models; each randomizer line is one comma-separated row of
/// constant expressions.
struct Problem {
    PolySystem system;
    std::optional<ObjectiveKind> objective;
    std::optional<std::size_t> codim;
    std::optional<MatrixXc> randomizer;
};

Problem parse_problem(std::string_view text);
Problem load_problem(const std::string& path);
PolySystem parse_system(std::string_view text);

/// Parses one expression over the given names (`I` is the imaginary unit
/// unless declared as a name).
Polynomial parse_expression(std::string_view text, const std::vector<std::string>& names);

/// Problem-file text that parse_problem maps back to the same Problem.
std::string format_problem(const Problem& problem);

}  // namespace critfiber
