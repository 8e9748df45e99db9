#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "critfiber/types.hpp"

namespace critfiber {

using Exponents = std::vector<std::uint32_t>;

struct Term {
    Exponents exponents;
    Complex coeff;
};

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Graded-lexicographic comparison: higher total degree first, then
/// lexicographic with slot 0 most significant. Returns true if a precedes b.
bool grlex_before(const Exponents& a, const Exponents& b);

/// Sparse multivariate polynomial with complex coefficients.
///
/// Always kept in canonical form: terms sorted by grlex_before, no repeated
/// exponent vectors, no exactly-zero coefficients. Immutable in practice;
/// arithmetic returns new values.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}
    /// Merges duplicate exponents and drops zero coefficients.
    Polynomial(std::size_t num_vars, std::vector<Term> terms);

    static Polynomial constant(std::size_t num_vars, Complex value);
    static Polynomial variable(std::size_t num_vars, std::size_t slot);

    std::size_t num_vars() const { return num_vars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Constant term (zero when absent).
    Complex constant_term() const;
    Complex coefficient(const Exponents& exponents) const;
    std::uint32_t degree() const;
    std::uint32_t degree_in(std::size_t slot) const;
    double max_abs_coefficient() const;
    /// True when some term has a positive exponent in `slot`.
    bool depends_on(std::size_t slot) const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(Complex scalar);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
    friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
    friend bool operator==(const Polynomial& a, const Polynomial& b);

    Polynomial pow(std::uint32_t exponent) const;

    /// Moves slot i to slot_map[i] in a space of new_num_vars slots.
    Polynomial embed(std::size_t new_num_vars, std::span<const std::size_t> slot_map) const;
    /// Substitutes constants for the given slots; the slot count is unchanged.
    Polynomial substitute(std::span<const std::size_t> slots, std::span<const Complex> values) const;

    /// Human-readable form that parses back to the same polynomial.
    std::string to_string(const std::vector<std::string>& names) const;

  private:
    void canonicalize();

    std::size_t num_vars_ = 0;
    std::vector<Term> terms_;
};

Complex evaluate(const Polynomial& p, std::span<const Complex> point);
Polynomial differentiate(const Polynomial& p, std::size_t slot);

/// Square-or-not collection of polynomials over one shared slot space, with
/// slots partitioned into unknowns and parameters.
///
/// Evaluation is compiled once at construction into sparse term lists, so a
/// PolySystem can be shared read-only between concurrent path trackers.
class PolySystem {
  public:
    PolySystem() = default;
    PolySystem(std::vector<Polynomial> polynomials, std::vector<std::string> variable_names,
               std::vector<std::size_t> unknown_slots, std::vector<std::size_t> parameter_slots);
    /// All slots are unknowns, named x1, x2, ...
    explicit PolySystem(std::vector<Polynomial> polynomials);

    const std::vector<Polynomial>& polynomials() const { return polynomials_; }
    const Polynomial& operator[](std::size_t i) const { return polynomials_[i]; }
    const std::vector<std::string>& variable_names() const { return names_; }
    const std::vector<std::size_t>& unknown_slots() const { return unknown_slots_; }
    const std::vector<std::size_t>& parameter_slots() const { return parameter_slots_; }

    std::size_t size() const { return polynomials_.size(); }
    std::size_t num_slots() const { return names_.size(); }
    std::size_t num_unknowns() const { return unknown_slots_.size(); }
    std::size_t num_parameters() const { return parameter_slots_.size(); }
    bool is_square() const { return size() == num_unknowns(); }

    /// Full slot vector from unknown and parameter values.
    std::vector<Complex> assemble(std::span<const Complex> unknowns,
                                  std::span<const Complex> parameters) const;

    VectorXc values(std::span<const Complex> unknowns, std::span<const Complex> parameters) const;

    /// Values and Jacobians in the usual orientation: rows are polynomials.
    /// Either Jacobian pointer may be null.
    void evaluate(std::span<const Complex> unknowns, std::span<const Complex> parameters,
                  VectorXc& values, MatrixXc* jac_unknowns, MatrixXc* jac_parameters) const;

    /// Replaces parameters by constants; the result has no parameter slots.
    PolySystem bind_parameters(std::span<const Complex> parameters) const;

    std::string to_string() const;

  private:
    struct CompiledTerm {
        Complex coeff;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;  // (slot, exponent)
    };
    void compile();

    std::vector<Polynomial> polynomials_;
    std::vector<std::string> names_;
    std::vector<std::size_t> unknown_slots_;
    std::vector<std::size_t> parameter_slots_;
    std::vector<std::vector<CompiledTerm>> compiled_;
    std::vector<std::uint32_t> max_degree_;
};

/// Jacobian of the system at the given unknown (and parameter) values, with
/// rows indexing unknowns and columns indexing polynomials: entry (i, j) is
/// d f_j / d z_i.
MatrixXc jacobian_eval(const PolySystem& system, std::span<const Complex> unknowns,
                       std::span<const Complex> parameters = {});

}  // namespace critfiber
