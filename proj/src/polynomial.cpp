#include "critfiber/polynomial.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace critfiber {

namespace {

std::uint32_t total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

void check_point(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw DimensionError("point has " + std::to_string(got) + " coordinates, expected " +
                             std::to_string(expected));
    }
}

Complex ipow(Complex base, std::uint32_t e) {
    Complex r = 1.0;
    while (e > 0) {
        if (e & 1U) r *= base;
        e >>= 1U;
        if (e > 0) base *= base;
    }
    return r;
}

std::string format_real(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string format_coefficient(Complex c) {
    if (c.imag() == 0.0) return format_real(c.real());
    std::ostringstream os;
    os << "(" << format_real(c.real());
    os << (c.imag() < 0 ? " - " : " + ") << format_real(std::abs(c.imag())) << "*I)";
    return os.str();
}

}  // namespace

bool grlex_before(const Exponents& a, const Exponents& b) {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da > db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Polynomial::Polynomial(std::size_t num_vars, std::vector<Term> terms)
    : num_vars_(num_vars), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.exponents.size() != num_vars_) {
            throw DimensionError("term exponent vector length does not match num_vars");
        }
    }
    canonicalize();
}

Polynomial Polynomial::constant(std::size_t num_vars, Complex value) {
    return Polynomial(num_vars, {Term{Exponents(num_vars, 0), value}});
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t slot) {
    if (slot >= num_vars) throw std::out_of_range("variable slot out of range");
    Exponents e(num_vars, 0);
    e[slot] = 1;
    return Polynomial(num_vars, {Term{std::move(e), Complex(1.0)}});
}

void Polynomial::canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return grlex_before(a.exponents, b.exponents); });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().exponents == t.exponents) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff == Complex(0.0); });
    terms_ = std::move(merged);
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_[0].exponents) == 0);
}

Complex Polynomial::constant_term() const {
    if (!terms_.empty() && total_degree(terms_.back().exponents) == 0) return terms_.back().coeff;
    return {};
}

Complex Polynomial::coefficient(const Exponents& exponents) const {
    for (const auto& t : terms_) {
        if (t.exponents == exponents) return t.coeff;
    }
    return {};
}

std::uint32_t Polynomial::degree() const {
    return terms_.empty() ? 0 : total_degree(terms_.front().exponents);
}

std::uint32_t Polynomial::degree_in(std::size_t slot) const {
    std::uint32_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.exponents[slot]);
    return d;
}

double Polynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

bool Polynomial::depends_on(std::size_t slot) const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [slot](const Term& t) { return t.exponents[slot] > 0; });
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (other.num_vars_ != num_vars_) throw DimensionError("polynomial slot counts differ");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) { return *this += -other; }

Polynomial& Polynomial::operator*=(Complex scalar) {
    for (auto& t : terms_) t.coeff *= scalar;
    canonicalize();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_) throw DimensionError("polynomial slot counts differ");
    std::vector<Term> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            Exponents e(a.num_vars_);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ta.exponents[i] + tb.exponents[i];
            terms.push_back({std::move(e), ta.coeff * tb.coeff});
        }
    }
    return Polynomial(a.num_vars_, std::move(terms));
}

bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].exponents != b.terms_[i].exponents || a.terms_[i].coeff != b.terms_[i].coeff) {
            return false;
        }
    }
    return true;
}

Polynomial Polynomial::pow(std::uint32_t exponent) const {
    Polynomial result = constant(num_vars_, 1.0);
    Polynomial base = *this;
    while (exponent > 0) {
        if (exponent & 1U) result = result * base;
        exponent >>= 1U;
        if (exponent > 0) base = base * base;
    }
    return result;
}

Polynomial Polynomial::embed(std::size_t new_num_vars, std::span<const std::size_t> slot_map) const {
    if (slot_map.size() != num_vars_) throw DimensionError("slot map length does not match num_vars");
    std::vector<Term> terms;
    terms.reserve(terms_.size());
    for (const auto& t : terms_) {
        Exponents e(new_num_vars, 0);
        for (std::size_t i = 0; i < num_vars_; ++i) {
            if (slot_map[i] >= new_num_vars) throw std::out_of_range("slot map target out of range");
            e[slot_map[i]] += t.exponents[i];
        }
        terms.push_back({std::move(e), t.coeff});
    }
    return Polynomial(new_num_vars, std::move(terms));
}

Polynomial Polynomial::substitute(std::span<const std::size_t> slots,
                                  std::span<const Complex> values) const {
    if (slots.size() != values.size()) throw DimensionError("substitution slots and values differ");
    std::vector<Term> terms;
    terms.reserve(terms_.size());
    for (const auto& t : terms_) {
        Term nt = t;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const auto s = slots[k];
            if (s >= num_vars_) throw std::out_of_range("substitution slot out of range");
            if (nt.exponents[s] > 0) {
                nt.coeff *= ipow(values[k], nt.exponents[s]);
                nt.exponents[s] = 0;
            }
        }
        terms.push_back(std::move(nt));
    }
    return Polynomial(num_vars_, std::move(terms));
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (names.size() != num_vars_) throw DimensionError("name list does not match num_vars");
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        std::string monomial;
        for (std::size_t i = 0; i < num_vars_; ++i) {
            if (t.exponents[i] == 0) continue;
            if (!monomial.empty()) monomial += "*";
            monomial += names[i];
            if (t.exponents[i] > 1) monomial += "^" + std::to_string(t.exponents[i]);
        }
        Complex c = t.coeff;
        const bool negative_real = c.imag() == 0.0 && c.real() < 0.0;
        if (k == 0) {
            if (negative_real) out += "-";
        } else {
            out += negative_real ? " - " : " + ";
        }
        if (negative_real) c = -c;
        if (monomial.empty()) {
            out += format_coefficient(c);
        } else if (c == Complex(1.0)) {
            out += monomial;
        } else {
            out += format_coefficient(c) + "*" + monomial;
        }
    }
    return out;
}

Complex evaluate(const Polynomial& p, std::span<const Complex> point) {
    check_point(p.num_vars(), point.size());
    // Powers memoized per call, one table per slot up to its degree.
    std::vector<std::vector<Complex>> powers(p.num_vars());
    for (std::size_t i = 0; i < p.num_vars(); ++i) {
        const auto d = p.degree_in(i);
        auto& row = powers[i];
        row.resize(d + 1);
        row[0] = 1.0;
        for (std::uint32_t k = 1; k <= d; ++k) row[k] = row[k - 1] * point[i];
    }
    Complex sum = 0.0;
    for (const auto& t : p.terms()) {
        Complex m = t.coeff;
        for (std::size_t i = 0; i < t.exponents.size(); ++i) {
            if (t.exponents[i] > 0) m *= powers[i][t.exponents[i]];
        }
        sum += m;
    }
    return sum;
}

Polynomial differentiate(const Polynomial& p, std::size_t slot) {
    if (slot >= p.num_vars()) throw std::out_of_range("differentiation slot out of range");
    std::vector<Term> terms;
    for (const auto& t : p.terms()) {
        const auto e = t.exponents[slot];
        if (e == 0) continue;
        Term d = t;
        d.coeff *= static_cast<double>(e);
        d.exponents[slot] = e - 1;
        terms.push_back(std::move(d));
    }
    return Polynomial(p.num_vars(), std::move(terms));
}

// ---------------------------------------------------------------------------
// PolySystem

PolySystem::PolySystem(std::vector<Polynomial> polynomials, std::vector<std::string> variable_names,
                       std::vector<std::size_t> unknown_slots, std::vector<std::size_t> parameter_slots)
    : polynomials_(std::move(polynomials)),
      names_(std::move(variable_names)),
      unknown_slots_(std::move(unknown_slots)),
      parameter_slots_(std::move(parameter_slots)) {
    const auto n = names_.size();
    std::vector<int> role(n, 0);
    for (auto s : unknown_slots_) {
        if (s >= n) throw std::out_of_range("unknown slot out of range");
        role[s] += 1;
    }
    for (auto s : parameter_slots_) {
        if (s >= n) throw std::out_of_range("parameter slot out of range");
        role[s] += 2;
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (role[s] == 3) throw std::invalid_argument("slot " + names_[s] + " is both unknown and parameter");
    }
    for (const auto& p : polynomials_) {
        if (p.num_vars() != n) throw DimensionError("polynomial slot count does not match the system");
        for (std::size_t s = 0; s < n; ++s) {
            if (role[s] == 0 && p.depends_on(s)) {
                throw std::invalid_argument("slot " + names_[s] + " is neither unknown nor parameter");
            }
        }
    }
    compile();
}

PolySystem::PolySystem(std::vector<Polynomial> polynomials) {
    const std::size_t n = polynomials.empty() ? 0 : polynomials.front().num_vars();
    std::vector<std::string> names;
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("x" + std::to_string(i + 1));
        slots.push_back(i);
    }
    *this = PolySystem(std::move(polynomials), std::move(names), std::move(slots), {});
}

void PolySystem::compile() {
    max_degree_.assign(names_.size(), 0);
    compiled_.clear();
    compiled_.reserve(polynomials_.size());
    for (const auto& p : polynomials_) {
        std::vector<CompiledTerm> terms;
        terms.reserve(p.terms().size());
        for (const auto& t : p.terms()) {
            CompiledTerm ct{t.coeff, {}};
            for (std::size_t s = 0; s < t.exponents.size(); ++s) {
                if (t.exponents[s] == 0) continue;
                ct.factors.emplace_back(static_cast<std::uint32_t>(s), t.exponents[s]);
                max_degree_[s] = std::max(max_degree_[s], t.exponents[s]);
            }
            terms.push_back(std::move(ct));
        }
        compiled_.push_back(std::move(terms));
    }
}

std::vector<Complex> PolySystem::assemble(std::span<const Complex> unknowns,
                                          std::span<const Complex> parameters) const {
    check_point(num_unknowns(), unknowns.size());
    check_point(num_parameters(), parameters.size());
    std::vector<Complex> point(num_slots(), Complex(0.0));
    for (std::size_t i = 0; i < unknowns.size(); ++i) point[unknown_slots_[i]] = unknowns[i];
    for (std::size_t i = 0; i < parameters.size(); ++i) point[parameter_slots_[i]] = parameters[i];
    return point;
}

VectorXc PolySystem::values(std::span<const Complex> unknowns, std::span<const Complex> parameters) const {
    VectorXc v;
    evaluate(unknowns, parameters, v, nullptr, nullptr);
    return v;
}

void PolySystem::evaluate(std::span<const Complex> unknowns, std::span<const Complex> parameters,
                          VectorXc& values, MatrixXc* jac_unknowns, MatrixXc* jac_parameters) const {
    const auto point = assemble(unknowns, parameters);
    const auto n = num_slots();
    std::vector<std::vector<Complex>> powers(n);
    for (std::size_t s = 0; s < n; ++s) {
        auto& row = powers[s];
        row.resize(max_degree_[s] + 1);
        row[0] = 1.0;
        for (std::uint32_t k = 1; k <= max_degree_[s]; ++k) row[k] = row[k - 1] * point[s];
    }

    const bool want_gradient = jac_unknowns != nullptr || jac_parameters != nullptr;
    const auto m = static_cast<Eigen::Index>(size());
    values.setZero(m);
    MatrixXc full;
    if (want_gradient) full.setZero(m, static_cast<Eigen::Index>(n));

    std::vector<Complex> prefix;
    std::vector<Complex> suffix;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (const auto& t : compiled_[static_cast<std::size_t>(j)]) {
            const auto len = t.factors.size();
            if (!want_gradient) {
                Complex v = t.coeff;
                for (const auto& [s, e] : t.factors) v *= powers[s][e];
                values(j) += v;
                continue;
            }
            // prefix[i] = product of factors before i, suffix[i] = product after i.
            prefix.assign(len + 1, Complex(1.0));
            suffix.assign(len + 1, Complex(1.0));
            for (std::size_t i = 0; i < len; ++i) {
                const auto& [s, e] = t.factors[i];
                prefix[i + 1] = prefix[i] * powers[s][e];
            }
            for (std::size_t i = len; i > 0; --i) {
                const auto& [s, e] = t.factors[i - 1];
                suffix[i - 1] = suffix[i] * powers[s][e];
            }
            values(j) += t.coeff * prefix[len];
            for (std::size_t i = 0; i < len; ++i) {
                const auto& [s, e] = t.factors[i];
                full(j, s) += t.coeff * static_cast<double>(e) * powers[s][e - 1] * prefix[i] * suffix[i + 1];
            }
        }
    }
    if (jac_unknowns != nullptr) {
        jac_unknowns->resize(m, static_cast<Eigen::Index>(num_unknowns()));
        for (std::size_t i = 0; i < num_unknowns(); ++i) {
            jac_unknowns->col(static_cast<Eigen::Index>(i)) = full.col(static_cast<Eigen::Index>(unknown_slots_[i]));
        }
    }
    if (jac_parameters != nullptr) {
        jac_parameters->resize(m, static_cast<Eigen::Index>(num_parameters()));
        for (std::size_t i = 0; i < num_parameters(); ++i) {
            jac_parameters->col(static_cast<Eigen::Index>(i)) =
                full.col(static_cast<Eigen::Index>(parameter_slots_[i]));
        }
    }
}

PolySystem PolySystem::bind_parameters(std::span<const Complex> parameters) const {
    check_point(num_parameters(), parameters.size());
    // Keep only the unknown slots, in unknown order.
    std::vector<std::size_t> remap(num_slots(), 0);
    std::vector<std::string> names;
    std::vector<std::size_t> unknowns;
    for (std::size_t i = 0; i < num_unknowns(); ++i) {
        remap[unknown_slots_[i]] = i;
        names.push_back(names_[unknown_slots_[i]]);
        unknowns.push_back(i);
    }
    std::vector<Polynomial> bound;
    bound.reserve(size());
    for (const auto& p : polynomials_) {
        const auto q = p.substitute(parameter_slots_, parameters);
        std::vector<Term> terms;
        for (const auto& t : q.terms()) {
            Exponents e(num_unknowns(), 0);
            for (std::size_t i = 0; i < num_unknowns(); ++i) e[i] = t.exponents[unknown_slots_[i]];
            terms.push_back({std::move(e), t.coeff});
        }
        bound.emplace_back(num_unknowns(), std::move(terms));
    }
    return PolySystem(std::move(bound), std::move(names), std::move(unknowns), {});
}

std::string PolySystem::to_string() const {
    std::ostringstream os;
    for (const auto& p : polynomials_) os << p.to_string(names_) << "\n";
    return os.str();
}

MatrixXc jacobian_eval(const PolySystem& system, std::span<const Complex> unknowns,
                       std::span<const Complex> parameters) {
    VectorXc values;
    MatrixXc jac;
    system.evaluate(unknowns, parameters, values, &jac, nullptr);
    return jac.transpose();
}

}  // namespace critfiber
