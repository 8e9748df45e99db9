#include "critfiber/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace critfiber {

std::string to_string(ObjectiveKind kind) {
    return kind == ObjectiveKind::Euclidean ? "euclidean" : "likelihood";
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Recursive-descent parser for one polynomial expression.
class ExpressionParser {
  public:
    ExpressionParser(std::string_view text, const std::vector<std::string>& names, std::size_t line,
                     std::size_t column_offset)
        : text_(text), names_(names), line_(line), offset_(column_offset) {
        for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
    }

    Polynomial parse() {
        auto p = expression();
        skip_space();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

  private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_, offset_ + pos_ + 1, message);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expression() {
        Polynomial sum(names_.size());
        skip_space();
        if (pos_ >= text_.size()) fail("expected an expression");
        sum = term();
        while (true) {
            if (accept('+')) {
                sum += term();
            } else if (accept('-')) {
                sum -= term();
            } else {
                return sum;
            }
        }
    }

    Polynomial term() {
        auto product = unary();
        while (true) {
            if (accept('*')) {
                product = product * unary();
            } else if (accept('/')) {
                const auto at = pos_;
                const auto divisor = unary();
                if (!divisor.is_constant() || divisor.is_zero()) {
                    pos_ = at;
                    fail("division is only allowed by a nonzero constant");
                }
                product *= 1.0 / divisor.constant_term();
            } else {
                return product;
            }
        }
    }

    Polynomial unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power() {
        auto base = primary();
        if (accept('^')) {
            skip_space();
            const auto start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be a non-negative integer literal");
            const auto e = std::strtoul(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr, 10);
            base = base.pow(static_cast<std::uint32_t>(e));
        }
        return base;
    }

    Polynomial primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (is_ident_start(c)) {
            const auto start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            const std::string id(text_.substr(start, pos_ - start));
            if (auto it = index_.find(id); it != index_.end()) {
                return Polynomial::variable(names_.size(), it->second);
            }
            if (id == "I") return Polynomial::constant(names_.size(), kImaginaryUnit);
            pos_ = start;
            fail("undeclared identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Polynomial number() {
        const auto start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            auto look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        const std::string literal(text_.substr(start, pos_ - start));
        if (literal == ".") {
            pos_ = start;
            fail("malformed number");
        }
        return Polynomial::constant(names_.size(), std::strtod(literal.c_str(), nullptr));
    }

    std::string_view text_;
    const std::vector<std::string>& names_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::size_t line_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

enum class Section { None, Model, Randomizer };

}  // namespace

Polynomial parse_expression(std::string_view text, const std::vector<std::string>& names) {
    return ExpressionParser(text, names, 1, 0).parse();
}

Problem parse_problem(std::string_view text) {
    std::vector<std::string> names;
    std::size_t num_unknowns = 0;
    bool seen_vars = false;
    bool seen_params = false;
    std::vector<std::pair<std::string, std::size_t>> model_lines;       // (text, line)
    std::vector<std::pair<std::string, std::size_t>> randomizer_lines;  // (text, line)
    Problem problem;
    Section section = Section::None;

    auto declare = [&](std::string_view list, std::size_t line, std::size_t col0) {
        std::size_t pos = 0;
        std::vector<std::string> declared;
        while (pos < list.size()) {
            while (pos < list.size() && std::isspace(static_cast<unsigned char>(list[pos]))) ++pos;
            if (pos >= list.size()) break;
            const auto start = pos;
            if (!is_ident_start(list[pos])) throw ParseError(line, col0 + pos + 1, "expected an identifier");
            while (pos < list.size() && is_ident_char(list[pos])) ++pos;
            if (pos < list.size() && !std::isspace(static_cast<unsigned char>(list[pos]))) {
                throw ParseError(line, col0 + pos + 1, "expected an identifier");
            }
            std::string id(list.substr(start, pos - start));
            if (std::find(names.begin(), names.end(), id) != names.end()) {
                throw ParseError(line, col0 + start + 1, "duplicate declaration of '" + id + "'");
            }
            names.push_back(std::move(id));
        }
    };

    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        auto end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(begin, end - begin);
        ++line_no;
        begin = end + 1;

        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        const auto body = trim(raw);
        if (body.empty()) {
            if (end == text.size()) break;
            continue;
        }

        // Header lines look like `keyword:`.
        std::string keyword;
        std::size_t colon = body.find(':');
        if (colon != std::string_view::npos) {
            const auto candidate = trim(body.substr(0, colon));
            if (candidate == "vars" || candidate == "params" || candidate == "objective" ||
                candidate == "model" || candidate == "codim" || candidate == "randomizer") {
                keyword = std::string(candidate);
            }
        }
        const std::size_t col0 = static_cast<std::size_t>(body.data() - raw.data());

        if (keyword.empty()) {
            if (section == Section::Model) {
                model_lines.emplace_back(std::string(raw), line_no);
            } else if (section == Section::Randomizer) {
                randomizer_lines.emplace_back(std::string(raw), line_no);
            } else {
                throw ParseError(line_no, col0 + 1, "expected a section header");
            }
        } else {
            const auto rest = body.substr(colon + 1);
            const std::size_t rest_col = col0 + colon + 1;
            section = Section::None;
            if (keyword == "vars") {
                if (seen_vars) throw ParseError(line_no, col0 + 1, "duplicate 'vars' section");
                if (seen_params) throw ParseError(line_no, col0 + 1, "'vars' must precede 'params'");
                seen_vars = true;
                declare(rest, line_no, rest_col);
                num_unknowns = names.size();
                if (num_unknowns == 0) throw ParseError(line_no, col0 + 1, "no variables declared");
            } else if (keyword == "params") {
                if (!seen_vars) throw ParseError(line_no, col0 + 1, "'params' must follow 'vars'");
                if (seen_params) throw ParseError(line_no, col0 + 1, "duplicate 'params' section");
                seen_params = true;
                declare(rest, line_no, rest_col);
            } else if (keyword == "objective") {
                const auto value = trim(rest);
                if (value == "euclidean") {
                    problem.objective = ObjectiveKind::Euclidean;
                } else if (value == "likelihood") {
                    problem.objective = ObjectiveKind::Likelihood;
                } else {
                    throw ParseError(line_no, rest_col + 1, "objective must be 'euclidean' or 'likelihood'");
                }
            } else if (keyword == "codim") {
                const std::string value(trim(rest));
                char* stop = nullptr;
                const auto k = std::strtoul(value.c_str(), &stop, 10);
                if (value.empty() || *stop != '\0' || k == 0) {
                    throw ParseError(line_no, rest_col + 1, "codim must be a positive integer");
                }
                problem.codim = k;
            } else if (keyword == "randomizer") {
                if (!trim(rest).empty()) {
                    randomizer_lines.emplace_back(std::string(rest_col, ' ') + std::string(rest), line_no);
                }
                section = Section::Randomizer;
            } else {  // model
                if (!seen_vars) throw ParseError(line_no, col0 + 1, "'model' must follow 'vars'");
                if (!trim(rest).empty()) {
                    model_lines.emplace_back(std::string(rest_col, ' ') + std::string(rest), line_no);
                }
                section = Section::Model;
            }
        }
        if (end == text.size()) break;
    }

    if (!seen_vars) throw ParseError(line_no, 1, "missing 'vars' section");
    if (model_lines.empty()) throw ParseError(line_no, 1, "missing 'model' equations");

    std::vector<Polynomial> polys;
    for (const auto& [src, line] : model_lines) {
        polys.push_back(ExpressionParser(src, names, line, 0).parse());
    }

    if (!randomizer_lines.empty()) {
        const std::vector<std::string> no_names;
        std::vector<std::vector<Complex>> rows;
        for (const auto& [src, line] : randomizer_lines) {
            std::vector<Complex> row;
            std::size_t start = 0;
            while (start <= src.size()) {
                auto comma = src.find(',', start);
                if (comma == std::string::npos) comma = src.size();
                const auto entry = ExpressionParser(std::string_view(src).substr(start, comma - start), no_names,
                                                    line, start)
                                       .parse();
                row.push_back(entry.constant_term());
                start = comma + 1;
            }
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw ParseError(line, 1, "randomizer rows must have equal length");
            }
            rows.push_back(std::move(row));
        }
        if (rows.front().size() != polys.size()) {
            throw ParseError(randomizer_lines.front().second, 1,
                             "randomizer rows must have one entry per model equation");
        }
        MatrixXc r(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(polys.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < polys.size(); ++j) r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        problem.randomizer = std::move(r);
    }

    std::vector<std::size_t> unknowns(num_unknowns);
    for (std::size_t i = 0; i < num_unknowns; ++i) unknowns[i] = i;
    std::vector<std::size_t> params;
    for (std::size_t i = num_unknowns; i < names.size(); ++i) params.push_back(i);
    problem.system = PolySystem(std::move(polys), std::move(names), std::move(unknowns), std::move(params));
    return problem;
}

PolySystem parse_system(std::string_view text) { return parse_problem(text).system; }

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

std::string format_problem(const Problem& problem) {
    const auto& sys = problem.system;
    const auto& names = sys.variable_names();
    std::ostringstream os;
    os << "vars:";
    for (auto s : sys.unknown_slots()) os << " " << names[s];
    os << "\n";
    if (sys.num_parameters() > 0) {
        os << "params:";
        for (auto s : sys.parameter_slots()) os << " " << names[s];
        os << "\n";
    }
    if (problem.objective) os << "objective: " << to_string(*problem.objective) << "\n";
    if (problem.codim) os << "codim: " << *problem.codim << "\n";
    if (problem.randomizer) {
        os << "randomizer:\n";
        const auto& r = *problem.randomizer;
        const auto n = r.cols();
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j > 0) os << ", ";
                const std::vector<std::string> none;
                os << Polynomial::constant(0, r(i, j)).to_string(none);
            }
            os << "\n";
        }
    }
    os << "model:\n" << sys.to_string();
    return os.str();
}

}  // namespace critfiber
