#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/expr.hpp>
#include <jetgroupoid/identity.hpp>

namespace jetgroupoid
{

// A rational self-map Phi of M = B x F (fiber coordinates x) lifting a
// self-map sigma of the base, possibly depending on parameters.
struct FiberedSystem
{
    std::string name;
    std::vector<std::string> base;
    std::vector<std::string> fiber;
    std::vector<std::string> params;
    std::vector<Expr> sigma; // one per base variable
    std::vector<Expr> map;   // one per fiber variable
    std::vector<std::pair<std::string, Expr>> vfield;
    std::map<std::string, mpq_class> bindings;

    [[nodiscard]] std::size_t base_dimension() const noexcept
    {
        return base.size();
    }
    [[nodiscard]] std::size_t fiber_dimension() const noexcept
    {
        return fiber.size();
    }
    [[nodiscard]] bool is_base(const std::string &v) const
    {
        return std::find(base.begin(), base.end(), v) != base.end();
    }
    [[nodiscard]] bool is_fiber(const std::string &v) const
    {
        return std::find(fiber.begin(), fiber.end(), v) != fiber.end();
    }
    [[nodiscard]] bool is_param(const std::string &v) const
    {
        return std::find(params.begin(), params.end(), v) != params.end();
    }
    [[nodiscard]] std::vector<std::string> unbound_params() const
    {
        std::vector<std::string> out;
        for (const auto &p : params) {
            if (!bindings.contains(p)) {
                out.push_back(p);
            }
        }
        return out;
    }
};

// X = sum c_i(b) d/db_i + sum a_i(x, b) d/dx_i
struct VectorFieldSpec
{
    std::vector<std::string> base;
    std::vector<std::string> fiber;
    std::vector<Expr> base_components;
    std::vector<Expr> fiber_components;
};

// A system plus a distinguished parameter s and special value s0.
struct ParamFamily
{
    FiberedSystem system;
    std::string parameter;
    mpq_class special_value;
};

namespace detail
{

struct Token
{
    enum class Type
    {
        Ident,
        Nat,
        Symbol,
        End
    };
    Type type;
    std::string text;
    std::size_t col; // 1-based
};

inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) != 0 || line[i] == '_')) {
                ++i;
            }
            out.push_back({Token::Type::Ident, std::string(line.substr(start, i - start)), start + 1});
        } else if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])) != 0) {
                ++i;
            }
            out.push_back({Token::Type::Nat, std::string(line.substr(start, i - start)), start + 1});
        } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back({Token::Type::Symbol, "->", start + 1});
            i += 2;
        } else if (std::string_view("+-*/^()=").find(c) != std::string_view::npos) {
            out.push_back({Token::Type::Symbol, std::string(1, c), start + 1});
            ++i;
        } else {
            throw SyntaxError(line_no, start + 1, "a token (unexpected character '" + std::string(1, c) + "')");
        }
    }
    out.push_back({Token::Type::End, "", line.size() + 1});
    return out;
}

class ExprParser
{
public:
    ExprParser(const std::vector<Token> &tokens, std::size_t pos, std::size_t line)
        : tokens_(tokens), pos_(pos), line_(line)
    {
    }

    Expr parse_expr()
    {
        Expr lhs = parse_term();
        while (peek_symbol("+") || peek_symbol("-")) {
            const bool add = next().text == "+";
            Expr rhs = parse_term();
            lhs = Expr::binary(add ? Expr::Kind::Add : Expr::Kind::Sub, lhs, rhs);
        }
        return lhs;
    }

    [[nodiscard]] std::size_t position() const noexcept
    {
        return pos_;
    }

private:
    Expr parse_term()
    {
        Expr lhs = parse_factor();
        while (peek_symbol("*") || peek_symbol("/")) {
            const bool mul = next().text == "*";
            const Token &at = tokens_[pos_];
            Expr rhs = parse_factor();
            if (!mul && rhs.is_literal(0)) {
                throw ZeroDenominatorLiteral("line " + std::to_string(line_) + ", col " + std::to_string(at.col)
                                             + ": division by the literal 0");
            }
            lhs = Expr::binary(mul ? Expr::Kind::Mul : Expr::Kind::Div, lhs, rhs);
        }
        return lhs;
    }

    Expr parse_factor()
    {
        const bool negate = peek_symbol("-");
        if (negate) {
            next();
        }
        Expr base = parse_atom();
        if (peek_symbol("^")) {
            next();
            const Token &t = tokens_[pos_];
            if (t.type != Token::Type::Nat) {
                throw SyntaxError(line_, t.col, "a natural-number exponent");
            }
            next();
            base = Expr::raw_pow(base, static_cast<unsigned>(std::stoul(t.text)));
        }
        return negate ? Expr::raw_neg(base) : base;
    }

    Expr parse_atom()
    {
        const Token &t = tokens_[pos_];
        if (t.type == Token::Type::Nat) {
            next();
            return Expr::integer(mpz_class(t.text));
        }
        if (t.type == Token::Type::Ident) {
            next();
            return Expr::variable(t.text);
        }
        if (peek_symbol("(")) {
            next();
            Expr inner = parse_expr();
            if (!peek_symbol(")")) {
                throw SyntaxError(line_, tokens_[pos_].col, "')'");
            }
            next();
            return inner;
        }
        throw SyntaxError(line_, t.col, "a number, identifier or '('");
    }

    [[nodiscard]] bool peek_symbol(const char *s) const
    {
        return tokens_[pos_].type == Token::Type::Symbol && tokens_[pos_].text == s;
    }

    const Token &next()
    {
        return tokens_[pos_++];
    }

    const std::vector<Token> &tokens_;
    std::size_t pos_;
    std::size_t line_;
};

inline mpq_class parse_rational_tokens(const std::vector<Token> &t, std::size_t &pos, std::size_t line)
{
    bool negative = false;
    if (t[pos].type == Token::Type::Symbol && t[pos].text == "-") {
        negative = true;
        ++pos;
    }
    if (t[pos].type != Token::Type::Nat) {
        throw SyntaxError(line, t[pos].col, "a rational literal");
    }
    mpz_class num(t[pos++].text);
    mpz_class den(1);
    if (t[pos].type == Token::Type::Symbol && t[pos].text == "/") {
        ++pos;
        if (t[pos].type != Token::Type::Nat) {
            throw SyntaxError(line, t[pos].col, "a denominator");
        }
        den = mpz_class(t[pos++].text);
        if (den == 0) {
            throw ZeroDenominatorLiteral("line " + std::to_string(line) + ": rational literal with zero denominator");
        }
    }
    mpq_class q(negative ? mpz_class(-num) : num, den);
    q.canonicalize();
    return q;
}

} // namespace detail

// Parses a single expression (whole string).
inline Expr parse_expr(std::string_view text)
{
    const auto tokens = detail::tokenize(text, 1);
    detail::ExprParser p(tokens, 0, 1);
    Expr e = p.parse_expr();
    if (tokens[p.position()].type != detail::Token::Type::End) {
        throw SyntaxError(1, tokens[p.position()].col, "end of expression");
    }
    return e;
}

// "3", "-3/4"
inline mpq_class parse_rational(std::string_view text)
{
    const auto tokens = detail::tokenize(text, 1);
    std::size_t pos = 0;
    auto q = detail::parse_rational_tokens(tokens, pos, 1);
    if (tokens[pos].type != detail::Token::Type::End) {
        throw SyntaxError(1, tokens[pos].col, "end of rational literal");
    }
    return q;
}

inline FiberedSystem parse_system(std::string_view text)
{
    using detail::Token;
    FiberedSystem sys;
    bool have_name = false;
    bool have_base = false;
    bool have_fiber = false;
    bool have_params = false;
    struct Pending
    {
        std::string target;
        Expr expr;
        std::size_t line;
    };
    std::vector<Pending> sigmas;
    std::vector<Pending> maps;
    std::vector<Pending> vfields;
    std::vector<std::pair<std::string, std::size_t>> lets;
    std::set<std::string> declared;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        start = end + 1;
        ++line_no;
        const auto tokens = detail::tokenize(line, line_no);
        if (tokens[0].type == Token::Type::End) {
            continue;
        }
        if (tokens[0].type != Token::Type::Ident) {
            throw SyntaxError(line_no, tokens[0].col, "a statement keyword");
        }
        const std::string &kw = tokens[0].text;
        const auto declare_list = [&](std::vector<std::string> &into, bool &flag, bool need_one) {
            if (flag) {
                throw SyntaxError(line_no, tokens[0].col, "a single '" + kw + "' declaration");
            }
            flag = true;
            std::size_t i = 1;
            for (; tokens[i].type == Token::Type::Ident; ++i) {
                if (!declared.insert(tokens[i].text).second) {
                    throw SyntaxError(line_no, tokens[i].col, "a fresh identifier ('" + tokens[i].text
                                                                  + "' is already declared)");
                }
                into.push_back(tokens[i].text);
            }
            if (tokens[i].type != Token::Type::End) {
                throw SyntaxError(line_no, tokens[i].col, "an identifier");
            }
            if (need_one && into.empty()) {
                throw SyntaxError(line_no, tokens[i].col, "at least one identifier");
            }
        };
        if (kw == "system") {
            if (have_name) {
                throw SyntaxError(line_no, tokens[0].col, "a single 'system' declaration");
            }
            if (tokens[1].type != Token::Type::Ident || tokens[2].type != Token::Type::End) {
                throw SyntaxError(line_no, tokens[1].col, "a system name");
            }
            sys.name = tokens[1].text;
            have_name = true;
        } else if (kw == "base") {
            declare_list(sys.base, have_base, false);
        } else if (kw == "fiber") {
            declare_list(sys.fiber, have_fiber, true);
        } else if (kw == "params") {
            declare_list(sys.params, have_params, false);
        } else if (kw == "sigma" || kw == "map" || kw == "vfield") {
            if (tokens[1].type != Token::Type::Ident) {
                throw SyntaxError(line_no, tokens[1].col, "a variable name");
            }
            if (!(tokens[2].type == Token::Type::Symbol && tokens[2].text == "->")) {
                throw SyntaxError(line_no, tokens[2].col, "'->'");
            }
            detail::ExprParser p(tokens, 3, line_no);
            Expr e = p.parse_expr();
            if (tokens[p.position()].type != Token::Type::End) {
                throw SyntaxError(line_no, tokens[p.position()].col, "end of line or an operator");
            }
            auto &into = kw == "sigma" ? sigmas : (kw == "map" ? maps : vfields);
            into.push_back({tokens[1].text, e, line_no});
        } else if (kw == "let") {
            if (tokens[1].type != Token::Type::Ident) {
                throw SyntaxError(line_no, tokens[1].col, "a parameter name");
            }
            if (!(tokens[2].type == Token::Type::Symbol && tokens[2].text == "=")) {
                throw SyntaxError(line_no, tokens[2].col, "'='");
            }
            std::size_t pos = 3;
            const auto q = detail::parse_rational_tokens(tokens, pos, line_no);
            if (tokens[pos].type != Token::Type::End) {
                throw SyntaxError(line_no, tokens[pos].col, "end of line");
            }
            if (sys.bindings.contains(tokens[1].text)) {
                throw SyntaxError(line_no, tokens[1].col, "a single binding per parameter");
            }
            sys.bindings[tokens[1].text] = q;
            lets.emplace_back(tokens[1].text, line_no);
        } else {
            throw SyntaxError(line_no, tokens[0].col,
                              "one of system, base, fiber, params, sigma, map, vfield, let");
        }
    }

    if (!have_name) {
        throw SyntaxError(1, 1, "a 'system <name>' declaration");
    }
    if (!have_fiber) {
        throw ArityMismatch("system '" + sys.name + "' declares no fiber variables");
    }
    const auto check_vars = [&](const Expr &e, std::size_t line) {
        for (const auto &v : variables(e)) {
            if (!declared.contains(v)) {
                throw UnknownVariable("line " + std::to_string(line) + ": undeclared variable '" + v + "'");
            }
        }
    };
    const auto assign = [&](const std::vector<Pending> &pending, const std::vector<std::string> &targets,
                            std::vector<Expr> &into, const char *what) {
        std::vector<std::optional<Expr>> slots(targets.size());
        for (const auto &p : pending) {
            const auto it = std::find(targets.begin(), targets.end(), p.target);
            if (it == targets.end()) {
                throw UnknownVariable("line " + std::to_string(p.line) + ": '" + p.target + "' is not a declared "
                                      + what + " variable");
            }
            auto &slot = slots[static_cast<std::size_t>(it - targets.begin())];
            if (slot) {
                throw ArityMismatch("line " + std::to_string(p.line) + ": second component for '" + p.target + "'");
            }
            check_vars(p.expr, p.line);
            slot = p.expr;
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (!slots[i]) {
                throw ArityMismatch(std::string("missing ") + (std::string(what) == "base" ? "sigma" : "map")
                                    + " component for '" + targets[i] + "'");
            }
            into.push_back(*slots[i]);
        }
    };
    assign(sigmas, sys.base, sys.sigma, "base");
    assign(maps, sys.fiber, sys.map, "fiber");
    std::set<std::string> seen_vfield;
    for (const auto &p : vfields) {
        if (!sys.is_base(p.target) && !sys.is_fiber(p.target)) {
            throw UnknownVariable("line " + std::to_string(p.line) + ": vector field component for undeclared or "
                                  "parameter variable '" + p.target + "'");
        }
        if (!seen_vfield.insert(p.target).second) {
            throw ArityMismatch("line " + std::to_string(p.line) + ": second vfield component for '" + p.target + "'");
        }
        check_vars(p.expr, p.line);
        sys.vfield.emplace_back(p.target, p.expr);
    }
    for (const auto &[name, line] : lets) {
        if (!sys.is_param(name)) {
            throw UnknownVariable("line " + std::to_string(line) + ": 'let' binds undeclared parameter '" + name + "'");
        }
    }
    return sys;
}

inline std::string print_system(const FiberedSystem &sys)
{
    std::ostringstream out;
    const auto list = [&](const char *kw, const std::vector<std::string> &names) {
        out << kw;
        for (const auto &n : names) {
            out << ' ' << n;
        }
        out << '\n';
    };
    out << "system " << sys.name << '\n';
    if (!sys.base.empty()) {
        list("base", sys.base);
    }
    list("fiber", sys.fiber);
    if (!sys.params.empty()) {
        list("params", sys.params);
    }
    for (std::size_t i = 0; i < sys.base.size(); ++i) {
        out << "sigma " << sys.base[i] << " -> " << to_string(sys.sigma[i]) << '\n';
    }
    for (std::size_t i = 0; i < sys.fiber.size(); ++i) {
        out << "map " << sys.fiber[i] << " -> " << to_string(sys.map[i]) << '\n';
    }
    for (const auto &[v, e] : sys.vfield) {
        out << "vfield " << v << " -> " << to_string(e) << '\n';
    }
    for (const auto &[p, q] : sys.bindings) {
        out << "let " << p << " = " << q.get_str() << '\n';
    }
    return out.str();
}

inline bool structurally_equal(const FiberedSystem &a, const FiberedSystem &b)
{
    const auto same = [](const std::vector<Expr> &x, const std::vector<Expr> &y) {
        if (x.size() != y.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!structurally_equal(x[i], y[i])) {
                return false;
            }
        }
        return true;
    };
    if (a.name != b.name || a.base != b.base || a.fiber != b.fiber || a.params != b.params
        || a.bindings != b.bindings || !same(a.sigma, b.sigma) || !same(a.map, b.map)
        || a.vfield.size() != b.vfield.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.vfield.size(); ++i) {
        if (a.vfield[i].first != b.vfield[i].first || !structurally_equal(a.vfield[i].second, b.vfield[i].second)) {
            return false;
        }
    }
    return true;
}

// Laplace expansion; fine for the q <= 4 matrices used here.
inline Expr symbolic_determinant(const std::vector<std::vector<Expr>> &m)
{
    const std::size_t n = m.size();
    if (n == 0) {
        return Expr::integer(1);
    }
    if (n == 1) {
        return m[0][0];
    }
    Expr det = Expr::integer(0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Expr>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Expr> row;
            for (std::size_t c = 0; c < n; ++c) {
                if (c != j) {
                    row.push_back(m[i][c]);
                }
            }
            minor.push_back(std::move(row));
        }
        const Expr term = m[0][j] * symbolic_determinant(minor);
        det = j % 2 == 0 ? det + term : det - term;
    }
    return det;
}

// Entry (i, j) = d Phi_i / d x_j.
inline std::vector<std::vector<Expr>> fiber_jacobian(const FiberedSystem &sys)
{
    std::vector<std::vector<Expr>> jac;
    for (const auto &phi : sys.map) {
        std::vector<Expr> row;
        for (const auto &x : sys.fiber) {
            row.push_back(symbolic_derivative(phi, x));
        }
        jac.push_back(std::move(row));
    }
    return jac;
}

struct ValidationReport
{
    bool fibered{true};
    bool jacobian_probably_singular{false};
    std::vector<std::string> warnings;
};

// sigma (and the base part of a declared vector field) must not involve
// fiber variables. A fiber Jacobian that tests as identically zero is only
// warned about: dominance is not decided here.
inline ValidationReport validate_fibered(const FiberedSystem &sys, std::uint64_t seed = 1)
{
    ValidationReport report;
    for (std::size_t i = 0; i < sys.base.size(); ++i) {
        for (const auto &v : variables(sys.sigma[i])) {
            if (sys.is_fiber(v)) {
                throw FiberednessViolation("sigma component for '" + sys.base[i] + "' depends on fiber variable '" + v
                                           + "'");
            }
        }
    }
    for (const auto &[target, e] : sys.vfield) {
        if (!sys.is_base(target)) {
            continue;
        }
        for (const auto &v : variables(e)) {
            if (sys.is_fiber(v)) {
                throw FiberednessViolation("vector field base component for '" + target
                                           + "' depends on fiber variable '" + v + "'");
            }
        }
    }
    std::map<std::string, Expr> pins;
    for (const auto &[p, q] : sys.bindings) {
        pins[p] = Expr::rational(q);
    }
    const Expr det = substitute(symbolic_determinant(fiber_jacobian(sys)), pins);
    try {
        if (expr_probably_zero(det, 8, seed).zero) {
            report.jacobian_probably_singular = true;
            report.warnings.push_back("fiber Jacobian determinant vanishes identically (map is not dominant on fibers)");
        }
    } catch (const PoleSaturated &) {
        report.warnings.push_back("fiber Jacobian could not be sampled away from its poles");
    }
    return report;
}

inline VectorFieldSpec vector_field(const FiberedSystem &sys)
{
    VectorFieldSpec x{sys.base, sys.fiber, {}, {}};
    x.base_components.assign(sys.base.size(), Expr::integer(0));
    x.fiber_components.assign(sys.fiber.size(), Expr::integer(0));
    for (const auto &[target, e] : sys.vfield) {
        for (std::size_t i = 0; i < sys.base.size(); ++i) {
            if (sys.base[i] == target) {
                x.base_components[i] = e;
            }
        }
        for (std::size_t i = 0; i < sys.fiber.size(); ++i) {
            if (sys.fiber[i] == target) {
                x.fiber_components[i] = e;
            }
        }
    }
    return x;
}

inline ParamFamily make_family(FiberedSystem sys, const std::string &parameter, const mpq_class &special_value)
{
    if (!sys.is_param(parameter)) {
        throw UnknownVariable("'" + parameter + "' is not a parameter of system '" + sys.name + "'");
    }
    sys.bindings.erase(parameter);
    return ParamFamily{std::move(sys), parameter, special_value};
}

// Merges bindings (overriding existing ones).
inline FiberedSystem bind_parameters(FiberedSystem sys, const std::map<std::string, mpq_class> &pins)
{
    for (const auto &[p, q] : pins) {
        if (!sys.is_param(p)) {
            throw UnknownVariable("'" + p + "' is not a parameter of system '" + sys.name + "'");
        }
        sys.bindings[p] = q;
    }
    return sys;
}

// second o first: sigma2(sigma1(b)), Phi2(sigma1(b), Phi1(b, x)).
inline FiberedSystem compose_systems(const FiberedSystem &second, const FiberedSystem &first)
{
    if (second.base != first.base || second.fiber != first.fiber || second.params != first.params) {
        throw ShapeMismatch("systems to compose must share base, fiber and parameter variables");
    }
    std::map<std::string, Expr> sub;
    for (std::size_t i = 0; i < first.base.size(); ++i) {
        sub[first.base[i]] = first.sigma[i];
    }
    FiberedSystem out = first;
    out.name = second.name + "_after_" + first.name;
    out.vfield.clear();
    out.sigma.clear();
    for (const auto &s : second.sigma) {
        out.sigma.push_back(substitute(s, sub));
    }
    for (std::size_t i = 0; i < first.fiber.size(); ++i) {
        sub[first.fiber[i]] = first.map[i];
    }
    out.map.clear();
    for (const auto &m : second.map) {
        out.map.push_back(substitute(m, sub));
    }
    for (const auto &[p, q] : second.bindings) {
        out.bindings[p] = q;
    }
    return out;
}

} // namespace jetgroupoid
