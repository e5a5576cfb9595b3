#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/field.hpp>

namespace jetgroupoid
{

// Immutable rational-expression AST. Nodes are shared, so substitution and
// differentiation build DAGs; every traversal below memoizes on node identity.
class Expr
{
public:
    enum class Kind
    {
        Integer,
        Variable,
        Add,
        Sub,
        Mul,
        Div,
        Pow,
        Neg
    };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node
    {
        Kind kind;
        mpz_class value;      // Integer
        std::string name;     // Variable
        unsigned exponent{0}; // Pow
        NodePtr lhs;          // binary ops, Pow base, Neg operand
        NodePtr rhs;          // binary ops
    };

    Expr() : Expr(integer(0)) {}

    static Expr integer(const mpz_class &v)
    {
        return Expr(std::make_shared<const Node>(Node{Kind::Integer, v, {}, 0, nullptr, nullptr}));
    }
    static Expr integer(long v)
    {
        return integer(mpz_class(v));
    }
    static Expr variable(const std::string &name)
    {
        return Expr(std::make_shared<const Node>(Node{Kind::Variable, 0, name, 0, nullptr, nullptr}));
    }
    // Rational constant as an Integer or an Integer quotient.
    static Expr rational(const mpq_class &q)
    {
        if (q.get_den() == 1) {
            return integer(q.get_num());
        }
        return integer(q.get_num()) / integer(q.get_den());
    }

    // Structure-preserving constructors (used by the parser).
    static Expr binary(Kind kind, const Expr &a, const Expr &b)
    {
        return Expr(std::make_shared<const Node>(Node{kind, 0, {}, 0, a.node_, b.node_}));
    }
    static Expr raw_pow(const Expr &a, unsigned n)
    {
        return Expr(std::make_shared<const Node>(Node{Kind::Pow, 0, {}, n, a.node_, nullptr}));
    }
    static Expr raw_neg(const Expr &a)
    {
        return Expr(std::make_shared<const Node>(Node{Kind::Neg, 0, {}, 0, a.node_, nullptr}));
    }

    [[nodiscard]] Kind kind() const noexcept
    {
        return node_->kind;
    }
    [[nodiscard]] const Node &node() const noexcept
    {
        return *node_;
    }
    [[nodiscard]] const NodePtr &ptr() const noexcept
    {
        return node_;
    }
    [[nodiscard]] Expr lhs() const
    {
        return Expr(node_->lhs);
    }
    [[nodiscard]] Expr rhs() const
    {
        return Expr(node_->rhs);
    }
    [[nodiscard]] bool is_integer() const noexcept
    {
        return node_->kind == Kind::Integer;
    }
    [[nodiscard]] bool is_literal(long v) const
    {
        return node_->kind == Kind::Integer && node_->value == v;
    }
    [[nodiscard]] const mpz_class &integer_value() const
    {
        return node_->value;
    }
    [[nodiscard]] const std::string &name() const
    {
        return node_->name;
    }
    [[nodiscard]] unsigned exponent() const
    {
        return node_->exponent;
    }

    // Simplifying arithmetic: folds integer literals and prunes 0 and 1.
    friend Expr operator+(const Expr &a, const Expr &b)
    {
        if (a.is_literal(0)) {
            return b;
        }
        if (b.is_literal(0)) {
            return a;
        }
        if (a.is_integer() && b.is_integer()) {
            return integer(a.integer_value() + b.integer_value());
        }
        return binary(Kind::Add, a, b);
    }
    friend Expr operator-(const Expr &a, const Expr &b)
    {
        if (b.is_literal(0)) {
            return a;
        }
        if (a.is_literal(0)) {
            return -b;
        }
        if (a.is_integer() && b.is_integer()) {
            return integer(a.integer_value() - b.integer_value());
        }
        return binary(Kind::Sub, a, b);
    }
    friend Expr operator*(const Expr &a, const Expr &b)
    {
        if (a.is_literal(0) || b.is_literal(0)) {
            return integer(0);
        }
        if (a.is_literal(1)) {
            return b;
        }
        if (b.is_literal(1)) {
            return a;
        }
        if (a.is_integer() && b.is_integer()) {
            return integer(a.integer_value() * b.integer_value());
        }
        return binary(Kind::Mul, a, b);
    }
    friend Expr operator/(const Expr &a, const Expr &b)
    {
        if (b.is_literal(1)) {
            return a;
        }
        if (a.is_literal(0) && !b.is_literal(0)) {
            return integer(0);
        }
        if (a.is_integer() && b.is_integer() && b.integer_value() != 0
            && mpz_divisible_p(a.integer_value().get_mpz_t(), b.integer_value().get_mpz_t()) != 0) {
            return integer(a.integer_value() / b.integer_value());
        }
        return binary(Kind::Div, a, b);
    }
    friend Expr operator-(const Expr &a)
    {
        if (a.is_integer()) {
            return integer(-a.integer_value());
        }
        if (a.kind() == Kind::Neg) {
            return a.lhs();
        }
        return raw_neg(a);
    }
    friend Expr pow(const Expr &a, unsigned n)
    {
        if (n == 0) {
            return integer(1);
        }
        if (n == 1) {
            return a;
        }
        if (a.is_integer()) {
            mpz_class r;
            mpz_pow_ui(r.get_mpz_t(), a.integer_value().get_mpz_t(), n);
            return integer(r);
        }
        return raw_pow(a, n);
    }

    // Same tree shape and leaves.
    friend bool structurally_equal(const Expr &a, const Expr &b)
    {
        if (a.node_ == b.node_) {
            return true;
        }
        const Node &x = *a.node_;
        const Node &y = *b.node_;
        if (x.kind != y.kind) {
            return false;
        }
        switch (x.kind) {
        case Kind::Integer:
            return x.value == y.value;
        case Kind::Variable:
            return x.name == y.name;
        case Kind::Pow:
            return x.exponent == y.exponent && structurally_equal(a.lhs(), b.lhs());
        case Kind::Neg:
            return structurally_equal(a.lhs(), b.lhs());
        default:
            return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
        }
    }

private:
    explicit Expr(NodePtr node) : node_(std::move(node)) {}

    NodePtr node_;
};

namespace detail
{

inline int precedence(const Expr &e)
{
    switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
        return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
        return 2;
    case Expr::Kind::Neg:
        return 3;
    case Expr::Kind::Pow:
        return 4;
    case Expr::Kind::Integer:
        return e.integer_value() < 0 ? 3 : 5;
    case Expr::Kind::Variable:
        return 5;
    }
    return 5;
}

inline void print_into(const Expr &e, int min_prec, std::string &out)
{
    const int prec = precedence(e);
    const bool paren = prec < min_prec;
    if (paren) {
        out += '(';
    }
    switch (e.kind()) {
    case Expr::Kind::Integer:
        if (e.integer_value() < 0) {
            out += '-';
            out += mpz_class(-e.integer_value()).get_str();
        } else {
            out += e.integer_value().get_str();
        }
        break;
    case Expr::Kind::Variable:
        out += e.name();
        break;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
        print_into(e.lhs(), 1, out);
        out += e.kind() == Expr::Kind::Add ? " + " : " - ";
        print_into(e.rhs(), 2, out);
        break;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
        print_into(e.lhs(), 2, out);
        out += e.kind() == Expr::Kind::Mul ? "*" : "/";
        print_into(e.rhs(), 3, out);
        break;
    case Expr::Kind::Neg:
        out += '-';
        print_into(e.lhs(), 4, out);
        break;
    case Expr::Kind::Pow:
        print_into(e.lhs(), 5, out);
        out += '^';
        out += std::to_string(e.exponent());
        break;
    }
    if (paren) {
        out += ')';
    }
}

} // namespace detail

// Canonical text form; re-parses to a structurally equal AST (negative
// literals produced by folding come back as negated literals).
inline std::string to_string(const Expr &e)
{
    std::string out;
    detail::print_into(e, 0, out);
    return out;
}

inline std::set<std::string> variables(const Expr &e)
{
    std::set<std::string> out;
    std::unordered_map<const Expr::Node *, bool> seen;
    std::function<void(const Expr &)> walk = [&](const Expr &x) {
        if (!seen.emplace(x.ptr().get(), true).second) {
            return;
        }
        switch (x.kind()) {
        case Expr::Kind::Integer:
            return;
        case Expr::Kind::Variable:
            out.insert(x.name());
            return;
        case Expr::Kind::Pow:
        case Expr::Kind::Neg:
            walk(x.lhs());
            return;
        default:
            walk(x.lhs());
            walk(x.rhs());
        }
    };
    walk(e);
    return out;
}

// Number of distinct nodes in the DAG.
inline std::size_t node_count(const Expr &e)
{
    std::unordered_map<const Expr::Node *, bool> seen;
    std::function<void(const Expr &)> walk = [&](const Expr &x) {
        if (!seen.emplace(x.ptr().get(), true).second) {
            return;
        }
        if (x.kind() == Expr::Kind::Integer || x.kind() == Expr::Kind::Variable) {
            return;
        }
        walk(x.lhs());
        if (x.kind() != Expr::Kind::Pow && x.kind() != Expr::Kind::Neg) {
            walk(x.rhs());
        }
    };
    walk(e);
    return seen.size();
}

// Generic memoized evaluation. The algebra supplies constant(mpz), add, sub,
// mul, div, neg, pow(value, n), one(); leaf(name) resolves variables.
// x^0 evaluates to one() without touching x.
template <typename Algebra, typename Leaf>
auto evaluate(const Expr &e, const Algebra &alg, Leaf &&leaf) -> decltype(alg.one())
{
    using V = decltype(alg.one());
    std::unordered_map<const Expr::Node *, V> memo;
    std::function<V(const Expr &)> go = [&](const Expr &x) -> V {
        if (auto it = memo.find(x.ptr().get()); it != memo.end()) {
            return it->second;
        }
        V v = [&]() -> V {
            switch (x.kind()) {
            case Expr::Kind::Integer:
                return alg.constant(x.integer_value());
            case Expr::Kind::Variable:
                return leaf(x.name());
            case Expr::Kind::Add:
                return alg.add(go(x.lhs()), go(x.rhs()));
            case Expr::Kind::Sub:
                return alg.sub(go(x.lhs()), go(x.rhs()));
            case Expr::Kind::Mul:
                return alg.mul(go(x.lhs()), go(x.rhs()));
            case Expr::Kind::Div:
                return alg.div(go(x.lhs()), go(x.rhs()));
            case Expr::Kind::Neg:
                return alg.neg(go(x.lhs()));
            case Expr::Kind::Pow:
                return x.exponent() == 0 ? alg.one() : alg.pow(go(x.lhs()), x.exponent());
            }
            return alg.one();
        }();
        memo.emplace(x.ptr().get(), v);
        return v;
    };
    return go(e);
}

// Field elements as an evaluation algebra.
template <Field K>
struct FieldAlgebra
{
    const K &field;

    [[nodiscard]] typename K::value_type one() const
    {
        return field.one();
    }
    [[nodiscard]] typename K::value_type constant(const mpz_class &z) const
    {
        return field.from_integer(z);
    }
    [[nodiscard]] typename K::value_type add(const typename K::value_type &a, const typename K::value_type &b) const
    {
        return field.add(a, b);
    }
    [[nodiscard]] typename K::value_type sub(const typename K::value_type &a, const typename K::value_type &b) const
    {
        return field.sub(a, b);
    }
    [[nodiscard]] typename K::value_type mul(const typename K::value_type &a, const typename K::value_type &b) const
    {
        return field.mul(a, b);
    }
    [[nodiscard]] typename K::value_type div(const typename K::value_type &a, const typename K::value_type &b) const
    {
        if (field.is_zero(b)) {
            throw EvalDivisionByZero("denominator vanishes at this point");
        }
        return field.div(a, b);
    }
    [[nodiscard]] typename K::value_type neg(const typename K::value_type &a) const
    {
        return field.neg(a);
    }
    [[nodiscard]] typename K::value_type pow(typename K::value_type a, unsigned n) const
    {
        auto r = field.one();
        while (n != 0) {
            if ((n & 1U) != 0) {
                r = field.mul(r, a);
            }
            n >>= 1U;
            if (n != 0) {
                a = field.mul(a, a);
            }
        }
        return r;
    }
};

template <Field K>
using Environment = std::map<std::string, typename K::value_type>;

// Exact value of e at env; EvalDivisionByZero at a pole, UnknownVariable
// when env misses a variable.
template <Field K>
typename K::value_type eval_expr(const Expr &e, const K &field, const Environment<K> &env)
{
    return evaluate(e, FieldAlgebra<K>{field}, [&](const std::string &name) {
        auto it = env.find(name);
        if (it == env.end()) {
            throw UnknownVariable("no value bound for variable '" + name + "'");
        }
        return it->second;
    });
}

// Replace variables by expressions; unmapped variables stay.
inline Expr substitute(const Expr &e, const std::map<std::string, Expr> &map)
{
    std::unordered_map<const Expr::Node *, Expr> memo;
    std::function<Expr(const Expr &)> go = [&](const Expr &x) -> Expr {
        if (auto it = memo.find(x.ptr().get()); it != memo.end()) {
            return it->second;
        }
        Expr r = [&]() -> Expr {
            switch (x.kind()) {
            case Expr::Kind::Integer:
                return x;
            case Expr::Kind::Variable: {
                auto it = map.find(x.name());
                return it == map.end() ? x : it->second;
            }
            case Expr::Kind::Add:
                return go(x.lhs()) + go(x.rhs());
            case Expr::Kind::Sub:
                return go(x.lhs()) - go(x.rhs());
            case Expr::Kind::Mul:
                return go(x.lhs()) * go(x.rhs());
            case Expr::Kind::Div:
                return go(x.lhs()) / go(x.rhs());
            case Expr::Kind::Neg:
                return -go(x.lhs());
            case Expr::Kind::Pow:
                return pow(go(x.lhs()), x.exponent());
            }
            return x;
        }();
        memo.emplace(x.ptr().get(), r);
        return r;
    };
    return go(e);
}

// d e / d v by the sum, product, quotient and power rules.
inline Expr symbolic_derivative(const Expr &e, const std::string &v)
{
    std::unordered_map<const Expr::Node *, Expr> memo;
    std::function<Expr(const Expr &)> go = [&](const Expr &x) -> Expr {
        if (auto it = memo.find(x.ptr().get()); it != memo.end()) {
            return it->second;
        }
        Expr r = [&]() -> Expr {
            switch (x.kind()) {
            case Expr::Kind::Integer:
                return Expr::integer(0);
            case Expr::Kind::Variable:
                return Expr::integer(x.name() == v ? 1 : 0);
            case Expr::Kind::Add:
                return go(x.lhs()) + go(x.rhs());
            case Expr::Kind::Sub:
                return go(x.lhs()) - go(x.rhs());
            case Expr::Kind::Mul:
                return go(x.lhs()) * x.rhs() + x.lhs() * go(x.rhs());
            case Expr::Kind::Div: {
                const Expr num = go(x.lhs()) * x.rhs() - x.lhs() * go(x.rhs());
                return num / pow(x.rhs(), 2);
            }
            case Expr::Kind::Neg:
                return -go(x.lhs());
            case Expr::Kind::Pow:
                if (x.exponent() == 0) {
                    return Expr::integer(0);
                }
                return Expr::integer(x.exponent()) * pow(x.lhs(), x.exponent() - 1) * go(x.lhs());
            }
            return Expr::integer(0);
        }();
        memo.emplace(x.ptr().get(), r);
        return r;
    };
    return go(e);
}

// Upper bounds (numerator degree, denominator degree) for e written as a
// single fraction of polynomials. Saturates instead of overflowing.
struct DegreeBound
{
    std::uint64_t numerator{0};
    std::uint64_t denominator{0};
};

inline DegreeBound degree_bound(const Expr &e)
{
    static constexpr std::uint64_t cap = std::uint64_t{1} << 62;
    const auto sat_add = [](std::uint64_t a, std::uint64_t b) { return std::min(cap, a + b); };
    const auto sat_mul = [](std::uint64_t a, std::uint64_t n) {
        return a != 0 && n > cap / a ? cap : std::min(cap, a * n);
    };
    std::unordered_map<const Expr::Node *, DegreeBound> memo;
    std::function<DegreeBound(const Expr &)> go = [&](const Expr &x) -> DegreeBound {
        if (auto it = memo.find(x.ptr().get()); it != memo.end()) {
            return it->second;
        }
        DegreeBound r = [&]() -> DegreeBound {
            switch (x.kind()) {
            case Expr::Kind::Integer:
                return {0, 0};
            case Expr::Kind::Variable:
                return {1, 0};
            case Expr::Kind::Add:
            case Expr::Kind::Sub: {
                const auto a = go(x.lhs());
                const auto b = go(x.rhs());
                return {std::max(sat_add(a.numerator, b.denominator), sat_add(b.numerator, a.denominator)),
                        sat_add(a.denominator, b.denominator)};
            }
            case Expr::Kind::Mul: {
                const auto a = go(x.lhs());
                const auto b = go(x.rhs());
                return {sat_add(a.numerator, b.numerator), sat_add(a.denominator, b.denominator)};
            }
            case Expr::Kind::Div: {
                const auto a = go(x.lhs());
                const auto b = go(x.rhs());
                return {sat_add(a.numerator, b.denominator), sat_add(a.denominator, b.numerator)};
            }
            case Expr::Kind::Neg:
                return go(x.lhs());
            case Expr::Kind::Pow: {
                const auto a = go(x.lhs());
                return {sat_mul(a.numerator, x.exponent()), sat_mul(a.denominator, x.exponent())};
            }
            }
            return {0, 0};
        }();
        memo.emplace(x.ptr().get(), r);
        return r;
    };
    return go(e);
}

} // namespace jetgroupoid
