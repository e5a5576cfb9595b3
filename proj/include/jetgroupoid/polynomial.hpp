#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/expr.hpp>
#include <jetgroupoid/field.hpp>

namespace jetgroupoid
{

// Sorted (variable, exponent) pairs, exponents > 0.
template <typename Var>
using Monomial = std::vector<std::pair<Var, unsigned>>;

template <typename Var>
Monomial<Var> monomial_product(const Monomial<Var> &a, const Monomial<Var> &b)
{
    Monomial<Var> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

template <typename Var>
unsigned monomial_degree(const Monomial<Var> &m)
{
    unsigned d = 0;
    for (const auto &[v, e] : m) {
        d += e;
    }
    return d;
}

template <typename Var>
unsigned exponent_of(const Monomial<Var> &m, const Var &v)
{
    for (const auto &[w, e] : m) {
        if (w == v) {
            return e;
        }
    }
    return 0;
}

// Monomial with the exponent of v lowered by `by` (or removed).
template <typename Var>
Monomial<Var> lower_exponent(const Monomial<Var> &m, const Var &v, unsigned by)
{
    Monomial<Var> out;
    for (const auto &[w, e] : m) {
        if (w == v) {
            if (e > by) {
                out.emplace_back(w, e - by);
            }
        } else {
            out.emplace_back(w, e);
        }
    }
    return out;
}

// Sparse multivariate polynomial with coefficients in K.
template <Field K, typename Var>
class SparsePolynomial
{
public:
    using value_type = typename K::value_type;
    using monomial_type = Monomial<Var>;
    using term_map = std::map<monomial_type, value_type>;

    explicit SparsePolynomial(K field) : field_(std::move(field))
    {
    }

    static SparsePolynomial constant(const K &field, const value_type &c)
    {
        SparsePolynomial p(field);
        p.add_term({}, c);
        return p;
    }

    static SparsePolynomial variable(const K &field, const Var &v)
    {
        SparsePolynomial p(field);
        p.add_term({{v, 1U}}, field.one());
        return p;
    }

    [[nodiscard]] const K &field() const noexcept
    {
        return field_;
    }
    [[nodiscard]] const term_map &terms() const noexcept
    {
        return terms_;
    }
    [[nodiscard]] bool is_zero() const noexcept
    {
        return terms_.empty();
    }
    [[nodiscard]] bool is_constant() const
    {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    [[nodiscard]] bool is_one() const
    {
        return is_constant() && !terms_.empty() && field_.equal(terms_.begin()->second, field_.one());
    }
    [[nodiscard]] value_type coefficient(const monomial_type &m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? field_.zero() : it->second;
    }
    [[nodiscard]] value_type constant_term() const
    {
        return coefficient({});
    }

    void add_term(const monomial_type &m, const value_type &c)
    {
        if (field_.is_zero(c)) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second = field_.add(it->second, c);
            if (field_.is_zero(it->second)) {
                terms_.erase(it);
            }
        }
    }

    [[nodiscard]] unsigned total_degree() const
    {
        unsigned d = 0;
        for (const auto &[m, c] : terms_) {
            d = std::max(d, monomial_degree(m));
        }
        return d;
    }

    [[nodiscard]] unsigned degree_in(const Var &v) const
    {
        unsigned d = 0;
        for (const auto &[m, c] : terms_) {
            d = std::max(d, exponent_of(m, v));
        }
        return d;
    }

    [[nodiscard]] std::set<Var> variables() const
    {
        std::set<Var> out;
        for (const auto &[m, c] : terms_) {
            for (const auto &[v, e] : m) {
                out.insert(v);
            }
        }
        return out;
    }

    friend bool operator==(const SparsePolynomial &a, const SparsePolynomial &b)
    {
        if (!(a.field_ == b.field_) || a.terms_.size() != b.terms_.size()) {
            return false;
        }
        for (auto i = a.terms_.begin(), j = b.terms_.begin(); i != a.terms_.end(); ++i, ++j) {
            if (i->first != j->first || !a.field_.equal(i->second, j->second)) {
                return false;
            }
        }
        return true;
    }

    friend SparsePolynomial operator+(const SparsePolynomial &a, const SparsePolynomial &b)
    {
        require_same_field(a.field_, b.field_);
        SparsePolynomial out = a;
        for (const auto &[m, c] : b.terms_) {
            out.add_term(m, c);
        }
        return out;
    }

    friend SparsePolynomial operator-(const SparsePolynomial &a)
    {
        SparsePolynomial out(a.field_);
        for (const auto &[m, c] : a.terms_) {
            out.terms_.emplace(m, a.field_.neg(c));
        }
        return out;
    }

    friend SparsePolynomial operator-(const SparsePolynomial &a, const SparsePolynomial &b)
    {
        require_same_field(a.field_, b.field_);
        SparsePolynomial out = a;
        for (const auto &[m, c] : b.terms_) {
            out.add_term(m, a.field_.neg(c));
        }
        return out;
    }

    friend SparsePolynomial operator*(const SparsePolynomial &a, const SparsePolynomial &b)
    {
        require_same_field(a.field_, b.field_);
        SparsePolynomial out(a.field_);
        for (const auto &[ma, ca] : a.terms_) {
            for (const auto &[mb, cb] : b.terms_) {
                out.add_term(monomial_product(ma, mb), a.field_.mul(ca, cb));
            }
        }
        return out;
    }

    [[nodiscard]] SparsePolynomial scaled(const value_type &c) const
    {
        SparsePolynomial out(field_);
        for (const auto &[m, v] : terms_) {
            out.add_term(m, field_.mul(v, c));
        }
        return out;
    }

    [[nodiscard]] SparsePolynomial pow(unsigned n) const
    {
        SparsePolynomial r = constant(field_, field_.one());
        SparsePolynomial b = *this;
        while (n != 0) {
            if ((n & 1U) != 0) {
                r = r * b;
            }
            n >>= 1U;
            if (n != 0) {
                b = b * b;
            }
        }
        return r;
    }

    [[nodiscard]] SparsePolynomial derivative(const Var &v) const
    {
        SparsePolynomial out(field_);
        for (const auto &[m, c] : terms_) {
            const unsigned e = exponent_of(m, v);
            if (e != 0) {
                out.add_term(lower_exponent(m, v, 1), field_.mul(c, field_.from_integer(mpz_class(e))));
            }
        }
        return out;
    }

    // Smallest exponent of v over all terms; max() for the zero polynomial.
    [[nodiscard]] unsigned valuation(const Var &v) const
    {
        unsigned val = std::numeric_limits<unsigned>::max();
        for (const auto &[m, c] : terms_) {
            val = std::min(val, exponent_of(m, v));
        }
        return val;
    }

    // The polynomial multiplying v^e (v eliminated).
    [[nodiscard]] SparsePolynomial coefficient_of(const Var &v, unsigned e) const
    {
        SparsePolynomial out(field_);
        for (const auto &[m, c] : terms_) {
            if (exponent_of(m, v) == e) {
                out.add_term(lower_exponent(m, v, e), c);
            }
        }
        return out;
    }

    // this / v^e; every term must contain v^e.
    [[nodiscard]] SparsePolynomial divide_by_power(const Var &v, unsigned e) const
    {
        SparsePolynomial out(field_);
        for (const auto &[m, c] : terms_) {
            if (exponent_of(m, v) < e) {
                throw DivisionByNonUnit("polynomial is not divisible by the requested power");
            }
            out.add_term(lower_exponent(m, v, e), c);
        }
        return out;
    }

    // Replaces the variables in `sub`; others are kept.
    [[nodiscard]] SparsePolynomial substitute(const std::map<Var, SparsePolynomial> &sub) const
    {
        SparsePolynomial out(field_);
        std::map<std::pair<Var, unsigned>, SparsePolynomial> powers;
        for (const auto &[m, c] : terms_) {
            SparsePolynomial term = constant(field_, c);
            monomial_type kept;
            for (const auto &[v, e] : m) {
                auto it = sub.find(v);
                if (it == sub.end()) {
                    kept.emplace_back(v, e);
                    continue;
                }
                auto pit = powers.find({v, e});
                if (pit == powers.end()) {
                    pit = powers.emplace(std::make_pair(v, e), it->second.pow(e)).first;
                }
                term = term * pit->second;
            }
            SparsePolynomial mono(field_);
            mono.add_term(kept, field_.one());
            const auto prod = term * mono;
            for (const auto &[mm, cc] : prod.terms_) {
                out.add_term(mm, cc);
            }
        }
        return out;
    }

    // Value at a point; leaf(v) supplies the value of each variable.
    template <typename Leaf>
    [[nodiscard]] value_type evaluate(Leaf &&leaf) const
    {
        std::map<Var, value_type> cache;
        value_type total = field_.zero();
        for (const auto &[m, c] : terms_) {
            value_type t = c;
            for (const auto &[v, e] : m) {
                auto it = cache.find(v);
                if (it == cache.end()) {
                    it = cache.emplace(v, leaf(v)).first;
                }
                t = field_.mul(t, FieldAlgebra<K>{field_}.pow(it->second, e));
            }
            total = field_.add(total, t);
        }
        return total;
    }

    // Same polynomial with coefficients reduced into another field.
    template <Field L>
    [[nodiscard]] SparsePolynomial<L, Var> map_coefficients(const L &target) const
        requires std::same_as<value_type, mpq_class>
    {
        SparsePolynomial<L, Var> out(target);
        for (const auto &[m, c] : terms_) {
            out.add_term(m, target.from_rational(c));
        }
        return out;
    }

    template <typename Name>
    [[nodiscard]] std::string to_string(Name &&name) const
    {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) {
                out << " + ";
            }
            first = false;
            out << field_.to_string(it->second);
            for (const auto &[v, e] : it->first) {
                out << '*' << name(v);
                if (e > 1) {
                    out << '^' << e;
                }
            }
        }
        return out.str();
    }

private:
    K field_;
    term_map terms_;
};

// num/den, never normalized (no gcd); den is nonzero.
template <Field K, typename Var>
struct RationalFunction
{
    using poly = SparsePolynomial<K, Var>;

    poly num;
    poly den;

    explicit RationalFunction(poly n) : num(std::move(n)), den(poly::constant(num.field(), num.field().one()))
    {
    }
    RationalFunction(poly n, poly d) : num(std::move(n)), den(std::move(d))
    {
        if (den.is_zero()) {
            throw EvalDivisionByZero("rational function with zero denominator");
        }
    }

    [[nodiscard]] bool is_zero() const
    {
        return num.is_zero();
    }

    friend RationalFunction operator+(const RationalFunction &a, const RationalFunction &b)
    {
        if (a.den == b.den) {
            return {a.num + b.num, a.den};
        }
        if (a.den.is_one()) {
            return {a.num * b.den + b.num, b.den};
        }
        if (b.den.is_one()) {
            return {a.num + b.num * a.den, a.den};
        }
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend RationalFunction operator-(const RationalFunction &a)
    {
        return {-a.num, a.den};
    }
    friend RationalFunction operator-(const RationalFunction &a, const RationalFunction &b)
    {
        return a + (-b);
    }
    friend RationalFunction operator*(const RationalFunction &a, const RationalFunction &b)
    {
        return {a.num * b.num, a.den.is_one() ? b.den : (b.den.is_one() ? a.den : a.den * b.den)};
    }
    friend RationalFunction operator/(const RationalFunction &a, const RationalFunction &b)
    {
        if (b.num.is_zero()) {
            throw EvalDivisionByZero("division by the zero rational function");
        }
        return a * RationalFunction(b.den, b.num);
    }
    [[nodiscard]] RationalFunction pow(unsigned n) const
    {
        return {num.pow(n), den.pow(n)};
    }
};

template <Field K, typename Var>
struct FractionAlgebra
{
    const K &field;
    using value = RationalFunction<K, Var>;

    [[nodiscard]] value one() const
    {
        return value(SparsePolynomial<K, Var>::constant(field, field.one()));
    }
    [[nodiscard]] value constant(const mpz_class &z) const
    {
        return value(SparsePolynomial<K, Var>::constant(field, field.from_integer(z)));
    }
    [[nodiscard]] value add(const value &a, const value &b) const
    {
        return a + b;
    }
    [[nodiscard]] value sub(const value &a, const value &b) const
    {
        return a - b;
    }
    [[nodiscard]] value mul(const value &a, const value &b) const
    {
        return a * b;
    }
    [[nodiscard]] value div(const value &a, const value &b) const
    {
        return a / b;
    }
    [[nodiscard]] value neg(const value &a) const
    {
        return -a;
    }
    [[nodiscard]] value pow(const value &a, unsigned n) const
    {
        return a.pow(n);
    }
};

// Expands e into num/den form; leaf(name) returns the polynomial standing
// for a variable.
template <Field K, typename Var, typename Leaf>
RationalFunction<K, Var> to_rational_function(const Expr &e, const K &field, Leaf &&leaf)
{
    return evaluate(e, FractionAlgebra<K, Var>{field},
                    [&](const std::string &name) { return RationalFunction<K, Var>(leaf(name)); });
}

// Polynomial in named variables back to an expression tree, terms in
// descending monomial order.
template <typename Name>
Expr to_expr(const SparsePolynomial<RationalField, std::string> &p, Name &&name)
{
    Expr out = Expr::integer(0);
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const mpq_class &c = it->second;
        Expr mono = Expr::integer(1);
        for (const auto &[v, e] : it->first) {
            mono = mono * pow(Expr::variable(name(v)), e);
        }
        const mpq_class mag = abs(c);
        Expr term = mono;
        if (mag != 1) {
            term = Expr::integer(mag.get_num()) * mono;
            if (mag.get_den() != 1) {
                term = term / Expr::integer(mag.get_den());
            }
        }
        if (out.is_literal(0)) {
            out = c < 0 ? -term : term;
        } else {
            out = c < 0 ? out - term : out + term;
        }
    }
    return out;
}

inline Expr to_expr(const SparsePolynomial<RationalField, std::string> &p)
{
    return to_expr(p, [](const std::string &v) { return v; });
}

using NamedPolynomial = SparsePolynomial<RationalField, std::string>;
using NamedFraction = RationalFunction<RationalField, std::string>;

inline NamedFraction to_named_fraction(const Expr &e)
{
    const RationalField q;
    return to_rational_function<RationalField, std::string>(
        e, q, [&](const std::string &name) { return NamedPolynomial::variable(q, name); });
}

} // namespace jetgroupoid
