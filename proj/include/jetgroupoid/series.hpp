#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/field.hpp>
#include <jetgroupoid/linalg.hpp>
#include <jetgroupoid/multi_index.hpp>

namespace jetgroupoid
{

// Truncated power series in q variables eps_1..eps_q, known modulo terms of
// order > k. Coefficients are stored densely in graded-lex order and in the
// Taylor normalization c_alpha (the coefficient of eps^alpha), so products are
// plain Cauchy products. The jet coordinate r^alpha = alpha! * c_alpha (the
// alpha-th partial derivative at 0) is available through jet_coordinate().
template <Field K>
class TruncatedSeries
{
public:
    using value_type = typename K::value_type;

    TruncatedSeries(K field, unsigned q, unsigned k)
        : field_(std::move(field)), layout_(MonomialLayout::get(q, k)), coeffs_(layout_->size(), field_.zero())
    {
    }

    static TruncatedSeries constant(const K &field, unsigned q, unsigned k, const value_type &c)
    {
        TruncatedSeries s(field, q, k);
        s.coeffs_[0] = c;
        return s;
    }

    // The coordinate function eps_i (0-based).
    static TruncatedSeries variable(const K &field, unsigned q, unsigned k, unsigned i)
    {
        TruncatedSeries s(field, q, k);
        if (k >= 1) {
            MultiIndex e(q, 0);
            e.at(i) = 1;
            s.coeffs_[s.layout_->rank(e)] = field.one();
        }
        return s;
    }

    [[nodiscard]] const K &field() const noexcept
    {
        return field_;
    }
    [[nodiscard]] unsigned variables() const noexcept
    {
        return layout_->variables();
    }
    [[nodiscard]] unsigned order() const noexcept
    {
        return layout_->max_order();
    }
    [[nodiscard]] const MonomialLayout &layout() const noexcept
    {
        return *layout_;
    }
    [[nodiscard]] const std::vector<value_type> &coefficients() const noexcept
    {
        return coeffs_;
    }

    // Taylor coefficient of eps^alpha; zero beyond the truncation order.
    [[nodiscard]] value_type coefficient(const MultiIndex &alpha) const
    {
        const auto r = layout_->rank(alpha);
        return r < coeffs_.size() ? coeffs_[r] : field_.zero();
    }

    void set_coefficient(const MultiIndex &alpha, const value_type &c)
    {
        const auto r = layout_->rank(alpha);
        if (r >= coeffs_.size()) {
            throw ShapeMismatch("coefficient " + jetgroupoid::to_string(alpha) + " exceeds truncation order "
                                + std::to_string(order()));
        }
        coeffs_[r] = c;
    }

    [[nodiscard]] value_type jet_coordinate(const MultiIndex &alpha) const
    {
        return field_.mul(coefficient(alpha), field_.from_integer(multi_factorial(alpha)));
    }

    void set_jet_coordinate(const MultiIndex &alpha, const value_type &r)
    {
        set_coefficient(alpha, field_.div(r, field_.from_integer(multi_factorial(alpha))));
    }

    // Coefficient by dense rank.
    [[nodiscard]] const value_type &operator[](std::size_t i) const
    {
        return coeffs_.at(i);
    }
    value_type &operator[](std::size_t i)
    {
        return coeffs_.at(i);
    }

    [[nodiscard]] const value_type &constant_term() const
    {
        return coeffs_[0];
    }

    // Drop every term of order > new_order (new_order <= order()).
    [[nodiscard]] TruncatedSeries truncate(unsigned new_order) const
    {
        if (new_order > order()) {
            throw ShapeMismatch("cannot raise truncation order from " + std::to_string(order()) + " to "
                                + std::to_string(new_order));
        }
        TruncatedSeries out(field_, variables(), new_order);
        for (std::size_t i = 0; i < out.coeffs_.size(); ++i) {
            out.coeffs_[i] = coeffs_[i];
        }
        return out;
    }

    [[nodiscard]] bool is_zero() const
    {
        for (const auto &c : coeffs_) {
            if (!field_.is_zero(c)) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        if (!(a.field_ == b.field_) || a.variables() != b.variables() || a.order() != b.order()) {
            return false;
        }
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (!a.field_.equal(a.coeffs_[i], b.coeffs_[i])) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (field_.is_zero(coeffs_[i])) {
                continue;
            }
            if (!out.empty()) {
                out += " + ";
            }
            out += "(" + field_.to_string(coeffs_[i]) + ")";
            const auto &a = layout_->at(i);
            for (std::size_t v = 0; v < a.size(); ++v) {
                if (a[v] != 0) {
                    out += "*e" + std::to_string(v + 1) + (a[v] > 1 ? "^" + std::to_string(a[v]) : "");
                }
            }
        }
        return out.empty() ? "0" : out;
    }

private:
    K field_;
    std::shared_ptr<const MonomialLayout> layout_;
    std::vector<value_type> coeffs_;
};

namespace detail
{

template <Field K>
void require_compatible(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b)
{
    require_same_field(a.field(), b.field());
    if (a.variables() != b.variables() || a.order() != b.order()) {
        throw ShapeMismatch("series shapes differ: (q=" + std::to_string(a.variables()) + ", k="
                            + std::to_string(a.order()) + ") vs (q=" + std::to_string(b.variables())
                            + ", k=" + std::to_string(b.order()) + ")");
    }
}

} // namespace detail

template <Field K>
TruncatedSeries<K> operator+(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b)
{
    detail::require_compatible(a, b);
    TruncatedSeries<K> out = a;
    for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
        out[i] = a.field().add(a[i], b[i]);
    }
    return out;
}

template <Field K>
TruncatedSeries<K> operator-(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b)
{
    detail::require_compatible(a, b);
    TruncatedSeries<K> out = a;
    for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
        out[i] = a.field().sub(a[i], b[i]);
    }
    return out;
}

template <Field K>
TruncatedSeries<K> operator-(const TruncatedSeries<K> &a)
{
    TruncatedSeries<K> out = a;
    for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
        out[i] = a.field().neg(a[i]);
    }
    return out;
}

template <Field K>
TruncatedSeries<K> scale(const TruncatedSeries<K> &a, const typename K::value_type &c)
{
    TruncatedSeries<K> out = a;
    for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
        out[i] = a.field().mul(a[i], c);
    }
    return out;
}

template <Field K>
TruncatedSeries<K> operator*(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b)
{
    detail::require_compatible(a, b);
    const auto &field = a.field();
    TruncatedSeries<K> out(field, a.variables(), a.order());
    for (const auto &p : a.layout().products()) {
        if (field.is_zero(a[p.lhs]) || field.is_zero(b[p.rhs])) {
            continue;
        }
        out[p.target] = field.add(out[p.target], field.mul(a[p.lhs], b[p.rhs]));
    }
    return out;
}

// Multiplicative inverse of a unit by Newton iteration g <- g (2 - b g);
// each step doubles the number of correct orders.
template <Field K>
TruncatedSeries<K> reciprocal(const TruncatedSeries<K> &b)
{
    const auto &field = b.field();
    if (field.is_zero(b.constant_term())) {
        throw DivisionByNonUnit("divisor has zero constant term");
    }
    const unsigned q = b.variables();
    const unsigned k = b.order();
    auto g = TruncatedSeries<K>::constant(field, q, k, field.div(field.one(), b.constant_term()));
    const auto two = TruncatedSeries<K>::constant(field, q, k, field.from_int(2));
    for (unsigned correct = 1; correct <= k; correct *= 2) {
        g = g * (two - b * g);
    }
    return g;
}

template <Field K>
TruncatedSeries<K> operator/(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b)
{
    detail::require_compatible(a, b);
    return a * reciprocal(b);
}

template <Field K>
TruncatedSeries<K> pow(const TruncatedSeries<K> &a, unsigned e)
{
    auto result = TruncatedSeries<K>::constant(a.field(), a.variables(), a.order(), a.field().one());
    auto base = a;
    while (e != 0) {
        if ((e & 1U) != 0) {
            result = result * base;
        }
        e >>= 1U;
        if (e != 0) {
            base = base * base;
        }
    }
    return result;
}

// Taylor coefficients of outer(inner_1, ..., inner_m) through order k. Every
// inner series must vanish at 0; outer has m variables.
template <Field K>
TruncatedSeries<K> compose(const TruncatedSeries<K> &outer, std::span<const TruncatedSeries<K>> inner)
{
    if (inner.size() != outer.variables()) {
        throw ShapeMismatch("outer series has " + std::to_string(outer.variables()) + " variables but "
                            + std::to_string(inner.size()) + " inner series were given");
    }
    if (inner.empty()) {
        return outer;
    }
    const auto &field = outer.field();
    for (std::size_t i = 0; i < inner.size(); ++i) {
        detail::require_compatible(inner[i], inner[0]);
        require_same_field(field, inner[i].field());
        if (inner[i].order() != outer.order()) {
            throw ShapeMismatch("outer and inner truncation orders differ");
        }
        if (!field.is_zero(inner[i].constant_term())) {
            throw NonPointedInner("inner series " + std::to_string(i + 1) + " has nonzero constant term");
        }
    }
    const unsigned q = inner[0].variables();
    const unsigned k = outer.order();
    const auto &lay = outer.layout();
    std::vector<TruncatedSeries<K>> powers;
    powers.reserve(lay.size());
    powers.push_back(TruncatedSeries<K>::constant(field, q, k, field.one()));
    auto result = TruncatedSeries<K>::constant(field, q, k, outer[0]);
    for (std::size_t i = 1; i < lay.size(); ++i) {
        const auto [parent, var] = lay.parent(i);
        powers.push_back(powers[parent] * inner[var]);
        if (!field.is_zero(outer[i])) {
            result = result + scale(powers.back(), outer[i]);
        }
    }
    return result;
}

template <Field K>
TruncatedSeries<K> compose(const TruncatedSeries<K> &outer, const std::vector<TruncatedSeries<K>> &inner)
{
    return compose(outer, std::span<const TruncatedSeries<K>>(inner));
}

// A tuple of q series in q variables, i.e. a jet of a map (C^q, 0) -> C^q.
template <Field K>
using SeriesTuple = std::vector<TruncatedSeries<K>>;

template <Field K>
SeriesTuple<K> compose(const SeriesTuple<K> &outer, const SeriesTuple<K> &inner)
{
    SeriesTuple<K> out;
    out.reserve(outer.size());
    for (const auto &o : outer) {
        out.push_back(compose(o, inner));
    }
    return out;
}

template <Field K>
SeriesTuple<K> identity_tuple(const K &field, unsigned q, unsigned k)
{
    SeriesTuple<K> out;
    for (unsigned i = 0; i < q; ++i) {
        out.push_back(TruncatedSeries<K>::variable(field, q, k, i));
    }
    return out;
}

// Matrix of order-one Taylor coefficients: entry (i, j) = d f_i / d eps_j (0).
template <Field K>
Matrix<K> linear_part(const SeriesTuple<K> &f)
{
    if (f.empty()) {
        return {};
    }
    const auto &field = f[0].field();
    const unsigned q = f[0].variables();
    Matrix<K> m(f.size(), std::vector<typename K::value_type>(q, field.zero()));
    if (f[0].order() == 0) {
        return m;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (unsigned j = 0; j < q; ++j) {
            m[i][j] = f[i][1 + j];
        }
    }
    return m;
}

// Series whose order-one part is given by the matrix and all else is zero.
template <Field K>
SeriesTuple<K> linear_tuple(const K &field, const Matrix<K> &m, unsigned k)
{
    const unsigned q = static_cast<unsigned>(m.size());
    SeriesTuple<K> out;
    for (unsigned i = 0; i < q; ++i) {
        TruncatedSeries<K> s(field, q, k);
        if (k >= 1) {
            for (unsigned j = 0; j < q; ++j) {
                s[1 + j] = m[i][j];
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Compositional inverse g of a pointed tuple f with invertible linear part:
// f o g = g o f = id through order k. Fixed-point iteration
// g <- A^{-1} (eps - N(g)) with f = A eps + N(eps) gains one order per pass.
template <Field K>
SeriesTuple<K> tuple_invert(const SeriesTuple<K> &f)
{
    if (f.empty()) {
        return f;
    }
    const auto &field = f[0].field();
    const unsigned q = f[0].variables();
    const unsigned k = f[0].order();
    if (f.size() != q) {
        throw ShapeMismatch("tuple_invert needs q series in q variables");
    }
    for (const auto &c : f) {
        detail::require_compatible(c, f[0]);
        if (!field.is_zero(c.constant_term())) {
            throw NonPointedInner("tuple_invert needs zero constant terms");
        }
    }
    Matrix<K> a_inv;
    try {
        a_inv = inverse(field, linear_part(f));
    } catch (const SingularLinearPart &) {
        throw SingularLinearPart("tuple has singular linear part");
    }
    const auto a_inv_tuple = linear_tuple(field, a_inv, k);
    const auto a_tuple = linear_tuple(field, linear_part(f), k);
    SeriesTuple<K> nonlinear;
    for (unsigned i = 0; i < q; ++i) {
        nonlinear.push_back(f[i] - a_tuple[i]);
    }
    const auto id = identity_tuple(field, q, k);
    SeriesTuple<K> g = a_inv_tuple;
    for (unsigned pass = 1; pass < k; ++pass) {
        SeriesTuple<K> rhs;
        for (unsigned i = 0; i < q; ++i) {
            rhs.push_back(id[i] - compose(nonlinear[i], g));
        }
        g = compose(a_inv_tuple, rhs);
    }
    return g;
}

} // namespace jetgroupoid
