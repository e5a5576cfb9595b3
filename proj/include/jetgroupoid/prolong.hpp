#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/expr.hpp>
#include <jetgroupoid/frame.hpp>
#include <jetgroupoid/linalg.hpp>
#include <jetgroupoid/multi_index.hpp>
#include <jetgroupoid/polynomial.hpp>
#include <jetgroupoid/series.hpp>
#include <jetgroupoid/system.hpp>

namespace jetgroupoid
{

// Values for every parameter of sys, from its bindings plus `extra`
// (extra wins). UsageError names the first parameter left unbound.
template <Field K>
Environment<K> parameter_values(const FiberedSystem &sys, const K &field, const Environment<K> &extra = {})
{
    Environment<K> env;
    for (const auto &p : sys.params) {
        if (auto it = extra.find(p); it != extra.end()) {
            env[p] = it->second;
        } else if (auto b = sys.bindings.find(p); b != sys.bindings.end()) {
            env[p] = field.from_rational(b->second);
        } else {
            throw UsageError("parameter '" + p + "' of system '" + sys.name + "' has no value");
        }
    }
    return env;
}

// Truncated series in the frame variables as an evaluation algebra. A
// division by a series without constant term means the rational map is not
// defined at the frame's point.
template <Field K>
struct SeriesAlgebra
{
    const K &field;
    unsigned q;
    unsigned k;

    [[nodiscard]] TruncatedSeries<K> one() const
    {
        return TruncatedSeries<K>::constant(field, q, k, field.one());
    }
    [[nodiscard]] TruncatedSeries<K> constant(const mpz_class &z) const
    {
        return TruncatedSeries<K>::constant(field, q, k, field.from_integer(z));
    }
    [[nodiscard]] TruncatedSeries<K> add(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b) const
    {
        return a + b;
    }
    [[nodiscard]] TruncatedSeries<K> sub(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b) const
    {
        return a - b;
    }
    [[nodiscard]] TruncatedSeries<K> mul(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b) const
    {
        return a * b;
    }
    [[nodiscard]] TruncatedSeries<K> div(const TruncatedSeries<K> &a, const TruncatedSeries<K> &b) const
    {
        if (field.is_zero(b.constant_term())) {
            throw IndeterminacyPoint("a denominator vanishes at the frame's point");
        }
        return a / b;
    }
    [[nodiscard]] TruncatedSeries<K> neg(const TruncatedSeries<K> &a) const
    {
        return -a;
    }
    [[nodiscard]] TruncatedSeries<K> pow(const TruncatedSeries<K> &a, unsigned n) const
    {
        return jetgroupoid::pow(a, n);
    }
};

// sigma at a base point; parameters from `params`.
template <Field K>
Point<K> apply_sigma(const FiberedSystem &sys, const K &field, const Point<K> &base, const Environment<K> &params)
{
    Environment<K> env = params;
    for (std::size_t j = 0; j < sys.base.size(); ++j) {
        env[sys.base[j]] = base.at(j);
    }
    Point<K> out;
    for (const auto &s : sys.sigma) {
        try {
            out.push_back(eval_expr(s, field, env));
        } catch (const EvalDivisionByZero &) {
            throw IndeterminacyPoint("sigma is not defined at this base point");
        }
    }
    return out;
}

// R_k Phi applied to the frame r: each Phi component evaluated with the
// fiber variables replaced by the component series of r.
template <Field K>
FrameJet<K> prolong_map(const FiberedSystem &sys, const FrameJet<K> &r, unsigned k, const Environment<K> &params)
{
    if (r.order() != k) {
        throw ShapeMismatch("frame has order " + std::to_string(r.order()) + ", expected " + std::to_string(k));
    }
    if (r.fiber_dimension() != sys.fiber.size() || r.base().size() != sys.base.size()) {
        throw ShapeMismatch("frame dimensions do not match system '" + sys.name + "'");
    }
    const K &field = r.field();
    const unsigned q = r.fiber_dimension();
    const SeriesAlgebra<K> alg{field, q, k};
    std::map<std::string, TruncatedSeries<K>> leaves;
    for (std::size_t i = 0; i < q; ++i) {
        leaves.emplace(sys.fiber[i], r.components()[i]);
    }
    for (std::size_t j = 0; j < sys.base.size(); ++j) {
        leaves.emplace(sys.base[j], TruncatedSeries<K>::constant(field, q, k, r.base()[j]));
    }
    for (const auto &[name, v] : params) {
        leaves.emplace(name, TruncatedSeries<K>::constant(field, q, k, v));
    }
    const auto leaf = [&](const std::string &name) {
        auto it = leaves.find(name);
        if (it == leaves.end()) {
            throw UnknownVariable("no value for '" + name + "' while prolonging '" + sys.name + "'");
        }
        return it->second;
    };
    SeriesTuple<K> comps;
    comps.reserve(q);
    for (const auto &phi : sys.map) {
        comps.push_back(evaluate(phi, alg, leaf));
    }
    Point<K> base = apply_sigma(sys, field, r.base(), params);
    if (k == 0 || field.is_zero(determinant(field, linear_part(comps)))) {
        throw DegenerateImage("image frame has a singular linear part");
    }
    return FrameJet<K>(std::move(base), std::move(comps));
}

template <Field K>
FrameJet<K> prolong_map(const FiberedSystem &sys, const FrameJet<K> &r, unsigned k)
{
    return prolong_map(sys, r, k, parameter_values(sys, r.field()));
}

// Jets j_k(Phi^n) at m for n = 0 .. n_max, stopping at the first iterate that
// leaves the domain (failed_step is then that n).
template <Field K>
struct IterateJets
{
    std::vector<MapJet<K>> jets;
    std::optional<std::size_t> failed_step;
};

template <Field K>
IterateJets<K> iterate_jets(const FiberedSystem &sys, const K &field, const Point<K> &base, const Point<K> &fiber,
                            std::size_t n_max, unsigned k, const Environment<K> &params)
{
    IterateJets<K> out;
    const auto s = FrameJet<K>::standard(field, base, fiber, k);
    // The standard frame is a translate of the identity, so the map jet of
    // (r, s) is r itself written in the centered source variables.
    auto r = s;
    out.jets.push_back(MapJet<K>(base, fiber, base, r.components()));
    for (std::size_t n = 1; n <= n_max; ++n) {
        try {
            r = prolong_map(sys, r, k, params);
        } catch (const IndeterminacyPoint &) {
            out.failed_step = n;
            return out;
        } catch (const DegenerateImage &) {
            out.failed_step = n;
            return out;
        }
        out.jets.push_back(MapJet<K>(base, fiber, r.base(), r.components()));
    }
    return out;
}

// j_k(Phi^n) at m = (base, fiber), as map_jet_from_pair of the n-times
// prolonged standard frame and the standard frame.
template <Field K>
MapJet<K> taylor_jet_of_iterate(const FiberedSystem &sys, const K &field, const Point<K> &base,
                                const Point<K> &fiber, std::size_t n, unsigned k, const Environment<K> &params)
{
    const auto s = FrameJet<K>::standard(field, base, fiber, k);
    auto r = s;
    for (std::size_t step = 1; step <= n; ++step) {
        try {
            r = prolong_map(sys, r, k, params);
        } catch (const IndeterminacyPoint &) {
            throw IndeterminacyPoint("iterate " + std::to_string(step) + " is not defined at the starting point",
                                     step);
        }
    }
    return map_jet_from_pair(r, s);
}

template <Field K>
MapJet<K> taylor_jet_of_iterate(const FiberedSystem &sys, const K &field, const Point<K> &base,
                                const Point<K> &fiber, std::size_t n, unsigned k)
{
    return taylor_jet_of_iterate(sys, field, base, fiber, n, k, parameter_values(sys, field));
}

// Coordinates on R_k(M/B) x parameters: b_j, parameter p_j, or x_i^alpha.
struct JetVar
{
    enum class Kind : unsigned char
    {
        Base,
        Param,
        Jet
    };
    Kind kind{Kind::Base};
    unsigned index{0};
    MultiIndex alpha;

    static JetVar base(unsigned j)
    {
        return {Kind::Base, j, {}};
    }
    static JetVar param(unsigned j)
    {
        return {Kind::Param, j, {}};
    }
    static JetVar jet(unsigned i, MultiIndex alpha)
    {
        return {Kind::Jet, i, std::move(alpha)};
    }

    friend auto operator<=>(const JetVar &, const JetVar &) = default;
    friend bool operator==(const JetVar &, const JetVar &) = default;
};

template <Field K>
using JetPolynomial = SparsePolynomial<K, JetVar>;

template <Field K>
using JetFraction = RationalFunction<K, JetVar>;

// Names and order of the jet coordinates.
struct JetContext
{
    std::vector<std::string> base;
    std::vector<std::string> fiber;
    std::vector<std::string> params;
    unsigned k{0};

    static JetContext of(const FiberedSystem &sys, unsigned k)
    {
        return {sys.base, sys.fiber, sys.params, k};
    }

    [[nodiscard]] unsigned q() const
    {
        return static_cast<unsigned>(fiber.size());
    }

    [[nodiscard]] std::string name(const JetVar &v) const
    {
        switch (v.kind) {
        case JetVar::Kind::Base:
            return base.at(v.index);
        case JetVar::Kind::Param:
            return params.at(v.index);
        case JetVar::Kind::Jet:
            return fiber.at(v.index) + "^" + to_string(v.alpha);
        }
        return "?";
    }

    // x_i as the order-0 jet coordinate, b and parameters as themselves.
    [[nodiscard]] JetVar resolve(const std::string &name) const
    {
        for (unsigned j = 0; j < base.size(); ++j) {
            if (base[j] == name) {
                return JetVar::base(j);
            }
        }
        for (unsigned i = 0; i < fiber.size(); ++i) {
            if (fiber[i] == name) {
                return JetVar::jet(i, MultiIndex(q(), 0));
            }
        }
        for (unsigned j = 0; j < params.size(); ++j) {
            if (params[j] == name) {
                return JetVar::param(j);
            }
        }
        throw UnknownVariable("'" + name + "' is not a coordinate of the jet space");
    }
};

template <Field K>
JetPolynomial<K> jet_coordinate_polynomial(const K &field, unsigned i, const MultiIndex &alpha)
{
    return JetPolynomial<K>::variable(field, JetVar::jet(i, alpha));
}

// Expression in (b, x, params) as a fraction of jet polynomials, x_i -> x_i^0.
template <Field K>
JetFraction<K> to_jet_fraction(const Expr &e, const K &field, const JetContext &ctx)
{
    return to_rational_function<K, JetVar>(
        e, field, [&](const std::string &name) { return JetPolynomial<K>::variable(field, ctx.resolve(name)); });
}

// D_j = sum_{i, alpha} x_i^{alpha + 1_j} d/dx_i^alpha (j is 0-based). Base
// coordinates and parameters are constant along fibers.
template <Field K>
JetPolynomial<K> total_derivative(const JetPolynomial<K> &f, unsigned j, unsigned k)
{
    JetPolynomial<K> out(f.field());
    for (const auto &v : f.variables()) {
        if (v.kind != JetVar::Kind::Jet) {
            continue;
        }
        if (j >= v.alpha.size()) {
            throw ShapeMismatch("total derivative direction out of range");
        }
        if (order(v.alpha) >= k) {
            throw OrderOverflow("total derivative of a coordinate of order " + std::to_string(order(v.alpha))
                                + " needs order " + std::to_string(k + 1));
        }
        MultiIndex up = v.alpha;
        ++up[j];
        out = out + f.derivative(v) * JetPolynomial<K>::variable(f.field(), JetVar::jet(v.index, up));
    }
    return out;
}

// Highest order of a jet coordinate appearing in f (0 if none).
template <Field K>
unsigned jet_order(const JetPolynomial<K> &f)
{
    unsigned o = 0;
    for (const auto &v : f.variables()) {
        if (v.kind == JetVar::Kind::Jet) {
            o = std::max(o, order(v.alpha));
        }
    }
    return o;
}

namespace detail
{

// d^alpha(N/D) = P_alpha / D^{|alpha|+1} for every |alpha| <= top, by
// D_j(P/D^m) = (D_j P * D - m P * D_j D) / D^{m+1}.
template <Field K>
std::map<MultiIndex, JetPolynomial<K>> prolonged_numerators(const JetFraction<K> &a, unsigned q, unsigned top,
                                                             unsigned k)
{
    const auto &field = a.num.field();
    std::map<MultiIndex, JetPolynomial<K>> out;
    const auto &layout = *MonomialLayout::get(q, top);
    std::vector<JetPolynomial<K>> dden;
    for (unsigned j = 0; j < q && top > 0; ++j) {
        dden.push_back(total_derivative(a.den, j, k));
    }
    out.emplace(MultiIndex(q, 0), a.num);
    for (std::size_t idx = 1; idx < layout.size(); ++idx) {
        const auto [parent, j] = layout.parent(idx);
        const auto &p = out.at(layout.at(parent));
        const auto m = static_cast<long>(order(layout.at(parent)) + 1);
        auto next = total_derivative(p, j, k);
        if (!a.den.is_one()) {
            next = next * a.den - p * dden[j].scaled(field.from_integer(mpz_class(m)));
        }
        out.emplace(layout.at(idx), std::move(next));
    }
    return out;
}

} // namespace detail

// RX.F for X = sum c_i(b) d/db_i + sum a_i d/dx_i, using
// RX = sum c_i d/db_i + sum_{i, alpha} d^alpha(a_i) d/dx_i^alpha.
template <Field K>
JetFraction<K> apply_RX(const VectorFieldSpec &x, const JetPolynomial<K> &f, const JetContext &ctx)
{
    const auto &field = f.field();
    const unsigned q = ctx.q();
    if (x.fiber.size() != q || x.base.size() != ctx.base.size()) {
        throw ShapeMismatch("vector field does not match the jet space");
    }
    if (jet_order(f) > ctx.k) {
        throw OrderOverflow("function has order above k");
    }
    const JetPolynomial<K> zero(field);
    JetFraction<K> result{zero};
    for (unsigned j = 0; j < x.base.size(); ++j) {
        const auto df = f.derivative(JetVar::base(j));
        if (df.is_zero() || x.base_components[j].is_literal(0)) {
            continue;
        }
        const auto c = to_jet_fraction(x.base_components[j], field, ctx);
        result = result + c * JetFraction<K>(df);
    }
    for (unsigned i = 0; i < q; ++i) {
        if (x.fiber_components[i].is_literal(0)) {
            continue;
        }
        unsigned top = 0;
        bool any = false;
        for (const auto &v : f.variables()) {
            if (v.kind == JetVar::Kind::Jet && v.index == i) {
                top = std::max(top, order(v.alpha));
                any = true;
            }
        }
        if (!any) {
            continue;
        }
        const auto a = to_jet_fraction(x.fiber_components[i], field, ctx);
        const auto numerators = detail::prolonged_numerators(a, q, top, ctx.k);
        // Common denominator D^{top+1}.
        JetPolynomial<K> num(field);
        std::vector<JetPolynomial<K>> den_powers{JetPolynomial<K>::constant(field, field.one())};
        for (unsigned e = 1; e <= top + 1; ++e) {
            den_powers.push_back(den_powers.back() * a.den);
        }
        for (const auto &v : f.variables()) {
            if (v.kind != JetVar::Kind::Jet || v.index != i) {
                continue;
            }
            const unsigned o = order(v.alpha);
            num = num + numerators.at(v.alpha) * den_powers[top - o] * f.derivative(v);
        }
        result = result + JetFraction<K>(num, den_powers[top + 1]);
    }
    return result;
}

// F at a frame: x_i^alpha(r) = r_i^alpha, b = base of r.
template <Field K>
typename K::value_type evaluate_at_frame(const JetPolynomial<K> &f, const FrameJet<K> &r,
                                         const std::vector<typename K::value_type> &params = {})
{
    return f.evaluate([&](const JetVar &v) {
        switch (v.kind) {
        case JetVar::Kind::Base:
            return r.base().at(v.index);
        case JetVar::Kind::Param:
            return params.at(v.index);
        case JetVar::Kind::Jet:
            break;
        }
        if (order(v.alpha) > r.order()) {
            throw OrderOverflow("frame order is below the coordinate's order");
        }
        return r.components().at(v.index).jet_coordinate(v.alpha);
    });
}

template <Field K>
std::string to_string(const JetPolynomial<K> &f, const JetContext &ctx)
{
    return f.to_string([&](const JetVar &v) { return ctx.name(v); });
}

} // namespace jetgroupoid
