#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/expr.hpp>
#include <jetgroupoid/identity.hpp>
#include <jetgroupoid/orbitprobe.hpp>
#include <jetgroupoid/polynomial.hpp>
#include <jetgroupoid/prolong.hpp>
#include <jetgroupoid/system.hpp>

namespace jetgroupoid
{

namespace detail
{

inline std::string fresh_name(const FiberedSystem &sys, const std::string &stem)
{
    std::string name = stem;
    while (sys.is_base(name) || sys.is_fiber(name) || sys.is_param(name)) {
        name += "_";
    }
    return name;
}

// A component of the family at s = s0 + u, as N/D with the common power of u
// removed, so that D(u = 0) != 0 unless the component has a pole there.
struct ShiftedComponent
{
    NamedPolynomial num;
    NamedPolynomial den;
};

inline ShiftedComponent shift_component(const Expr &e, const FiberedSystem &sys, const std::string &s,
                                        const mpq_class &s0, const std::string &u, const std::string &label)
{
    std::map<std::string, Expr> pins;
    for (const auto &[p, q] : sys.bindings) {
        if (p != s) {
            pins[p] = Expr::rational(q);
        }
    }
    const auto frac = to_named_fraction(substitute(e, pins));
    const RationalField field;
    const std::map<std::string, NamedPolynomial> shift{
        {s, NamedPolynomial::constant(field, s0) + NamedPolynomial::variable(field, u)}};
    auto num = frac.num.substitute(shift);
    auto den = frac.den.substitute(shift);
    const unsigned vd = den.valuation(u);
    const unsigned vn = num.valuation(u);
    if (!num.is_zero() && vn < vd) {
        throw PoleAtSpecialValue("component '" + label + "' has a pole at " + s + " = " + s0.get_str());
    }
    if (vd > 0) {
        den = den.divide_by_power(u, vd);
        num = num.is_zero() ? num : num.divide_by_power(u, vd);
    }
    return {std::move(num), std::move(den)};
}

inline Expr fraction_to_expr(const NamedPolynomial &num, const NamedPolynomial &den)
{
    if (den.is_constant()) {
        return to_expr(num.scaled(1 / den.constant_term()));
    }
    return to_expr(num) / to_expr(den);
}

} // namespace detail

// X with Phi_s = Id + (s - s0) X + o(s - s0), in exact normal form: each
// component is written as N/D in u = s - s0, Phi_{s0} = Id is checked as a
// polynomial identity N_0 = x D_0, and X = (N_1 - x D_1) / D_0.
struct ConfluenceResult
{
    VectorFieldSpec field;
    std::vector<std::string> params; // other parameters; their X-components are 0
    bool remainder_second_order{false};
};

inline ConfluenceResult extract_vector_field(const ParamFamily &family)
{
    const auto &sys = family.system;
    const auto &s = family.parameter;
    if (!sys.is_param(s)) {
        throw UnknownVariable("'" + s + "' is not a parameter of system '" + sys.name + "'");
    }
    const std::string u = detail::fresh_name(sys, "u");
    const RationalField field;
    ConfluenceResult out;
    out.field.base = sys.base;
    out.field.fiber = sys.fiber;
    bool remainder_ok = true;
    const auto one = [&](const Expr &comp, const std::string &var) {
        const auto sh = detail::shift_component(comp, sys, s, family.special_value, u, var);
        const auto x = NamedPolynomial::variable(field, var);
        const auto n0 = sh.num.coefficient_of(u, 0);
        const auto d0 = sh.den.coefficient_of(u, 0);
        if (!(n0 - x * d0).is_zero()) {
            throw NotIdentityAtSpecialValue("component '" + var + "' is not the identity at " + s + " = "
                                            + family.special_value.get_str());
        }
        const auto n1 = sh.num.coefficient_of(u, 1);
        const auto d1 = sh.den.coefficient_of(u, 1);
        const auto xn = n1 - x * d1;
        // Phi - x - u X = (N d0 - x D d0 - u xn D) / (D d0) must be O(u^2).
        const auto uu = NamedPolynomial::variable(field, u);
        const auto rem = sh.num * d0 - x * sh.den * d0 - uu * xn * sh.den;
        if (!rem.is_zero() && rem.valuation(u) < 2) {
            remainder_ok = false;
        }
        return detail::fraction_to_expr(xn, d0);
    };
    for (std::size_t i = 0; i < sys.base.size(); ++i) {
        out.field.base_components.push_back(one(sys.sigma[i], sys.base[i]));
    }
    for (std::size_t i = 0; i < sys.fiber.size(); ++i) {
        out.field.fiber_components.push_back(one(sys.map[i], sys.fiber[i]));
    }
    for (const auto &p : sys.params) {
        if (p != s) {
            out.params.push_back(p);
        }
    }
    out.remainder_second_order = remainder_ok;
    return out;
}

// Componentwise randomized comparison of two vector fields on the same space.
inline std::vector<ZeroTestResult> compare_vector_fields(const VectorFieldSpec &a, const VectorFieldSpec &b,
                                                         unsigned trials, std::uint64_t seed)
{
    if (a.base != b.base || a.fiber != b.fiber) {
        throw ShapeMismatch("vector fields live on different spaces");
    }
    std::vector<ZeroTestResult> out;
    std::uint64_t index = 0;
    const auto cmp = [&](const std::vector<Expr> &x, const std::vector<Expr> &y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back(exprs_probably_equal(x[i], y[i], trials, derive_seed(seed, ++index)));
        }
    };
    cmp(a.base_components, b.base_components);
    cmp(a.fiber_components, b.fiber_components);
    return out;
}

// Q-fraction of jet polynomials reduced mod p.
inline JetFraction<PrimeField> reduce_fraction(const JetFraction<RationalField> &f, const PrimeField &field)
{
    return JetFraction<PrimeField>(f.num.map_coefficients(field), f.den.map_coefficients(field));
}

namespace detail
{

inline ZeroTestResult jet_polynomial_probably_zero(const JetPolynomial<RationalField> &z, unsigned trials,
                                                   std::uint64_t seed)
{
    const PrimeField field(random_prime_31(seed));
    const auto zp = z.map_coefficients(field);
    ZeroTestResult res{true, zp.total_degree(), trials, field.modulus(), 0};
    std::mt19937_64 rng(splitmix64(seed));
    for (unsigned t = 0; t < trials; ++t) {
        std::map<JetVar, std::uint64_t> point;
        const auto v = zp.evaluate([&](const JetVar &var) {
            auto it = point.find(var);
            if (it == point.end()) {
                it = point.emplace(var, field.random(rng)).first;
            }
            return it->second;
        });
        if (v != 0) {
            res.zero = false;
            return res;
        }
    }
    return res;
}

} // namespace detail

// RX.F = 0 for F = num/den, via the quotient rule: the numerator
// RX(num) den - num RX(den) (over the common denominator) is tested for zero.
// With `restrict_to`, parameter (index, value) is first pinned in F.
inline ZeroTestResult check_invariant_restricts(const JetFraction<RationalField> &f, const VectorFieldSpec &x,
                                                const JetContext &ctx, unsigned trials, std::uint64_t seed,
                                                std::optional<std::pair<unsigned, mpq_class>> restrict_to = {})
{
    auto num = f.num;
    auto den = f.den;
    if (restrict_to) {
        const RationalField q;
        const std::map<JetVar, JetPolynomial<RationalField>> pin{
            {JetVar::param(restrict_to->first), JetPolynomial<RationalField>::constant(q, restrict_to->second)}};
        num = num.substitute(pin);
        den = den.substitute(pin);
        if (den.is_zero()) {
            throw RestrictionUndefined("the invariant's denominator vanishes identically at the special value");
        }
    }
    const auto rn = apply_RX(x, num, ctx);
    const auto rd = apply_RX(x, den, ctx);
    const auto z = rn.num * rd.den * den - num * rd.num * rn.den;
    return detail::jet_polynomial_probably_zero(z, trials, seed);
}

inline ZeroTestResult check_invariant_restricts(const JetPolynomial<RationalField> &f, const VectorFieldSpec &x,
                                                const JetContext &ctx, unsigned trials, std::uint64_t seed)
{
    return check_invariant_restricts(JetFraction<RationalField>(f), x, ctx, trials, seed);
}

struct InvarianceResult
{
    bool invariant{false};
    std::uint64_t trials{0};
    std::uint64_t modulus{0};
    std::uint64_t degree_bound{0};
    std::uint64_t resamples{0};

    [[nodiscard]] long failure_bound_log10() const
    {
        return ZeroTestResult{invariant, degree_bound, trials, modulus, resamples}.failure_bound_log10();
    }
};

// F o R_k Phi = F at random order-k frames over F_p, with every unbound
// parameter (the family parameter included) drawn at random per trial.
inline InvarianceResult check_family_invariance(const JetFraction<RationalField> &f, const FiberedSystem &sys,
                                                unsigned k, unsigned trials, std::uint64_t seed)
{
    const PrimeField field(random_prime_31(seed));
    const auto fp = reduce_fraction(f, field);
    const auto ctx = JetContext::of(sys, k);
    InvarianceResult res{true, trials, field.modulus(), 0, 0};
    // Crude degree bound for the numerator of F o R Phi - F in the frame,
    // base and parameter values.
    std::uint64_t phi_deg = 1;
    for (const auto &e : sys.map) {
        const auto d = degree_bound(e);
        phi_deg = std::max<std::uint64_t>(phi_deg, d.numerator + d.denominator);
    }
    const std::uint64_t fdeg = std::max(fp.num.total_degree(), fp.den.total_degree()) + 1;
    res.degree_bound = 2 * fdeg * ((k + 1) * phi_deg + k + 1);
    std::mt19937_64 rng(splitmix64(seed));
    const unsigned q = ctx.q();
    for (unsigned t = 0; t < trials; ++t) {
        unsigned misses = 0;
        for (;;) {
            Environment<PrimeField> params;
            std::vector<std::uint64_t> pv;
            for (const auto &p : sys.params) {
                const auto b = sys.bindings.find(p);
                params[p] = b != sys.bindings.end() ? field.from_rational(b->second) : field.random(rng);
                pv.push_back(params[p]);
            }
            Point<PrimeField> base;
            for (std::size_t j = 0; j < sys.base.size(); ++j) {
                base.push_back(field.random(rng));
            }
            SeriesTuple<PrimeField> comps;
            for (unsigned i = 0; i < q; ++i) {
                TruncatedSeries<PrimeField> s(field, q, k);
                for (std::size_t c = 0; c < s.coefficients().size(); ++c) {
                    s[c] = field.random(rng);
                }
                comps.push_back(std::move(s));
            }
            try {
                const FrameJet<PrimeField> r(base, comps);
                const auto image = prolong_map(sys, r, k, params);
                const auto d0 = evaluate_at_frame(fp.den, r, pv);
                const auto d1 = evaluate_at_frame(fp.den, image, pv);
                if (d0 == 0 || d1 == 0) {
                    throw EvalDivisionByZero("invariant denominator vanishes at the sample frame");
                }
                const auto lhs = field.mul(evaluate_at_frame(fp.num, image, pv), d0);
                const auto rhs = field.mul(evaluate_at_frame(fp.num, r, pv), d1);
                if (lhs != rhs) {
                    res.invariant = false;
                    return res;
                }
                break;
            } catch (const Error &e) {
                const std::string kind = e.kind();
                if (kind != "IndeterminacyPoint" && kind != "DegenerateImage" && kind != "SingularLinearPart"
                    && kind != "EvalDivisionByZero") {
                    throw;
                }
                ++res.resamples;
                if (++misses > max_pole_resamples) {
                    throw PoleSaturated("more than " + std::to_string(max_pole_resamples)
                                        + " consecutive sample frames were unusable");
                }
            }
        }
    }
    return res;
}

inline InvarianceResult check_family_invariance(const JetPolynomial<RationalField> &f, const FiberedSystem &sys,
                                                unsigned k, unsigned trials, std::uint64_t seed)
{
    return check_family_invariance(JetFraction<RationalField>(f), sys, k, trials, seed);
}

} // namespace jetgroupoid
