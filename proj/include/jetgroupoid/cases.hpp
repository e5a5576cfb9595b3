#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <jetgroupoid/confluence.hpp>
#include <jetgroupoid/identity.hpp>
#include <jetgroupoid/linalg.hpp>
#include <jetgroupoid/multi_index.hpp>
#include <jetgroupoid/prolong.hpp>
#include <jetgroupoid/series.hpp>
#include <jetgroupoid/system.hpp>

namespace jetgroupoid::cases
{

inline constexpr const char *dp2_text = R"(system dp2
base n
fiber x y
params a b c
sigma n -> n + 1
map x -> -y + ((a + b*n)*x + c)/(1 - x^2)
map y -> x
)";

// dP2 over the base n with fiber (x_n, x_{n-1}); any of a, b, c may be pinned.
inline FiberedSystem dp2_system(std::optional<mpq_class> a = {}, std::optional<mpq_class> b = {},
                                std::optional<mpq_class> c = {})
{
    std::map<std::string, mpq_class> pins;
    if (a) {
        pins["a"] = *a;
    }
    if (b) {
        pins["b"] = *b;
    }
    if (c) {
        pins["c"] = *c;
    }
    return bind_parameters(parse_system(dp2_text), pins);
}

// Variant with a, b, c moved into the fiber as invariant coordinates.
inline FiberedSystem dp2_full_system()
{
    return parse_system(R"(system dp2_full
base n
fiber x y a b c
sigma n -> n + 1
map x -> -y + ((a + b*n)*x + c)/(1 - x^2)
map y -> x
map a -> a
map b -> b
map c -> c
)");
}

// det of the fiber Jacobian is identically 1 (q = 2 only).
inline ZeroTestResult fiber_jacobian_det_is_one(const FiberedSystem &sys, unsigned trials, std::uint64_t seed)
{
    if (sys.fiber_dimension() != 2) {
        throw ShapeMismatch("area preservation is defined for two fiber variables");
    }
    std::map<std::string, Expr> pins;
    for (const auto &[p, v] : sys.bindings) {
        pins[p] = Expr::rational(v);
    }
    const auto det = substitute(symbolic_determinant(fiber_jacobian(sys)), pins);
    return expr_probably_zero(det - Expr::integer(1), trials, seed);
}

// The order-k jet of the area-form invariant: det of the linear block.
inline JetPolynomial<RationalField> area_invariant(const JetContext &ctx)
{
    if (ctx.fiber.size() != 2 || ctx.k < 1) {
        throw ShapeMismatch("area invariant needs q = 2 and k >= 1");
    }
    const RationalField q;
    const auto r = [&](unsigned i, MultiIndex a) { return jet_coordinate_polynomial(q, i, a); };
    return r(0, {1, 0}) * r(1, {0, 1}) - r(0, {0, 1}) * r(1, {1, 0});
}

// Confluence change of variables for dP2 -> PII at a = 2, b = 0, c = 0:
// n = t/eps, (x, y) = (eps f + eps^2 g, eps f),
// a = 2 + eps^4 alpha, b = eps^3 + eps^4 beta, c = eps^3 gamma.
// `b_shift` is the eps power in b; 3 is the working choice, 2 degenerates.
inline ParamFamily dp2_confluence_family(unsigned b_shift = 3)
{
    const auto dp2 = parse_system(dp2_text);
    const auto v = [](const char *n) { return Expr::variable(n); };
    const auto eps = v("eps");
    const auto n = [](long i) { return Expr::integer(i); };
    const auto xs = eps * v("f") + pow(eps, 2) * v("g");
    const std::map<std::string, Expr> change{
        {"n", v("t") / eps},
        {"x", xs},
        {"y", eps * v("f")},
        {"a", n(2) + pow(eps, 4) * v("alpha")},
        {"b", pow(eps, b_shift) + pow(eps, 4) * v("beta")},
        {"c", pow(eps, 3) * v("gamma")},
    };
    FiberedSystem sys;
    sys.name = b_shift == 3 ? "dp2_confluence" : "dp2_confluence_b" + std::to_string(b_shift);
    sys.base = {"t"};
    sys.fiber = {"f", "g"};
    sys.params = {"alpha", "beta", "gamma", "eps"};
    sys.sigma = {v("t") + eps};
    const auto phi_x = substitute(dp2.map[0], change);
    const auto phi_y = substitute(dp2.map[1], change);
    sys.map = {phi_y / eps, (phi_x - phi_y) / pow(eps, 2)};
    return ParamFamily{std::move(sys), "eps", mpq_class(0)};
}

// The expected limit field: d/dt + g d/df + (2 f^3 + t f + gamma) d/dg.
inline VectorFieldSpec painleve_ii_field()
{
    return VectorFieldSpec{{"t"},
                           {"f", "g"},
                           {parse_expr("1")},
                           {parse_expr("g"), parse_expr("2*f^3 + t*f + gamma")}};
}

namespace detail
{

template <Field K>
TruncatedSeries<K> partial(const TruncatedSeries<K> &s, unsigned j)
{
    const auto &field = s.field();
    const unsigned k = s.order();
    TruncatedSeries<K> out(field, s.variables(), k == 0 ? 0 : k - 1);
    const auto &lay = s.layout();
    for (std::size_t i = 0; i < lay.size(); ++i) {
        auto a = lay.at(i);
        if (a.at(j) == 0) {
            continue;
        }
        const auto m = a.at(j);
        a.at(j) -= 1;
        if (order(a) < k) {
            out.set_coefficient(a, field.mul(s[i], field.from_integer(m)));
        }
    }
    return out;
}

template <Field K>
TruncatedSeries<K> jacobian_determinant(const SeriesTuple<K> &f)
{
    return partial(f[0], 0) * partial(f[1], 1) - partial(f[0], 1) * partial(f[1], 0);
}

} // namespace detail

// A random area-preserving order-k jet: two polynomial shears composed, plus
// a translation.
inline SeriesTuple<PrimeField> random_symplectic_jet(const PrimeField &field, unsigned k, std::mt19937_64 &rng)
{
    const auto shear = [&](unsigned moving) {
        const unsigned other = 1 - moving;
        SeriesTuple<PrimeField> s = identity_tuple(field, 2, k);
        auto u = TruncatedSeries<PrimeField>::variable(field, 2, k, other);
        auto power = u;
        for (unsigned d = 1; d <= k; ++d) {
            s[moving] = s[moving] + scale(power, field.random(rng));
            power = power * u;
        }
        return s;
    };
    auto f = compose(shear(0), shear(1));
    f = compose(shear(1), f);
    for (auto &c : f) {
        c[0] = field.random(rng);
    }
    return f;
}

// Dimension of order-k jets of area-preserving maps of the plane: free
// coefficients minus the rank of the linearized det = 1 constraint at a
// random area-preserving jet.
inline std::size_t symplectic_jet_dim(unsigned k, std::uint64_t seed)
{
    if (k == 0) {
        return 2;
    }
    const PrimeField field(random_prime_31(seed));
    std::mt19937_64 rng(splitmix64(seed));
    const auto base = random_symplectic_jet(field, k, rng);
    const std::size_t per = base[0].coefficients().size();
    Matrix<PrimeField> m;
    const auto half = field.inv(field.from_integer(2));
    for (unsigned comp = 0; comp < 2; ++comp) {
        for (std::size_t i = 0; i < per; ++i) {
            auto plus = base;
            auto minus = base;
            plus[comp][i] = field.add(plus[comp][i], field.one());
            minus[comp][i] = field.sub(minus[comp][i], field.one());
            // det J is quadratic, so the central difference is the exact derivative.
            const auto d = detail::jacobian_determinant(plus) - detail::jacobian_determinant(minus);
            std::vector<std::uint64_t> col;
            for (const auto &c : d.coefficients()) {
                col.push_back(field.mul(c, half));
            }
            m.push_back(std::move(col));
        }
    }
    return 2 * per - rank(field, m);
}

inline std::size_t symplectic_jet_dim_closed_form(unsigned k)
{
    if (k == 0) {
        return 2;
    }
    const auto b = [](unsigned n, unsigned r) { return binomial(n, r); };
    return 2 + 2 * (b(k + 2, 2) - 1) - b(k + 1, 2);
}

} // namespace jetgroupoid::cases
