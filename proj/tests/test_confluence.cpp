#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <jetgroupoid/cases.hpp>
#include <jetgroupoid/confluence.hpp>

#include "test_support.hpp"

namespace jetgroupoid
{
namespace
{

ParamFamily family_of(const std::string &text, const std::string &param, const mpq_class &s0)
{
    return make_family(parse_system(text), param, s0);
}

void expect_field(const VectorFieldSpec &got, const VectorFieldSpec &want)
{
    for (const auto &r : compare_vector_fields(got, want, 40, 17)) {
        EXPECT_TRUE(r.zero);
        EXPECT_LE(r.failure_bound_log10(), -9);
    }
}

TEST(Confluence, QuadraticPerturbation)
{
    const auto res = extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> x + s*x^2\n", "s", 0));
    expect_field(res.field, VectorFieldSpec{{}, {"x"}, {}, {parse_expr("x^2")}});
    EXPECT_TRUE(res.remainder_second_order);
}

TEST(Confluence, Translation)
{
    const auto res = extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> x + s\n", "s", 0));
    expect_field(res.field, VectorFieldSpec{{}, {"x"}, {}, {parse_expr("1")}});
}

TEST(Confluence, NonzeroSpecialValueAndRationalComponent)
{
    const auto a = extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> x + (s - 1)*x^2\n", "s", 1));
    expect_field(a.field, VectorFieldSpec{{}, {"x"}, {}, {parse_expr("x^2")}});
    const auto b = extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> x/(1 - s*x)\n", "s", 0));
    expect_field(b.field, VectorFieldSpec{{}, {"x"}, {}, {parse_expr("x^2")}});
    EXPECT_TRUE(b.remainder_second_order);
}

TEST(Confluence, BaseComponentAndOtherParameters)
{
    const auto res = extract_vector_field(
        family_of("system q\nbase t\nfiber x\nparams s m\nsigma t -> t + s\nmap x -> x + s*m*t*x\n", "s", 0));
    expect_field(res.field, VectorFieldSpec{{"t"}, {"x"}, {parse_expr("1")}, {parse_expr("m*t*x")}});
    EXPECT_EQ(res.params, std::vector<std::string>{"m"});
}

TEST(Confluence, BoundParametersAreSubstituted)
{
    auto fam = family_of("system q\nfiber x\nparams s m\nlet m = 3\nmap x -> x + s*m*x\n", "s", 0);
    const auto res = extract_vector_field(fam);
    expect_field(res.field, VectorFieldSpec{{}, {"x"}, {}, {parse_expr("3*x")}});
}

TEST(Confluence, NotIdentityAtSpecialValue)
{
    EXPECT_THROW(extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> 2*x + s\n", "s", 0)),
                 NotIdentityAtSpecialValue);
}

TEST(Confluence, PoleAtSpecialValue)
{
    EXPECT_THROW(extract_vector_field(family_of("system q\nfiber x\nparams s\nmap x -> x + x/s\n", "s", 0)),
                 PoleAtSpecialValue);
}

TEST(Confluence, UnknownParameter)
{
    auto fam = family_of("system q\nfiber x\nparams s\nmap x -> x + s\n", "s", 0);
    fam.parameter = "z";
    EXPECT_THROW(extract_vector_field(fam), UnknownVariable);
}

TEST(Confluence, Dp2LimitIsPainleveII)
{
    const auto res = extract_vector_field(cases::dp2_confluence_family());
    expect_field(res.field, cases::painleve_ii_field());
    EXPECT_TRUE(res.remainder_second_order);
    EXPECT_EQ(res.params, (std::vector<std::string>{"alpha", "beta", "gamma"}));
}

TEST(Confluence, Dp2WithSecondOrderShiftDegenerates)
{
    try {
        extract_vector_field(cases::dp2_confluence_family(2));
        FAIL() << "expected NotIdentityAtSpecialValue";
    } catch (const NotIdentityAtSpecialValue &e) {
        EXPECT_NE(std::string(e.what()).find("'g'"), std::string::npos) << e.what();
    }
}

Expr random_polynomial(std::mt19937_64 &rng, const std::vector<std::string> &vars, int max_terms)
{
    std::uniform_int_distribution<int> terms(1, max_terms);
    std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
    std::uniform_int_distribution<unsigned> expo(1, 3);
    Expr e = Expr::integer(0);
    const int n = terms(rng);
    for (int t = 0; t < n; ++t) {
        Expr mono = Expr::rational(testing::random_rational(rng, 4, 3));
        const int factors = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int f = 0; f < factors; ++f) {
            mono = mono * pow(Expr::variable(vars[pick(rng)]), expo(rng));
        }
        e = e + mono;
    }
    return e;
}

FiberedSystem perturbation(const std::vector<Expr> &first, const std::vector<Expr> &second)
{
    FiberedSystem sys;
    sys.name = "p";
    sys.fiber = {"x", "y"};
    sys.params = {"s"};
    const auto s = Expr::variable("s");
    for (std::size_t i = 0; i < 2; ++i) {
        sys.map.push_back(Expr::variable(sys.fiber[i]) + s * first[i] + pow(s, 2) * second[i]);
    }
    return sys;
}

TEST(Confluence, ExtractionIsLinear)
{
    std::mt19937_64 rng(20261018);
    const std::vector<std::string> vars{"x", "y"};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Expr> x, y, z1, z2, z3, sum;
        for (int i = 0; i < 2; ++i) {
            x.push_back(random_polynomial(rng, vars, 3));
            y.push_back(random_polynomial(rng, vars, 3));
            z1.push_back(random_polynomial(rng, vars, 2));
            z2.push_back(random_polynomial(rng, vars, 2));
            z3.push_back(random_polynomial(rng, vars, 2));
            sum.push_back(x.back() + y.back());
        }
        const auto ex = extract_vector_field(make_family(perturbation(x, z1), "s", 0));
        const auto ey = extract_vector_field(make_family(perturbation(y, z2), "s", 0));
        const auto es = extract_vector_field(make_family(perturbation(sum, z3), "s", 0));
        EXPECT_TRUE(ex.remainder_second_order);
        EXPECT_TRUE(es.remainder_second_order);
        VectorFieldSpec added{{}, vars, {}, {}};
        for (int i = 0; i < 2; ++i) {
            added.fiber_components.push_back(ex.field.fiber_components[i] + ey.field.fiber_components[i]);
        }
        for (const auto &r : compare_vector_fields(es.field, added, 30, 100 + trial)) {
            EXPECT_TRUE(r.zero);
        }
        for (const auto &r : compare_vector_fields(ex.field, VectorFieldSpec{{}, vars, {}, x}, 30, 200 + trial)) {
            EXPECT_TRUE(r.zero);
        }
    }
}

TEST(Confluence, ParameterCoordinateRestrictsToInvariant)
{
    const auto fam = cases::dp2_confluence_family();
    const auto ctx = JetContext::of(fam.system, 1);
    const auto x = cases::painleve_ii_field();
    const RationalField q;
    const auto alpha = JetPolynomial<RationalField>::variable(q, JetVar::param(0));
    const auto r = check_invariant_restricts(alpha, x, ctx, 40, 5);
    EXPECT_TRUE(r.zero);
    EXPECT_LE(r.failure_bound_log10(), -9);
    const auto f = jet_coordinate_polynomial(q, 0, MultiIndex{0, 0});
    EXPECT_FALSE(check_invariant_restricts(f, x, ctx, 40, 5).zero);
}

TEST(Confluence, TranslationFieldKillsFirstDerivatives)
{
    const auto sys = parse_system("system tr\nbase b\nfiber x\nsigma b -> b + 1\nmap x -> x\n");
    const auto ctx = JetContext::of(sys, 2);
    const VectorFieldSpec x{{"b"}, {"x"}, {parse_expr("0")}, {parse_expr("1")}};
    const RationalField q;
    EXPECT_TRUE(check_invariant_restricts(jet_coordinate_polynomial(q, 0, MultiIndex{1}), x, ctx, 40, 3).zero);
    EXPECT_FALSE(check_invariant_restricts(jet_coordinate_polynomial(q, 0, MultiIndex{0}), x, ctx, 40, 3).zero);
}

TEST(Confluence, AreaInvariantSurvivesTheLimit)
{
    const auto fam = cases::dp2_confluence_family();
    const auto ctx = JetContext::of(fam.system, 1);
    const auto area = cases::area_invariant(ctx);
    const auto fi = check_family_invariance(area, fam.system, 1, 40, 11);
    EXPECT_TRUE(fi.invariant);
    EXPECT_LE(fi.failure_bound_log10(), -9);
    const auto limit = extract_vector_field(fam);
    const auto r = check_invariant_restricts(JetFraction<RationalField>(area), limit.field, ctx, 40, 12,
                                             std::pair<unsigned, mpq_class>{3, 0});
    EXPECT_TRUE(r.zero);
    EXPECT_LE(r.failure_bound_log10(), -9);
}

TEST(Confluence, NonInvariantIsRejected)
{
    const auto sys = cases::dp2_system();
    const auto ctx = JetContext::of(sys, 1);
    const RationalField q;
    EXPECT_FALSE(check_family_invariance(jet_coordinate_polynomial(q, 0, MultiIndex{0, 0}), sys, 1, 40, 2).invariant);
    EXPECT_TRUE(check_family_invariance(cases::area_invariant(ctx), sys, 1, 40, 2).invariant);
}

TEST(Confluence, RestrictionUndefined)
{
    const auto fam = cases::dp2_confluence_family();
    const auto ctx = JetContext::of(fam.system, 1);
    const RationalField q;
    const JetFraction<RationalField> f(JetPolynomial<RationalField>::constant(q, 1),
                                       JetPolynomial<RationalField>::variable(q, JetVar::param(3)));
    EXPECT_THROW(check_invariant_restricts(f, cases::painleve_ii_field(), ctx, 10, 1,
                                           std::pair<unsigned, mpq_class>{3, 0}),
                 RestrictionUndefined);
}

} // namespace
} // namespace jetgroupoid
