#include <random>

#include <gtest/gtest.h>

#include <jetgroupoid/frame.hpp>
#include <jetgroupoid/series.hpp>

#include "test_support.hpp"

using namespace jetgroupoid;
using jetgroupoid::testing::Q;
using jetgroupoid::testing::series;

namespace
{

using QSeries = TruncatedSeries<RationalField>;

// Univariate oracle for compositional inversion (Lagrange):
// [w^n] g = (1/n) [w^(n-1)] (w / f(w))^n. Independent of the jetcore path.
std::vector<mpq_class> lagrange_inverse(const std::vector<mpq_class> &f, unsigned k)
{
    // h(w) = f(w) / w, coefficients h_0..h_{k-1}
    std::vector<mpq_class> h(k, 0);
    for (unsigned i = 0; i < k; ++i) {
        h[i] = i + 1 < f.size() ? f[i + 1] : mpq_class(0);
    }
    // u = 1 / h by long division
    std::vector<mpq_class> u(k, 0);
    for (unsigned n = 0; n < k; ++n) {
        mpq_class acc = n == 0 ? mpq_class(1) : mpq_class(0);
        for (unsigned j = 1; j <= n; ++j) {
            acc -= h[j] * u[n - j];
        }
        u[n] = acc / h[0];
    }
    std::vector<mpq_class> g(k + 1, 0);
    std::vector<mpq_class> power(k, 0);
    power[0] = 1;
    for (unsigned n = 1; n <= k; ++n) {
        std::vector<mpq_class> next(k, 0);
        for (unsigned a = 0; a < k; ++a) {
            for (unsigned b = 0; a + b < k; ++b) {
                next[a + b] += power[a] * u[b];
            }
        }
        power = next;
        g[n] = power[n - 1] / n;
    }
    return g;
}

} // namespace

TEST(SeriesArith, TelescopingProduct)
{
    const auto a = series(1, 2, {{{0}, 1}, {{1}, 1}});
    const auto b = series(1, 2, {{{0}, 1}, {{1}, -1}});
    EXPECT_EQ(a * b, series(1, 2, {{{0}, 1}, {{2}, -1}}));
}

TEST(SeriesArith, GeometricSeries)
{
    const auto one = QSeries::constant(Q, 1, 3, 1);
    const auto b = series(1, 3, {{{0}, 1}, {{1}, -1}});
    EXPECT_EQ(one / b, series(1, 3, {{{0}, 1}, {{1}, 1}, {{2}, 1}, {{3}, 1}}));
}

TEST(SeriesArith, TruncationKillsOrderTwo)
{
    const auto a = series(2, 1, {{{1, 0}, 1}, {{0, 1}, 1}});
    const auto b = series(2, 1, {{{1, 0}, 1}, {{0, 1}, -1}});
    EXPECT_TRUE((a * b).is_zero());
}

TEST(SeriesArith, DivisionByNonUnit)
{
    const auto one = QSeries::constant(Q, 1, 3, 1);
    const auto eps = QSeries::variable(Q, 1, 3, 0);
    EXPECT_THROW(one / eps, DivisionByNonUnit);
}

TEST(SeriesArith, FieldMismatch)
{
    const PrimeField f1(1073741827);
    const PrimeField f2(2147483647);
    const auto a = TruncatedSeries<PrimeField>::constant(f1, 1, 2, 3);
    const auto b = TruncatedSeries<PrimeField>::constant(f2, 1, 2, 3);
    EXPECT_THROW(a + b, FieldMismatch);
    EXPECT_THROW(a * b, FieldMismatch);
}

TEST(SeriesArith, PrimeFieldRejectsSmallOrComposite)
{
    EXPECT_THROW(PrimeField(101), InvalidField);
    EXPECT_THROW(PrimeField(1073741825), InvalidField);
    EXPECT_NO_THROW(PrimeField(random_prime_31(7)));
    EXPECT_GT(random_prime_31(7), std::uint64_t{1} << 30);
}

TEST(SeriesArith, JetCoordinatesCarryFactorials)
{
    auto s = series(2, 3, {{{2, 1}, 5}});
    EXPECT_EQ(s.jet_coordinate({2, 1}), 10);
    s.set_jet_coordinate({0, 3}, 12);
    EXPECT_EQ(s.coefficient({0, 3}), 2);
    EXPECT_EQ(s.coefficient({3, 1}), 0); // beyond order reads as zero
}

TEST(SeriesCompose, Expansion)
{
    const auto outer = series(1, 3, {{{2}, 1}});
    const std::vector<QSeries> inner{series(1, 3, {{{1}, 1}, {{2}, 1}})};
    EXPECT_EQ(compose(outer, inner), series(1, 3, {{{2}, 1}, {{3}, 2}}));
}

TEST(SeriesCompose, IdentityLaw)
{
    std::mt19937_64 rng(11);
    const auto outer = jetgroupoid::testing::random_series(Q, 2, 4, rng);
    EXPECT_EQ(compose(outer, identity_tuple(Q, 2, 4)), outer);
}

TEST(SeriesCompose, VariableSwap)
{
    const auto outer = series(2, 2, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}});
    const std::vector<QSeries> inner{QSeries::variable(Q, 2, 2, 1), QSeries::variable(Q, 2, 2, 0)};
    EXPECT_EQ(compose(outer, inner), outer);
    const auto lopsided = series(2, 2, {{{1, 0}, 3}, {{0, 1}, 5}});
    EXPECT_EQ(compose(lopsided, inner), series(2, 2, {{{0, 1}, 3}, {{1, 0}, 5}}));
}

TEST(SeriesCompose, NonPointedInner)
{
    const auto outer = series(1, 2, {{{1}, 1}});
    const std::vector<QSeries> inner{series(1, 2, {{{0}, 1}, {{1}, 1}})};
    EXPECT_THROW(compose(outer, inner), NonPointedInner);
}

TEST(TupleInvert, Linear)
{
    const SeriesTuple<RationalField> f{series(1, 2, {{{1}, 2}})};
    EXPECT_EQ(tuple_invert(f)[0], series(1, 2, {{{1}, mpq_class(1, 2)}}));
}

TEST(TupleInvert, QuadraticAgainstLagrangeOracle)
{
    const SeriesTuple<RationalField> f{series(1, 3, {{{1}, 1}, {{2}, 1}})};
    const auto g = tuple_invert(f);
    const auto oracle = lagrange_inverse({0, 1, 1}, 3);
    // Frozen from the oracle: eps - eps^2 + 2 eps^3.
    ASSERT_EQ(oracle, (std::vector<mpq_class>{0, 1, -1, 2}));
    EXPECT_EQ(g[0], series(1, 3, {{{1}, 1}, {{2}, -1}, {{3}, 2}}));
    EXPECT_EQ(compose(f, g), identity_tuple(Q, 1, 3));
    EXPECT_EQ(compose(g, f), identity_tuple(Q, 1, 3));
}

TEST(TupleInvert, RandomUnivariateMatchesLagrange)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const unsigned k = 5;
        std::vector<mpq_class> f(k + 1, 0);
        f[1] = jetgroupoid::testing::random_nonzero_rational(rng);
        for (unsigned i = 2; i <= k; ++i) {
            f[i] = jetgroupoid::testing::random_rational(rng);
        }
        QSeries s(Q, 1, k);
        for (unsigned i = 0; i <= k; ++i) {
            s[i] = f[i];
        }
        const auto g = tuple_invert(SeriesTuple<RationalField>{s});
        const auto oracle = lagrange_inverse(f, k);
        for (unsigned i = 0; i <= k; ++i) {
            EXPECT_EQ(g[0][i], oracle[i]) << "trial " << trial << " coefficient " << i;
        }
    }
}

TEST(TupleInvert, IdentityAndSingular)
{
    EXPECT_EQ(tuple_invert(identity_tuple(Q, 3, 3)), identity_tuple(Q, 3, 3));
    const SeriesTuple<RationalField> singular{series(2, 2, {{{1, 0}, 1}}), series(2, 2, {{{1, 0}, 2}})};
    EXPECT_THROW(tuple_invert(singular), SingularLinearPart);
}

TEST(FrameGamma, IdentityAction)
{
    std::mt19937_64 rng(5);
    const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, 3, rng);
    EXPECT_EQ(frame_compose_gamma(r, SourceJet<RationalField>::identity(Q, 2, 3)), r);
}

TEST(FrameGamma, LinearFramesMultiplyMatrices)
{
    const Matrix<RationalField> a{{1, 2}, {3, 5}};
    const Matrix<RationalField> b{{2, -1}, {1, 4}};
    const FrameJet<RationalField> r({7}, linear_tuple(Q, a, 2));
    const SourceJet<RationalField> gamma(linear_tuple(Q, b, 2));
    const auto rg = frame_compose_gamma(r, gamma);
    EXPECT_EQ(linear_part(rg.components()), multiply(Q, a, b));
    EXPECT_EQ(rg.base(), r.base());
}

TEST(FrameGamma, ActionIsAssociative)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, 3, rng);
        const auto g1 = jetgroupoid::testing::random_gamma(Q, 2, 3, rng);
        const auto g2 = jetgroupoid::testing::random_gamma(Q, 2, 3, rng);
        EXPECT_EQ(frame_compose_gamma(frame_compose_gamma(r, g1), g2), frame_compose_gamma(r, g1.after(g2)));
    }
}

TEST(FrameGamma, GroupLaws)
{
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned k = 1 + trial % 4;
        const auto g = jetgroupoid::testing::random_gamma(Q, 2, k, rng);
        const auto id = SourceJet<RationalField>::identity(Q, 2, k);
        EXPECT_EQ(g.after(g.inverse()), id);
        EXPECT_EQ(g.inverse().after(g), id);
        EXPECT_EQ(g.after(id), g);
    }
}

TEST(MapJetPair, UnitWhenFramesCoincide)
{
    std::mt19937_64 rng(23);
    const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, 3, rng);
    EXPECT_EQ(map_jet_from_pair(r, r), MapJet<RationalField>::identity(Q, r.base(), r.fiber_point(), 3));
}

TEST(MapJetPair, LinearFrames)
{
    const Matrix<RationalField> a{{1, 2}, {3, 5}};
    const Matrix<RationalField> b{{2, -1}, {1, 4}};
    const FrameJet<RationalField> r({0}, linear_tuple(Q, a, 2));
    const FrameJet<RationalField> s({1}, linear_tuple(Q, b, 2));
    const auto phi = map_jet_from_pair(r, s);
    EXPECT_EQ(phi.linear_part(), multiply(Q, a, inverse(Q, b)));
    EXPECT_EQ(phi.source_base(), s.base());
    EXPECT_EQ(phi.target_base(), r.base());
    for (const auto &c : phi.components()) {
        for (std::size_t i = 3; i < c.coefficients().size(); ++i) {
            EXPECT_EQ(c[i], 0);
        }
    }
}

TEST(MapJetPair, DiagonalInvariance)
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 120; ++trial) {
        const unsigned k = 1 + trial % 3;
        const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, k, rng);
        const auto s = jetgroupoid::testing::random_frame(Q, 1, 2, k, rng);
        const auto g = jetgroupoid::testing::random_gamma(Q, 2, k, rng);
        EXPECT_EQ(map_jet_from_pair(frame_compose_gamma(r, g), frame_compose_gamma(s, g)), map_jet_from_pair(r, s));
    }
}

TEST(MapJetPair, GroupoidComposition)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned k = 1 + trial % 3;
        const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, k, rng);
        const auto s = jetgroupoid::testing::random_frame(Q, 1, 2, k, rng);
        const auto t = jetgroupoid::testing::random_frame(Q, 1, 2, k, rng);
        const auto rs = map_jet_from_pair(r, s);
        const auto st = map_jet_from_pair(s, t);
        EXPECT_EQ(rs.after(st), map_jet_from_pair(r, t));
        EXPECT_EQ(rs.inverse(), map_jet_from_pair(s, r));
    }
}

TEST(MapJetPair, NonComposableRejected)
{
    std::mt19937_64 rng(37);
    const auto r = jetgroupoid::testing::random_frame(Q, 1, 2, 2, rng);
    const auto s = jetgroupoid::testing::random_frame(Q, 1, 2, 2, rng);
    const auto t = jetgroupoid::testing::random_frame(Q, 1, 2, 2, rng);
    EXPECT_THROW(map_jet_from_pair(r, s).after(map_jet_from_pair(r, t)), ShapeMismatch);
}

TEST(MapJetPair, FlattenOrdering)
{
    const Matrix<RationalField> a{{1, 2}, {3, 5}};
    auto comps = linear_tuple(Q, a, 2);
    comps[0][0] = 7;
    comps[1][0] = 8;
    comps[0].set_coefficient({2, 0}, 3); // jet coordinate 2! * 3 = 6
    const MapJet<RationalField> phi({10}, {11, 12}, {13}, comps);
    const std::vector<mpq_class> expected{10, 11, 12, 13, 7, 1, 2, 6, 0, 0, 8, 3, 5, 0, 0, 0};
    EXPECT_EQ(phi.flatten(), expected);
}

TEST(SeriesProperties, RingAxioms)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned q = 1 + trial % 3;
        const unsigned k = trial % 5;
        const auto a = jetgroupoid::testing::random_series(Q, q, k, rng);
        const auto b = jetgroupoid::testing::random_series(Q, q, k, rng);
        const auto c = jetgroupoid::testing::random_series(Q, q, k, rng);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) - b, a);
        if (!Q.is_zero(b.constant_term())) {
            EXPECT_EQ((a / b) * b, a);
        }
    }
}

TEST(SeriesProperties, TruncationCompatibility)
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned k = 1 + trial % 4;
        const unsigned k2 = trial % (k + 1);
        const auto a = jetgroupoid::testing::random_series(Q, 2, k, rng);
        auto b = jetgroupoid::testing::random_series(Q, 2, k, rng);
        b[0] = 1 + trial;
        const auto g = jetgroupoid::testing::random_invertible_tuple(Q, 2, k, rng);
        EXPECT_EQ((a * b).truncate(k2), a.truncate(k2) * b.truncate(k2));
        EXPECT_EQ((a / b).truncate(k2), a.truncate(k2) / b.truncate(k2));
        const SeriesTuple<RationalField> g2{g[0].truncate(k2), g[1].truncate(k2)};
        EXPECT_EQ(compose(a, g).truncate(k2), compose(a.truncate(k2), g2));
    }
}

TEST(SeriesProperties, PrimeFieldMatchesRationalReduction)
{
    const PrimeField fp(random_prime_31(99));
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = jetgroupoid::testing::random_series(Q, 2, 3, rng);
        auto b = jetgroupoid::testing::random_series(Q, 2, 3, rng);
        b[0] = 2;
        const auto reduce = [&](const QSeries &s) {
            TruncatedSeries<PrimeField> out(fp, 2, 3);
            for (std::size_t i = 0; i < s.coefficients().size(); ++i) {
                out[i] = fp.from_rational(s[i]);
            }
            return out;
        };
        EXPECT_EQ(reduce(a / b), reduce(a) / reduce(b));
    }
}
