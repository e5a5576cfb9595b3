#include <gtest/gtest.h>

#include <jetgroupoid/cases.hpp>

namespace jetgroupoid
{
namespace
{

TEST(Cases, Dp2IsAreaPreserving)
{
    const auto r = cases::fiber_jacobian_det_is_one(cases::dp2_system(), 40, 1);
    EXPECT_TRUE(r.zero);
    EXPECT_LE(r.failure_bound_log10(), -9);
    EXPECT_TRUE(cases::fiber_jacobian_det_is_one(cases::dp2_system(1, 2, 3), 40, 2).zero);
}

TEST(Cases, NonAreaPreservingControls)
{
    const auto doubling = parse_system("system d\nbase n\nfiber x y\nsigma n -> n + 1\nmap x -> 2*x\nmap y -> y\n");
    EXPECT_FALSE(cases::fiber_jacobian_det_is_one(doubling, 40, 1).zero);
    const auto swap = parse_system("system s\nbase n\nfiber x y\nsigma n -> n + 1\nmap x -> y\nmap y -> x\n");
    EXPECT_FALSE(cases::fiber_jacobian_det_is_one(swap, 40, 1).zero);
    const auto one = parse_system("system o\nfiber x\nmap x -> x\n");
    EXPECT_THROW(cases::fiber_jacobian_det_is_one(one, 40, 1), ShapeMismatch);
}

TEST(Cases, Dp2PinsParameters)
{
    const auto sys = cases::dp2_system(0, 0, 0);
    EXPECT_TRUE(sys.unbound_params().empty());
    EXPECT_EQ(cases::dp2_system().unbound_params().size(), 3U);
    const auto full = cases::dp2_full_system();
    EXPECT_EQ(full.fiber_dimension(), 5U);
    EXPECT_TRUE(validate_fibered(full, 1).fibered);
}

TEST(Cases, SymplecticJetDimensionMatchesCount)
{
    EXPECT_EQ(cases::symplectic_jet_dim(1, 1), 5U);
    for (unsigned k = 1; k <= 6; ++k) {
        EXPECT_EQ(cases::symplectic_jet_dim(k, 100 + k), cases::symplectic_jet_dim_closed_form(k)) << k;
    }
}

TEST(Cases, SymplecticJetDimensionGrowsQuadratically)
{
    // Second differences of s(k) are constant (= 1).
    for (unsigned k = 2; k <= 6; ++k) {
        const long a = static_cast<long>(cases::symplectic_jet_dim_closed_form(k + 1));
        const long b = static_cast<long>(cases::symplectic_jet_dim_closed_form(k));
        const long c = static_cast<long>(cases::symplectic_jet_dim_closed_form(k - 1));
        EXPECT_EQ(a - 2 * b + c, 1);
    }
}

TEST(Cases, RandomSymplecticJetHasUnitJacobian)
{
    const PrimeField field(random_prime_31(4));
    std::mt19937_64 rng(4);
    for (unsigned k = 1; k <= 5; ++k) {
        const auto f = cases::random_symplectic_jet(field, k, rng);
        const auto det = cases::detail::jacobian_determinant(f);
        EXPECT_EQ(det[0], field.one());
        for (std::size_t i = 1; i < det.coefficients().size(); ++i) {
            EXPECT_EQ(det[i], 0U);
        }
    }
}

TEST(Cases, Dp2OrderFourAtZeroParameters)
{
    // At a = b = c = 0 the map is x -> -y, y -> x, of order four.
    const auto sys = cases::dp2_system(0, 0, 0);
    Expr x = Expr::variable("x");
    Expr y = Expr::variable("y");
    for (int i = 0; i < 4; ++i) {
        const std::map<std::string, Expr> m{{"x", x},
                                            {"y", y},
                                            {"a", Expr::integer(0)},
                                            {"b", Expr::integer(0)},
                                            {"c", Expr::integer(0)}};
        const auto nx = substitute(sys.map[0], m);
        const auto ny = substitute(sys.map[1], m);
        x = nx;
        y = ny;
        if (i < 3) {
            EXPECT_FALSE(exprs_probably_equal(x, Expr::variable("x"), 20, 1).zero
                         && exprs_probably_equal(y, Expr::variable("y"), 20, 1).zero);
        }
    }
    EXPECT_TRUE(exprs_probably_equal(x, Expr::variable("x"), 40, 1).zero);
    EXPECT_TRUE(exprs_probably_equal(y, Expr::variable("y"), 40, 1).zero);
}

} // namespace
} // namespace jetgroupoid
