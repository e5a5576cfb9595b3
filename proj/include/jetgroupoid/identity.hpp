#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/expr.hpp>
#include <jetgroupoid/field.hpp>

namespace jetgroupoid
{

// Outcome of a randomized zero test. When zero is true the expression
// vanishes identically except with probability at most
// (degree_bound / modulus)^trials (Schwartz-Zippel on the numerator).
struct ZeroTestResult
{
    bool zero{false};
    std::uint64_t degree_bound{0};
    std::uint64_t trials{0};
    std::uint64_t modulus{0};
    std::uint64_t pole_resamples{0};

    [[nodiscard]] double failure_bound() const
    {
        if (!zero) {
            return 0.0;
        }
        const double ratio = static_cast<double>(degree_bound) / static_cast<double>(modulus);
        return std::pow(ratio, static_cast<double>(trials));
    }

    // ceil(log10(failure_bound())), an integer for reports; -1000 floors it.
    [[nodiscard]] long failure_bound_log10() const
    {
        if (!zero) {
            return 0;
        }
        if (degree_bound == 0) {
            return -1000;
        }
        const double l = static_cast<double>(trials)
                         * (std::log10(static_cast<double>(degree_bound)) - std::log10(static_cast<double>(modulus)));
        return std::max(-1000L, static_cast<long>(std::ceil(l)));
    }
};

inline constexpr unsigned max_pole_resamples = 100;

// Evaluates e at `trials` uniformly random points of F_p^vars and reports
// whether every value was 0. Points hitting a pole are redrawn, at most
// max_pole_resamples times in a row (then PoleSaturated).
inline ZeroTestResult expr_probably_zero(const Expr &e, unsigned trials, std::uint64_t seed, const PrimeField &field)
{
    if (trials == 0) {
        throw UsageError("expr_probably_zero needs at least one trial");
    }
    const auto deg = degree_bound(e);
    if (deg.numerator > field.modulus() / 100) {
        throw DegreeOverflow("degree bound " + std::to_string(deg.numerator) + " exceeds p/100 for p = "
                             + std::to_string(field.modulus()));
    }
    ZeroTestResult result{true, deg.numerator, trials, field.modulus(), 0};
    const auto vars = variables(e);
    std::mt19937_64 rng(splitmix64(seed));
    for (unsigned t = 0; t < trials; ++t) {
        unsigned misses = 0;
        for (;;) {
            Environment<PrimeField> env;
            for (const auto &v : vars) {
                env[v] = field.random(rng);
            }
            try {
                if (!field.is_zero(eval_expr(e, field, env))) {
                    result.zero = false;
                    return result;
                }
                break;
            } catch (const EvalDivisionByZero &) {
                ++result.pole_resamples;
                if (++misses > max_pole_resamples) {
                    throw PoleSaturated("more than " + std::to_string(max_pole_resamples)
                                        + " consecutive sample points hit a pole");
                }
            }
        }
    }
    return result;
}

inline ZeroTestResult expr_probably_zero(const Expr &e, unsigned trials, std::uint64_t seed)
{
    return expr_probably_zero(e, trials, seed, PrimeField(random_prime_31(seed)));
}

inline ZeroTestResult exprs_probably_equal(const Expr &a, const Expr &b, unsigned trials, std::uint64_t seed)
{
    return expr_probably_zero(a - b, trials, seed);
}

} // namespace jetgroupoid
