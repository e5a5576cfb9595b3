#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <string>

#include <gmpxx.h>

#include <jetgroupoid/errors.hpp>

namespace jetgroupoid
{

// A field descriptor carries whatever context the arithmetic needs (the
// modulus for F_p) and performs all operations on plain value_type
// elements. Containers store the descriptor once next to their values.
template <typename K>
concept Field = std::equality_comparable<K> && requires(const K &f, const typename K::value_type &a,
                                                        const typename K::value_type &b, const mpz_class &z,
                                                        const mpq_class &q) {
    typename K::value_type;
    { f.zero() } -> std::same_as<typename K::value_type>;
    { f.one() } -> std::same_as<typename K::value_type>;
    { f.from_integer(z) } -> std::same_as<typename K::value_type>;
    { f.from_rational(q) } -> std::same_as<typename K::value_type>;
    { f.add(a, b) } -> std::same_as<typename K::value_type>;
    { f.sub(a, b) } -> std::same_as<typename K::value_type>;
    { f.mul(a, b) } -> std::same_as<typename K::value_type>;
    { f.div(a, b) } -> std::same_as<typename K::value_type>;
    { f.neg(a) } -> std::same_as<typename K::value_type>;
    { f.is_zero(a) } -> std::same_as<bool>;
    { f.equal(a, b) } -> std::same_as<bool>;
    { f.to_string(a) } -> std::same_as<std::string>;
    { f.name() } -> std::same_as<std::string>;
};

// Exact arithmetic over Q.
class RationalField
{
public:
    using value_type = mpq_class;

    [[nodiscard]] value_type zero() const
    {
        return value_type(0);
    }
    [[nodiscard]] value_type one() const
    {
        return value_type(1);
    }
    [[nodiscard]] value_type from_integer(const mpz_class &z) const
    {
        return value_type(z);
    }
    [[nodiscard]] value_type from_int(long v) const
    {
        return value_type(v);
    }
    [[nodiscard]] value_type from_rational(const mpq_class &q) const
    {
        return q;
    }
    [[nodiscard]] value_type add(const value_type &a, const value_type &b) const
    {
        return a + b;
    }
    [[nodiscard]] value_type sub(const value_type &a, const value_type &b) const
    {
        return a - b;
    }
    [[nodiscard]] value_type mul(const value_type &a, const value_type &b) const
    {
        return a * b;
    }
    [[nodiscard]] value_type div(const value_type &a, const value_type &b) const
    {
        if (b == 0) {
            throw EvalDivisionByZero("division by zero in Q");
        }
        return a / b;
    }
    [[nodiscard]] value_type inv(const value_type &a) const
    {
        return div(one(), a);
    }
    [[nodiscard]] value_type neg(const value_type &a) const
    {
        return -a;
    }
    [[nodiscard]] bool is_zero(const value_type &a) const
    {
        return a == 0;
    }
    [[nodiscard]] bool equal(const value_type &a, const value_type &b) const
    {
        return a == b;
    }
    [[nodiscard]] std::string to_string(const value_type &a) const
    {
        return a.get_str();
    }
    [[nodiscard]] std::string name() const
    {
        return "Q";
    }

    friend bool operator==(const RationalField &, const RationalField &) = default;
};

// Z/pZ for a prime 2^30 < p < 2^32, so products fit in 64 bits.
class PrimeField
{
public:
    using value_type = std::uint64_t;

    static constexpr std::uint64_t min_modulus = std::uint64_t{1} << 30;

    explicit PrimeField(std::uint64_t p) : p_(p)
    {
        if (p <= min_modulus || p >= (std::uint64_t{1} << 32)) {
            throw InvalidField("prime modulus must lie in (2^30, 2^32), got " + std::to_string(p));
        }
        if (mpz_probab_prime_p(mpz_class(std::to_string(p)).get_mpz_t(), 40) == 0) {
            throw InvalidField("modulus " + std::to_string(p) + " is not prime");
        }
    }

    [[nodiscard]] std::uint64_t modulus() const noexcept
    {
        return p_;
    }

    [[nodiscard]] value_type zero() const
    {
        return 0;
    }
    [[nodiscard]] value_type one() const
    {
        return 1;
    }
    [[nodiscard]] value_type from_integer(const mpz_class &z) const
    {
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), p_);
        return r.get_ui();
    }
    [[nodiscard]] value_type from_int(long v) const
    {
        const auto m = static_cast<long long>(p_);
        long long r = static_cast<long long>(v) % m;
        return static_cast<value_type>(r < 0 ? r + m : r);
    }
    [[nodiscard]] value_type from_rational(const mpq_class &q) const
    {
        const auto den = from_integer(q.get_den());
        if (den == 0) {
            throw EvalDivisionByZero("rational " + q.get_str() + " has denominator divisible by p");
        }
        return mul(from_integer(q.get_num()), inv(den));
    }
    [[nodiscard]] value_type add(value_type a, value_type b) const
    {
        const value_type s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    [[nodiscard]] value_type sub(value_type a, value_type b) const
    {
        return a >= b ? a - b : a + p_ - b;
    }
    [[nodiscard]] value_type mul(value_type a, value_type b) const
    {
        return (a * b) % p_;
    }
    [[nodiscard]] value_type neg(value_type a) const
    {
        return a == 0 ? 0 : p_ - a;
    }
    [[nodiscard]] value_type pow(value_type a, std::uint64_t e) const
    {
        value_type r = 1;
        while (e != 0) {
            if ((e & 1U) != 0) {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1U;
        }
        return r;
    }
    [[nodiscard]] value_type inv(value_type a) const
    {
        if (a == 0) {
            throw EvalDivisionByZero("division by zero in F_" + std::to_string(p_));
        }
        return pow(a, p_ - 2);
    }
    [[nodiscard]] value_type div(value_type a, value_type b) const
    {
        return mul(a, inv(b));
    }
    [[nodiscard]] bool is_zero(value_type a) const
    {
        return a == 0;
    }
    [[nodiscard]] bool equal(value_type a, value_type b) const
    {
        return a == b;
    }
    [[nodiscard]] std::string to_string(value_type a) const
    {
        return std::to_string(a);
    }
    [[nodiscard]] std::string name() const
    {
        return "F_" + std::to_string(p_);
    }

    template <typename Rng>
    [[nodiscard]] value_type random(Rng &rng) const
    {
        // 2^64 mod p / 2^64 < 2^-31: the bias is irrelevant here.
        return static_cast<value_type>(rng()) % p_;
    }

    friend bool operator==(const PrimeField &, const PrimeField &) = default;

private:
    std::uint64_t p_;
};

// Throws FieldMismatch unless both descriptors denote the same field.
template <Field K>
void require_same_field(const K &a, const K &b)
{
    if (!(a == b)) {
        throw FieldMismatch("operands live in different fields: " + a.name() + " vs " + b.name());
    }
}

// Deterministic 64-bit mixer used to derive per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL));
}

// A prime drawn uniformly-ish from (2^30, 2^31), determined by the seed.
inline std::uint64_t random_prime_31(std::uint64_t seed)
{
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedULL));
    const std::uint64_t lo = (std::uint64_t{1} << 30) + 1;
    mpz_class start(std::to_string(lo + rng() % ((std::uint64_t{1} << 30) - 2048)));
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), start.get_mpz_t());
    return p.get_ui();
}

} // namespace jetgroupoid
