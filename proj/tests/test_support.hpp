#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <jetgroupoid/frame.hpp>
#include <jetgroupoid/series.hpp>

namespace jetgroupoid::testing
{

inline RationalField Q;

// Small random rationals keep exact-mode property tests fast.
inline mpq_class random_rational(std::mt19937_64 &rng, int span = 5, int max_den = 3)
{
    std::uniform_int_distribution<int> num(-span, span);
    std::uniform_int_distribution<int> den(1, max_den);
    mpq_class r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline mpq_class random_nonzero_rational(std::mt19937_64 &rng)
{
    mpq_class r;
    do {
        r = random_rational(rng);
    } while (r == 0);
    return r;
}

template <Field K>
typename K::value_type random_value(const K &field, std::mt19937_64 &rng)
{
    if constexpr (std::is_same_v<K, PrimeField>) {
        return field.random(rng);
    } else {
        return field.from_rational(random_rational(rng));
    }
}

template <Field K>
TruncatedSeries<K> random_series(const K &field, unsigned q, unsigned k, std::mt19937_64 &rng, bool pointed = false)
{
    TruncatedSeries<K> s(field, q, k);
    for (std::size_t i = pointed ? 1 : 0; i < s.coefficients().size(); ++i) {
        s[i] = random_value(field, rng);
    }
    return s;
}

// Random tuple with invertible linear part; zero constants when pointed.
template <Field K>
SeriesTuple<K> random_invertible_tuple(const K &field, unsigned q, unsigned k, std::mt19937_64 &rng,
                                       bool pointed = true)
{
    for (;;) {
        SeriesTuple<K> t;
        for (unsigned i = 0; i < q; ++i) {
            t.push_back(random_series(field, q, k, rng, pointed));
        }
        if (!field.is_zero(determinant(field, linear_part(t)))) {
            return t;
        }
    }
}

template <Field K>
FrameJet<K> random_frame(const K &field, unsigned p, unsigned q, unsigned k, std::mt19937_64 &rng)
{
    Point<K> base;
    for (unsigned i = 0; i < p; ++i) {
        base.push_back(random_value(field, rng));
    }
    return FrameJet<K>(base, random_invertible_tuple(field, q, k, rng, false));
}

template <Field K>
SourceJet<K> random_gamma(const K &field, unsigned q, unsigned k, std::mt19937_64 &rng)
{
    return SourceJet<K>(random_invertible_tuple(field, q, k, rng, true));
}

// Build a series from (multi-index, rational Taylor coefficient) pairs.
inline TruncatedSeries<RationalField> series(unsigned q, unsigned k,
                                             std::initializer_list<std::pair<MultiIndex, mpq_class>> terms)
{
    TruncatedSeries<RationalField> s(Q, q, k);
    for (const auto &[alpha, c] : terms) {
        s.set_coefficient(alpha, c);
    }
    return s;
}

} // namespace jetgroupoid::testing
