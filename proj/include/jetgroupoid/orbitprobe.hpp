#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/field.hpp>
#include <jetgroupoid/multi_index.hpp>
#include <jetgroupoid/polynomial.hpp>
#include <jetgroupoid/prolong.hpp>
#include <jetgroupoid/system.hpp>

namespace jetgroupoid
{

// Flattened jets of iterates over F_p; one vector per (base point, n).
struct OrbitSample
{
    std::uint64_t modulus{0};
    std::uint64_t seed{0};
    unsigned k{0};
    std::size_t num_points{0};
    std::size_t max_iter{0};
    std::vector<std::string> coordinates;
    std::vector<std::vector<std::uint64_t>> vectors;

    [[nodiscard]] std::size_t ambient_dimension() const noexcept
    {
        return coordinates.size();
    }
};

// Names of the flattened map-jet coordinates: source base, source fiber,
// target base (primed), then each target component's jet coordinates.
inline std::vector<std::string> jet_coordinate_names(const FiberedSystem &sys, unsigned k)
{
    std::vector<std::string> names;
    for (const auto &b : sys.base) {
        names.push_back(b);
    }
    for (const auto &x : sys.fiber) {
        names.push_back(x);
    }
    for (const auto &b : sys.base) {
        names.push_back(b + "'");
    }
    const auto &layout = *MonomialLayout::get(static_cast<unsigned>(sys.fiber.size()), k);
    for (const auto &x : sys.fiber) {
        for (std::size_t i = 0; i < layout.size(); ++i) {
            names.push_back(i == 0 ? x + "'" : x + "'" + to_string(layout.at(i)));
        }
    }
    return names;
}

inline PrimeField probe_field(std::uint64_t seed)
{
    return PrimeField(random_prime_31(seed));
}

namespace detail
{

inline std::uint64_t name_hash(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h = (h ^ c) * 1099511628211ULL;
    }
    return h;
}

} // namespace detail

// A seeded random value for a parameter; depends only on (seed, name).
inline std::uint64_t random_parameter_value(const PrimeField &field, std::uint64_t seed, const std::string &name)
{
    std::mt19937_64 rng(derive_seed(seed ^ 0x70696e73ULL, detail::name_hash(name)));
    return field.random(rng);
}

// Bound parameters reduced mod p; unbound ones pinned to seeded random values.
inline Environment<PrimeField> probe_parameters(const FiberedSystem &sys, const PrimeField &field,
                                                std::uint64_t seed)
{
    Environment<PrimeField> env;
    for (const auto &p : sys.params) {
        if (auto b = sys.bindings.find(p); b != sys.bindings.end()) {
            env[p] = field.from_rational(b->second);
        } else {
            env[p] = random_parameter_value(field, seed, p);
        }
    }
    return env;
}

struct SamplingOptions
{
    unsigned k{1};
    std::size_t num_points{40};
    std::size_t max_iter{200};
    std::uint64_t seed{1};
    unsigned jobs{0}; // 0: hardware concurrency
};

namespace detail
{

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn &&fn)
{
    unsigned workers = jobs != 0 ? jobs : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = count;
                    return;
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace detail

// For each base point (uniform in F_p^dim M, redrawn when an iterate is
// undefined) and each n in 1..max_iter, the flattened j_k(Phi^n). Output
// depends only on the options, not on the number of workers.
inline OrbitSample sample_orbit_jets(const FiberedSystem &sys, const SamplingOptions &opt, const PrimeField &field,
                                     const Environment<PrimeField> &params)
{
    if (opt.num_points == 0 || opt.max_iter == 0) {
        throw UsageError("sampling needs at least one point and one iterate");
    }
    OrbitSample sample;
    sample.modulus = field.modulus();
    sample.seed = opt.seed;
    sample.k = opt.k;
    sample.num_points = opt.num_points;
    sample.max_iter = opt.max_iter;
    sample.coordinates = jet_coordinate_names(sys, opt.k);
    std::vector<std::vector<std::vector<std::uint64_t>>> per_point(opt.num_points);
    detail::parallel_for(opt.num_points, opt.jobs, [&](std::size_t idx) {
        std::mt19937_64 rng(derive_seed(opt.seed, idx + 1));
        unsigned misses = 0;
        for (;;) {
            Point<PrimeField> base;
            Point<PrimeField> fiber;
            for (std::size_t j = 0; j < sys.base.size(); ++j) {
                base.push_back(field.random(rng));
            }
            for (std::size_t j = 0; j < sys.fiber.size(); ++j) {
                fiber.push_back(field.random(rng));
            }
            auto run = iterate_jets(sys, field, base, fiber, opt.max_iter, opt.k, params);
            if (!run.failed_step) {
                auto &rows = per_point[idx];
                for (std::size_t n = 1; n < run.jets.size(); ++n) {
                    rows.push_back(run.jets[n].flatten());
                }
                return;
            }
            if (++misses > max_pole_resamples) {
                throw PoleSaturated("more than " + std::to_string(max_pole_resamples)
                                    + " consecutive base points hit an indeterminacy");
            }
        }
    });
    for (auto &rows : per_point) {
        for (auto &r : rows) {
            sample.vectors.push_back(std::move(r));
        }
    }
    return sample;
}

inline OrbitSample sample_orbit_jets(const FiberedSystem &sys, const SamplingOptions &opt)
{
    const auto field = probe_field(opt.seed);
    return sample_orbit_jets(sys, opt, field, probe_parameters(sys, field, opt.seed));
}

// Row echelon form over F_p built one row at a time; every stored row has a
// leading 1 at its pivot and zeros to the left. Pivots are the leftmost
// possible, so the rank of any column prefix is the number of pivots in it.
class ModpEchelon
{
public:
    ModpEchelon(std::uint64_t p, std::size_t cols) : p_(p), cols_(cols), pivot_row_(cols, -1)
    {
    }

    // True when the row raised the rank.
    bool insert(std::vector<std::uint64_t> v)
    {
        if (v.size() != cols_) {
            throw ShapeMismatch("row length does not match the echelon width");
        }
        for (std::size_t c = 0; c < cols_; ++c) {
            const std::uint64_t f = v[c];
            if (f == 0) {
                continue;
            }
            const long r = pivot_row_[c];
            if (r < 0) {
                const std::uint64_t inv = inverse(f);
                for (std::size_t j = c; j < cols_; ++j) {
                    v[j] = v[j] * inv % p_;
                }
                pivot_row_[c] = static_cast<long>(rows_.size());
                rows_.push_back(std::move(v));
                pivots_.push_back(c);
                return true;
            }
            const auto &row = rows_[static_cast<std::size_t>(r)];
            const std::uint64_t g = p_ - f;
            for (std::size_t j = c; j < cols_; ++j) {
                v[j] = (v[j] + g * row[j]) % p_;
            }
        }
        return false;
    }

    [[nodiscard]] std::size_t rank() const noexcept
    {
        return rows_.size();
    }
    [[nodiscard]] std::size_t columns() const noexcept
    {
        return cols_;
    }

    // Rank of the submatrix formed by the first `limit` columns.
    [[nodiscard]] std::size_t rank_of_prefix(std::size_t limit) const
    {
        return static_cast<std::size_t>(
            std::count_if(pivots_.begin(), pivots_.end(), [&](std::size_t c) { return c < limit; }));
    }

    // Basis of {w : M w = 0} restricted to the first `limit` columns, one
    // vector per free column (that entry is 1).
    [[nodiscard]] std::vector<std::vector<std::uint64_t>> kernel(std::size_t limit) const
    {
        std::vector<std::size_t> piv;
        for (std::size_t c = 0; c < limit; ++c) {
            if (pivot_row_[c] >= 0) {
                piv.push_back(c);
            }
        }
        std::vector<std::vector<std::uint64_t>> rref;
        for (const auto c : piv) {
            const auto &row = rows_[static_cast<std::size_t>(pivot_row_[c])];
            rref.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(limit));
        }
        // Clear each pivot column above its pivot, last pivot first.
        for (std::size_t a = piv.size(); a-- > 0;) {
            const std::size_t c = piv[a];
            for (std::size_t b = 0; b < a; ++b) {
                const std::uint64_t f = rref[b][c];
                if (f == 0) {
                    continue;
                }
                const std::uint64_t g = p_ - f;
                for (std::size_t j = c; j < limit; ++j) {
                    rref[b][j] = (rref[b][j] + g * rref[a][j]) % p_;
                }
            }
        }
        std::vector<std::vector<std::uint64_t>> out;
        std::size_t next_pivot = 0;
        for (std::size_t f = 0; f < limit; ++f) {
            if (next_pivot < piv.size() && piv[next_pivot] == f) {
                ++next_pivot;
                continue;
            }
            std::vector<std::uint64_t> w(limit, 0);
            w[f] = 1;
            for (std::size_t a = 0; a < piv.size(); ++a) {
                const std::uint64_t x = rref[a][f];
                w[piv[a]] = x == 0 ? 0 : p_ - x;
            }
            out.push_back(std::move(w));
        }
        return out;
    }

private:
    [[nodiscard]] std::uint64_t inverse(std::uint64_t a) const
    {
        std::uint64_t result = 1;
        std::uint64_t e = p_ - 2;
        while (e != 0) {
            if ((e & 1U) != 0) {
                result = result * a % p_;
            }
            a = a * a % p_;
            e >>= 1U;
        }
        return result;
    }

    std::uint64_t p_;
    std::size_t cols_;
    std::vector<long> pivot_row_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

// All monomials of degree <= d at v, ordered by degree (graded lex).
inline std::vector<std::uint64_t> monomial_values(const MonomialLayout &layout, const std::vector<std::uint64_t> &v,
                                                  std::uint64_t p)
{
    std::vector<std::uint64_t> out(layout.size());
    out[0] = 1;
    for (std::size_t i = 1; i < layout.size(); ++i) {
        const auto [parent, j] = layout.parent(i);
        out[i] = out[parent] * (v[j] % p) % p;
    }
    return out;
}

inline std::shared_ptr<const MonomialLayout> evaluation_layout(std::size_t n, unsigned d)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const MonomialLayout>> cache;
    const std::lock_guard lock(mutex);
    auto &slot = cache[{n, d}];
    if (!slot) {
        slot = std::make_shared<const MonomialLayout>(static_cast<unsigned>(n), d, false);
    }
    return slot;
}

struct HilbertPoint
{
    unsigned d{0};
    std::size_t monomials{0};       // C(N+d, d)
    std::size_t value{0};           // H(d) on the full sample
    std::size_t partial_value{0};   // H(d) on the first two thirds of the base points
    bool enough_samples{false};     // sample count >= 2 C(N+d, d)
    bool saturated{false};
};

struct HilbertProfile
{
    std::vector<HilbertPoint> points;
    std::size_t sample_count{0};
    std::size_t partial_count{0};

    [[nodiscard]] bool saturated() const
    {
        return std::all_of(points.begin(), points.end(), [](const HilbertPoint &h) { return h.saturated; });
    }
};

namespace detail
{

// Rows of the first two thirds of the base points (the sample is point-major).
inline std::size_t partial_row_count(const OrbitSample &s)
{
    if (s.num_points >= 3 && s.max_iter > 0 && s.num_points * s.max_iter == s.vectors.size()) {
        return ((2 * s.num_points + 2) / 3) * s.max_iter;
    }
    return (2 * s.vectors.size() + 2) / 3;
}

inline ModpEchelon evaluation_echelon(const std::vector<std::vector<std::uint64_t>> &rows, std::size_t n, unsigned d,
                                      std::uint64_t p, std::size_t partial_rows, std::vector<std::size_t> *partial)
{
    const auto layout = evaluation_layout(n, d);
    ModpEchelon ech(p, layout->size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (partial != nullptr && r == partial_rows) {
            for (unsigned e = 0; e <= d; ++e) {
                partial->push_back(ech.rank_of_prefix(layout->degree_begin(e + 1)));
            }
        }
        ech.insert(monomial_values(*layout, rows[r], p));
    }
    if (partial != nullptr && partial->empty()) {
        for (unsigned e = 0; e <= d; ++e) {
            partial->push_back(ech.rank_of_prefix(layout->degree_begin(e + 1)));
        }
    }
    return ech;
}

} // namespace detail

// H(d): rank of the evaluation matrix of all monomials of degree <= d.
inline std::size_t hilbert_function(const OrbitSample &sample, unsigned d)
{
    return detail::evaluation_echelon(sample.vectors, sample.ambient_dimension(), d, sample.modulus, 0, nullptr).rank();
}

inline HilbertProfile hilbert_profile_from(const OrbitSample &sample, unsigned d_max, const ModpEchelon &ech,
                                           const std::vector<std::size_t> &partial)
{
    HilbertProfile prof;
    prof.sample_count = sample.vectors.size();
    prof.partial_count = detail::partial_row_count(sample);
    const auto layout = evaluation_layout(sample.ambient_dimension(), d_max);
    for (unsigned d = 0; d <= d_max; ++d) {
        HilbertPoint h;
        h.d = d;
        h.monomials = layout->degree_begin(d + 1);
        h.value = ech.rank_of_prefix(h.monomials);
        h.partial_value = partial.at(d);
        h.enough_samples = prof.sample_count >= 2 * h.monomials;
        h.saturated = h.enough_samples && h.partial_value == h.value;
        prof.points.push_back(h);
    }
    return prof;
}

inline HilbertProfile hilbert_profile(const OrbitSample &sample, unsigned d_max)
{
    std::vector<std::size_t> partial;
    const auto ech = detail::evaluation_echelon(sample.vectors, sample.ambient_dimension(), d_max, sample.modulus,
                                                detail::partial_row_count(sample), &partial);
    return hilbert_profile_from(sample, d_max, ech, partial);
}

// Polynomial in the flattened coordinates (variable i = coordinate i).
using ProbePolynomial = SparsePolynomial<PrimeField, unsigned>;

inline ProbePolynomial kernel_vector_polynomial(const PrimeField &field, const MonomialLayout &layout,
                                                const std::vector<std::uint64_t> &w)
{
    ProbePolynomial poly(field);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0) {
            continue;
        }
        Monomial<unsigned> m;
        const auto &alpha = layout.at(i);
        for (unsigned j = 0; j < alpha.size(); ++j) {
            if (alpha[j] != 0) {
                m.emplace_back(j, alpha[j]);
            }
        }
        poly.add_term(m, w[i]);
    }
    return poly;
}

inline std::uint64_t evaluate_relation(const ProbePolynomial &r, const std::vector<std::uint64_t> &v)
{
    return r.evaluate([&](unsigned i) { return v.at(i); });
}

struct RelationReport
{
    std::vector<ProbePolynomial> relations;
    std::size_t discarded{0};
    std::size_t fit_rows{0};
    std::size_t holdout_rows{0};
    unsigned degree{0};
    std::uint64_t modulus{0};

    // Probability that a kept relation is spurious yet vanished on every
    // holdout row: at most (d/p)^holdout, reported as an integer log10.
    [[nodiscard]] long failure_bound_log10() const
    {
        if (holdout_rows == 0 || degree == 0) {
            return 0;
        }
        return ZeroTestResult{true, degree, holdout_rows, modulus, 0}.failure_bound_log10();
    }
};

// Kernel of the degree-<=d evaluation matrix on the fitting rows; each
// candidate is re-checked on the held-out rows (every `stride`-th row).
inline RelationReport discover_relations(const OrbitSample &sample, unsigned d, double holdout_fraction = 0.2)
{
    if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0) {
        throw UsageError("holdout fraction must lie in (0, 1)");
    }
    const auto stride = std::max<std::size_t>(2, static_cast<std::size_t>(1.0 / holdout_fraction + 0.5));
    std::vector<std::vector<std::uint64_t>> fit;
    std::vector<std::vector<std::uint64_t>> holdout;
    for (std::size_t r = 0; r < sample.vectors.size(); ++r) {
        (r % stride == stride - 1 ? holdout : fit).push_back(sample.vectors[r]);
    }
    const PrimeField field(sample.modulus);
    const auto layout = evaluation_layout(sample.ambient_dimension(), d);
    const auto ech = detail::evaluation_echelon(fit, sample.ambient_dimension(), d, sample.modulus, 0, nullptr);
    RelationReport rep;
    rep.fit_rows = fit.size();
    rep.holdout_rows = holdout.size();
    rep.degree = d;
    rep.modulus = sample.modulus;
    for (const auto &w : ech.kernel(layout->size())) {
        auto poly = kernel_vector_polynomial(field, *layout, w);
        const bool holds = std::all_of(holdout.begin(), holdout.end(),
                                       [&](const auto &v) { return evaluate_relation(poly, v) == 0; });
        if (holds) {
            rep.relations.push_back(std::move(poly));
        } else {
            ++rep.discarded;
        }
    }
    return rep;
}

inline std::string to_string(const ProbePolynomial &r, const std::vector<std::string> &names)
{
    return r.to_string([&](unsigned i) { return names.at(i); });
}

struct DimensionEstimate
{
    std::size_t estimate{0};
    bool high_confidence{false};
    std::size_t lower{0};
    std::size_t upper{0};
    std::size_t jacobian_dim{0};   // N - rank of the relations' Jacobian
    std::size_t profile_bound{0};  // largest m with C(m+d, d) <= H(d) for all d
    std::size_t witness_dim{0};    // largest m <= jacobian_dim with relation-free projection
    std::size_t ambient{0};
    std::size_t relation_count{0};
    HilbertProfile profile;
    std::uint64_t modulus{0};
    std::uint64_t seed{0};

    [[nodiscard]] std::string confidence() const
    {
        return high_confidence ? "HIGH" : "LOW";
    }
    [[nodiscard]] std::vector<long> differences() const
    {
        std::vector<long> out;
        for (std::size_t i = 1; i < profile.points.size(); ++i) {
            out.push_back(static_cast<long>(profile.points[i].value) - static_cast<long>(profile.points[i - 1].value));
        }
        return out;
    }
};

namespace detail
{

inline std::size_t jacobian_rank(const std::vector<std::vector<std::uint64_t>> &kernel, const MonomialLayout &layout,
                                 const std::vector<std::uint64_t> &point, std::uint64_t p)
{
    const std::size_t n = point.size();
    const auto values = monomial_values(layout, point, p);
    ModpEchelon ech(p, n);
    for (const auto &w : kernel) {
        std::vector<std::uint64_t> grad(n, 0);
        for (std::size_t mu = 0; mu < w.size(); ++mu) {
            if (w[mu] == 0) {
                continue;
            }
            const auto &alpha = layout.at(mu);
            for (std::size_t i = 0; i < n; ++i) {
                if (alpha[i] == 0) {
                    continue;
                }
                MultiIndex lower = alpha;
                --lower[i];
                const auto c = w[mu] * alpha[i] % p;
                grad[i] = (grad[i] + c * values[layout.rank(lower)]) % p;
            }
        }
        ech.insert(std::move(grad));
        if (ech.rank() == n) {
            break;
        }
    }
    return ech.rank();
}

// Whether m random linear forms of the sample satisfy no polynomial relation
// of degree <= d.
inline bool projection_is_free(const OrbitSample &sample, std::size_t m, unsigned d, std::uint64_t seed)
{
    if (m == 0) {
        return true;
    }
    const std::uint64_t p = sample.modulus;
    const std::size_t n = sample.ambient_dimension();
    std::mt19937_64 rng(derive_seed(seed ^ 0x70726f6aULL, m));
    std::vector<std::vector<std::uint64_t>> forms(m, std::vector<std::uint64_t>(n));
    for (auto &f : forms) {
        for (auto &x : f) {
            x = rng() % p;
        }
    }
    std::vector<std::vector<std::uint64_t>> projected;
    projected.reserve(sample.vectors.size());
    for (const auto &v : sample.vectors) {
        std::vector<std::uint64_t> w(m, 0);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                w[a] = (w[a] + forms[a][i] * v[i]) % p;
            }
        }
        projected.push_back(std::move(w));
    }
    const auto layout = evaluation_layout(m, d);
    ModpEchelon ech(p, layout->size());
    for (const auto &w : projected) {
        ech.insert(monomial_values(*layout, w, p));
        if (ech.rank() == layout->size()) {
            return true;
        }
    }
    return false;
}

} // namespace detail

// Dimension of the Zariski closure of the sample, from the degree-<=d_max
// relations: N minus the generic rank of their Jacobian. Confidence is HIGH
// when the profile is saturated, the value is below the profile bound, and
// that many random linear forms are free of relations up to degree d_max.
inline DimensionEstimate estimate_dimension(const OrbitSample &sample, unsigned d_max, bool strict = false)
{
    if (d_max < 2) {
        throw UsageError("dimension estimation needs degree bound >= 2");
    }
    if (sample.vectors.empty()) {
        throw UsageError("empty sample");
    }
    const std::size_t n = sample.ambient_dimension();
    const std::uint64_t p = sample.modulus;
    std::vector<std::size_t> partial;
    const auto ech = detail::evaluation_echelon(sample.vectors, n, d_max, p, detail::partial_row_count(sample),
                                                &partial);
    DimensionEstimate est;
    est.ambient = n;
    est.modulus = p;
    est.seed = sample.seed;
    est.profile = hilbert_profile_from(sample, d_max, ech, partial);
    if (strict && !est.profile.saturated()) {
        throw Unsaturated("Hilbert profile changes between two thirds of the sample and the full sample");
    }
    const auto layout = evaluation_layout(n, d_max);
    const auto kernel = ech.kernel(layout->size());
    est.relation_count = kernel.size();

    std::size_t jac = 0;
    if (!kernel.empty()) {
        for (std::size_t t = 0; t < 3; ++t) {
            const auto &pt = sample.vectors[(t * 7919 + sample.vectors.size() / 2) % sample.vectors.size()];
            jac = std::max(jac, detail::jacobian_rank(kernel, *layout, pt, p));
        }
    }
    est.jacobian_dim = n - jac;

    est.profile_bound = n;
    for (std::size_t m = 0; m <= n; ++m) {
        bool fits = true;
        for (const auto &h : est.profile.points) {
            if (binomial(static_cast<unsigned>(m + h.d), h.d) > h.value) {
                fits = false;
            }
        }
        if (!fits) {
            est.profile_bound = m == 0 ? 0 : m - 1;
            break;
        }
    }

    est.witness_dim = est.jacobian_dim;
    while (est.witness_dim > 0 && !detail::projection_is_free(sample, est.witness_dim, d_max, sample.seed)) {
        --est.witness_dim;
    }
    est.estimate = est.jacobian_dim;
    est.lower = std::min(est.witness_dim, est.jacobian_dim);
    est.upper = std::max(est.jacobian_dim, est.witness_dim);
    est.high_confidence = est.profile.saturated() && est.witness_dim == est.jacobian_dim
                          && est.jacobian_dim <= est.profile_bound;
    return est;
}

struct ProbeOptions
{
    SamplingOptions sampling;
    unsigned d_max{3};
    bool strict{false};
};

// Enough base points that the sample has at least three times as many rows
// as there are monomials of degree <= d_max, and never fewer than 40.
inline std::size_t recommended_points(std::size_t ambient, unsigned d_max, std::size_t max_iter)
{
    const std::size_t monomials = binomial(static_cast<unsigned>(ambient + d_max), d_max);
    return std::max<std::size_t>(40, (3 * monomials + max_iter - 1) / max_iter);
}

inline DimensionEstimate estimate_dimension(const FiberedSystem &sys, const ProbeOptions &opt)
{
    return estimate_dimension(sample_orbit_jets(sys, opt.sampling), opt.d_max, opt.strict);
}

// The system with parameter s moved to the base, sigma: s -> s.
inline FiberedSystem promote_parameter(const FiberedSystem &sys, const std::string &s)
{
    if (!sys.is_param(s)) {
        throw UnknownVariable("'" + s + "' is not a parameter of system '" + sys.name + "'");
    }
    FiberedSystem out = sys;
    out.params.erase(std::find(out.params.begin(), out.params.end(), s));
    out.bindings.erase(s);
    out.base.push_back(s);
    out.sigma.push_back(Expr::variable(s));
    return out;
}

struct SpecialisationReport
{
    DimensionEstimate generic;
    DimensionEstimate special;
    std::size_t relative_generic{0};
    std::string parameter;
    mpq_class special_value;

    // PASS-EQUALITY, PASS (strict drop) or FAIL (special exceeds generic).
    [[nodiscard]] std::string verdict() const
    {
        if (special.estimate > relative_generic) {
            return "FAIL";
        }
        return special.estimate == relative_generic ? "PASS-EQUALITY" : "PASS";
    }
};

// dim_S Mal_k(Phi/B) measured with s as an extra base coordinate, minus one,
// against the dimension at s = s0.
inline SpecialisationReport compare_specialisation(const ParamFamily &family, const ProbeOptions &opt)
{
    SpecialisationReport rep;
    rep.parameter = family.parameter;
    rep.special_value = family.special_value;
    const auto generic_sys = promote_parameter(family.system, family.parameter);
    auto generic_opt = opt;
    // The promoted parameter takes one value per base point, so the saturation
    // check on the generic side needs more base points.
    generic_opt.sampling.num_points =
        std::max(2 * opt.sampling.num_points,
                 recommended_points(jet_coordinate_names(generic_sys, opt.sampling.k).size(), opt.d_max,
                                    opt.sampling.max_iter));
    rep.generic = estimate_dimension(generic_sys, generic_opt);
    rep.relative_generic = rep.generic.estimate == 0 ? 0 : rep.generic.estimate - 1;
    const auto special_sys = bind_parameters(family.system, {{family.parameter, family.special_value}});
    rep.special = estimate_dimension(special_sys, opt);
    return rep;
}

} // namespace jetgroupoid
