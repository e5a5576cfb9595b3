#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <jetgroupoid/errors.hpp>

namespace jetgroupoid
{

using MultiIndex = std::vector<unsigned>;

inline unsigned order(const MultiIndex &alpha)
{
    return std::accumulate(alpha.begin(), alpha.end(), 0U);
}

// alpha! = prod alpha_i!
inline mpz_class multi_factorial(const MultiIndex &alpha)
{
    mpz_class r = 1;
    for (auto a : alpha) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), a);
        r *= f;
    }
    return r;
}

inline std::string to_string(const MultiIndex &alpha)
{
    std::string s = "(";
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        s += (i == 0 ? "" : ",") + std::to_string(alpha[i]);
    }
    return s + ")";
}

// Binomial coefficient C(n, k) as a size; callers keep arguments small.
inline std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0;
    }
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r.get_ui();
}

// Dense enumeration of all multi-indices in q variables with |alpha| <= k,
// sorted graded-lex: by order, then lexicographically with the first
// variable's exponent descending. (q = 2, k = 1): (0,0) (1,0) (0,1).
class MonomialLayout
{
public:
    struct Product
    {
        std::uint32_t lhs;
        std::uint32_t rhs;
        std::uint32_t target;
    };

    MonomialLayout(unsigned q, unsigned k, bool with_products = true) : q_(q), k_(k)
    {
        for (unsigned d = 0; d <= k; ++d) {
            MultiIndex cur(q, 0);
            append_degree(cur, 0, d);
        }
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            rank_.emplace(indices_[i], i);
        }
        degree_begin_.assign(k + 2, 0);
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            ++degree_begin_[order(indices_[i]) + 1];
        }
        for (unsigned d = 1; d <= k + 1; ++d) {
            degree_begin_[d] += degree_begin_[d - 1];
        }
        parent_.assign(indices_.size(), {0, 0});
        for (std::size_t i = 1; i < indices_.size(); ++i) {
            MultiIndex a = indices_[i];
            unsigned j = 0;
            while (a[j] == 0) {
                ++j;
            }
            --a[j];
            parent_[i] = {static_cast<std::uint32_t>(rank_.at(a)), j};
        }
        for (std::size_t i = 0; with_products && i < indices_.size(); ++i) {
            for (std::size_t j = 0; j < indices_.size(); ++j) {
                if (order(indices_[i]) + order(indices_[j]) > k) {
                    continue;
                }
                MultiIndex s(q);
                for (unsigned v = 0; v < q; ++v) {
                    s[v] = indices_[i][v] + indices_[j][v];
                }
                products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                     static_cast<std::uint32_t>(rank_.at(s))});
            }
        }
    }

    [[nodiscard]] unsigned variables() const noexcept
    {
        return q_;
    }
    [[nodiscard]] unsigned max_order() const noexcept
    {
        return k_;
    }
    [[nodiscard]] std::size_t size() const noexcept
    {
        return indices_.size();
    }
    [[nodiscard]] const MultiIndex &at(std::size_t i) const
    {
        return indices_.at(i);
    }
    [[nodiscard]] const std::vector<MultiIndex> &indices() const noexcept
    {
        return indices_;
    }

    // Rank of alpha, or size() when |alpha| > k.
    [[nodiscard]] std::size_t rank(const MultiIndex &alpha) const
    {
        if (alpha.size() != q_) {
            throw ShapeMismatch("multi-index " + to_string(alpha) + " has wrong length for q=" + std::to_string(q_));
        }
        auto it = rank_.find(alpha);
        return it == rank_.end() ? indices_.size() : it->second;
    }

    // First rank of order d; degree_begin(k + 1) == size().
    [[nodiscard]] std::size_t degree_begin(unsigned d) const
    {
        return degree_begin_.at(d);
    }

    // For i > 0: (rank of alpha - e_j, j) where j is the first nonzero slot.
    [[nodiscard]] std::pair<std::uint32_t, unsigned> parent(std::size_t i) const
    {
        return parent_.at(i);
    }

    // All (i, j, rank(alpha_i + alpha_j)) with |alpha_i| + |alpha_j| <= k.
    // Empty when the layout was built without the product table.
    [[nodiscard]] const std::vector<Product> &products() const noexcept
    {
        return products_;
    }

    // Shared instance per (q, k).
    static std::shared_ptr<const MonomialLayout> get(unsigned q, unsigned k)
    {
        static std::mutex mutex;
        static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const MonomialLayout>> cache;
        std::lock_guard lock(mutex);
        auto &slot = cache[{q, k}];
        if (!slot) {
            slot = std::make_shared<const MonomialLayout>(q, k);
        }
        return slot;
    }

private:
    void append_degree(MultiIndex &cur, unsigned var, unsigned remaining)
    {
        if (q_ == 0) {
            if (remaining == 0) {
                indices_.push_back(cur);
            }
            return;
        }
        if (var + 1 == q_) {
            cur[var] = remaining;
            indices_.push_back(cur);
            cur[var] = 0;
            return;
        }
        for (unsigned e = remaining + 1; e-- > 0;) {
            cur[var] = e;
            append_degree(cur, var + 1, remaining - e);
        }
        cur[var] = 0;
    }

    unsigned q_;
    unsigned k_;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, std::size_t> rank_;
    std::vector<std::size_t> degree_begin_;
    std::vector<std::pair<std::uint32_t, unsigned>> parent_;
    std::vector<Product> products_;
};

} // namespace jetgroupoid
