#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/field.hpp>

namespace jetgroupoid
{

// Small dense matrices over an arbitrary field. Sized for jet linear parts
// and constraint systems of a few hundred entries, not for bulk sampling.
template <Field K>
using Matrix = std::vector<std::vector<typename K::value_type>>;

template <Field K>
Matrix<K> identity_matrix(const K &field, std::size_t n)
{
    Matrix<K> m(n, std::vector<typename K::value_type>(n, field.zero()));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = field.one();
    }
    return m;
}

template <Field K>
Matrix<K> multiply(const K &field, const Matrix<K> &a, const Matrix<K> &b)
{
    const std::size_t rows = a.size();
    const std::size_t inner = b.size();
    const std::size_t cols = inner == 0 ? 0 : b[0].size();
    Matrix<K> c(rows, std::vector<typename K::value_type>(cols, field.zero()));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t l = 0; l < inner; ++l) {
            if (field.is_zero(a[i][l])) {
                continue;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                c[i][j] = field.add(c[i][j], field.mul(a[i][l], b[l][j]));
            }
        }
    }
    return c;
}

namespace detail
{

// In-place row reduction to echelon form. Returns pivot columns; sign
// collects the permutation parity, det_scale the product of pivots.
template <Field K>
std::vector<std::size_t> row_reduce(const K &field, Matrix<K> &m, bool &odd_swaps)
{
    odd_swaps = false;
    std::vector<std::size_t> pivots;
    const std::size_t rows = m.size();
    const std::size_t cols = rows == 0 ? 0 : m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && field.is_zero(m[sel][c])) {
            ++sel;
        }
        if (sel == rows) {
            continue;
        }
        if (sel != r) {
            std::swap(m[sel], m[r]);
            odd_swaps = !odd_swaps;
        }
        const auto inv = field.div(field.one(), m[r][c]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (field.is_zero(m[i][c])) {
                continue;
            }
            const auto factor = field.mul(m[i][c], inv);
            for (std::size_t j = c; j < cols; ++j) {
                m[i][j] = field.sub(m[i][j], field.mul(factor, m[r][j]));
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace detail

template <Field K>
std::size_t rank(const K &field, Matrix<K> m)
{
    bool odd = false;
    return detail::row_reduce(field, m, odd).size();
}

template <Field K>
typename K::value_type determinant(const K &field, Matrix<K> m)
{
    const std::size_t n = m.size();
    bool odd = false;
    const auto pivots = detail::row_reduce(field, m, odd);
    if (pivots.size() < n) {
        return field.zero();
    }
    auto det = field.one();
    for (std::size_t i = 0; i < n; ++i) {
        det = field.mul(det, m[i][i]);
    }
    return odd ? field.neg(det) : det;
}

// Gauss-Jordan inverse; SingularLinearPart when the matrix is singular.
template <Field K>
Matrix<K> inverse(const K &field, const Matrix<K> &m)
{
    const std::size_t n = m.size();
    Matrix<K> aug(n, std::vector<typename K::value_type>(2 * n, field.zero()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug[i][j] = m[i][j];
        }
        aug[i][n + i] = field.one();
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t sel = c;
        while (sel < n && field.is_zero(aug[sel][c])) {
            ++sel;
        }
        if (sel == n) {
            throw SingularLinearPart("matrix is singular");
        }
        std::swap(aug[sel], aug[c]);
        const auto inv = field.div(field.one(), aug[c][c]);
        for (auto &v : aug[c]) {
            v = field.mul(v, inv);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || field.is_zero(aug[i][c])) {
                continue;
            }
            const auto factor = aug[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) {
                aug[i][j] = field.sub(aug[i][j], field.mul(factor, aug[c][j]));
            }
        }
    }
    Matrix<K> out(n, std::vector<typename K::value_type>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out[i][j] = aug[i][n + j];
        }
    }
    return out;
}

} // namespace jetgroupoid
