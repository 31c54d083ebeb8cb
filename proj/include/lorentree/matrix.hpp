#pragma once

#include "lorentree/errors.hpp"
#include "lorentree/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

namespace lorentree {

// Small dense row-major matrix over a scalar backend.
template <class S>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<S> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            throw InvalidInput("matrix data size mismatch");
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = S(1);
        return m;
    }

    static Matrix diagonal(const std::vector<S>& d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<S> column(std::size_t j) const
    {
        std::vector<S> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const std::vector<S>& c)
    {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, j) = c[i];
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix& b)
    {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                (*this)(r0 + i, c0 + j) = b(i, j);
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw InvalidInput("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const S& aik = a(i, k);
                if (ScalarTraits<S>::is_exactly_zero(aik))
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<S> operator*(const Matrix& a, const std::vector<S>& x)
    {
        if (a.cols_ != x.size())
            throw InvalidInput("matrix-vector shape mismatch");
        std::vector<S> y(a.rows_, S(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j)
                y[i] += a(i, j) * x[j];
        return y;
    }

    friend Matrix operator+(Matrix a, const Matrix& b)
    {
        a.check_same(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] += b.data_[i];
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        a.check_same(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] -= b.data_[i];
        return a;
    }

    friend Matrix operator*(const S& c, Matrix a)
    {
        for (auto& v : a.data_)
            v *= c;
        return a;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : data_)
            m = std::max(m, std::fabs(ScalarTraits<S>::to_double(v)));
        return m;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    template <class T>
    Matrix<T> cast() const
    {
        Matrix<T> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m(i, j) = convert<T>((*this)(i, j));
        return m;
    }

private:
    template <class T>
    static T convert(const S& v)
    {
        if constexpr (std::is_same_v<T, double>)
            return ScalarTraits<S>::to_double(v);
        else
            return T(v);
    }

    void check_same(const Matrix& b) const
    {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw InvalidInput("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> data_;
};

template <class S>
double max_abs_diff(const Matrix<S>& a, const Matrix<S>& b)
{
    return (a - b).max_abs();
}

// Row reduction to reduced echelon form. Pivots are chosen by largest
// magnitude for doubles (entries below tol count as zero) and first nonzero
// for rationals. Returns pivot columns.
template <class S>
std::vector<std::size_t> row_reduce(Matrix<S>& m, double tol = 1e-12)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t best = m.rows();
        if constexpr (ScalarTraits<S>::exact) {
            for (std::size_t i = r; i < m.rows(); ++i)
                if (!ScalarTraits<S>::is_exactly_zero(m(i, c))) {
                    best = i;
                    break;
                }
        } else {
            double best_abs = tol;
            for (std::size_t i = r; i < m.rows(); ++i) {
                double a = std::fabs(m(i, c));
                if (a > best_abs) {
                    best_abs = a;
                    best = i;
                }
            }
        }
        if (best == m.rows())
            continue;
        for (std::size_t j = 0; j < m.cols(); ++j)
            std::swap(m(r, j), m(best, j));
        S inv = S(1) / m(r, c);
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || ScalarTraits<S>::is_exactly_zero(m(i, c)))
                continue;
            S f = m(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class S>
std::size_t rank(Matrix<S> m, double tol = 1e-12)
{
    return row_reduce(m, tol).size();
}

// Basis of the right null space, one vector per column of the result.
template <class S>
std::vector<std::vector<S>> nullspace(Matrix<S> m, double tol = 1e-12)
{
    auto pivots = row_reduce(m, tol);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots)
        is_pivot[p] = true;
    std::vector<std::vector<S>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free])
            continue;
        std::vector<S> v(m.cols(), S(0));
        v[free] = S(1);
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solves A X = B for square nonsingular A; throws DegenerateForm otherwise.
template <class S>
Matrix<S> solve(const Matrix<S>& a, const Matrix<S>& b, double tol = 1e-12)
{
    if (!a.square() || a.rows() != b.rows())
        throw InvalidInput("solve shape mismatch");
    std::size_t n = a.rows();
    Matrix<S> aug(n, n + b.cols());
    aug.set_block(0, 0, a);
    aug.set_block(0, n, b);
    auto pivots = row_reduce(aug, tol);
    if (pivots.size() < n || pivots[n - 1] != n - 1)
        throw DegenerateForm("singular linear system");
    return aug.block(0, n, n, b.cols());
}

template <class S>
Matrix<S> inverse(const Matrix<S>& a, double tol = 1e-12)
{
    return solve(a, Matrix<S>::identity(a.rows()), tol);
}

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b)
{
    S acc = S(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

// x^T G y
template <class S>
S bilinear(const Matrix<S>& g, const std::vector<S>& x, const std::vector<S>& y)
{
    return dot(x, g * y);
}

} // namespace lorentree
