#pragma once

#include "qmarg/error.hpp"
#include "qmarg/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qmarg {

/// Dense row-major matrix of exact rationals. Small sizes only; every
/// operation is cubic at worst.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    RationalMatrix operator*(const RationalMatrix& o) const {
        if (cols_ != o.rows_) throw InvalidInput("RationalMatrix: shape mismatch in product");
        RationalMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rational& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) {
                    const Rational& b = o(k, j);
                    if (b != 0) r(i, j) += a * b;
                }
            }
        return r;
    }

    RationalMatrix& operator+=(const RationalMatrix& o) {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("RationalMatrix: shape mismatch in sum");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    RationalMatrix& operator*=(const Rational& s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    RationalMatrix transpose() const {
        RationalMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Rational trace() const {
        Rational t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool operator==(const RationalMatrix& o) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix kron(std::span<const RationalMatrix> factors);

/// Rank by fraction-exact Gaussian elimination.
std::size_t rank(RationalMatrix m);

/// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> row_reduce(RationalMatrix& m);

/// Unique solution of A x = b, or nullopt when A is singular or the
/// system inconsistent.
std::optional<std::vector<Rational>> solve_unique(const RationalMatrix& a, std::span<const Rational> b);

/// Basis of { x : A x = 0 } as columns of the returned matrix.
RationalMatrix nullspace(const RationalMatrix& a);

} // namespace qmarg
