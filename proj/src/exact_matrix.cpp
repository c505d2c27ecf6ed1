#include "qmarg/exact_matrix.hpp"

namespace qmarg {

RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Rational& s = a(i, j);
            if (s == 0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    if (b(k, l) != 0) r(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
        }
    return r;
}

RationalMatrix kron(std::span<const RationalMatrix> factors) {
    RationalMatrix r = RationalMatrix::identity(1);
    for (const auto& f : factors) r = kron(r, f);
    return r;
}

std::vector<std::size_t> row_reduce(RationalMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t p = row;
        while (p < m.rows() && m(p, col) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        Rational inv = 1 / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col) == 0) continue;
            Rational f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j)
                if (m(row, j) != 0) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::size_t rank(RationalMatrix m) { return row_reduce(m).size(); }

std::optional<std::vector<Rational>> solve_unique(const RationalMatrix& a, std::span<const Rational> b) {
    if (b.size() != a.rows()) throw InvalidInput("solve_unique: rhs length mismatch");
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto piv = row_reduce(aug);
    if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
    if (piv.size() != a.cols()) return std::nullopt;
    std::vector<Rational> x(a.cols());
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, a.cols());
    return x;
}

RationalMatrix nullspace(const RationalMatrix& a) {
    RationalMatrix m = a;
    auto piv = row_reduce(m);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : piv) is_pivot[p] = true;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (!is_pivot[j]) free.push_back(j);
    RationalMatrix basis(a.cols(), free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
        basis(free[f], f) = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) basis(piv[r], f) = -m(r, free[f]);
    }
    return basis;
}

} // namespace qmarg
