#include "qmarg/solve.hpp"

#include "qmarg/error.hpp"

#include <numeric>

namespace qmarg::solve {

PsdResult psd_check_exact(const RationalMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("psd_check_exact: matrix is not square");
    std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m(i, j) != m(j, i)) throw InvalidInput("psd_check_exact: matrix is not symmetric");

    // Invariant: a = t m t^T, so a row of t is a test vector for any
    // negative entry pattern found in a.
    RationalMatrix a = m;
    RationalMatrix t = RationalMatrix::identity(n);
    std::vector<bool> done(n, false);
    auto row_of = [&](std::size_t i) {
        std::vector<Rational> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = t(i, k);
        return v;
    };
    for (;;) {
        std::optional<std::size_t> piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || a(i, i) == 0) continue;
            if (a(i, i) < 0) return {false, row_of(i)};
            if (!piv) piv = i;
        }
        if (!piv) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (done[i] || done[j] || a(i, j) == 0) continue;
                    // (e_i + s e_j)^T a (e_i + s e_j) = 2 s a_ij with zero diagonal
                    int s = a(i, j) > 0 ? -1 : 1;
                    std::vector<Rational> v(n);
                    for (std::size_t k = 0; k < n; ++k) v[k] = t(i, k) + s * t(j, k);
                    return {false, v};
                }
            return {true, {}};
        }
        std::size_t p = *piv;
        done[p] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (done[j] || a(j, p) == 0) continue;
            Rational f = a(j, p) / a(p, p);
            // row j -= f row p, then column j -= f column p
            for (std::size_t k = 0; k < n; ++k) {
                if (a(p, k) != 0) a(j, k) -= f * a(p, k);
                if (t(p, k) != 0) t(j, k) -= f * t(p, k);
            }
            for (std::size_t k = 0; k < n; ++k)
                if (a(k, p) != 0) a(k, j) -= f * a(k, p);
        }
    }
}

} // namespace qmarg::solve
