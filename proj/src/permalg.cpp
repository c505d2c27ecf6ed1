#include "qmarg/permalg.hpp"

#include "qmarg/error.hpp"

#include <algorithm>

namespace qmarg::permalg {

BigInt perm_trace(const Permutation& sigma, long d) { return ipow(d, sigma.cycle_count()); }

CopyTrace partial_trace_copy(const Permutation& sigma, int copy, long d) {
    if (copy < 0 || copy >= sigma.degree()) throw InvalidInput("partial_trace_copy: copy index out of range");
    if (sigma(copy) == copy) return {d, sigma};
    std::vector<int> im = sigma.images();
    int pre = sigma.inverse()(copy);
    im[static_cast<std::size_t>(pre)] = sigma(copy);
    im[static_cast<std::size_t>(copy)] = copy;
    return {1, Permutation(std::move(im))};
}

namespace {

void check_key(const Shape& s, const Key& key) {
    if (static_cast<int>(key.size()) != s.slots) throw InvalidInput("operator key has the wrong number of slots");
    for (const auto& p : key)
        if (p.degree() != s.copies) throw InvalidInput("operator key permutation has the wrong degree");
}

void accumulate(std::map<Key, Rational>& terms, const Key& key, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms.emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

void check_same(const Shape& a, const Shape& b) {
    if (!(a == b)) throw InvalidInput("operators have different (N, n, d)");
}

// Runs f over every distinct arrangement of a sorted key.
template <class F>
void for_each_arrangement(Key sorted, F&& f) {
    do {
        f(static_cast<const Key&>(sorted));
    } while (std::next_permutation(sorted.begin(), sorted.end()));
}

Rational key_trace(const Key& key, long d) {
    BigInt t = 1;
    for (const auto& p : key) t *= perm_trace(p, d);
    return Rational(t);
}

} // namespace

Key canonical(Key key) {
    std::sort(key.begin(), key.end());
    return key;
}

BigInt arrangements(const Key& key) {
    Key sorted = canonical(key);
    BigInt r = factorial(static_cast<long>(sorted.size()));
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        r /= factorial(static_cast<long>(j - i));
        i = j;
    }
    return r;
}

// ---------------------------------------------------------------------------

void PermOperator::add(const Key& key, const Rational& c) {
    check_key(shape_, key);
    accumulate(terms_, key, c);
}

Rational PermOperator::coefficient(const Key& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Rational(0) : it->second;
}

PermOperator& PermOperator::operator+=(const PermOperator& o) {
    check_same(shape_, o.shape_);
    for (const auto& [k, c] : o.terms_) accumulate(terms_, k, c);
    return *this;
}

PermOperator& PermOperator::operator*=(const Rational& s) {
    if (s == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

PermOperator PermOperator::operator*(const PermOperator& o) const {
    check_same(shape_, o.shape_);
    PermOperator r(shape_);
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_) {
            Key k(ka.size());
            for (std::size_t j = 0; j < ka.size(); ++j) k[j] = ka[j] * kb[j];
            accumulate(r.terms_, k, ca * cb);
        }
    return r;
}

void SymmetrizedOperator::add(Key key, const Rational& c) {
    check_key(shape_, key);
    accumulate(terms_, canonical(std::move(key)), c);
}

Rational SymmetrizedOperator::coefficient(Key key) const {
    auto it = terms_.find(canonical(std::move(key)));
    return it == terms_.end() ? Rational(0) : it->second;
}

SymmetrizedOperator& SymmetrizedOperator::operator+=(const SymmetrizedOperator& o) {
    check_same(shape_, o.shape_);
    for (const auto& [k, c] : o.terms_) accumulate(terms_, k, c);
    return *this;
}

SymmetrizedOperator& SymmetrizedOperator::operator*=(const Rational& s) {
    if (s == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

// ---------------------------------------------------------------------------

PermOperator expand(const SymmetrizedOperator& a) {
    PermOperator r(a.shape());
    for (const auto& [k, c] : a.terms()) for_each_arrangement(k, [&](const Key& arr) { r.add(arr, c); });
    return r;
}

SymmetrizedOperator symmetrize(const PermOperator& a) {
    SymmetrizedOperator r(a.shape());
    std::map<Key, bool> seen;
    for (const auto& [k, c] : a.terms()) {
        Key canon = canonical(k);
        if (seen.count(canon)) continue;
        seen[canon] = true;
        for_each_arrangement(canon, [&](const Key& arr) {
            if (a.coefficient(arr) != c) throw InvalidInput("symmetrize: operator is not slot-symmetric");
        });
        r.add(canon, c);
    }
    return r;
}

Rational op_trace(const PermOperator& a) {
    Rational t = 0;
    for (const auto& [k, c] : a.terms()) t += c * key_trace(k, a.shape().d);
    return t;
}

Rational op_trace(const SymmetrizedOperator& a) {
    Rational t = 0;
    for (const auto& [k, c] : a.terms()) t += c * Rational(arrangements(k)) * key_trace(k, a.shape().d);
    return t;
}

SymmetrizedOperator left_multiply_swap(const SymmetrizedOperator& a, const Permutation& sigma) {
    if (sigma.degree() != a.shape().copies) throw InvalidInput("left_multiply_swap: degree mismatch");
    SymmetrizedOperator r(a.shape());
    for (const auto& [k, c] : a.terms()) {
        Key m(k.size());
        for (std::size_t j = 0; j < k.size(); ++j) m[j] = sigma * k[j];
        r.add(std::move(m), c);
    }
    return r;
}

PermOperator left_multiply_swap(const PermOperator& a, const Permutation& sigma) {
    if (sigma.degree() != a.shape().copies) throw InvalidInput("left_multiply_swap: degree mismatch");
    PermOperator r(a.shape());
    for (const auto& [k, c] : a.terms()) {
        Key m(k.size());
        for (std::size_t j = 0; j < k.size(); ++j) m[j] = sigma * k[j];
        r.add(m, c);
    }
    return r;
}

PermOperator marginal_of(const PermOperator& a, const std::vector<int>& traced_slots, int copy) {
    const Shape& s = a.shape();
    if (copy < 0 || copy >= s.copies) throw InvalidInput("marginal_of: copy index out of range");
    std::vector<bool> traced(static_cast<std::size_t>(s.slots), false);
    for (int j : traced_slots) {
        if (j < 0 || j >= s.slots) throw InvalidInput("marginal_of: slot index out of range");
        traced[static_cast<std::size_t>(j)] = true;
    }
    PermOperator r(s);
    for (const auto& [k, c] : a.terms()) {
        Key m = k;
        Rational coef = c;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (!traced[j]) continue;
            auto ct = partial_trace_copy(m[j], copy, s.d);
            coef *= ct.factor;
            m[j] = std::move(ct.reduced);
        }
        r.add(m, coef);
    }
    return r;
}

PermOperator marginal_of(const SymmetrizedOperator& a, const std::vector<int>& traced_slots, int copy) {
    return marginal_of(expand(a), traced_slots, copy);
}

Rational pairing(const PermOperator& a, const PermOperator& b) {
    check_same(a.shape(), b.shape());
    Rational t = 0;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            BigInt tr = 1;
            for (std::size_t j = 0; j < ka.size(); ++j) tr *= perm_trace(ka[j] * kb[j], a.shape().d);
            t += ca * cb * tr;
        }
    return t;
}

Rational pairing(const SymmetrizedOperator& a, const SymmetrizedOperator& b) {
    check_same(a.shape(), b.shape());
    // Tr(P{K} P{L}) = #arr(K) * sum over arrangements beta of L of Tr(V_K V_beta).
    long d = a.shape().d;
    Rational t = 0;
    for (const auto& [ka, ca] : a.terms()) {
        BigInt arr = arrangements(ka);
        for (const auto& [kb, cb] : b.terms()) {
            BigInt sum = 0;
            for_each_arrangement(kb, [&](const Key& beta) {
                BigInt tr = 1;
                for (std::size_t j = 0; j < ka.size(); ++j) tr *= perm_trace(ka[j] * beta[j], d);
                sum += tr;
            });
            t += ca * cb * Rational(arr * sum);
        }
    }
    return t;
}

namespace {

Key swap_key(int i, int n) {
    Key k;
    for (int j = 0; j < n; ++j)
        k.push_back(j < i ? Permutation::transposition(2, 0, 1) : Permutation::identity(2));
    return k;
}

} // namespace

SymmetrizedOperator x_basis(int i, int n, long d) {
    if (n < 1 || i < 0 || i > n) throw InvalidInput("x_basis: index out of range");
    SymmetrizedOperator r(Shape{2, n, d});
    r.add(swap_key(i, n), 1);
    return r;
}

SymmetrizedOperator dual_basis_element(int i, int n, long d) {
    if (n < 1 || i < 0 || i > n) throw InvalidInput("dual_basis_element: index out of range");
    // P{(1 - V/d)^{(x)(n-i)} (x) (V - 1/d)^{(x)i}}: per slot a pair
    // (coefficient of 1, coefficient of V); expand the product over slots.
    // With the exponents the other way round the element pairs with X_{n-i}.
    Rational dd = d;
    std::pair<Rational, Rational> a{1, -1 / dd}, b{-1 / dd, 1};
    Shape shape{2, n, d};
    PermOperator ordered(shape);
    auto id = Permutation::identity(2), v = Permutation::transposition(2, 0, 1);
    std::vector<bool> is_a(static_cast<std::size_t>(n), false);
    std::fill(is_a.begin(), is_a.begin() + (n - i), true);
    std::sort(is_a.begin(), is_a.end());
    do {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            Key k;
            Rational c = 1;
            for (int j = 0; j < n; ++j) {
                const auto& f = is_a[static_cast<std::size_t>(j)] ? a : b;
                bool swap = (mask >> j) & 1u;
                c *= swap ? f.second : f.first;
                k.push_back(swap ? v : id);
            }
            ordered.add(k, c);
        }
    } while (std::next_permutation(is_a.begin(), is_a.end()));
    ordered *= Rational(1) / (Rational(binom(n, i)) * rpow(d * d - 1, n));
    return symmetrize(ordered);
}

// ---------------------------------------------------------------------------
// Dense oracle

RationalMatrix dense_permutation(const Permutation& sigma, long d) {
    PermOperator op(Shape{sigma.degree(), 1, d});
    op.add({sigma}, 1);
    return dense_matrix(op);
}

RationalMatrix dense_matrix(const PermOperator& a) {
    const Shape& s = a.shape();
    std::size_t factors = static_cast<std::size_t>(s.copies) * static_cast<std::size_t>(s.slots);
    std::size_t side = 1;
    for (std::size_t f = 0; f < factors; ++f) {
        side *= static_cast<std::size_t>(s.d);
        if (side > dense_side_cap) throw ResourceLimit("dense_matrix: side exceeds the dense oracle cap");
    }
    RationalMatrix m(side, side);
    auto ud = static_cast<std::size_t>(s.d);
    std::vector<std::size_t> in(factors), out(factors);
    for (const auto& [k, c] : a.terms()) {
        // global factor map: (slot j, copy x) -> (slot j, copy k[j](x))
        std::vector<std::size_t> target(factors);
        for (std::size_t j = 0; j < k.size(); ++j)
            for (int x = 0; x < s.copies; ++x)
                target[j * static_cast<std::size_t>(s.copies) + static_cast<std::size_t>(x)] =
                    j * static_cast<std::size_t>(s.copies) + static_cast<std::size_t>(k[j](x));
        for (std::size_t col = 0; col < side; ++col) {
            std::size_t rem = col;
            for (std::size_t f = factors; f-- > 0;) {
                in[f] = rem % ud;
                rem /= ud;
            }
            for (std::size_t f = 0; f < factors; ++f) out[target[f]] = in[f];
            std::size_t row = 0;
            for (std::size_t f = 0; f < factors; ++f) row = row * ud + out[f];
            m(row, col) += c;
        }
    }
    return m;
}

RationalMatrix dense_matrix(const SymmetrizedOperator& a) { return dense_matrix(expand(a)); }

namespace {

std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> out(dims.size());
    for (std::size_t f = dims.size(); f-- > 0;) {
        out[f] = index % dims[f];
        index /= dims[f];
    }
    return out;
}

std::size_t compose(const std::vector<std::size_t>& dig, const std::vector<std::size_t>& dims) {
    std::size_t r = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) r = r * dims[f] + dig[f];
    return r;
}

std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (auto x : dims) p *= x;
    return p;
}

} // namespace

RationalMatrix dense_partial_trace(const RationalMatrix& m, const std::vector<std::size_t>& dims,
                                   const std::vector<bool>& traced) {
    if (dims.size() != traced.size() || product(dims) != m.rows() || m.rows() != m.cols())
        throw InvalidInput("dense_partial_trace: dimensions do not match the matrix");
    std::vector<std::size_t> kept_dims;
    for (std::size_t f = 0; f < dims.size(); ++f)
        if (!traced[f]) kept_dims.push_back(dims[f]);
    RationalMatrix r(product(kept_dims), product(kept_dims));
    std::vector<std::size_t> kr, kc;
    for (std::size_t row = 0; row < m.rows(); ++row) {
        auto dr = digits(row, dims);
        for (std::size_t col = 0; col < m.cols(); ++col) {
            if (m(row, col) == 0) continue;
            auto dc = digits(col, dims);
            bool match = true;
            kr.clear();
            kc.clear();
            for (std::size_t f = 0; f < dims.size(); ++f) {
                if (traced[f]) {
                    if (dr[f] != dc[f]) {
                        match = false;
                        break;
                    }
                } else {
                    kr.push_back(dr[f]);
                    kc.push_back(dc[f]);
                }
            }
            if (match) r(compose(kr, kept_dims), compose(kc, kept_dims)) += m(row, col);
        }
    }
    return r;
}

RationalMatrix dense_partial_transpose(const RationalMatrix& m, const std::vector<std::size_t>& dims,
                                       const std::vector<bool>& transposed) {
    if (dims.size() != transposed.size() || product(dims) != m.rows() || m.rows() != m.cols())
        throw InvalidInput("dense_partial_transpose: dimensions do not match the matrix");
    RationalMatrix r(m.rows(), m.cols());
    for (std::size_t row = 0; row < m.rows(); ++row) {
        auto dr = digits(row, dims);
        for (std::size_t col = 0; col < m.cols(); ++col) {
            if (m(row, col) == 0) continue;
            auto dc = digits(col, dims);
            for (std::size_t f = 0; f < dims.size(); ++f)
                if (transposed[f]) std::swap(dr[f], dc[f]);
            r(compose(dr, dims), compose(dc, dims)) = m(row, col);
            dr = digits(row, dims);
        }
    }
    return r;
}

} // namespace qmarg::permalg
