#pragma once

// Exact algebra of operators on ((C^d)^{(x)N})^{(x)n} spanned by
//   V_{s_1} (x) V_{s_2} (x) ... (x) V_{s_n},
// one permutation of the N copies per slot. V_s sends tensor factor j to
// position s(j), so V_s V_t = V_{s*t} and Tr V_s = d^{#cycles(s)}.
//
// Two representations:
//   PermOperator         ordered keys, one coefficient per basis element;
//   SymmetrizedOperator  sorted keys; a coefficient c at key K stands for
//                        c * P{K}, the sum over all distinct slot
//                        arrangements of K.

#include "qmarg/exact_matrix.hpp"
#include "qmarg/rational.hpp"
#include "qmarg/symgroup.hpp"

#include <map>
#include <vector>

namespace qmarg::permalg {

using symgroup::Permutation;
using Key = std::vector<Permutation>;

BigInt perm_trace(const Permutation& sigma, long d);

struct CopyTrace {
    long factor = 1;       // d when sigma fixes the copy, else 1
    Permutation reduced;   // copy removed from its cycle, kept as a fixed point
};

/// Tr_c(V_sigma) (x) 1_c = factor * V_reduced.
CopyTrace partial_trace_copy(const Permutation& sigma, int copy, long d);

struct Shape {
    int copies = 2;  // N
    int slots = 1;   // n
    long d = 2;

    bool operator==(const Shape&) const = default;
};

class PermOperator {
public:
    PermOperator() = default;
    explicit PermOperator(Shape shape) : shape_(shape) {}

    const Shape& shape() const { return shape_; }
    const std::map<Key, Rational>& terms() const { return terms_; }

    /// Adds c * V_{key}; zero results are erased. Throws InvalidInput on a
    /// key of the wrong shape.
    void add(const Key& key, const Rational& c);
    Rational coefficient(const Key& key) const;

    PermOperator& operator+=(const PermOperator& o);
    PermOperator& operator*=(const Rational& s);
    PermOperator operator*(const PermOperator& o) const;

    bool operator==(const PermOperator& o) const = default;

private:
    Shape shape_;
    std::map<Key, Rational> terms_;
};

class SymmetrizedOperator {
public:
    SymmetrizedOperator() = default;
    explicit SymmetrizedOperator(Shape shape) : shape_(shape) {}

    const Shape& shape() const { return shape_; }
    const std::map<Key, Rational>& terms() const { return terms_; }

    /// Adds c * P{key}; the key is canonicalised first.
    void add(Key key, const Rational& c);
    Rational coefficient(Key key) const;

    SymmetrizedOperator& operator+=(const SymmetrizedOperator& o);
    SymmetrizedOperator& operator*=(const Rational& s);

    bool operator==(const SymmetrizedOperator& o) const = default;

private:
    Shape shape_;
    std::map<Key, Rational> terms_;
};

/// Sorted copy of a key (vertical-permutation representative).
Key canonical(Key key);

/// Number of distinct arrangements of the multiset key.
BigInt arrangements(const Key& key);

/// Expands every P{K} into its ordered terms.
PermOperator expand(const SymmetrizedOperator& a);

/// Slot-permutation average of an ordered operator. Throws InvalidInput if
/// the operator is not invariant under slot permutations.
SymmetrizedOperator symmetrize(const PermOperator& a);

Rational op_trace(const PermOperator& a);
Rational op_trace(const SymmetrizedOperator& a);

/// (V_sigma^{(x)n}) A.
SymmetrizedOperator left_multiply_swap(const SymmetrizedOperator& a, const Permutation& sigma);
PermOperator left_multiply_swap(const PermOperator& a, const Permutation& sigma);

/// Traces copy `copy` out of every slot in traced_slots, leaving the
/// identity there. Slots are distinguishable afterwards, so the result is
/// ordered.
PermOperator marginal_of(const PermOperator& a, const std::vector<int>& traced_slots, int copy);
PermOperator marginal_of(const SymmetrizedOperator& a, const std::vector<int>& traced_slots, int copy);

/// Tr(A B). Throws InvalidInput on shape mismatch.
Rational pairing(const PermOperator& a, const PermOperator& b);
Rational pairing(const SymmetrizedOperator& a, const SymmetrizedOperator& b);

/// X_i = P{V^{(x)i} (x) 1^{(x)(n-i)}} for N = 2.
SymmetrizedOperator x_basis(int i, int n, long d);

/// Dual element with Tr(dual_i X_j) = delta_ij, N = 2.
SymmetrizedOperator dual_basis_element(int i, int n, long d);

// ---------------------------------------------------------------------------
// Dense oracle. Tensor factors are ordered slot-major with copies inside a
// slot: (slot 0: copy 0..N-1), (slot 1: ...), ...

inline constexpr std::size_t dense_side_cap = 1024;

/// Exact dense matrix of V_sigma on (C^d)^{(x)N}.
RationalMatrix dense_permutation(const Permutation& sigma, long d);

/// Throws ResourceLimit if (d^N)^n exceeds dense_side_cap.
RationalMatrix dense_matrix(const PermOperator& a);
RationalMatrix dense_matrix(const SymmetrizedOperator& a);

/// Partial trace over the factors flagged in `traced`, keeping the rest in
/// order. dims gives the dimension of every factor.
RationalMatrix dense_partial_trace(const RationalMatrix& m, const std::vector<std::size_t>& dims,
                                   const std::vector<bool>& traced);

/// Partial transpose on the flagged factors.
RationalMatrix dense_partial_transpose(const RationalMatrix& m, const std::vector<std::size_t>& dims,
                                       const std::vector<bool>& transposed);

} // namespace qmarg::permalg
