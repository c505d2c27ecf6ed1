#pragma once

// Representation theory of the symmetric group S_N: partitions, permutations,
// characters, Young seminormal / orthogonal irreducible matrices, Schur-Weyl
// multiplicities and projectors onto the trivial isotypic component of tensor
// products of irreps.
//
// Conventions
//   * Permutations act on {0..N-1}; composition is (s * t)(x) = s(t(x)).
//   * Irreps are realised on standard Young tableaux in last-letter order.
//     The row partition (N) is the trivial representation, the column (1^N)
//     the sign representation.
//   * Partitions compare in descending lexicographic order; "smaller" in
//     operator< means "comes first", i.e. (4) < (3,1) < (2,2).

#include "qmarg/exact_matrix.hpp"
#include "qmarg/rational.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qmarg::symgroup {

class Partition {
public:
    Partition() = default;
    /// Throws InvalidInput unless parts is weakly decreasing and positive.
    explicit Partition(std::vector<int> parts);

    const std::vector<int>& parts() const { return parts_; }
    int size() const { return size_; }
    int length() const { return static_cast<int>(parts_.size()); }
    int operator[](std::size_t i) const { return parts_[i]; }

    /// Conjugate (transposed) diagram.
    Partition conjugate() const;

    std::string to_string() const;

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }
    /// Descending lexicographic: (4) comes before (3,1).
    std::strong_ordering operator<=>(const Partition& o) const;

private:
    std::vector<int> parts_;
    int size_ = 0;
};

class Permutation {
public:
    Permutation() = default;
    /// Throws InvalidInput unless images is a bijection of {0..N-1}.
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int n);
    static Permutation transposition(int n, int a, int b);
    /// The cycle (0 1 2 ... n-1): x -> x+1 mod n.
    static Permutation long_cycle(int n);

    int degree() const { return static_cast<int>(images_.size()); }
    int operator()(int x) const { return images_[static_cast<std::size_t>(x)]; }
    const std::vector<int>& images() const { return images_; }

    /// (this * other)(x) = this(other(x)).
    Permutation operator*(const Permutation& other) const;
    Permutation inverse() const;

    bool is_identity() const;
    int cycle_count() const;
    Partition cycle_type() const;
    /// Lexicographic rank of the one-line notation among all of S_N.
    std::size_t rank() const;
    /// Adjacent transpositions s_k = (k k+1) with *this = s_{w[0]} * s_{w[1]} * ...
    std::vector<int> reduced_word() const;

    std::string to_string() const;

    auto operator<=>(const Permutation& o) const = default;

private:
    std::vector<int> images_;
};

/// All permutations of degree n in lexicographic order of one-line notation.
std::vector<Permutation> all_permutations(int n);

/// Partitions of n with at most max_len parts, descending lexicographic.
std::vector<Partition> enumerate_partitions(int n, int max_len);

/// Hook-length formula.
std::uint64_t irrep_dimension(const Partition& lambda);

/// Murnaghan-Nakayama rule. Throws InvalidInput on mismatched sizes.
long character(const Partition& lambda, const Partition& cycle_type);

/// Order of the centraliser of an element of the given cycle type.
BigInt centralizer_order(const Partition& cycle_type);

enum class IrrepForm { seminormal, orthogonal };

struct IrrepMatrix {
    Partition partition;
    Permutation element;
    IrrepForm form = IrrepForm::orthogonal;
    RationalMatrix exact;   // filled for the seminormal form
    Eigen::MatrixXd real;   // filled for the orthogonal form

    std::size_t side() const;
};

IrrepMatrix irrep_matrix(const Partition& lambda, const Permutation& sigma, IrrepForm form);

/// Orthogonal-form matrix without the wrapper record.
Eigen::MatrixXd orthogonal_matrix(const Partition& lambda, const Permutation& sigma);
/// Seminormal-form matrix without the wrapper record.
RationalMatrix seminormal_matrix(const Partition& lambda, const Permutation& sigma);

/// Orthogonal matrices for every element of S_N, indexed by Permutation::rank().
/// Cached; only available for N <= 7.
const std::vector<Eigen::MatrixXd>& orthogonal_group_table(const Partition& lambda);
const std::vector<RationalMatrix>& seminormal_group_table(const Partition& lambda);

/// Standard Young tableaux of shape lambda as row index of each entry, in
/// the basis order used by irrep_matrix.
const std::vector<std::vector<int>>& standard_tableaux(const Partition& lambda);

/// Multiplicity of the irrep lambda in the permutation action of S_N on
/// (C^d)^{\otimes N} (hook-content formula). Zero iff length(lambda) > d.
BigInt gl_multiplicity(const Partition& lambda, long d);

/// Multiplicity k of the trivial irrep in the diagonal S_N action on
/// M_{lambda_1} (x) ... (x) M_{lambda_n}. Throws InvalidInput on mixed N.
BigInt trivial_multiplicity(std::span<const Partition> tuple);

enum class BasisMethod { kernel, twirl };

struct ProjectorOptions {
    std::size_t size_cap = 512;
    BasisMethod method = BasisMethod::kernel;
    /// Build both bases and require they span the same space.
    bool cross_check = false;
    std::uint64_t seed = 0x5eed;
    /// Also materialise the averaged operator (costs N! * side^2).
    bool with_matrix = true;
};

struct BlockProjector {
    std::vector<Partition> tuple;
    /// (1/N!) sum_sigma (x)_i M_{lambda_i}(sigma), orthogonal form.
    Eigen::MatrixXd matrix;
    /// Orthonormal columns spanning the image; count = trivial_multiplicity.
    Eigen::MatrixXd basis;
    std::size_t multiplicity = 0;

    std::size_t side() const { return static_cast<std::size_t>(basis.rows()); }
};

/// Throws ResourceLimit when prod dim(lambda_i) exceeds the cap and
/// InternalError when the constructed basis has the wrong rank.
BlockProjector block_projector(std::span<const Partition> tuple, const ProjectorOptions& opts = {});

/// Same averaged operator in the seminormal form, exactly. An idempotent
/// (not orthogonal) projector whose rank is the trivial multiplicity.
RationalMatrix exact_block_projector(std::span<const Partition> tuple, std::size_t size_cap = 512);

/// Kronecker product of dense real matrices.
Eigen::MatrixXd kron(std::span<const Eigen::MatrixXd> factors);

/// (A_1 (x) ... (x) A_n) v without forming the product.
Eigen::VectorXd kron_apply(std::span<const Eigen::MatrixXd> factors, const Eigen::VectorXd& v);

} // namespace qmarg::symgroup
