#pragma once

// Symmetry-reduced N-copy extension hierarchy for pure-state marginal
// problems, and the dual witness problem for AME(n, d).
//
// The N-party operator Phi on ((C^d)^{(x)n})^{(x)N} is taken invariant under
// [U_1 (x) ... (x) U_n]^{(x)N}, under slot permutations and supported on the
// symmetric subspace of the copies. Block-diagonalising over tuples of S_N
// irreps (lambda_1, ..., lambda_n) leaves one PSD matrix X per sorted tuple,
// acting on the trivial isotypic component K_lambda of
// M_{lambda_1} (x) ... (x) M_{lambda_n}.

#include "qmarg/rational.hpp"
#include "qmarg/solve.hpp"
#include "qmarg/symgroup.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qmarg::hierarchy {

using symgroup::Partition;
using symgroup::Permutation;
using Tuple = std::vector<Partition>;

struct MarginalSpec {
    int n = 0;
    long d = 2;
    /// Per-slot dimensions when they differ; empty means d everywhere.
    std::vector<long> dims;
    /// Explicit targets rho_I keyed by sorted slot subsets.
    std::map<std::vector<int>, RationalMatrix> marginals;
    /// When set, every subset of size uniform_order has target 1/d^|I|
    /// and `marginals` is left empty.
    std::optional<int> uniform_order;

    /// AME(n, d): all floor(n/2)-body marginals maximally mixed.
    static MarginalSpec ame(int n, long d);
    /// k-uniform states of n parties.
    static MarginalSpec uniform(int n, long d, int k);

    bool is_uniform() const { return uniform_order.has_value(); }
    long slot_dim(int j) const { return dims.empty() ? d : dims.at(static_cast<std::size_t>(j)); }
    /// Throws InvalidInput on bad subsets or targets that are not states.
    void validate() const;
};

struct HierarchyOptions {
    std::size_t block_cap = 512;
    unsigned jobs = 1;
    /// Twirled bases are random within K_lambda; the seed makes them reproducible.
    symgroup::BasisMethod basis = symgroup::BasisMethod::kernel;
    std::uint64_t seed = 0x5eed;
};

/// Sorted tuples of partitions of N with at most d rows, one per
/// vertical-permutation class, in lexicographic order.
std::vector<Tuple> sorted_tuples(int n, long d, int N);

struct PrimalBlock {
    Tuple tuple;
    /// Orthonormal basis of K_lambda in the orthogonal form (columns).
    Eigen::MatrixXd basis;
    std::size_t k = 0;
    /// Number of distinct slot arrangements times prod_j gl_multiplicity.
    double weight = 0;
    /// First index of this block's upper-triangle entries in the variable vector.
    std::size_t offset = 0;
};

/// Variables: upper triangles (row-major, i <= j) of the scaled block
/// matrices Xh = weight * X, so that Tr Phi = sum Tr Xh.
struct BlockSdp {
    int n = 0;
    long d = 2;  // dimension of the interchangeable slots
    /// Per-slot dimension; the first fixed_slots slots are distinguishable,
    /// the rest interchangeable.
    std::vector<long> dims;
    int fixed_slots = 0;
    int N = 2;
    bool strong = true;
    std::vector<PrimalBlock> blocks;
    std::size_t variables = 0;
    /// Independent equality rows (orthonormalised) and right-hand side.
    Eigen::MatrixXd equalities;
    Eigen::VectorXd rhs;
    std::size_t raw_constraints = 0;
};

/// Row r with r . vars = Tr(Phi (V_{key_0} (x) ... (x) V_{key_{n-1}})).
Eigen::RowVectorXd trace_functional(const BlockSdp& sdp, const std::vector<Permutation>& key);

/// Block matrix Xh for block b from a variable vector.
Eigen::MatrixXd block_matrix(const BlockSdp& sdp, std::size_t b, const Eigen::VectorXd& vars);

/// Throws Unsupported for non-uniform specs, InvalidInput for N < 2 and
/// ResourceLimit when a block exceeds the cap.
BlockSdp assemble_primal(const MarginalSpec& spec, int N, bool strong, const HierarchyOptions& opts = {});

/// Tr_{A_{kept^c}} Phi = 1_{mixed}/dim (x) Tr_{A_mixed} Tr_{A_{kept^c}} Phi,
/// A being the first copy; mixed must be a subset of kept.
struct Factorization {
    std::vector<int> kept;
    std::vector<int> mixed;
};

/// Normalisation plus the given factorization constraints for slots of the
/// given dimensions. Used for code extensions with a K-dimensional slot 0.
BlockSdp assemble_factorized(const std::vector<long>& dims, int fixed_slots, int N,
                             const std::vector<Factorization>& constraints, const HierarchyOptions& opts = {});

enum class LevelStatus { feasible, infeasible };

struct LevelResult {
    LevelStatus status = LevelStatus::infeasible;
    /// max t with every Xh - t 1 PSD over the affine solution set; -inf when
    /// the linear constraints alone are inconsistent.
    double margin = 0;
    /// Dimension of the affine solution set.
    std::size_t free_parameters = 0;
    Eigen::VectorXd point;
    solve::SdpResult sdp;
};

/// The feasibility SDP in SDPA form: minimize -t over (y, t) with
/// Xh(x0 + Z y) - t 1 PSD. Also returns x0 and Z.
struct PrimalReduction {
    solve::SdpProblem problem;
    Eigen::VectorXd x0;
    Eigen::MatrixXd nullspace;
    double residual = 0;
};
PrimalReduction reduce_primal(const BlockSdp& sdp);

/// Feasible iff margin >= -tol.
LevelResult solve_level(const BlockSdp& sdp, double tol = 1e-7, const solve::SdpOptions& opts = {});

// ---------------------------------------------------------------------------
// Dual witness. W_AB = sum_l w_l P{V^{(x)l} (x) 1^{(x)(n-l)}} with
// w_l = w_{n-l} folded into v_0..v_r, r = floor(n/2).

/// a_l = binom(n, l) / min(d^l, d^{n-l}).
Rational witness_coefficient(int n, long d, int l);

/// Objective coefficients of the folded variables v_0..v_r.
std::vector<Rational> folded_objective(int n, long d);

/// sum_l a_l w_l for folded w (length r+1). Throws InvalidInput otherwise.
Rational witness_value(const std::vector<Rational>& w, int n, long d);

struct WitnessLp {
    int n = 0;
    long d = 2;
    int N = 2;
    std::vector<Rational> objective;
    /// One row per tuple with k_lambda = 1: rows[t] . v >= 0.
    std::vector<Tuple> tuples;
    std::vector<std::vector<Rational>> rows;

    /// Adds the box -1 <= v_l <= 1.
    solve::LinearProgram linear_program() const;
};

struct WitnessBlock {
    Tuple tuple;
    /// Y = sum_l v_l coefficients[l], k x k.
    std::vector<Eigen::MatrixXd> coefficients;
};

struct WitnessSdp {
    int n = 0;
    long d = 2;
    int N = 2;
    std::vector<Rational> objective;
    std::vector<WitnessBlock> blocks;

    /// Variables v_0..v_r, one PSD block per tuple plus a diagonal box block.
    solve::SdpProblem problem() const;
};

/// Exact rank-1 rows from characters: (1/N!) sum_sigma prod_j chi_j(sigma g_j).
WitnessLp assemble_witness_lp(int n, long d, int N);
WitnessSdp assemble_witness_sdp(int n, long d, int N, const HierarchyOptions& opts = {});
std::variant<WitnessLp, WitnessSdp> assemble_dual_witness(int n, long d, int N, bool rank1_only,
                                                           const HierarchyOptions& opts = {});

struct WitnessSolution {
    int n = 0;
    long d = 2;
    int N = 2;
    bool exact = false;
    double optimum = 0;
    std::optional<Rational> exact_optimum;
    std::vector<double> w;
    std::vector<Rational> exact_w;
};

/// Throws SolverError when the LP is infeasible/unbounded (cannot happen
/// with the box) or the SDP does not converge.
WitnessSolution solve_witness(const WitnessLp& lp);
WitnessSolution solve_witness(const WitnessSdp& sdp, const solve::SdpOptions& opts = {});

enum class CertificateVerdict { no_ame, inconclusive };

struct Certificate {
    int n = 0;
    long d = 2;
    int N = 2;
    CertificateVerdict verdict = CertificateVerdict::inconclusive;
    double optimum = 0;
    std::optional<Rational> exact_optimum;
    std::vector<double> w;
    std::vector<Rational> exact_w;
    /// Optimum in (-tol, 0).
    bool within_tolerance = false;
    std::string message;
};

/// Negative optimum (strict sign on the exact path, < -tol otherwise)
/// certifies that no AME(n, d) exists.
Certificate certify(const WitnessSolution& s, double tol = 1e-8);

std::string to_string(CertificateVerdict v);
std::string to_string(LevelStatus s);

} // namespace qmarg::hierarchy
