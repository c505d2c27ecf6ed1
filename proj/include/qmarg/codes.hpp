#pragma once

// Quantum code existence as a marginal problem. An ((n,K,m+1))_d code is
// encoded in a state |Q> on C^K (x) (C^d)^{(x)n}; slot 0 is the auxiliary
// K-dimensional system, slots 1..n the physical ones.
//
// The symmetrised two-copy operator is
//   Phi = 1_{K^2} (x) sum_i x_i P{V^i (x) 1^{n-i}} + V_0 (x) sum_i y_i P{...}.

#include "qmarg/hierarchy.hpp"
#include "qmarg/rational.hpp"
#include "qmarg/solve.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace qmarg::codes {

struct CodeParams {
    int n = 1;
    long K = 1;
    int m = 0;  // distance m + 1
    long d = 2;
    bool pure = true;

    /// Throws InvalidInput unless n >= 1, K >= 1, m >= 0, d >= 2, m <= n.
    void validate() const;
    /// "((n,K,m+1))_d"
    std::string label() const;
};

/// Raised when a pure code violates the quantum Singleton bound.
class SingletonViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// K <= d^{n-2m}, in big integers.
bool singleton_check(const CodeParams& p);

/// Marginal spec over slots {0, 1..n} (slot 0 of dimension K): every
/// {0} u I with |I| = m maximally mixed. Throws SingletonViolation when the
/// bound fails, InvalidInput for impure params and ResourceLimit when the
/// explicit targets would exceed `entry_cap` rational entries.
hierarchy::MarginalSpec purecode_marginal_spec(const CodeParams& p, std::size_t entry_cap = 1u << 20);

/// Generalised Gell-Mann matrices: K^2 - 1 traceless Hermitian matrices
/// with Tr(M_a M_b) = 2 delta_ab.
std::vector<Eigen::MatrixXcd> gell_mann_basis(long K);

struct SubsetDeviation {
    std::vector<int> subset;  // physical slots, 1-based as in {1..n}
    double deviation = 0;
};

struct VerifyReport {
    CodeParams params;
    double max_deviation = 0;
    std::vector<SubsetDeviation> subsets;
    bool passed = false;
    double tolerance = 0;
};

inline constexpr std::size_t verify_dense_cap = 4096;

/// Max entrywise deviation of Tr_{I^c}|Q><Q| from 1/(K d^m) (pure codes) or
/// from 1_K/K (x) Tr_0 Tr_{I^c}|Q><Q| (general codes). Throws InvalidInput
/// for a wrong length or non-unit norm and ResourceLimit above the cap.
VerifyReport verify_code_state(const Eigen::VectorXcd& q, const CodeParams& p, double tol = 1e-10);

/// |Q> = (|0>|0_L> + |1>|1_L>)/sqrt(2) for the five-qubit code with
/// stabilisers XZZXI and its cyclic shifts; length 64.
Eigen::VectorXcd five_qubit_code_state();

/// (1/sqrt d) sum_k |k...k> on n slots.
Eigen::VectorXcd ghz_state(int n, long d);

// ---------------------------------------------------------------------------
// Two-copy constraint systems over (x_0..x_n, y_0..y_n).

enum class Level { pos, ppt, extension };

std::string to_string(Level l);
/// Throws InvalidInput on anything but "pos", "ppt", "extension".
Level parse_level(const std::string& s);

/// Tr(P{V^i (x) 1^{n-i}} (V^{(x)s} (x) 1^{(x)(n-s)})) on n slots of dimension d.
Rational swap_pairing(int n, long d, int i, int s);

struct CodeSystem {
    CodeParams params;
    /// Variables x_0..x_n then y_0..y_n, all free.
    solve::LinearProgram lp;
    std::size_t equalities = 0;
    /// Number of traceless-auxiliary families (K^2 - 1 for general codes).
    std::size_t traceless_families = 0;
};

/// Normalisation, V_AB Phi = Phi and Tr_{I^c} Phi = 1/(K d^m) (x) 1 on
/// A_0 A_I for I = {1..m}; other subsets follow by symmetry. Throws SingletonViolation
/// when the bound fails.
CodeSystem purecode_two_party_constraints(const CodeParams& p);
/// Normalisation, V_AB Phi = Phi and Tr_{A0} Tr_{A_{I^c}}[(M (x) 1) Phi] = 0
/// for each Gell-Mann M.
CodeSystem generalcode_constraints(const CodeParams& p);

/// Adds Phi >= 0 (and Phi^{T_B} >= 0 for Level::ppt) as linear inequalities
/// on the block eigenvalues.
void add_positivity(CodeSystem& sys, bool ppt);

/// Eigenvalue of sum_l z_l P{V^l 1^{n-l}} on blocks with i antisymmetric slots.
std::vector<Rational> symmetric_eigen_row(int n, int i);
/// Same for the partial transpose on blocks with i slots orthogonal to phi+.
std::vector<Rational> transposed_eigen_row(int n, long d, int i);

/// N-copy extension (strong form for pure codes, traceless-auxiliary form
/// otherwise) with slot 0 distinguishable.
hierarchy::BlockSdp code_extension(const CodeParams& p, int N, const hierarchy::HierarchyOptions& opts = {});

enum class CodeVerdict { infeasible, feasible };

struct CodeReport {
    CodeParams params;
    Level level = Level::ppt;
    int copies = 0;  // extension level only
    CodeVerdict verdict = CodeVerdict::feasible;
    bool singleton_ok = true;
    std::string reason;
    /// Exact LP point (pos/ppt) when feasible.
    std::vector<Rational> x, y;
    /// Extension margin.
    double margin = 0;
    std::size_t free_parameters = 0;
};

std::string to_string(CodeVerdict v);

/// Singleton pre-check for pure codes, then the requested relaxation.
/// "feasible" only means the relaxation holds.
CodeReport check_code(const CodeParams& p, Level level, int copies = 3,
                      const hierarchy::HierarchyOptions& opts = {});

} // namespace qmarg::codes
