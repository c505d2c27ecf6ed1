#pragma once

// Optimisation back ends: exact simplex, exact PSD test, a small dense
// primal-dual interior point SDP solver and SDPA sparse-format I/O.

#include "qmarg/exact_matrix.hpp"
#include "qmarg/rational.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace qmarg::solve {

// ---------------------------------------------------------------------------
// Exact LP

enum class Sense { le, eq, ge };

/// minimize objective . x  s.t.  rows[k] . x (sense) rhs[k],  lower <= x <= upper.
/// Missing bounds mean unbounded in that direction; the default lower bound
/// is 0 (set it to nullopt for a free variable).
struct LinearProgram {
    std::vector<Rational> objective;
    std::vector<std::vector<Rational>> rows;
    std::vector<Sense> sense;
    std::vector<Rational> rhs;
    std::vector<std::optional<Rational>> lower, upper;

    std::size_t variables() const { return objective.size(); }
    /// Appends a variable with default bounds [0, inf).
    std::size_t add_variable(const Rational& cost, std::optional<Rational> lo = Rational(0),
                             std::optional<Rational> hi = std::nullopt);
    void add_row(std::vector<Rational> coefficients, Sense s, const Rational& b);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rational value;
    std::vector<Rational> point;
    std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule. Throws InvalidInput on
/// inconsistent dimensions.
LpResult lp_solve_exact(const LinearProgram& lp);

std::string to_string(LpStatus s);

// ---------------------------------------------------------------------------
// Exact PSD test

struct PsdResult {
    bool psd = true;
    /// v with v^T M v < 0 when not PSD.
    std::vector<Rational> witness;
};

/// Symmetric pivoted elimination over the rationals. Throws InvalidInput on
/// a non-symmetric matrix.
PsdResult psd_check_exact(const RationalMatrix& m);

// ---------------------------------------------------------------------------
// SDP in SDPA form:
//   minimize c^T x  s.t.  X = sum_i x_i F_i - F_0 is PSD
// with dual  maximize <F_0, Y>  s.t.  <F_i, Y> = c_i,  Y PSD.

struct SymEntry {
    int i = 0, j = 0;  // i <= j, zero based
    double value = 0;
};

struct BlockSpec {
    int size = 0;
    bool diagonal = false;  // an LP block; only entries with i == j allowed
};

struct SdpProblem {
    std::vector<double> c;
    std::vector<BlockSpec> blocks;
    /// f[k][b]: entries of F_k in block b, k = 0..m.
    std::vector<std::vector<std::vector<SymEntry>>> f;

    int constraints() const { return static_cast<int>(c.size()); }
    /// Resets the problem to m variables over the given blocks.
    void reset(int m, std::vector<BlockSpec> block_specs);
    /// Adds value at (i, j) of block b in F_k (merged with existing entries
    /// on export); i and j are ordered automatically.
    void add(int k, int b, int i, int j, double value);
    /// Dense copy of F_k in block b.
    Eigen::MatrixXd dense(int k, int b) const;
    /// Throws InvalidInput if indices fall outside the declared blocks.
    void validate() const;
};

enum class SdpStatus { optimal, primal_infeasible, dual_infeasible, max_iter };

struct SdpOptions {
    double tol = 1e-8;
    int max_iter = 200;
    std::size_t block_cap = 512;
    bool verbose = false;
};

struct SdpResult {
    SdpStatus status = SdpStatus::max_iter;
    double primal_objective = 0;  // c^T x
    double dual_objective = 0;    // <F_0, Y>
    std::vector<double> x;
    std::vector<Eigen::MatrixXd> slack;  // X
    std::vector<Eigen::MatrixXd> dual;   // Y
    int iterations = 0;
    double primal_infeasibility = 0, dual_infeasibility = 0, gap = 0;
    std::string diagnostics;
};

/// Primal-dual path following (HKM direction, Mehrotra predictor-corrector).
/// Throws ResourceLimit if a block exceeds the cap.
SdpResult sdp_solve(const SdpProblem& sdp, const SdpOptions& opts = {});

std::string to_string(SdpStatus s);

// ---------------------------------------------------------------------------
// SDPA sparse format

std::string write_sdpa(const SdpProblem& sdp);
void export_sdpa(const SdpProblem& sdp, const std::string& path);
/// Throws InvalidInput on malformed text.
SdpProblem parse_sdpa(const std::string& text);
SdpProblem read_sdpa(const std::string& path);

struct SdpaSolution {
    std::optional<double> primal_objective, dual_objective;
    std::vector<double> x;
};

/// Reads "objValPrimal", "objValDual" and "xVec" from an SDPA result file.
SdpaSolution parse_sdpa_solution(const std::string& text);

} // namespace qmarg::solve
