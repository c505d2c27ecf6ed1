#pragma once

// Closed-form analysis of the symmetrised two-copy candidate for AME(n,d):
//   Phi = sum_i x_i X_i,  X_i = P{V^{(x)i} (x) 1^{(x)(n-i)}},
// its spectrum p_i on P{P_+^{(x)(n-i)} (x) P_-^{(x)i}} and the spectrum q_i of
// its partial transpose on P{P_phi^{(x)(n-i)} (x) P_perp^{(x)i}}.

#include "qmarg/exact_matrix.hpp"
#include "qmarg/permalg.hpp"
#include "qmarg/rational.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qmarg::ame {

struct AmeCandidate {
    int n = 0;
    long d = 0;
    int r = 0;  // floor(n/2)
    std::vector<Rational> x, p, q;
};

/// Closed form. Throws InvalidInput unless n >= 2 and d >= 2.
std::vector<Rational> candidate_x(int n, long d);

/// Solves normalisation, palindrome and marginal equations directly.
/// Throws InternalError if the system is singular.
std::vector<Rational> candidate_x_oracle(int n, long d);

std::vector<Rational> eigenvalues_p(int n, long d);
std::vector<Rational> eigenvalues_q(int n, long d);

AmeCandidate make_candidate(int n, long d);

/// Phi as a symmetrised permutation operator.
permalg::SymmetrizedOperator candidate_operator(int n, long d);

/// Multiplicity of p_i: binom(n,i) (d(d+1)/2)^{n-i} (d(d-1)/2)^i.
BigInt p_multiplicity(int n, long d, int i);
/// Multiplicity of q_i: binom(n,i) (d^2-1)^i.
BigInt q_multiplicity(int n, long d, int i);

enum class Verdict { infeasible, inconclusive };

struct Condition {
    enum Kind { positivity, ppt } kind = positivity;
    int index = 0;

    std::string to_string() const;
};

struct FeasibilityReport {
    int n = 0;
    long d = 0;
    Verdict verdict = Verdict::inconclusive;
    std::optional<Condition> violated;
    /// Most negative p_i / q_i when infeasible, else the smallest of them.
    Rational witness_value;
};

std::string to_string(Verdict v);

/// Exact test of p_i >= 0 and q_i >= 0.
FeasibilityReport check_existence(int n, long d);

struct Range {
    long lo = 0, hi = -1;  // inclusive; empty when lo > hi
};

/// One report per (n,d), n-major. Workers share nothing but the output slots.
std::vector<FeasibilityReport> scan(Range n_range, Range d_range, unsigned jobs = 1,
                                    const std::function<void(std::size_t, std::size_t)>& progress = {});

inline constexpr std::size_t dense_candidate_cap = 4096;

/// Explicit matrix of Phi, factors ordered (A_1 B_1)(A_2 B_2)...
/// Throws ResourceLimit when (d^2)^n exceeds the cap.
Eigen::MatrixXd dense_candidate(int n, long d);

/// Exact variant, limited by permalg::dense_side_cap.
RationalMatrix dense_candidate_exact(int n, long d);

} // namespace qmarg::ame
