#include "qmarg/ame.hpp"

#include "qmarg/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace qmarg::ame {

namespace {

void check_nd(int n, long d) {
    if (n < 2) throw InvalidInput("AME analysis needs n >= 2");
    if (d < 2) throw InvalidInput("AME analysis needs d >= 2");
}

Rational inv_min_pow(long d, long a, long b) { return Rational(1) / Rational(ipow(d, std::min(a, b))); }

} // namespace

std::vector<Rational> candidate_x(int n, long d) {
    check_nd(n, d);
    std::vector<Rational> x(static_cast<std::size_t>(n + 1));
    Rational pref = Rational(1) / rpow(d * d - 1, n);
    for (int i = 0; i <= n; ++i) {
        Rational sum = 0;
        for (int l = 0; l <= n; ++l)
            for (int k = 0; k <= l; ++k) {
                BigInt c = binom(i, k) * binom(n - i, l - k);
                if (c == 0) continue;
                Rational term = Rational(c) * inv_min_pow(d, i + 2 * l - 2 * k, n + i - 2 * k);
                sum += (l % 2 ? -term : term);
            }
        x[static_cast<std::size_t>(i)] = (i % 2 ? -pref : pref) * sum;
    }
    return x;
}

std::vector<Rational> candidate_x_oracle(int n, long d) {
    check_nd(n, d);
    int r = n / 2;
    auto un = static_cast<std::size_t>(n + 1);
    RationalMatrix a(un, un);
    std::vector<Rational> b(un, Rational(0));
    std::size_t row = 0;
    for (int i = 0; i <= n; ++i) a(row, static_cast<std::size_t>(i)) = Rational(binom(n, i) * ipow(d, 2 * n - i));
    b[row++] = 1;
    for (int i = 0; i <= n - r - 1; ++i) {
        a(row, static_cast<std::size_t>(i)) += 1;
        a(row, static_cast<std::size_t>(n - i)) -= 1;
        ++row;
    }
    for (int s = 1; s <= r; ++s) {
        for (int i = 0; i <= n - r; ++i)
            a(row, static_cast<std::size_t>(s + i)) += Rational(binom(n - r, i) * ipow(d, n - r - i));
        ++row;
    }
    if (row != un) throw InternalError("candidate_x_oracle: equation count differs from n+1");
    auto sol = solve_unique(a, b);
    if (!sol) throw InternalError("candidate_x_oracle: linear system is singular");
    return *sol;
}

std::vector<Rational> eigenvalues_p(int n, long d) {
    check_nd(n, d);
    std::vector<Rational> p(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        Rational sum = 0;
        for (int l = 0; l <= n; ++l)
            for (int k = 0; k <= l; ++k) {
                BigInt c = binom(i, k) * binom(n - i, l - k);
                if (c == 0) continue;
                Rational term = Rational(c) * inv_min_pow(d, l, n - l);
                sum += (k % 2 ? -term : term);
            }
        Rational norm = Rational(ipow(d, n) * ipow(d + 1, n - i) * ipow(d - 1, i));
        p[static_cast<std::size_t>(i)] = sum / norm;
    }
    return p;
}

std::vector<Rational> eigenvalues_q(int n, long d) {
    check_nd(n, d);
    std::vector<Rational> q(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        Rational sum = 0;
        for (int k = 0; k <= i; ++k) {
            Rational term = Rational(binom(i, k)) * inv_min_pow(d, 2 * (n + k - i), n);
            sum += (k % 2 ? -term : term);
        }
        q[static_cast<std::size_t>(i)] = sum / Rational(ipow(d * d - 1, i));
    }
    return q;
}

AmeCandidate make_candidate(int n, long d) {
    return AmeCandidate{n, d, n / 2, candidate_x(n, d), eigenvalues_p(n, d), eigenvalues_q(n, d)};
}

permalg::SymmetrizedOperator candidate_operator(int n, long d) {
    auto x = candidate_x(n, d);
    permalg::SymmetrizedOperator phi(permalg::Shape{2, n, d});
    for (int i = 0; i <= n; ++i) {
        auto xi = permalg::x_basis(i, n, d);
        xi *= x[static_cast<std::size_t>(i)];
        phi += xi;
    }
    return phi;
}

BigInt p_multiplicity(int n, long d, int i) {
    return binom(n, i) * ipow(d * (d + 1) / 2, n - i) * ipow(d * (d - 1) / 2, i);
}

BigInt q_multiplicity(int n, long d, int i) { return binom(n, i) * ipow(d * d - 1, i); }

std::string Condition::to_string() const {
    return std::string(kind == positivity ? "positivity" : "ppt") + "(" + std::to_string(index) + ")";
}

std::string to_string(Verdict v) { return v == Verdict::infeasible ? "infeasible" : "inconclusive"; }

FeasibilityReport check_existence(int n, long d) {
    auto p = eigenvalues_p(n, d);
    auto q = eigenvalues_q(n, d);
    FeasibilityReport rep;
    rep.n = n;
    rep.d = d;
    Condition best{Condition::positivity, 0};
    Rational best_value = p[0];
    auto consider = [&](const std::vector<Rational>& v, Condition::Kind kind) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] < best_value) {
                best_value = v[i];
                best = Condition{kind, static_cast<int>(i)};
            }
    };
    consider(p, Condition::positivity);
    consider(q, Condition::ppt);
    rep.witness_value = best_value;
    if (best_value < 0) {
        rep.verdict = Verdict::infeasible;
        rep.violated = best;
    }
    return rep;
}

std::vector<FeasibilityReport> scan(Range n_range, Range d_range, unsigned jobs,
                                    const std::function<void(std::size_t, std::size_t)>& progress) {
    std::vector<std::pair<int, long>> work;
    for (long n = n_range.lo; n <= n_range.hi; ++n)
        for (long d = d_range.lo; d <= d_range.hi; ++d) work.emplace_back(static_cast<int>(n), d);
    for (const auto& [n, d] : work) check_nd(n, d);
    std::vector<FeasibilityReport> out(work.size());
    std::atomic<std::size_t> next{0}, done{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            out[i] = check_existence(work[i].first, work[i].second);
            std::size_t finished = ++done;
            if (progress) progress(finished, work.size());
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, work.size()))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

Eigen::MatrixXd dense_candidate(int n, long d) {
    check_nd(n, d);
    std::size_t side = 1;
    for (int j = 0; j < n; ++j) {
        side *= static_cast<std::size_t>(d * d);
        if (side > dense_candidate_cap) throw ResourceLimit("dense_candidate: (d^2)^n exceeds the dense cap");
    }
    auto x = candidate_x(n, d);
    auto ud = static_cast<std::size_t>(d);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
    std::vector<std::size_t> dig(static_cast<std::size_t>(2 * n));
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double c = to_double(x[static_cast<std::size_t>(__builtin_popcount(mask))]);
        for (std::size_t col = 0; col < side; ++col) {
            std::size_t rem = col;
            for (std::size_t f = dig.size(); f-- > 0;) {
                dig[f] = rem % ud;
                rem /= ud;
            }
            for (int j = 0; j < n; ++j)
                if (mask >> j & 1u) std::swap(dig[static_cast<std::size_t>(2 * j)], dig[static_cast<std::size_t>(2 * j + 1)]);
            std::size_t row = 0;
            for (auto v : dig) row = row * ud + v;
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += c;
        }
    }
    return m;
}

RationalMatrix dense_candidate_exact(int n, long d) { return permalg::dense_matrix(candidate_operator(n, d)); }

} // namespace qmarg::ame
