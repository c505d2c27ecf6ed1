#include "qmarg/codes.hpp"

#include "qmarg/error.hpp"
#include "qmarg/exact_matrix.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace qmarg::codes {

namespace {

using cd = std::complex<double>;

std::vector<std::vector<int>> subsets_of(int n, int k, int first) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int j = start; j < n; ++j) {
            cur.push_back(j + first);
            self(self, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// rho on `kept` (slot order preserved) from a state over slots with `dims`
Eigen::MatrixXcd reduced_density(const Eigen::VectorXcd& q, const std::vector<long>& dims, const std::vector<int>& kept) {
    const int slots = static_cast<int>(dims.size());
    std::vector<bool> in(static_cast<std::size_t>(slots), false);
    for (int j : kept) in[static_cast<std::size_t>(j)] = true;
    long dk = 1, dr = 1;
    for (int j = 0; j < slots; ++j) (in[static_cast<std::size_t>(j)] ? dk : dr) *= dims[static_cast<std::size_t>(j)];
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dk, dr);
    std::vector<long> digit(static_cast<std::size_t>(slots));
    for (Eigen::Index idx = 0; idx < q.size(); ++idx) {
        long rest = idx;
        for (int j = slots - 1; j >= 0; --j) {
            digit[static_cast<std::size_t>(j)] = rest % dims[static_cast<std::size_t>(j)];
            rest /= dims[static_cast<std::size_t>(j)];
        }
        long a = 0, b = 0;
        for (int j = 0; j < slots; ++j) {
            auto dj = dims[static_cast<std::size_t>(j)];
            if (in[static_cast<std::size_t>(j)])
                a = a * dj + digit[static_cast<std::size_t>(j)];
            else
                b = b * dj + digit[static_cast<std::size_t>(j)];
        }
        m(a, b) = q(idx);
    }
    return m * m.adjoint();
}

Eigen::Matrix2cd pauli(char c) {
    Eigen::Matrix2cd p;
    switch (c) {
    case 'X': p << 0, 1, 1, 0; break;
    case 'Y': p << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': p << 1, 0, 0, -1; break;
    default: p.setIdentity();
    }
    return p;
}

Eigen::MatrixXcd pauli_string(const std::string& s) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (char c : s) {
        Eigen::Matrix2cd p = pauli(c);
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * p;
        out = std::move(next);
    }
    return out;
}

std::vector<Rational> zeros(std::size_t k) { return std::vector<Rational>(k, Rational(0)); }

CodeSystem blank_system(const CodeParams& p) {
    CodeSystem sys;
    sys.params = p;
    const int n = p.n;
    for (int v = 0; v < 2 * (n + 1); ++v) sys.lp.add_variable(0, std::nullopt);

    // Tr Phi = 1
    auto norm = zeros(sys.lp.variables());
    Rational K2 = Rational(p.K) * p.K;
    for (int i = 0; i <= n; ++i) {
        Rational t = Rational(binom(n, i)) * rpow(p.d, 2L * n - i);
        norm[static_cast<std::size_t>(i)] = K2 * t;
        norm[static_cast<std::size_t>(n + 1 + i)] = Rational(p.K) * t;
    }
    sys.lp.add_row(norm, solve::Sense::eq, 1);
    // V_AB Phi = Phi  <=>  y_i = x_{n-i}
    for (int i = 0; i <= n; ++i) {
        auto row = zeros(sys.lp.variables());
        row[static_cast<std::size_t>(n + 1 + i)] = 1;
        row[static_cast<std::size_t>(n - i)] -= 1;
        sys.lp.add_row(row, solve::Sense::eq, 0);
    }
    sys.equalities = sys.lp.rows.size();
    return sys;
}

std::size_t equality_rank(const solve::LinearProgram& lp) {
    std::size_t eqs = 0;
    for (auto s : lp.sense) eqs += s == solve::Sense::eq;
    RationalMatrix a(eqs, lp.variables());
    std::size_t r = 0;
    for (std::size_t k = 0; k < lp.rows.size(); ++k) {
        if (lp.sense[k] != solve::Sense::eq) continue;
        for (std::size_t j = 0; j < lp.variables(); ++j) a(r, j) = lp.rows[k][j];
        ++r;
    }
    return rank(a);
}

} // namespace

void CodeParams::validate() const {
    if (n < 1) throw InvalidInput("code: n must be at least 1");
    if (K < 1) throw InvalidInput("code: K must be at least 1");
    if (m < 0) throw InvalidInput("code: m must be non-negative");
    if (d < 2) throw InvalidInput("code: d must be at least 2");
    if (m > n) throw InvalidInput("code: m must not exceed n");
}

std::string CodeParams::label() const {
    std::ostringstream os;
    os << "((" << n << "," << K << "," << m + 1 << "))_" << d;
    return os.str();
}

bool singleton_check(const CodeParams& p) {
    p.validate();
    long e = static_cast<long>(p.n) - 2L * p.m;
    if (e < 0) return false;
    return BigInt(p.K) <= ipow(p.d, e);
}

hierarchy::MarginalSpec purecode_marginal_spec(const CodeParams& p, std::size_t entry_cap) {
    p.validate();
    if (!p.pure) throw InvalidInput("purecode_marginal_spec: params are not flagged pure");
    if (!singleton_check(p)) {
        std::ostringstream os;
        os << p.label() << " violates the quantum Singleton bound K <= d^(n-2m): a marginal on K d^m levels "
           << "would need rank above the square root of the total dimension";
        throw SingletonViolation(os.str());
    }
    BigInt side = BigInt(p.K) * ipow(p.d, p.m);
    BigInt entries = binom(p.n, p.m) * side * side;
    if (entries > BigInt(entry_cap)) throw ResourceLimit("purecode_marginal_spec: explicit targets exceed the entry cap");

    hierarchy::MarginalSpec spec;
    spec.n = p.n + 1;
    spec.d = p.d;
    spec.dims.assign(static_cast<std::size_t>(p.n + 1), p.d);
    spec.dims[0] = p.K;
    auto s = side.convert_to<std::size_t>();
    RationalMatrix target = RationalMatrix::identity(s);
    target *= Rational(1) / Rational(side);
    for (auto subset : subsets_of(p.n, p.m, 1)) {
        subset.insert(subset.begin(), 0);
        spec.marginals[subset] = target;
    }
    return spec;
}

std::vector<Eigen::MatrixXcd> gell_mann_basis(long K) {
    if (K < 1) throw InvalidInput("gell_mann_basis: K must be positive");
    std::vector<Eigen::MatrixXcd> out;
    for (long j = 0; j < K; ++j)
        for (long k = j + 1; k < K; ++k) {
            Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(K, K), a = s;
            s(j, k) = s(k, j) = 1;
            a(j, k) = cd(0, -1);
            a(k, j) = cd(0, 1);
            out.push_back(s);
            out.push_back(a);
        }
    for (long l = 1; l < K; ++l) {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(K, K);
        double c = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (long j = 0; j < l; ++j) g(j, j) = c;
        g(l, l) = -c * static_cast<double>(l);
        out.push_back(g);
    }
    return out;
}

VerifyReport verify_code_state(const Eigen::VectorXcd& q, const CodeParams& p, double tol) {
    p.validate();
    BigInt total = BigInt(p.K) * ipow(p.d, p.n);
    if (total > BigInt(verify_dense_cap)) throw ResourceLimit("verify_code_state: K d^n above the dense cap of 4096");
    if (BigInt(q.size()) != total) throw InvalidInput("verify_code_state: state length is not K d^n");
    if (std::abs(q.norm() - 1.0) > 1e-9) throw InvalidInput("verify_code_state: state is not normalised");

    std::vector<long> dims(static_cast<std::size_t>(p.n + 1), p.d);
    dims[0] = p.K;
    VerifyReport rep;
    rep.params = p;
    rep.tolerance = tol;
    double target = 1.0 / (static_cast<double>(p.K) * std::pow(static_cast<double>(p.d), p.m));
    for (const auto& subset : subsets_of(p.n, p.m, 1)) {
        std::vector<int> kept{0};
        kept.insert(kept.end(), subset.begin(), subset.end());
        Eigen::MatrixXcd rho = reduced_density(q, dims, kept);
        Eigen::MatrixXcd expect;
        if (p.pure) {
            expect = target * Eigen::MatrixXcd::Identity(rho.rows(), rho.cols());
        } else {
            // 1_K/K (x) Tr_0 rho
            Eigen::Index side = rho.rows() / p.K;
            Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(side, side);
            for (long k = 0; k < p.K; ++k) sigma += rho.block(k * side, k * side, side, side);
            expect = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
            for (long k = 0; k < p.K; ++k) expect.block(k * side, k * side, side, side) = sigma / static_cast<double>(p.K);
        }
        double dev = (rho - expect).cwiseAbs().maxCoeff();
        rep.subsets.push_back({subset, dev});
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    rep.passed = rep.max_deviation <= tol;
    return rep;
}

Eigen::VectorXcd five_qubit_code_state() {
    const std::string gen = "XZZXI";
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(32, 32);
    for (int s = 0; s < 4; ++s) {
        std::string g = gen.substr(5 - s) + gen.substr(0, 5 - s);
        proj = proj * (Eigen::MatrixXcd::Identity(32, 32) + pauli_string(g)) / 2.0;
    }
    Eigen::VectorXcd zero = proj.col(0);
    zero.normalize();
    Eigen::VectorXcd one = pauli_string("XXXXX") * zero;
    Eigen::VectorXcd q(64);
    q.head(32) = zero;
    q.tail(32) = one;
    return q / std::sqrt(2.0);
}

Eigen::VectorXcd ghz_state(int n, long d) {
    if (n < 1 || d < 2) throw InvalidInput("ghz_state: need n >= 1 and d >= 2");
    BigInt total = ipow(d, n);
    if (total > BigInt(1) << 24) throw ResourceLimit("ghz_state: dimension too large");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(total.convert_to<Eigen::Index>());
    Eigen::Index step = 0;
    for (int j = 0; j < n; ++j) step = step * d + 1;
    for (long k = 0; k < d; ++k) v(k * step) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

std::string to_string(Level l) {
    switch (l) {
    case Level::pos: return "pos";
    case Level::ppt: return "ppt";
    default: return "extension";
    }
}

Level parse_level(const std::string& s) {
    if (s == "pos") return Level::pos;
    if (s == "ppt") return Level::ppt;
    if (s == "extension") return Level::extension;
    throw InvalidInput("unknown relaxation level '" + s + "'");
}

std::string to_string(CodeVerdict v) { return v == CodeVerdict::infeasible ? "infeasible" : "feasible"; }

Rational swap_pairing(int n, long d, int i, int s) {
    Rational g = 0;
    for (int k = 0; k <= std::min(i, s); ++k) {
        if (i - k > n - s) continue;
        g += Rational(binom(s, k) * binom(n - s, i - k)) * rpow(d, 2L * n - (s - k) - (i - k));
    }
    return g;
}

CodeSystem purecode_two_party_constraints(const CodeParams& p) {
    p.validate();
    if (!p.pure) throw InvalidInput("purecode_two_party_constraints: params are not flagged pure");
    if (!singleton_check(p)) throw SingletonViolation(p.label() + " violates the quantum Singleton bound");
    CodeSystem sys = blank_system(p);
    const int n = p.n;
    Rational K = p.K;
    // Tr(Phi V_0^a (x) V^{(x)s}) = 1/(K^a d^s), s slots inside I
    for (int a = 0; a <= 1; ++a)
        for (int s = 0; s <= p.m; ++s) {
            if (a == 0 && s == 0) continue;
            auto row = zeros(sys.lp.variables());
            Rational cx = a == 0 ? Rational(K * K) : K, cy = a == 0 ? K : Rational(K * K);
            for (int i = 0; i <= n; ++i) {
                Rational g = swap_pairing(n, p.d, i, s);
                row[static_cast<std::size_t>(i)] = cx * g;
                row[static_cast<std::size_t>(n + 1 + i)] = cy * g;
            }
            Rational rhs = Rational(1) / rpow(p.d, s);
            if (a == 1) rhs /= K;
            sys.lp.add_row(row, solve::Sense::eq, rhs);
        }
    sys.equalities = sys.lp.rows.size();
    return sys;
}

CodeSystem generalcode_constraints(const CodeParams& p) {
    p.validate();
    CodeSystem sys = blank_system(p);
    const int n = p.n;
    // Tr_{A0}[(M (x) 1) Phi] = Tr(M) 1 (x) X + M (x) Y, and Tr M = 0, so each
    // family asks Tr_{A_{I^c}} Y = 0, tested against V^{(x)s} on I. Every
    // family yields the same rows; they are added once.
    auto basis = gell_mann_basis(p.K);
    for (const auto& M : basis) {
        if (std::abs(M.trace()) > 1e-12 || (M - M.adjoint()).norm() > 1e-12)
            throw InternalError("generalcode_constraints: basis element not traceless Hermitian");
    }
    sys.traceless_families = basis.size();
    if (!basis.empty())
        for (int s = 0; s <= p.m; ++s) {
            auto row = zeros(sys.lp.variables());
            for (int i = 0; i <= n; ++i) row[static_cast<std::size_t>(n + 1 + i)] = swap_pairing(n, p.d, i, s);
            sys.lp.add_row(row, solve::Sense::eq, 0);
        }
    sys.equalities = sys.lp.rows.size();
    return sys;
}

std::vector<Rational> symmetric_eigen_row(int n, int i) {
    std::vector<Rational> row(static_cast<std::size_t>(n + 1));
    for (int l = 0; l <= n; ++l) {
        BigInt c = 0;
        for (int k = 0; k <= std::min(i, l); ++k) {
            if (l - k > n - i) continue;
            BigInt t = binom(i, k) * binom(n - i, l - k);
            c += k % 2 ? BigInt(-t) : t;
        }
        row[static_cast<std::size_t>(l)] = Rational(c);
    }
    return row;
}

std::vector<Rational> transposed_eigen_row(int n, long d, int i) {
    std::vector<Rational> row(static_cast<std::size_t>(n + 1), Rational(0));
    for (int l = 0; l <= n - i; ++l) row[static_cast<std::size_t>(l)] = Rational(binom(n - i, l)) * rpow(d, l);
    return row;
}

void add_positivity(CodeSystem& sys, bool ppt) {
    const auto& p = sys.params;
    const int n = p.n;
    auto put = [&](const std::vector<Rational>& ev, Rational cx, Rational cy) {
        auto row = zeros(sys.lp.variables());
        for (int l = 0; l <= n; ++l) {
            row[static_cast<std::size_t>(l)] = cx * ev[static_cast<std::size_t>(l)];
            row[static_cast<std::size_t>(n + 1 + l)] = cy * ev[static_cast<std::size_t>(l)];
        }
        sys.lp.add_row(row, solve::Sense::ge, 0);
    };
    // V_0 = +1 on the symmetric part of the auxiliary pair, -1 on the rest
    for (int i = 0; i <= n; ++i) {
        auto ev = symmetric_eigen_row(n, i);
        put(ev, 1, 1);
        if (p.K >= 2) put(ev, 1, -1);
    }
    if (!ppt) return;
    // V_0^{T_B} = K |phi+><phi+|
    for (int i = 0; i <= n; ++i) {
        auto ev = transposed_eigen_row(n, p.d, i);
        put(ev, 1, p.K);
        if (p.K >= 2) put(ev, 1, 0);
    }
}

hierarchy::BlockSdp code_extension(const CodeParams& p, int N, const hierarchy::HierarchyOptions& opts) {
    p.validate();
    std::vector<long> dims(static_cast<std::size_t>(p.n + 1), p.d);
    dims[0] = p.K;
    hierarchy::Factorization f;
    for (int j = 0; j <= p.m; ++j) f.kept.push_back(j);
    if (p.pure)
        f.mixed = f.kept;
    else
        f.mixed = {0};
    return hierarchy::assemble_factorized(dims, 1, N, {f}, opts);
}

CodeReport check_code(const CodeParams& p, Level level, int copies, const hierarchy::HierarchyOptions& opts) {
    p.validate();
    CodeReport rep;
    rep.params = p;
    rep.level = level;
    if (p.pure && !singleton_check(p)) {
        rep.singleton_ok = false;
        rep.verdict = CodeVerdict::infeasible;
        rep.reason = "quantum Singleton bound K <= d^(n-2m) violated";
        return rep;
    }
    if (level == Level::extension) {
        rep.copies = copies;
        auto sdp = code_extension(p, copies, opts);
        auto res = hierarchy::solve_level(sdp);
        rep.margin = res.margin;
        rep.free_parameters = res.free_parameters;
        rep.verdict = res.status == hierarchy::LevelStatus::feasible ? CodeVerdict::feasible : CodeVerdict::infeasible;
        rep.reason = rep.verdict == CodeVerdict::feasible ? "extension level satisfied"
                                                          : "no PSD extension at this level";
        return rep;
    }
    CodeSystem sys = p.pure ? purecode_two_party_constraints(p) : generalcode_constraints(p);
    rep.free_parameters = sys.lp.variables() - equality_rank(sys.lp);
    add_positivity(sys, level == Level::ppt);
    auto res = solve::lp_solve_exact(sys.lp);
    if (res.status == solve::LpStatus::infeasible) {
        rep.verdict = CodeVerdict::infeasible;
        rep.reason = level == Level::ppt ? "no positive, PPT two-copy operator" : "no positive two-copy operator";
        return rep;
    }
    if (res.status != solve::LpStatus::optimal) throw InternalError("check_code: feasibility LP unbounded");
    rep.verdict = CodeVerdict::feasible;
    rep.reason = "relaxation satisfied";
    const auto n1 = static_cast<std::size_t>(p.n + 1);
    rep.x.assign(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(n1));
    rep.y.assign(res.point.begin() + static_cast<std::ptrdiff_t>(n1), res.point.end());
    return rep;
}

} // namespace qmarg::codes
