#include <doctest.h>

#include "qmarg/ame.hpp"
#include "qmarg/codes.hpp"
#include "qmarg/error.hpp"
#include "qmarg/permalg.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace qmarg;
using namespace qmarg::codes;
using cd = std::complex<double>;

namespace {

CodeParams P(int n, long K, int m, long d, bool pure = true) { return CodeParams{n, K, m, d, pure}; }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd swap(long d) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b) v(b * d + a, a * d + b) = 1;
    return v;
}

// partial transpose of the second factor in each (A_j, B_j) pair; factors are
// ordered A_0 B_0 A_1 B_1 ...
Eigen::MatrixXcd transpose_b(const Eigen::MatrixXcd& m, const std::vector<long>& pair_dims) {
    std::vector<long> dims;
    for (long d : pair_dims) {
        dims.push_back(d);
        dims.push_back(d);
    }
    auto split = [&](Eigen::Index idx) {
        std::vector<long> dg(dims.size());
        for (std::size_t j = dims.size(); j-- > 0;) {
            dg[j] = idx % dims[j];
            idx /= dims[j];
        }
        return dg;
    };
    auto join = [&](const std::vector<long>& dg) {
        Eigen::Index idx = 0;
        for (std::size_t j = 0; j < dims.size(); ++j) idx = idx * dims[j] + dg[j];
        return idx;
    };
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            auto a = split(r), b = split(c);
            for (std::size_t j = 1; j < dims.size(); j += 2) std::swap(a[j], b[j]);
            out(join(a), join(b)) = m(r, c);
        }
    return out;
}

// dense 1_{K^2} (x) X + V_0 (x) Y with X = sum x_l P{V^l 1^{n-l}}, pairs ordered (A_j B_j)
Eigen::MatrixXcd dense_code_operator(int n, long K, long d, const std::vector<double>& x, const std::vector<double>& y) {
    long side = 1;
    for (int j = 0; j < n; ++j) side *= d * d;
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(side, side), Y = X;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(1, 1);
        int l = 0;
        for (int j = 0; j < n; ++j) {
            bool v = (mask >> j) & 1;
            l += v;
            t = kron(t, v ? swap(d) : Eigen::MatrixXcd::Identity(d * d, d * d));
        }
        X += x[static_cast<std::size_t>(l)] * t;
        Y += y[static_cast<std::size_t>(l)] * t;
    }
    return kron(Eigen::MatrixXcd::Identity(K * K, K * K), X) + kron(swap(K), Y);
}

double min_eigen(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double row_min(const CodeSystem& sys, std::size_t first, const std::vector<double>& xy) {
    double best = 1e300;
    for (std::size_t k = first; k < sys.lp.rows.size(); ++k) {
        double v = 0;
        for (std::size_t j = 0; j < xy.size(); ++j) v += to_double(sys.lp.rows[k][j]) * xy[j];
        best = std::min(best, v);
    }
    return best;
}

Eigen::MatrixXcd reduced(const Eigen::VectorXcd& q, const std::vector<long>& dims, const std::vector<int>& kept) {
    // independent of the library: build rho then trace factor by factor
    Eigen::MatrixXcd rho = q * q.adjoint();
    std::vector<long> cur = dims;
    std::vector<int> alive(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) alive[j] = static_cast<int>(j);
    for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
        if (std::find(kept.begin(), kept.end(), j) != kept.end()) continue;
        auto pos = static_cast<std::size_t>(std::find(alive.begin(), alive.end(), j) - alive.begin());
        long before = 1, after = 1, dj = cur[pos];
        for (std::size_t k = 0; k < pos; ++k) before *= cur[k];
        for (std::size_t k = pos + 1; k < cur.size(); ++k) after *= cur[k];
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(before * after, before * after);
        for (long a = 0; a < before; ++a)
            for (long b = 0; b < after; ++b)
                for (long a2 = 0; a2 < before; ++a2)
                    for (long b2 = 0; b2 < after; ++b2)
                        for (long t = 0; t < dj; ++t)
                            next(a * after + b, a2 * after + b2) +=
                                rho((a * dj + t) * after + b, (a2 * dj + t) * after + b2);
        rho = std::move(next);
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(pos));
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return rho;
}

} // namespace

TEST_CASE("singleton bound") {
    CHECK(!singleton_check(P(4, 2, 2, 2)));
    CHECK(singleton_check(P(5, 2, 2, 2)));
    for (int n = 2; n <= 9; ++n)
        for (int m = 0; 2 * m <= n; ++m) CHECK(singleton_check(P(n, 1, m, 3)));
    CHECK(!singleton_check(P(3, 1, 2, 2)));  // negative exponent
    CHECK(singleton_check(P(40, 1L << 20, 10, 2)));
    CHECK(!singleton_check(P(40, (1L << 20) + 1, 10, 2)));
    CHECK_THROWS_AS(singleton_check(P(2, 0, 1, 2)), InvalidInput);
    CHECK_THROWS_AS(singleton_check(P(2, 1, 3, 2)), InvalidInput);
    CHECK_THROWS_AS(purecode_marginal_spec(P(4, 2, 2, 2)), SingletonViolation);
    CHECK_THROWS_AS(purecode_two_party_constraints(P(4, 2, 2, 2)), SingletonViolation);
    auto r = check_code(P(4, 2, 2, 2), Level::ppt);
    CHECK(r.verdict == CodeVerdict::infeasible);
    CHECK(!r.singleton_ok);
}

TEST_CASE("pure code marginal spec") {
    auto spec = purecode_marginal_spec(P(5, 2, 2, 2));
    CHECK(spec.n == 6);
    CHECK(spec.dims == std::vector<long>{2, 2, 2, 2, 2, 2});
    CHECK(spec.marginals.size() == 10);
    for (const auto& [subset, rho] : spec.marginals) {
        CHECK(subset.size() == 3);
        CHECK(subset[0] == 0);
        CHECK(rho.rows() == 8);
        CHECK(rho(0, 0) == Rational(1) / 8);
        CHECK(rho(0, 1) == 0);
    }
    CHECK_NOTHROW(spec.validate());

    auto m0 = purecode_marginal_spec(P(3, 3, 0, 2));
    REQUIRE(m0.marginals.size() == 1);
    CHECK(m0.marginals.begin()->first == std::vector<int>{0});
    CHECK(m0.marginals.begin()->second.rows() == 3);
    CHECK_NOTHROW(m0.validate());

    // K = 1: the m-uniform spec shifted by one trivial slot
    auto k1 = purecode_marginal_spec(P(4, 1, 2, 3));
    CHECK(k1.marginals.size() == 6);
    CHECK(k1.marginals.begin()->second(0, 0) == Rational(1) / 9);
    CHECK_THROWS_AS(purecode_marginal_spec(P(5, 2, 2, 2, false)), InvalidInput);
    CHECK_THROWS_AS(purecode_marginal_spec(P(6, 1, 3, 4), 100), ResourceLimit);
}

TEST_CASE("gell-mann basis") {
    for (long K = 1; K <= 5; ++K) {
        auto b = gell_mann_basis(K);
        CHECK(b.size() == static_cast<std::size_t>(K * K - 1));
        Eigen::MatrixXcd gram(b.size(), b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(std::abs(b[i].trace()) < 1e-14);
            CHECK((b[i] - b[i].adjoint()).norm() < 1e-14);
            for (std::size_t j = 0; j < b.size(); ++j)
                gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (b[i] * b[j]).trace();
        }
        if (!b.empty()) {
            CHECK((gram - 2.0 * Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).norm() < 1e-12);
        }
    }
}

TEST_CASE("verify code states") {
    auto q = five_qubit_code_state();
    REQUIRE(q.size() == 64);
    CHECK(std::abs(q.norm() - 1) < 1e-14);
    // stabiliser check via an independent partial trace
    std::vector<long> dims(6, 2);
    for (int a = 1; a <= 5; ++a)
        for (int b = a + 1; b <= 5; ++b) {
            auto rho = reduced(q, dims, {0, a, b});
            CHECK((rho - Eigen::MatrixXcd::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-12);
        }
    auto rep = verify_code_state(q, P(5, 2, 2, 2));
    CHECK(rep.max_deviation <= 1e-12);
    CHECK(rep.passed);
    CHECK(rep.subsets.size() == 10);
    // the logical states are not 3-uniform
    CHECK(!verify_code_state(q, P(5, 2, 3, 2)).passed);

    for (long d : {2L, 3L}) {
        Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(d * d);
        prod(0) = 1;
        auto r = verify_code_state(prod, P(2, 1, 1, d));
        CHECK(r.max_deviation == doctest::Approx(double(d - 1) / double(d)).epsilon(1e-14));
        CHECK(!r.passed);
    }
    CHECK(verify_code_state(ghz_state(3, 2), P(3, 1, 1, 2)).passed);
    CHECK(!verify_code_state(ghz_state(3, 2), P(3, 1, 2, 2)).passed);
    CHECK(verify_code_state(ghz_state(4, 3), P(4, 1, 1, 3)).passed);

    // K = 2 inside the [[4,2,2]] code plus a fifth qubit fixed to |0>: the
    // marginal on that qubit is pure, so only the general form holds
    Eigen::VectorXcd imp = Eigen::VectorXcd::Zero(64);
    auto at = [](int k, int bits, int last) { return k * 32 + bits * 2 + last; };
    imp(at(0, 0b0000, 0)) = imp(at(0, 0b1111, 0)) = 0.5;
    imp(at(1, 0b0011, 0)) = imp(at(1, 0b1100, 0)) = 0.5;
    CHECK(!verify_code_state(imp, P(5, 2, 1, 2, true)).passed);
    CHECK(verify_code_state(imp, P(5, 2, 1, 2, false)).passed);
    CHECK(verify_code_state(imp, P(5, 2, 1, 2, false)).max_deviation < 1e-15);

    CHECK_THROWS_AS(verify_code_state(q, P(5, 2, 2, 3)), InvalidInput);
    CHECK_THROWS_AS(verify_code_state(q * 2.0, P(5, 2, 2, 2)), InvalidInput);
    CHECK_THROWS_AS(verify_code_state(Eigen::VectorXcd::Zero(8192), P(12, 2, 1, 2)), ResourceLimit);
}

TEST_CASE("swap pairing agrees with the permutation algebra") {
    for (int n = 1; n <= 4; ++n)
        for (long d : {2L, 3L})
            for (int i = 0; i <= n; ++i)
                for (int s = 0; s <= n; ++s) {
                    permalg::PermOperator t(permalg::Shape{2, n, d});
                    std::vector<symgroup::Permutation> key;
                    for (int j = 0; j < n; ++j)
                        key.push_back(j < s ? symgroup::Permutation({1, 0}) : symgroup::Permutation::identity(2));
                    t.add(key, 1);
                    auto xi = permalg::x_basis(i, n, d);
                    CHECK(permalg::pairing(permalg::expand(xi), t) == swap_pairing(n, d, i, s));
                }
}

TEST_CASE("positivity rows reproduce the dense spectrum") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto [n, K, d] : std::vector<std::tuple<int, long, long>>{{1, 3, 2}, {2, 2, 2}, {2, 1, 3}, {3, 2, 2}, {2, 2, 3}}) {
        CAPTURE(n);
        CAPTURE(K);
        CAPTURE(d);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(n + 1)), y(x.size());
            for (auto& v : x) v = u(rng);
            for (auto& v : y) v = u(rng);
            auto phi = dense_code_operator(n, K, d, x, y);
            std::vector<double> xy = x;
            xy.insert(xy.end(), y.begin(), y.end());

            CodeSystem pos;
            pos.params = P(n, K, 0, d);
            for (int v = 0; v < 2 * (n + 1); ++v) pos.lp.add_variable(0, std::nullopt);
            add_positivity(pos, false);
            CHECK(row_min(pos, 0, xy) == doctest::Approx(min_eigen(phi)).epsilon(1e-9));

            CodeSystem ppt;
            ppt.params = pos.params;
            for (int v = 0; v < 2 * (n + 1); ++v) ppt.lp.add_variable(0, std::nullopt);
            add_positivity(ppt, true);
            std::size_t first = pos.lp.rows.size();
            // the PPT rows are appended after the plain ones
            std::vector<long> pairs{K};
            for (int j = 0; j < n; ++j) pairs.push_back(d);
            double pt = min_eigen(transpose_b(phi, pairs));
            CHECK(row_min(ppt, first, xy) == doctest::Approx(pt).epsilon(1e-9));
        }
    }
}

TEST_CASE("K = 1 codes coincide with AME") {
    for (int n = 2; n <= 7; ++n)
        for (long d = 2; d <= 4; ++d) {
            CAPTURE(n);
            CAPTURE(d);
            auto p = P(n, 1, n / 2, d);
            auto sys = purecode_two_party_constraints(p);
            auto sol = solve::lp_solve_exact(sys.lp);
            REQUIRE(sol.status == solve::LpStatus::optimal);
            auto cand = ame::candidate_x(n, d);
            for (int i = 0; i <= n; ++i)
                CHECK(sol.point[static_cast<std::size_t>(i)] + sol.point[static_cast<std::size_t>(n + 1 + i)] ==
                      cand[static_cast<std::size_t>(i)]);
            auto code = check_code(p, Level::ppt);
            auto ame_rep = ame::check_existence(n, d);
            CHECK((code.verdict == CodeVerdict::infeasible) == (ame_rep.verdict == ame::Verdict::infeasible));
        }
}

TEST_CASE("five-qubit code: the two-copy operator of the state satisfies every row") {
    auto q = five_qubit_code_state();
    const int n = 5;
    const long K = 2, d = 2;
    std::vector<long> dims(6, 2);
    // averaged purities Tr(rho_{aL}^2) determine (x, y) through the pairings
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(12, 12);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(12);
    for (int a = 0; a <= 1; ++a)
        for (int l = 0; l <= n; ++l) {
            int r = a * 6 + l;
            double avg = 0, count = 0;
            for (int mask = 0; mask < 32; ++mask) {
                if (__builtin_popcount(static_cast<unsigned>(mask)) != l) continue;
                std::vector<int> kept;
                if (a) kept.push_back(0);
                for (int j = 0; j < 5; ++j)
                    if ((mask >> j) & 1) kept.push_back(j + 1);
                Eigen::MatrixXcd rho = reduced(q, dims, kept);
                avg += (rho * rho).trace().real();
                ++count;
            }
            rhs(r) = avg / count;
            for (int i = 0; i <= n; ++i) {
                double g = to_double(swap_pairing(n, d, i, l));
                gram(r, i) = (a ? double(K) : double(K * K)) * g;
                gram(r, 6 + i) = (a ? double(K * K) : double(K)) * g;
            }
        }
    Eigen::VectorXd xy = gram.fullPivLu().solve(rhs);
    REQUIRE((gram * xy - rhs).norm() < 1e-10);
    std::vector<double> v(xy.data(), xy.data() + xy.size());

    auto sys = purecode_two_party_constraints(P(5, 2, 2, 2));
    add_positivity(sys, true);
    for (std::size_t k = 0; k < sys.lp.rows.size(); ++k) {
        double lhs = 0;
        for (std::size_t j = 0; j < v.size(); ++j) lhs += to_double(sys.lp.rows[k][j]) * v[j];
        double b = to_double(sys.lp.rhs[k]);
        if (sys.lp.sense[k] == solve::Sense::eq)
            CHECK(lhs == doctest::Approx(b).epsilon(1e-9).scale(1));
        else
            CHECK(lhs >= b - 1e-9);
    }
    auto gen = generalcode_constraints(P(5, 2, 2, 2, false));
    for (std::size_t k = 0; k < gen.lp.rows.size(); ++k) {
        double lhs = 0;
        for (std::size_t j = 0; j < v.size(); ++j) lhs += to_double(gen.lp.rows[k][j]) * v[j];
        CHECK(lhs == doctest::Approx(to_double(gen.lp.rhs[k])).epsilon(1e-9).scale(1));
    }
}

TEST_CASE("code relaxations") {
    auto r = check_code(P(5, 2, 2, 2), Level::ppt);
    CHECK(r.verdict == CodeVerdict::feasible);
    CHECK(r.singleton_ok);
    CHECK(r.x.size() == 6);
    CHECK(check_code(P(5, 2, 2, 2, false), Level::ppt).verdict == CodeVerdict::feasible);
    CHECK(check_code(P(5, 2, 2, 2), Level::pos).verdict == CodeVerdict::feasible);

    // the exact point satisfies V_AB Phi = Phi
    for (int i = 0; i <= 5; ++i) CHECK(r.y[static_cast<std::size_t>(i)] == r.x[static_cast<std::size_t>(5 - i)]);

    // not unique once K >= 2
    bool loose = false;
    for (auto p : {P(5, 2, 2, 2), P(5, 2, 1, 2), P(4, 2, 1, 2), P(5, 2, 2, 2, false)}) {
        auto c = check_code(p, Level::pos);
        loose = loose || c.free_parameters > 0;
    }
    CHECK(loose);

    auto gen = generalcode_constraints(P(3, 3, 1, 2, false));
    CHECK(gen.traceless_families == 8);
    CHECK(generalcode_constraints(P(3, 1, 1, 2, false)).traceless_families == 0);
    CHECK(parse_level("extension") == Level::extension);
    CHECK_THROWS_AS(parse_level("sdp"), InvalidInput);
}

TEST_CASE("code extension level") {
    auto sdp = code_extension(P(3, 2, 1, 2), 2);
    CHECK(sdp.dims == std::vector<long>{2, 2, 2, 2});
    CHECK(sdp.fixed_slots == 1);
    // ((5,2,3))_2 exists, so every level must be feasible
    auto r = check_code(P(5, 2, 2, 2), Level::extension, 2);
    CHECK(r.verdict == CodeVerdict::feasible);
    CHECK(r.margin >= -1e-7);
}
