// One PASS/FAIL line per acceptance criterion, each with its own time limit.
// Exit status is the number of failed criteria.

#include "cli.hpp"
#include "qmarg/ame.hpp"
#include "qmarg/codes.hpp"
#include "qmarg/error.hpp"
#include "qmarg/exact_matrix.hpp"
#include "qmarg/hierarchy.hpp"
#include "qmarg/permalg.hpp"
#include "qmarg/report.hpp"
#include "qmarg/solve.hpp"
#include "qmarg/symgroup.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <sstream>

using namespace qmarg;
using report::json;
using RV = std::vector<Rational>;

namespace {

Rational R(long a, long b = 1) { return Rational(a) / b; }

struct Outcome {
    bool pass = true;
    std::string detail;
};

// records the first failure only
struct Check {
    Outcome o;
    void operator()(bool cond, const std::string& what) {
        if (!cond && o.pass) {
            o.pass = false;
            o.detail = what;
        }
    }
};

json cli_result(const std::vector<std::string>& args, int& code) {
    std::ostringstream out, err;
    code = cli::run(args, out, err);
    if (code != 0) return json();
    return json::parse(out.str()).at("result");
}

std::vector<std::string> exact_list(const json& a) {
    std::vector<std::string> v;
    for (const auto& e : a) v.push_back(e.at("exact").get<std::string>());
    return v;
}

std::vector<std::string> fractions(const RV& v) {
    std::vector<std::string> s;
    for (const auto& q : v) s.push_back(to_fraction(q));
    return s;
}

Outcome c1() {
    Check c;
    int code = 0;
    auto r = cli_result({"--quiet", "ame", "candidate", "--n", "4", "--d", "2", "--eigenvalues"}, code);
    c(code == 0, "exit code " + std::to_string(code));
    if (code == 0) {
        auto p = exact_list(r.at("p"));
        c(p == std::vector<std::string>{"5/864", "0", "1/96", "0", "-1/32"}, "p = " + r.at("p").dump());
    }
    return c.o;
}

Outcome c2() {
    Check c;
    c(ame::eigenvalues_p(4, 6) == RV{R(1, 889056), 0, R(1, 816480), 0, R(1, 972000)},
      "p = " + json(fractions(ame::eigenvalues_p(4, 6))).dump());
    c(ame::eigenvalues_q(4, 6) == RV{R(1, 1296), 0, 0, R(1, 1296 * 1225), R(33, 1296L * 42875)},
      "q = " + json(fractions(ame::eigenvalues_q(4, 6))).dump());
    return c.o;
}

Outcome c3() {
    Check c;
    auto p = ame::eigenvalues_p(7, 2), q = ame::eigenvalues_q(7, 2);
    c(p == RV{R(113, 1119744), 0, R(17, 124416), 0, R(1, 13824), 0, R(1, 1536), 0}, "p = " + json(fractions(p)).dump());
    c(q == RV{R(1, 128), 0, 0, 0, R(1, 10368), R(1, 15552), R(1, 23328), R(11, 139968)},
      "q = " + json(fractions(q)).dump());
    for (const auto& v : p) c(v >= 0, "negative p entry");
    for (const auto& v : q) c(v >= 0, "negative q entry");
    int code = 0;
    auto r = cli_result({"--quiet", "ame", "check", "--n", "7", "--d", "2"}, code);
    c(code == 0 && r.at("verdict") == "inconclusive", "ame check --n 7 --d 2 did not report inconclusive");
    return c.o;
}

Outcome c4() {
    Check c;
    for (auto [n, d] : std::vector<std::pair<int, long>>{{2, 2}, {2, 3}, {3, 2}}) {
        std::string tag = "(" + std::to_string(n) + "," + std::to_string(d) + ")";
        c(ame::candidate_x(n, d) == ame::candidate_x_oracle(n, d), "candidate_x != oracle at " + tag);
        // exact spectrum: rank(M - p 1) = side - multiplicity(p) for every distinct p
        auto m = ame::dense_candidate_exact(n, d);
        auto p = ame::eigenvalues_p(n, d);
        std::map<Rational, BigInt> mult;
        for (int i = 0; i <= n; ++i) mult[p[static_cast<std::size_t>(i)]] += ame::p_multiplicity(n, d, i);
        BigInt total = 0;
        for (const auto& [value, k] : mult) {
            RationalMatrix shifted = m;
            for (std::size_t i = 0; i < m.rows(); ++i) shifted(i, i) -= value;
            c(BigInt(m.rows() - rank(shifted)) == k, "eigenvalue " + to_fraction(value) + " multiplicity at " + tag);
            total += k;
        }
        c(total == BigInt(m.rows()), "multiplicities do not cover the space at " + tag);
    }
    return c.o;
}

Outcome c5() {
    Check c;
    for (int n = 1; n <= 6; ++n)
        for (long d : {2L, 3L, 6L})
            for (int i = 0; i <= n; ++i) {
                auto dual = permalg::dual_basis_element(i, n, d);
                for (int j = 0; j <= n; ++j)
                    c(permalg::pairing(dual, permalg::x_basis(j, n, d)) == (i == j ? 1 : 0),
                      "pairing(dual_" + std::to_string(i) + ", X_" + std::to_string(j) + ") at n=" + std::to_string(n) +
                          " d=" + std::to_string(d));
            }
    return c.o;
}

Outcome c6() {
    using namespace symgroup;
    Check c;
    std::mt19937 rng(20260);
    auto s5 = all_permutations(5);
    std::uniform_int_distribution<std::size_t> pick(0, s5.size() - 1);
    auto parts5 = enumerate_partitions(5, 5);
    for (int t = 0; t < 100; ++t) {
        const auto& a = s5[pick(rng)];
        const auto& b = s5[pick(rng)];
        for (const auto& l : parts5) {
            Eigen::MatrixXd lhs = orthogonal_matrix(l, a * b), rhs = orthogonal_matrix(l, a) * orthogonal_matrix(l, b);
            c((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8, "orthogonal form is not a homomorphism for " + l.to_string());
            c(seminormal_matrix(l, a * b) == seminormal_matrix(l, a) * seminormal_matrix(l, b),
              "seminormal form is not a homomorphism for " + l.to_string());
        }
    }
    for (int N = 1; N <= 8; ++N) {
        BigInt sum = 0;
        for (const auto& l : enumerate_partitions(N, N)) sum += BigInt(irrep_dimension(l)) * irrep_dimension(l);
        c(sum == factorial(N), "sum of dim^2 != N! at N=" + std::to_string(N));
    }
    for (int N = 1; N <= 7; ++N) {
        auto classes = enumerate_partitions(N, N);
        auto group = all_permutations(N);
        std::map<Partition, Permutation> representative;
        for (const auto& g : group) representative.emplace(g.cycle_type(), g);
        for (const auto& l : classes) {
            std::vector<int> ones(static_cast<std::size_t>(N), 1);
            c(character(l, Partition(ones)) == static_cast<long>(irrep_dimension(l)),
              "chi(e) != dim for " + l.to_string());
            Rational norm = 0;
            for (const auto& mu : classes) {
                long chi = character(l, mu);
                norm += Rational(chi * chi) / Rational(centralizer_order(mu));
                double tr = orthogonal_group_table(l)[representative.at(mu).rank()].trace();
                c(std::abs(tr - static_cast<double>(chi)) <= 1e-8,
                  "trace != character for " + l.to_string() + " at class " + mu.to_string());
            }
            c(norm == 1, "character of " + l.to_string() + " is not normalised");
        }
    }
    // block projectors: one tuple per slot-permutation class (a reordered
    // tuple gives a conjugate projector of the same rank)
    ProjectorOptions po;
    po.size_cap = 1u << 12;
    po.with_matrix = false;
    for (int N = 2; N <= 5; ++N)
        for (int n = 1; n <= 4; ++n)
            for (const auto& t : hierarchy::sorted_tuples(n, N, N)) {
                auto k = trivial_multiplicity(t);
                auto bp = block_projector(t, po);
                c(BigInt(bp.basis.cols()) == k, "float rank != trivial_multiplicity for a tuple at N=" + std::to_string(N));
                if (bp.basis.cols() > 0)
                    c((bp.basis.transpose() * bp.basis - Eigen::MatrixXd::Identity(bp.basis.cols(), bp.basis.cols()))
                              .cwiseAbs()
                              .maxCoeff() <= 1e-8,
                      "basis not orthonormal");
                if (bp.side() <= 64) c(BigInt(rank(exact_block_projector(t))) == k, "exact rank != trivial_multiplicity");
            }
    return c.o;
}

Outcome c7() {
    Check c;
    auto lp42 = hierarchy::solve_witness(hierarchy::assemble_witness_lp(4, 2, 2));
    auto cert = hierarchy::certify(lp42);
    c(lp42.optimum < -1e-6, "AME(4,2) N=2 LP optimum " + std::to_string(lp42.optimum));
    c(cert.verdict == hierarchy::CertificateVerdict::no_ame, "AME(4,2) N=2 not certified");
    c(lp42.exact_optimum && hierarchy::witness_value(lp42.exact_w, 4, 2) == *lp42.exact_optimum,
      "AME(4,2) witness value does not reproduce the optimum");
    for (int N : {2, 3}) {
        auto lp = hierarchy::solve_witness(hierarchy::assemble_witness_lp(4, 6, N));
        c(lp.optimum >= -1e-8, "AME(4,6) LP optimum " + std::to_string(lp.optimum) + " at N=" + std::to_string(N));
        auto sdp = hierarchy::solve_witness(hierarchy::assemble_witness_sdp(4, 6, N));
        c(sdp.optimum >= -1e-8, "AME(4,6) SDP optimum " + std::to_string(sdp.optimum) + " at N=" + std::to_string(N));
        c(hierarchy::certify(sdp).verdict == hierarchy::CertificateVerdict::inconclusive, "AME(4,6) wrongly certified");
    }
    return c.o;
}

Outcome c8() {
    Check c;
    using hierarchy::LevelStatus;
    for (auto [n, N, want] : std::vector<std::tuple<int, int, LevelStatus>>{{4, 2, LevelStatus::infeasible},
                                                                           {4, 3, LevelStatus::infeasible},
                                                                           {3, 2, LevelStatus::feasible},
                                                                           {3, 3, LevelStatus::feasible}}) {
        auto r = hierarchy::solve_level(hierarchy::assemble_primal(hierarchy::MarginalSpec::ame(n, 2), N, true));
        c(r.status == want, "AME(" + std::to_string(n) + ",2) at N=" + std::to_string(N) + ": " +
                                hierarchy::to_string(r.status) + ", margin " + std::to_string(r.margin));
    }
    return c.o;
}

Outcome c9() {
    Check c;
    int code = 0;
    auto r = cli_result({"--quiet", "code", "check", "--n", "4", "--K", "2", "--m", "2", "--d", "2", "--pure"}, code);
    c(code == 0 && r.at("verdict") == "infeasible" && r.at("singleton_ok") == false,
      "((4,2,3))_2 not rejected by the Singleton bound");

    auto path = (std::filesystem::temp_directory_path() / "qmarg-acceptance-five-qubit.txt").string();
    {
        std::ofstream f(path);
        f.precision(17);
        auto q = codes::five_qubit_code_state();
        for (Eigen::Index i = 0; i < q.size(); ++i) f << q(i).real() << ' ' << q(i).imag() << '\n';
    }
    r = cli_result({"--quiet", "code", "verify", "--state", path, "--n", "5", "--K", "2", "--m", "2", "--d", "2"}, code);
    std::remove(path.c_str());
    c(code == 0, "code verify exit " + std::to_string(code));
    if (code == 0)
        c(r.at("max_deviation").get<double>() <= 1e-12,
          "five-qubit max deviation " + std::to_string(r.at("max_deviation").get<double>()));

    r = cli_result({"--quiet", "code", "check", "--n", "5", "--K", "2", "--m", "2", "--d", "2", "--pure", "--level", "ppt"},
                   code);
    c(code == 0 && r.at("verdict") == "feasible", "((5,2,3))_2 fails the positivity+PPT relaxation");
    return c.o;
}

Outcome c10() {
    Check c;
    auto text = solve::write_sdpa(hierarchy::assemble_witness_sdp(4, 6, 3).problem());
    auto again = solve::write_sdpa(solve::parse_sdpa(text));
    c(text == again, "export -> parse -> export differs");
    c(text == solve::write_sdpa(hierarchy::assemble_witness_sdp(4, 6, 3).problem()), "export differs between runs");
    return c.o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double limit;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "AME(4,2) exact eigenvalues via the CLI", 1, c1},
        {2, "AME(4,6) exact p and q", 1, c2},
        {3, "AME(7,2) fixture, positive and PPT", 1, c3},
        {4, "closed form equals oracle; exact dense spectrum", 10, c4},
        {5, "dual basis identity, n <= 6, d in {2,3,6}", 30, c5},
        {6, "representation suite", 120, c6},
        {7, "witness signs: AME(4,2) N=2 negative, AME(4,6) N=2,3 non-negative", 600, c7},
        {8, "hierarchy: AME(4,2) infeasible at N=2,3; AME(3,2) feasible at N=2,3", 600, c8},
        {9, "codes: Singleton rejection, five-qubit verify, ((5,2,3))_2 relaxation", 60, c9},
        {10, "SDPA round trip for the AME(4,6) N=3 dual", 30, c10},
    };
    int failed = 0;
    for (const auto& cr : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && secs > cr.limit) o = {false, "time limit exceeded"};
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f s / %.0f s", secs, cr.limit);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << cr.id << "  " << cr.name << "  (" << buf << ")";
        if (!o.pass) std::cout << "  " << o.detail;
        std::cout << std::endl;
        failed += !o.pass;
    }
    return failed;
}
