#include <doctest.h>

#include "qmarg/error.hpp"
#include "qmarg/symgroup.hpp"

#include <random>
#include <set>

using namespace qmarg;
using namespace qmarg::symgroup;

namespace {

Partition P(std::vector<int> v) { return Partition(std::move(v)); }

// Brute-force count of standard Young tableaux: fill 0..N-1 one at a time.
std::uint64_t count_syt(std::vector<int> shape, std::vector<int> fill) {
    bool full = true;
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < shape.size(); ++r) {
        if (fill[r] < shape[r]) full = false;
        if (fill[r] < shape[r] && (r == 0 || fill[r] < fill[r - 1])) {
            ++fill[r];
            total += count_syt(shape, fill);
            --fill[r];
        }
    }
    return full ? 1 : total;
}

Permutation random_perm(int n, std::mt19937& rng) {
    std::vector<int> im(static_cast<std::size_t>(n));
    std::iota(im.begin(), im.end(), 0);
    std::shuffle(im.begin(), im.end(), rng);
    return Permutation(im);
}

} // namespace

TEST_CASE("partition enumeration") {
    auto p4 = enumerate_partitions(4, 4);
    std::vector<Partition> want{P({4}), P({3, 1}), P({2, 2}), P({2, 1, 1}), P({1, 1, 1, 1})};
    CHECK(p4 == want);
    auto p42 = enumerate_partitions(4, 2);
    CHECK(p42 == std::vector<Partition>{P({4}), P({3, 1}), P({2, 2})});
    auto p7 = enumerate_partitions(7, 6);
    CHECK(p7.size() == 14);
    CHECK(std::find(p7.begin(), p7.end(), P({1, 1, 1, 1, 1, 1, 1})) == p7.end());
    CHECK(std::is_sorted(p7.begin(), p7.end()));
    CHECK_THROWS_AS(P({1, 2}), InvalidInput);
    CHECK_THROWS_AS(P({2, 0}), InvalidInput);
}

TEST_CASE("permutation basics") {
    auto s = Permutation::transposition(3, 0, 1);
    auto c = Permutation::long_cycle(3);
    // (s*c)(0) = s(c(0)) = s(1) = 0
    CHECK((s * c)(0) == 0);
    CHECK((s * c)(2) == 1);
    CHECK((c * c.inverse()).is_identity());
    CHECK(c.cycle_count() == 1);
    CHECK(c.cycle_type() == P({3}));
    auto all = all_permutations(4);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i].rank() == i);
        Permutation rebuilt = Permutation::identity(4);
        for (int k : all[i].reduced_word()) rebuilt = rebuilt * Permutation::transposition(4, k, k + 1);
        CHECK(rebuilt == all[i]);
    }
    CHECK_THROWS_AS(Permutation({0, 0, 1}), InvalidInput);
}

TEST_CASE("dimensions") {
    CHECK(irrep_dimension(P({2, 1})) == 2);
    CHECK(irrep_dimension(P({5})) == 1);
    CHECK(irrep_dimension(P({4, 3})) == 14);
    CHECK(count_syt({4, 3}, {0, 0}) == 14);
    for (int n = 1; n <= 8; ++n) {
        BigInt sum = 0;
        for (const auto& l : enumerate_partitions(n, n)) {
            sum += BigInt(irrep_dimension(l)) * irrep_dimension(l);
            CHECK(count_syt(l.parts(), std::vector<int>(l.parts().size(), 0)) == irrep_dimension(l));
            CHECK(standard_tableaux(l).size() == irrep_dimension(l));
        }
        CHECK(sum == factorial(n));
    }
}

TEST_CASE("characters") {
    CHECK(character(P({3}), P({2, 1})) == 1);
    CHECK(character(P({1, 1, 1}), P({2, 1})) == -1);
    CHECK(character(P({2, 1}), P({3})) == -1);
    CHECK_THROWS_AS(character(P({3}), P({2, 2})), InvalidInput);
    for (int n = 1; n <= 8; ++n)
        for (const auto& l : enumerate_partitions(n, n))
            CHECK(character(l, P(std::vector<int>(static_cast<std::size_t>(n), 1))) ==
                  static_cast<long>(irrep_dimension(l)));
    // column orthogonality at N=5
    auto parts = enumerate_partitions(5, 5);
    for (const auto& mu : parts)
        for (const auto& nu : parts) {
            long s = 0;
            for (const auto& l : parts) s += character(l, mu) * character(l, nu);
            if (mu == nu)
                CHECK(BigInt(s) == centralizer_order(mu));
            else
                CHECK(s == 0);
        }
}

TEST_CASE("irrep matrices: traces match characters on S_4") {
    for (const auto& l : enumerate_partitions(4, 4))
        for (const auto& s : all_permutations(4)) {
            auto semi = seminormal_matrix(l, s);
            CHECK(semi.trace() == character(l, s.cycle_type()));
            auto orth = orthogonal_matrix(l, s);
            CHECK(orth.trace() == doctest::Approx(static_cast<double>(character(l, s.cycle_type()))));
            CHECK((orth.transpose() * orth - Eigen::MatrixXd::Identity(orth.rows(), orth.cols())).norm() < 1e-12);
        }
    auto id = Permutation::identity(4);
    CHECK(seminormal_matrix(P({2, 2}), id) == RationalMatrix::identity(2));
    CHECK(irrep_matrix(P({3, 1}), id, IrrepForm::orthogonal).side() == 3);
}

TEST_CASE("homomorphism on S_5") {
    std::mt19937 rng(7);
    auto parts = enumerate_partitions(5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = random_perm(5, rng), b = random_perm(5, rng);
        for (const auto& l : parts) {
            CHECK(seminormal_matrix(l, a) * seminormal_matrix(l, b) == seminormal_matrix(l, a * b));
            Eigen::MatrixXd diff = orthogonal_matrix(l, a) * orthogonal_matrix(l, b) - orthogonal_matrix(l, a * b);
            CHECK(diff.cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("gl multiplicities") {
    CHECK(gl_multiplicity(P({2}), 2) == 3);
    CHECK(gl_multiplicity(P({1, 1, 1}), 2) == 0);
    CHECK(gl_multiplicity(P({2, 1}), 3) == 8);
    for (int n = 1; n <= 6; ++n)
        for (long d = 1; d <= 4; ++d) {
            BigInt sum = 0;
            for (const auto& l : enumerate_partitions(n, n)) sum += gl_multiplicity(l, d) * irrep_dimension(l);
            CHECK(sum == ipow(d, n));
        }
}

TEST_CASE("trivial multiplicity") {
    std::vector<Partition> triv{P({3}), P({3}), P({3})};
    CHECK(trivial_multiplicity(triv) == 1);
    std::vector<Partition> t21{P({2, 1}), P({2, 1})};
    CHECK(trivial_multiplicity(t21) == 1);
    std::vector<Partition> mixed{P({2, 1}), P({3, 1})};
    CHECK_THROWS_AS(trivial_multiplicity(mixed), InvalidInput);
    // Kronecker coefficient g((3,1),(2,2),(2,1,1)) = 1, via the dense projector rank
    std::vector<Partition> k3{P({3, 1}), P({2, 2}), P({2, 1, 1})};
    auto bp = block_projector(k3);
    CHECK(trivial_multiplicity(k3) == 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bp.matrix);
    int rk = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) rk += eig.eigenvalues()(i) > 0.5;
    CHECK(rk == 1);
}

TEST_CASE("block projectors") {
    std::vector<Partition> triv{P({4}), P({4})};
    auto bt = block_projector(triv);
    CHECK(bt.matrix.rows() == 1);
    CHECK(bt.matrix(0, 0) == doctest::Approx(1.0));

    std::vector<Partition> t21{P({2, 1}), P({2, 1})};
    ProjectorOptions cross;
    cross.cross_check = true;
    auto b = block_projector(t21, cross);
    CHECK(b.matrix.rows() == 4);
    CHECK(b.multiplicity == 1);
    CHECK(b.basis.cols() == 1);

    // idempotence for all 3-tuples of S_4
    auto parts = enumerate_partitions(4, 4);
    for (const auto& a : parts)
        for (const auto& c : parts)
            for (const auto& e : parts) {
                std::vector<Partition> t{a, c, e};
                auto bp = block_projector(t);
                CHECK((bp.matrix * bp.matrix - bp.matrix).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK((bp.matrix - bp.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK((bp.basis * bp.basis.transpose() - bp.matrix).norm() <= 1e-10);
            }

    ProjectorOptions small;
    small.size_cap = 4;
    std::vector<Partition> big{P({3, 1}), P({3, 1})};
    CHECK_THROWS_AS(block_projector(big, small), ResourceLimit);
}

TEST_CASE("exact projector is idempotent with rank k") {
    std::vector<Partition> t{P({2, 1}), P({2, 1}), P({2, 1})};
    auto e = exact_block_projector(t);
    CHECK(e * e == e);
    CHECK(rank(e) == trivial_multiplicity(t));
}

TEST_CASE("twirl and kernel agree with a fixed seed") {
    std::vector<Partition> t{P({3, 1}), P({2, 1, 1}), P({3, 1})};
    ProjectorOptions o;
    o.method = BasisMethod::twirl;
    o.cross_check = true;
    auto a = block_projector(t, o);
    auto b = block_projector(t, o);
    CHECK(a.basis == b.basis);
}
