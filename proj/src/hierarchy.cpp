#include "qmarg/hierarchy.hpp"

#include "qmarg/error.hpp"
#include "qmarg/permalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace qmarg::hierarchy {

namespace {

using symgroup::all_permutations;

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// distinct slot arrangements of a tuple
BigInt tuple_orbit(const Tuple& t) {
    BigInt r = factorial(static_cast<long>(t.size()));
    for (std::size_t i = 0; i < t.size();) {
        std::size_t j = i;
        while (j < t.size() && t[j] == t[i]) ++j;
        r /= factorial(static_cast<long>(j - i));
        i = j;
    }
    return r;
}

std::vector<std::vector<Permutation>> distinct_arrangements(std::vector<Permutation> key) {
    std::sort(key.begin(), key.end());
    std::vector<std::vector<Permutation>> out;
    do out.push_back(key);
    while (std::next_permutation(key.begin(), key.end()));
    return out;
}

Eigen::MatrixXd sandwich(const Eigen::MatrixXd& basis, std::span<const Eigen::MatrixXd> factors) {
    Eigen::MatrixXd img(basis.rows(), basis.cols());
    for (Eigen::Index c = 0; c < basis.cols(); ++c) img.col(c) = symgroup::kron_apply(factors, basis.col(c));
    return basis.transpose() * img;
}

int floor_half(int n) { return n / 2; }

void check_level(int n, long d, int N) {
    if (n < 1 || d < 2) throw InvalidInput("hierarchy: need n >= 1 and d >= 2");
    if (N < 2) throw InvalidInput("hierarchy: need N >= 2 copies");
    if (N > 7) throw ResourceLimit("hierarchy: irrep group tables are limited to N <= 7");
}

const Eigen::MatrixXd& irrep(const Partition& p, const Permutation& s) {
    return symgroup::orthogonal_group_table(p)[s.rank()];
}

} // namespace

// ---------------------------------------------------------------------------

MarginalSpec MarginalSpec::ame(int n, long d) { return uniform(n, d, floor_half(n)); }

MarginalSpec MarginalSpec::uniform(int n, long d, int k) {
    MarginalSpec s;
    s.n = n;
    s.d = d;
    s.uniform_order = k;
    s.validate();
    return s;
}

void MarginalSpec::validate() const {
    if (n < 1 || d < 2) throw InvalidInput("MarginalSpec: need n >= 1 and d >= 2");
    if (!dims.empty()) {
        if (dims.size() != static_cast<std::size_t>(n)) throw InvalidInput("MarginalSpec: one dimension per slot");
        for (long v : dims)
            if (v < 1) throw InvalidInput("MarginalSpec: slot dimensions must be positive");
    }
    if (uniform_order && (*uniform_order < 0 || *uniform_order > n))
        throw InvalidInput("MarginalSpec: uniform order outside [0, n]");
    for (const auto& [subset, rho] : marginals) {
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (subset[i] < 0 || subset[i] >= n) throw InvalidInput("MarginalSpec: slot outside {0..n-1}");
            if (i && subset[i] <= subset[i - 1]) throw InvalidInput("MarginalSpec: subsets must be sorted and distinct");
        }
        BigInt side = 1;
        for (int j : subset) side *= slot_dim(j);
        if (BigInt(rho.rows()) != side || rho.cols() != rho.rows())
            throw InvalidInput("MarginalSpec: target has the wrong size");
        Rational tr = 0;
        for (std::size_t i = 0; i < rho.rows(); ++i) tr += rho(i, i);
        if (tr != 1) throw InvalidInput("MarginalSpec: target trace is not one");
        if (!solve::psd_check_exact(rho).psd) throw InvalidInput("MarginalSpec: target is not PSD");
    }
}

std::vector<Tuple> sorted_tuples(int n, long d, int N) {
    auto parts = symgroup::enumerate_partitions(N, static_cast<int>(std::min<long>(d, N)));
    std::vector<Tuple> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        Tuple t;
        for (auto i : idx) t.push_back(parts[i]);
        out.push_back(std::move(t));
        // next non-decreasing index sequence
        int pos = n - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == parts.size()) --pos;
        if (pos < 0) break;
        std::size_t v = ++idx[static_cast<std::size_t>(pos)];
        for (auto j = static_cast<std::size_t>(pos) + 1; j < idx.size(); ++j) idx[j] = v;
    }
    return out;
}

Eigen::RowVectorXd trace_functional(const BlockSdp& sdp, const std::vector<Permutation>& key) {
    if (static_cast<int>(key.size()) != sdp.n) throw InvalidInput("trace_functional: key length differs from n");
    for (const auto& s : key)
        if (s.degree() != sdp.N) throw InvalidInput("trace_functional: permutation degree differs from N");
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(sdp.variables));
    auto fixed = static_cast<std::ptrdiff_t>(sdp.fixed_slots);
    std::vector<std::vector<Permutation>> arr;
    for (auto tail : distinct_arrangements(std::vector<Permutation>(key.begin() + fixed, key.end()))) {
        arr.emplace_back(key.begin(), key.begin() + fixed);
        arr.back().insert(arr.back().end(), tail.begin(), tail.end());
    }
    std::vector<Eigen::MatrixXd> factors(key.size());
    for (const auto& blk : sdp.blocks) {
        auto k = static_cast<Eigen::Index>(blk.k);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
        for (const auto& a : arr) {
            for (std::size_t j = 0; j < a.size(); ++j) factors[j] = irrep(blk.tuple[j], a[j]);
            acc += sandwich(blk.basis, factors);
        }
        acc /= static_cast<double>(arr.size());
        auto off = static_cast<Eigen::Index>(blk.offset);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = i; j < k; ++j) row(off++) = i == j ? acc(i, i) : acc(i, j) + acc(j, i);
    }
    return row;
}

Eigen::MatrixXd block_matrix(const BlockSdp& sdp, std::size_t b, const Eigen::VectorXd& vars) {
    const auto& blk = sdp.blocks.at(b);
    auto k = static_cast<Eigen::Index>(blk.k);
    Eigen::MatrixXd m(k, k);
    auto off = static_cast<Eigen::Index>(blk.offset);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) m(i, j) = m(j, i) = vars(off++);
    return m;
}

namespace {

std::vector<Partition> slot_partitions(int N, long dim) {
    return symgroup::enumerate_partitions(N, static_cast<int>(std::min<long>(dim, N)));
}

// Tuples over fixed slots (all combinations) followed by a sorted tail.
std::vector<Tuple> layout_tuples(const std::vector<long>& dims, int fixed, int N) {
    std::vector<Tuple> heads{{}};
    for (int j = 0; j < fixed; ++j) {
        std::vector<Tuple> next;
        for (const auto& h : heads)
            for (const auto& p : slot_partitions(N, dims[static_cast<std::size_t>(j)])) {
                next.push_back(h);
                next.back().push_back(p);
            }
        heads = std::move(next);
    }
    int tail = static_cast<int>(dims.size()) - fixed;
    std::vector<Tuple> tails{{}};
    if (tail > 0) tails = sorted_tuples(tail, dims.back(), N);
    std::vector<Tuple> out;
    for (const auto& h : heads)
        for (const auto& t : tails) {
            out.push_back(h);
            out.back().insert(out.back().end(), t.begin(), t.end());
        }
    return out;
}

BlockSdp assemble_blocks(const std::vector<long>& dims, int fixed, int N, const HierarchyOptions& opts) {
    BlockSdp sdp;
    sdp.n = static_cast<int>(dims.size());
    sdp.d = dims.back();
    sdp.dims = dims;
    sdp.fixed_slots = fixed;
    sdp.N = N;
    auto tuples = layout_tuples(dims, fixed, N);
    std::vector<std::optional<PrimalBlock>> built(tuples.size());
    symgroup::ProjectorOptions po;
    po.size_cap = opts.block_cap;
    po.with_matrix = false;
    po.method = opts.basis;
    po.seed = opts.seed;
    for (long dim : dims)
        for (const auto& p : slot_partitions(N, dim)) symgroup::orthogonal_group_table(p);  // warm the caches before threading
    parallel_for(tuples.size(), opts.jobs, [&](std::size_t t) {
        auto proj = symgroup::block_projector(tuples[t], po);
        if (proj.multiplicity == 0) return;
        PrimalBlock b;
        b.tuple = tuples[t];
        b.basis = std::move(proj.basis);
        b.k = proj.multiplicity;
        BigInt w = tuple_orbit(Tuple(tuples[t].begin() + fixed, tuples[t].end()));
        for (std::size_t j = 0; j < dims.size(); ++j) w *= symgroup::gl_multiplicity(tuples[t][j], dims[j]);
        b.weight = w.convert_to<double>();
        built[t] = std::move(b);
    });
    for (auto& b : built) {
        if (!b) continue;
        b->offset = sdp.variables;
        sdp.variables += b->k * (b->k + 1) / 2;
        sdp.blocks.push_back(std::move(*b));
    }
    return sdp;
}

// Raw equality row: Tr(Phi V_key) - factor Tr(Phi V_reduced) = value.
struct Test {
    std::vector<Permutation> key;
    std::optional<std::vector<Permutation>> reduced;
    double factor = 0;
    double value = 0;
};

Test normalisation(int n, int N) {
    return {std::vector<Permutation>(static_cast<std::size_t>(n), Permutation::identity(N)), {}, 0, 1.0};
}

void factorization_tests(const BlockSdp& sdp, const Factorization& f, std::vector<Test>& tests) {
    const int n = sdp.n, N = sdp.N;
    std::vector<bool> kept(static_cast<std::size_t>(n), false), mixed(static_cast<std::size_t>(n), false);
    for (int j : f.kept) kept.at(static_cast<std::size_t>(j)) = true;
    for (int j : f.mixed) {
        if (!kept.at(static_cast<std::size_t>(j))) throw InvalidInput("factorization: mixed slot must be kept");
        mixed[static_cast<std::size_t>(j)] = true;
    }
    auto group = all_permutations(N);
    std::vector<Permutation> fixing0;
    for (const auto& s : group)
        if (s(0) == 0) fixing0.push_back(s);
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    auto choices = [&](int j) -> const std::vector<Permutation>& {
        return kept[static_cast<std::size_t>(j)] ? group : fixing0;
    };
    for (;;) {
        Test t;
        t.reduced.emplace();
        double factor = 1;
        for (int j = 0; j < n; ++j) {
            const auto& s = choices(j)[digit[static_cast<std::size_t>(j)]];
            t.key.push_back(s);
            if (mixed[static_cast<std::size_t>(j)]) {
                long dim = sdp.dims[static_cast<std::size_t>(j)];
                auto ct = permalg::partial_trace_copy(s, 0, dim);
                factor *= static_cast<double>(ct.factor) / static_cast<double>(dim);
                t.reduced->push_back(ct.reduced);
            } else {
                t.reduced->push_back(s);
            }
        }
        t.factor = factor;
        if (t.key != *t.reduced || t.factor != 1.0) tests.push_back(std::move(t));
        int pos = n - 1;
        while (pos >= 0 && digit[static_cast<std::size_t>(pos)] + 1 == choices(pos).size())
            digit[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
        ++digit[static_cast<std::size_t>(pos)];
    }
}

void finish_rows(BlockSdp& sdp, const std::vector<Test>& tests, unsigned jobs) {
    sdp.raw_constraints = tests.size();
    auto nv = static_cast<Eigen::Index>(sdp.variables);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(tests.size()), nv);
    Eigen::VectorXd b(static_cast<Eigen::Index>(tests.size()));
    parallel_for(tests.size(), jobs, [&](std::size_t i) {
        const auto& t = tests[i];
        Eigen::RowVectorXd row = trace_functional(sdp, t.key);
        if (t.reduced) row -= t.factor * trace_functional(sdp, *t.reduced);
        a.row(static_cast<Eigen::Index>(i)) = row;
        b(static_cast<Eigen::Index>(i)) = t.value;
    });

    // orthonormal independent rows spanning the same constraints
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    double cut = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    sdp.equalities = svd.matrixV().leftCols(rank).transpose();
    sdp.rhs = sv.head(rank).cwiseInverse().asDiagonal() * (u.transpose() * b);
    double inconsistency = (b - u * (u.transpose() * b)).norm();
    if (inconsistency > 1e-8) {
        // keep the inconsistent direction so reduce_primal can see it
        sdp.rhs.conservativeResize(rank + 1);
        sdp.equalities.conservativeResize(rank + 1, nv);
        sdp.equalities.row(rank).setZero();
        sdp.rhs(rank) = inconsistency;
    }
}

} // namespace

BlockSdp assemble_factorized(const std::vector<long>& dims, int fixed_slots, int N,
                             const std::vector<Factorization>& constraints, const HierarchyOptions& opts) {
    if (dims.empty()) throw InvalidInput("assemble_factorized: no slots");
    if (fixed_slots < 0 || fixed_slots > static_cast<int>(dims.size()))
        throw InvalidInput("assemble_factorized: fixed slot count out of range");
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (dims[j] < 1) throw InvalidInput("assemble_factorized: slot dimension must be positive");
        if (static_cast<int>(j) > fixed_slots && dims[j] != dims[j - 1])
            throw InvalidInput("assemble_factorized: interchangeable slots must share a dimension");
    }
    check_level(static_cast<int>(dims.size()), 2, N);
    BlockSdp sdp = assemble_blocks(dims, fixed_slots, N, opts);
    std::vector<Test> tests{normalisation(sdp.n, N)};
    for (const auto& f : constraints) factorization_tests(sdp, f, tests);
    finish_rows(sdp, tests, opts.jobs);
    return sdp;
}

BlockSdp assemble_primal(const MarginalSpec& spec, int N, bool strong, const HierarchyOptions& opts) {
    spec.validate();
    if (!spec.is_uniform() || !spec.dims.empty())
        throw Unsupported("assemble_primal: only uniform (maximally mixed) marginal specs are supported");
    check_level(spec.n, spec.d, N);
    const int n = spec.n;
    const long d = spec.d;
    const int r = *spec.uniform_order;

    BlockSdp sdp = assemble_blocks(std::vector<long>(static_cast<std::size_t>(n), d), 0, N, opts);
    sdp.strong = strong;
    std::vector<Test> tests{normalisation(n, N)};
    if (strong) {
        // Tr_{A_{I^c}} Phi = 1/d^r (x) Tr_A Phi on I = {0..r-1}; other subsets
        // follow by slot symmetry.
        Factorization f;
        for (int j = 0; j < r; ++j) f.kept.push_back(j);
        f.mixed = f.kept;
        factorization_tests(sdp, f, tests);
    } else {
        // two-copy marginal on A_I B_I equals rho_I (x) rho_I
        auto swap01 = Permutation::transposition(N, 0, 1);
        for (unsigned mask = 1; mask < (1u << r); ++mask) {
            Test t;
            t.value = 1;
            for (int j = 0; j < n; ++j) {
                bool on = j < r && (mask >> j & 1u);
                t.key.push_back(on ? swap01 : Permutation::identity(N));
                if (on) t.value /= static_cast<double>(d);
            }
            tests.push_back(std::move(t));
        }
    }
    finish_rows(sdp, tests, opts.jobs);
    return sdp;
}

PrimalReduction reduce_primal(const BlockSdp& sdp) {
    PrimalReduction red;
    auto nv = static_cast<Eigen::Index>(sdp.variables);
    const Eigen::MatrixXd& e = sdp.equalities;
    // zero rows with non-zero rhs mark inconsistent systems
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        if (e.row(i).norm() == 0.0) red.residual = std::max(red.residual, std::abs(sdp.rhs(i)));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-9) ++rank;
    red.x0 = svd.solve(sdp.rhs);
    red.residual = std::max(red.residual, (e * red.x0 - sdp.rhs).norm());
    red.nullspace = svd.matrixV().rightCols(nv - rank);

    auto q = static_cast<int>(red.nullspace.cols());
    std::vector<solve::BlockSpec> specs;
    for (const auto& b : sdp.blocks) specs.push_back({static_cast<int>(b.k), false});
    red.problem.reset(q + 1, specs);
    red.problem.c[static_cast<std::size_t>(q)] = -1;
    auto put = [&](int k, std::size_t blk, const Eigen::MatrixXd& m, double scale) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = i; j < m.cols(); ++j)
                if (std::abs(m(i, j)) > 1e-14)
                    red.problem.add(k, static_cast<int>(blk), static_cast<int>(i), static_cast<int>(j), scale * m(i, j));
    };
    for (std::size_t blk = 0; blk < sdp.blocks.size(); ++blk) {
        put(0, blk, block_matrix(sdp, blk, red.x0), -1.0);
        for (int i = 0; i < q; ++i) put(i + 1, blk, block_matrix(sdp, blk, red.nullspace.col(i)), 1.0);
        for (std::size_t i = 0; i < sdp.blocks[blk].k; ++i)
            red.problem.add(q + 1, static_cast<int>(blk), static_cast<int>(i), static_cast<int>(i), -1.0);
    }
    return red;
}

LevelResult solve_level(const BlockSdp& sdp, double tol, const solve::SdpOptions& opts) {
    LevelResult res;
    auto red = reduce_primal(sdp);
    res.free_parameters = static_cast<std::size_t>(red.nullspace.cols());
    if (red.residual > 1e-8) {
        res.status = LevelStatus::infeasible;
        res.margin = -std::numeric_limits<double>::infinity();
        return res;
    }
    res.sdp = solve::sdp_solve(red.problem, opts);
    if (res.sdp.status != solve::SdpStatus::optimal)
        throw SolverError("solve_level: SDP solver returned " + solve::to_string(res.sdp.status) + ": " +
                          res.sdp.diagnostics);
    auto q = red.nullspace.cols();
    Eigen::VectorXd y(q);
    for (Eigen::Index i = 0; i < q; ++i) y(i) = res.sdp.x[static_cast<std::size_t>(i)];
    res.point = red.x0 + red.nullspace * y;
    res.margin = res.sdp.x[static_cast<std::size_t>(q)];
    res.status = res.margin >= -tol ? LevelStatus::feasible : LevelStatus::infeasible;
    return res;
}

// ---------------------------------------------------------------------------

Rational witness_coefficient(int n, long d, int l) {
    if (l < 0 || l > n) throw InvalidInput("witness_coefficient: l outside [0, n]");
    return Rational(binom(n, l)) / ipow(d, std::min(l, n - l));
}

std::vector<Rational> folded_objective(int n, long d) {
    if (n < 1 || d < 2) throw InvalidInput("folded_objective: need n >= 1 and d >= 2");
    int r = floor_half(n);
    std::vector<Rational> c(static_cast<std::size_t>(r + 1));
    for (int l = 0; l <= r; ++l) {
        c[static_cast<std::size_t>(l)] = witness_coefficient(n, d, l);
        if (n - l != l) c[static_cast<std::size_t>(l)] += witness_coefficient(n, d, n - l);
    }
    return c;
}

Rational witness_value(const std::vector<Rational>& w, int n, long d) {
    auto c = folded_objective(n, d);
    if (w.size() != c.size())
        throw InvalidInput("witness_value: expected " + std::to_string(c.size()) + " folded coefficients");
    Rational s = 0;
    for (std::size_t l = 0; l < c.size(); ++l) s += c[l] * w[l];
    return s;
}

namespace {

// Folds per-l coefficients (length n+1) onto v_0..v_r.
template <class T>
std::vector<T> fold(const std::vector<T>& per_l, int n) {
    int r = floor_half(n);
    std::vector<T> out(static_cast<std::size_t>(r + 1));
    for (int l = 0; l <= r; ++l) {
        out[static_cast<std::size_t>(l)] = per_l[static_cast<std::size_t>(l)];
        if (n - l != l) out[static_cast<std::size_t>(l)] += per_l[static_cast<std::size_t>(n - l)];
    }
    return out;
}

} // namespace

solve::LinearProgram WitnessLp::linear_program() const {
    solve::LinearProgram lp;
    for (const auto& c : objective) lp.add_variable(c, Rational(-1), Rational(1));
    for (const auto& row : rows) lp.add_row(row, solve::Sense::ge, 0);
    return lp;
}

solve::SdpProblem WitnessSdp::problem() const {
    int m = static_cast<int>(objective.size());
    std::vector<solve::BlockSpec> specs;
    for (const auto& b : blocks) specs.push_back({static_cast<int>(b.coefficients.at(0).rows()), false});
    specs.push_back({2 * m, true});
    solve::SdpProblem p;
    p.reset(m, specs);
    for (int l = 0; l < m; ++l) p.c[static_cast<std::size_t>(l)] = to_double(objective[static_cast<std::size_t>(l)]);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int l = 0; l < m; ++l) {
            const auto& y = blocks[b].coefficients[static_cast<std::size_t>(l)];
            for (Eigen::Index i = 0; i < y.rows(); ++i)
                for (Eigen::Index j = i; j < y.cols(); ++j)
                    if (std::abs(y(i, j)) > 1e-12)
                        p.add(l + 1, static_cast<int>(b), static_cast<int>(i), static_cast<int>(j), y(i, j));
        }
    int box = static_cast<int>(blocks.size());
    for (int l = 0; l < m; ++l) {
        p.add(l + 1, box, 2 * l, 2 * l, 1);       // v_l + 1 >= 0
        p.add(0, box, 2 * l, 2 * l, -1);
        p.add(l + 1, box, 2 * l + 1, 2 * l + 1, -1);  // 1 - v_l >= 0
        p.add(0, box, 2 * l + 1, 2 * l + 1, -1);
    }
    return p;
}

WitnessLp assemble_witness_lp(int n, long d, int N) {
    check_level(n, d, N);
    WitnessLp lp;
    lp.n = n;
    lp.d = d;
    lp.N = N;
    lp.objective = folded_objective(n, d);

    auto parts = symgroup::enumerate_partitions(N, static_cast<int>(std::min<long>(d, N)));
    auto group = all_permutations(N);
    auto swap01 = Permutation::transposition(N, 0, 1);
    // chi[p][g] = chi_p(sigma_g), chit[p][g] = chi_p(sigma_g * (0 1))
    std::vector<std::vector<long>> chi(parts.size()), chit(parts.size());
    std::vector<Partition> ct, ctt;
    for (const auto& s : group) {
        ct.push_back(s.cycle_type());
        ctt.push_back((s * swap01).cycle_type());
    }
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (std::size_t g = 0; g < group.size(); ++g) {
            chi[p].push_back(symgroup::character(parts[p], ct[g]));
            chit[p].push_back(symgroup::character(parts[p], ctt[g]));
        }
    auto index_of = [&](const Partition& q) {
        return static_cast<std::size_t>(std::find(parts.begin(), parts.end(), q) - parts.begin());
    };
    BigInt order = factorial(N);
    for (const auto& tuple : sorted_tuples(n, d, N)) {
        if (symgroup::trivial_multiplicity(tuple) != 1) continue;
        // coefficient of z^l in prod_j (chi_j(sigma) + z chi_j(sigma tau)), summed over sigma
        std::vector<BigInt> per_l(static_cast<std::size_t>(n + 1), 0);
        std::vector<BigInt> poly;
        for (std::size_t g = 0; g < group.size(); ++g) {
            poly.assign(1, 1);
            for (const auto& p : tuple) {
                std::size_t pi = index_of(p);
                std::vector<BigInt> next(poly.size() + 1, 0);
                for (std::size_t e = 0; e < poly.size(); ++e) {
                    next[e] += poly[e] * chi[pi][g];
                    next[e + 1] += poly[e] * chit[pi][g];
                }
                poly = std::move(next);
            }
            for (std::size_t e = 0; e < poly.size(); ++e) per_l[e] += poly[e];
        }
        std::vector<Rational> row_l;
        for (auto& v : per_l) row_l.push_back(Rational(v) / order);
        lp.tuples.push_back(tuple);
        lp.rows.push_back(fold(row_l, n));
    }
    return lp;
}

WitnessSdp assemble_witness_sdp(int n, long d, int N, const HierarchyOptions& opts) {
    check_level(n, d, N);
    WitnessSdp w;
    w.n = n;
    w.d = d;
    w.N = N;
    w.objective = folded_objective(n, d);
    auto tuples = sorted_tuples(n, d, N);
    for (const auto& p : symgroup::enumerate_partitions(N, static_cast<int>(std::min<long>(d, N))))
        symgroup::orthogonal_group_table(p);
    symgroup::ProjectorOptions po;
    po.size_cap = opts.block_cap;
    po.with_matrix = false;
    po.method = opts.basis;
    po.seed = opts.seed;
    auto e = Permutation::identity(N);
    auto swap01 = Permutation::transposition(N, 0, 1);
    std::vector<std::optional<WitnessBlock>> built(tuples.size());
    parallel_for(tuples.size(), opts.jobs, [&](std::size_t t) {
        auto proj = symgroup::block_projector(tuples[t], po);
        if (proj.multiplicity == 0) return;
        auto k = static_cast<Eigen::Index>(proj.multiplicity);
        std::vector<Eigen::MatrixXd> per_l(static_cast<std::size_t>(n + 1), Eigen::MatrixXd::Zero(k, k));
        std::vector<Eigen::MatrixXd> factors(static_cast<std::size_t>(n));
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            for (int j = 0; j < n; ++j)
                factors[static_cast<std::size_t>(j)] = irrep(tuples[t][static_cast<std::size_t>(j)], (mask >> j & 1u) ? swap01 : e);
            Eigen::MatrixXd y = sandwich(proj.basis, factors);
            per_l[static_cast<std::size_t>(__builtin_popcount(mask))] += 0.5 * (y + y.transpose());
        }
        built[t] = WitnessBlock{tuples[t], fold(per_l, n)};
    });
    for (auto& b : built)
        if (b) w.blocks.push_back(std::move(*b));
    return w;
}

std::variant<WitnessLp, WitnessSdp> assemble_dual_witness(int n, long d, int N, bool rank1_only,
                                                           const HierarchyOptions& opts) {
    if (rank1_only) return assemble_witness_lp(n, d, N);
    return assemble_witness_sdp(n, d, N, opts);
}

WitnessSolution solve_witness(const WitnessLp& lp) {
    auto res = solve::lp_solve_exact(lp.linear_program());
    if (res.status != solve::LpStatus::optimal)
        throw SolverError("solve_witness: LP " + solve::to_string(res.status));
    WitnessSolution s;
    s.n = lp.n;
    s.d = lp.d;
    s.N = lp.N;
    s.exact = true;
    s.exact_optimum = res.value;
    s.optimum = to_double(res.value);
    s.exact_w = res.point;
    for (const auto& v : res.point) s.w.push_back(to_double(v));
    return s;
}

WitnessSolution solve_witness(const WitnessSdp& sdp, const solve::SdpOptions& opts) {
    auto res = solve::sdp_solve(sdp.problem(), opts);
    if (res.status != solve::SdpStatus::optimal)
        throw SolverError("solve_witness: SDP solver returned " + solve::to_string(res.status) + ": " + res.diagnostics);
    WitnessSolution s;
    s.n = sdp.n;
    s.d = sdp.d;
    s.N = sdp.N;
    s.optimum = res.primal_objective;
    s.w = res.x;
    return s;
}

Certificate certify(const WitnessSolution& s, double tol) {
    Certificate c;
    c.n = s.n;
    c.d = s.d;
    c.N = s.N;
    c.optimum = s.optimum;
    c.exact_optimum = s.exact_optimum;
    c.w = s.w;
    c.exact_w = s.exact_w;
    bool negative = s.exact_optimum ? *s.exact_optimum < 0 : s.optimum < -tol;
    std::string label = "AME(" + std::to_string(s.n) + "," + std::to_string(s.d) + ")";
    if (negative) {
        c.verdict = CertificateVerdict::no_ame;
        c.message = "W is an entanglement witness for the two-copy candidate at level N=" + std::to_string(s.N) +
                    ": <psi|<psi|W|psi>|psi> >= 0 for all psi while Tr(W Phi) < 0, so no " + label + " exists";
    } else {
        c.verdict = CertificateVerdict::inconclusive;
        c.within_tolerance = !s.exact_optimum && s.optimum < 0;
        c.message = "inconclusive at level N=" + std::to_string(s.N);
        if (c.within_tolerance) c.message += " (negative optimum within tolerance)";
    }
    return c;
}

std::string to_string(CertificateVerdict v) { return v == CertificateVerdict::no_ame ? "no_ame" : "inconclusive"; }

std::string to_string(LevelStatus s) { return s == LevelStatus::feasible ? "feasible" : "infeasible"; }

} // namespace qmarg::hierarchy
