#include "qmarg/symgroup.hpp"

#include "qmarg/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

namespace qmarg::symgroup {

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] <= 0) throw InvalidInput("Partition: parts must be positive");
        if (i > 0 && parts_[i] > parts_[i - 1]) throw InvalidInput("Partition: parts must be weakly decreasing");
    }
    size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

Partition Partition::conjugate() const {
    std::vector<int> c;
    if (!parts_.empty()) {
        for (int j = 0; j < parts_[0]; ++j) {
            int h = 0;
            while (h < length() && parts_[static_cast<std::size_t>(h)] > j) ++h;
            c.push_back(h);
        }
    }
    return Partition(std::move(c));
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
    os << ')';
    return os.str();
}

std::strong_ordering Partition::operator<=>(const Partition& o) const {
    if (size_ != o.size_) return size_ <=> o.size_;
    // larger parts first
    for (std::size_t i = 0; i < std::min(parts_.size(), o.parts_.size()); ++i)
        if (parts_[i] != o.parts_[i]) return o.parts_[i] <=> parts_[i];
    return parts_.size() <=> o.parts_.size();
}

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int x : images_) {
        if (x < 0 || static_cast<std::size_t>(x) >= images_.size() || seen[static_cast<std::size_t>(x)])
            throw InvalidInput("Permutation: images do not form a bijection");
        seen[static_cast<std::size_t>(x)] = true;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::transposition(int n, int a, int b) {
    auto p = identity(n);
    std::swap(p.images_[static_cast<std::size_t>(a)], p.images_[static_cast<std::size_t>(b)]);
    return p;
}

Permutation Permutation::long_cycle(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) im[static_cast<std::size_t>(i)] = (i + 1) % n;
    return Permutation(std::move(im));
}

Permutation Permutation::operator*(const Permutation& other) const {
    if (degree() != other.degree()) throw InvalidInput("Permutation: degree mismatch in composition");
    std::vector<int> im(images_.size());
    for (std::size_t x = 0; x < im.size(); ++x) im[x] = images_[static_cast<std::size_t>(other.images_[x])];
    Permutation r;
    r.images_ = std::move(im);
    return r;
}

Permutation Permutation::inverse() const {
    std::vector<int> im(images_.size());
    for (std::size_t x = 0; x < im.size(); ++x) im[static_cast<std::size_t>(images_[x])] = static_cast<int>(x);
    Permutation r;
    r.images_ = std::move(im);
    return r;
}

bool Permutation::is_identity() const {
    for (std::size_t x = 0; x < images_.size(); ++x)
        if (images_[x] != static_cast<int>(x)) return false;
    return true;
}

int Permutation::cycle_count() const {
    std::vector<bool> seen(images_.size(), false);
    int cycles = 0;
    for (std::size_t s = 0; s < images_.size(); ++s) {
        if (seen[s]) continue;
        ++cycles;
        for (std::size_t x = s; !seen[x]; x = static_cast<std::size_t>(images_[x])) seen[x] = true;
    }
    return cycles;
}

Partition Permutation::cycle_type() const {
    std::vector<bool> seen(images_.size(), false);
    std::vector<int> lengths;
    for (std::size_t s = 0; s < images_.size(); ++s) {
        if (seen[s]) continue;
        int len = 0;
        for (std::size_t x = s; !seen[x]; x = static_cast<std::size_t>(images_[x])) {
            seen[x] = true;
            ++len;
        }
        lengths.push_back(len);
    }
    std::sort(lengths.rbegin(), lengths.rend());
    return Partition(std::move(lengths));
}

std::size_t Permutation::rank() const {
    std::size_t n = images_.size();
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j)
            if (images_[j] < images_[i]) ++smaller;
        r = r * (n - i) + smaller;
    }
    return r;
}

std::vector<int> Permutation::reduced_word() const {
    // Peel descents off the right: cur * s_i has one inversion fewer.
    std::vector<int> cur = images_;
    std::vector<int> right;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            if (cur[i] > cur[i + 1]) {
                std::swap(cur[i], cur[i + 1]);
                right.push_back(static_cast<int>(i));
                changed = true;
            }
        }
    }
    std::reverse(right.begin(), right.end());
    return right;
}

std::string Permutation::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < images_.size(); ++i) os << (i ? " " : "") << images_[i];
    os << ']';
    return os.str();
}

std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> out;
    std::vector<int> im(static_cast<std::size_t>(n));
    std::iota(im.begin(), im.end(), 0);
    do {
        out.emplace_back(im);
    } while (std::next_permutation(im.begin(), im.end()));
    return out;
}

// ---------------------------------------------------------------------------
// Partitions, dimensions, characters

namespace {

void partitions_rec(int remaining, int max_part, int max_len, std::vector<int>& cur, std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    if (static_cast<int>(cur.size()) == max_len) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(remaining - p, p, max_len, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Partition> enumerate_partitions(int n, int max_len) {
    if (n < 0 || max_len < 0) throw InvalidInput("enumerate_partitions: negative argument");
    std::vector<Partition> out;
    std::vector<int> cur;
    partitions_rec(n, n, max_len, cur, out);
    return out;
}

std::uint64_t irrep_dimension(const Partition& lambda) {
    // N! / prod hooks, accumulated exactly.
    Partition conj = lambda.conjugate();
    BigInt hooks = 1;
    for (int i = 0; i < lambda.length(); ++i)
        for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j)
            hooks *= (lambda[static_cast<std::size_t>(i)] - j) + (conj[static_cast<std::size_t>(j)] - i) - 1;
    BigInt dim = factorial(lambda.size()) / hooks;
    return dim.convert_to<std::uint64_t>();
}

namespace {

// Murnaghan-Nakayama on beta-sets. beta is strictly decreasing.
long mn_rec(std::vector<int> beta, const std::vector<int>& mu, std::size_t idx,
            std::map<std::pair<std::vector<int>, std::size_t>, long>& memo) {
    if (idx == mu.size()) return 1;
    auto key = std::make_pair(beta, idx);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int h = mu[idx];
    long total = 0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        int target = beta[i] - h;
        if (target < 0) continue;
        if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
        int between = 0;
        for (int b : beta)
            if (b > target && b < beta[i]) ++between;
        std::vector<int> next = beta;
        next[i] = target;
        std::sort(next.rbegin(), next.rend());
        long sub = mn_rec(std::move(next), mu, idx + 1, memo);
        total += (between % 2 ? -sub : sub);
    }
    memo.emplace(std::move(key), total);
    return total;
}

} // namespace

long character(const Partition& lambda, const Partition& cycle_type) {
    if (lambda.size() != cycle_type.size()) throw InvalidInput("character: partitions of different N");
    std::vector<int> beta;
    int len = lambda.length();
    for (int i = 0; i < len; ++i) beta.push_back(lambda[static_cast<std::size_t>(i)] + (len - 1 - i));
    std::map<std::pair<std::vector<int>, std::size_t>, long> memo;
    return mn_rec(beta, cycle_type.parts(), 0, memo);
}

BigInt centralizer_order(const Partition& cycle_type) {
    BigInt z = 1;
    std::map<int, int> mult;
    for (int p : cycle_type.parts()) ++mult[p];
    for (auto [k, m] : mult) z *= ipow(k, m) * factorial(m);
    return z;
}

BigInt gl_multiplicity(const Partition& lambda, long d) {
    if (lambda.length() > d) return 0;
    Partition conj = lambda.conjugate();
    Rational prod = 1;
    for (int i = 0; i < lambda.length(); ++i)
        for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j) {
            long hook = (lambda[static_cast<std::size_t>(i)] - j) + (conj[static_cast<std::size_t>(j)] - i) - 1;
            prod *= Rational(d + j - i, hook);
        }
    return boost::multiprecision::numerator(prod);
}

BigInt trivial_multiplicity(std::span<const Partition> tuple) {
    if (tuple.empty()) throw InvalidInput("trivial_multiplicity: empty tuple");
    int n = tuple[0].size();
    for (const auto& p : tuple)
        if (p.size() != n) throw InvalidInput("trivial_multiplicity: partitions of different N");
    Rational sum = 0;
    for (const auto& mu : enumerate_partitions(n, n)) {
        BigInt prod = 1;
        for (const auto& lam : tuple) prod *= character(lam, mu);
        sum += Rational(prod, centralizer_order(mu));
    }
    if (boost::multiprecision::denominator(sum) != 1) throw InternalError("trivial_multiplicity: non-integral result");
    return boost::multiprecision::numerator(sum);
}

// ---------------------------------------------------------------------------
// Irreducible matrices

namespace {

struct Tableaux {
    std::vector<std::vector<int>> rows;  // rows[t][entry]
    std::vector<std::vector<int>> cols;
    std::map<std::vector<int>, std::size_t> index;  // by rows
};

void tableaux_rec(const Partition& shape, std::vector<int>& fill, std::vector<int>& row_of, int next,
                  std::vector<std::vector<int>>& out) {
    if (next == shape.size()) {
        out.push_back(row_of);
        return;
    }
    for (int r = 0; r < shape.length(); ++r) {
        auto ur = static_cast<std::size_t>(r);
        if (fill[ur] >= shape[ur]) continue;
        if (r > 0 && fill[ur] >= fill[ur - 1]) continue;
        ++fill[ur];
        row_of[static_cast<std::size_t>(next)] = r;
        tableaux_rec(shape, fill, row_of, next + 1, out);
        --fill[ur];
    }
}

Tableaux build_tableaux(const Partition& shape) {
    std::vector<std::vector<int>> rows;
    std::vector<int> fill(static_cast<std::size_t>(shape.length()), 0);
    std::vector<int> row_of(static_cast<std::size_t>(shape.size()), 0);
    tableaux_rec(shape, fill, row_of, 0, rows);
    // last-letter order: compare the row of N-1 first, then N-2, ...
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    Tableaux t;
    t.rows = rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<int> col(rows[i].size());
        std::vector<int> fill2(static_cast<std::size_t>(shape.length()), 0);
        for (std::size_t e = 0; e < rows[i].size(); ++e) col[e] = fill2[static_cast<std::size_t>(rows[i][e])]++;
        t.cols.push_back(std::move(col));
        t.index.emplace(rows[i], i);
    }
    return t;
}

struct IrrepData {
    Tableaux tableaux;
    std::vector<Eigen::MatrixXd> orth_gens;  // s_k for k = 0..N-2
    std::vector<RationalMatrix> semi_gens;
    std::unique_ptr<std::vector<Eigen::MatrixXd>> orth_table;
    std::unique_ptr<std::vector<RationalMatrix>> semi_table;
};

std::mutex g_cache_mutex;
std::map<Partition, std::unique_ptr<IrrepData>> g_cache;

std::unique_ptr<IrrepData> build_irrep(const Partition& lambda) {
    auto data = std::make_unique<IrrepData>();
    data->tableaux = build_tableaux(lambda);
    const auto& tab = data->tableaux;
    std::size_t dim = tab.rows.size();
    int n = lambda.size();
    for (int k = 0; k + 1 < n; ++k) {
        Eigen::MatrixXd o = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        RationalMatrix s(dim, dim);
        auto uk = static_cast<std::size_t>(k);
        for (std::size_t t = 0; t < dim; ++t) {
            int rk = tab.rows[t][uk], rk1 = tab.rows[t][uk + 1];
            int ck = tab.cols[t][uk], ck1 = tab.cols[t][uk + 1];
            auto ti = static_cast<Eigen::Index>(t);
            if (rk == rk1) {
                o(ti, ti) = 1;
                s(t, t) = 1;
                continue;
            }
            if (ck == ck1) {
                o(ti, ti) = -1;
                s(t, t) = -1;
                continue;
            }
            int rho = (ck1 - rk1) - (ck - rk);
            std::vector<int> swapped = tab.rows[t];
            std::swap(swapped[uk], swapped[uk + 1]);
            std::size_t tp = tab.index.at(swapped);
            auto tpi = static_cast<Eigen::Index>(tp);
            double inv = 1.0 / rho;
            o(ti, ti) = inv;
            o(tpi, ti) = std::sqrt(1.0 - inv * inv);
            Rational rinv = Rational(1) / rho;
            s(t, t) = rinv;
            // k above k+1 in T: the entry towards the swapped tableau is 1.
            if (rk < rk1)
                s(tp, t) = 1;
            else
                s(tp, t) = 1 - rinv * rinv;
        }
        data->orth_gens.push_back(std::move(o));
        data->semi_gens.push_back(std::move(s));
    }
    return data;
}

IrrepData& irrep_data(const Partition& lambda) {
    std::lock_guard lock(g_cache_mutex);
    auto it = g_cache.find(lambda);
    if (it == g_cache.end()) it = g_cache.emplace(lambda, build_irrep(lambda)).first;
    return *it->second;
}

template <class Mat, class Gens>
std::vector<Mat> group_table(int n, const Gens& gens, const Mat& identity, const auto& mul) {
    std::size_t order = factorial(n).convert_to<std::size_t>();
    std::vector<Mat> table(order);
    std::vector<bool> done(order, false);
    std::queue<Permutation> q;
    auto id = Permutation::identity(n);
    table[id.rank()] = identity;
    done[id.rank()] = true;
    q.push(id);
    while (!q.empty()) {
        Permutation p = q.front();
        q.pop();
        for (int k = 0; k + 1 < n; ++k) {
            Permutation np = p * Permutation::transposition(n, k, k + 1);
            std::size_t r = np.rank();
            if (done[r]) continue;
            table[r] = mul(table[p.rank()], gens[static_cast<std::size_t>(k)]);
            done[r] = true;
            q.push(np);
        }
    }
    return table;
}

} // namespace

std::size_t IrrepMatrix::side() const {
    return form == IrrepForm::seminormal ? exact.rows() : static_cast<std::size_t>(real.rows());
}

const std::vector<std::vector<int>>& standard_tableaux(const Partition& lambda) {
    return irrep_data(lambda).tableaux.rows;
}

Eigen::MatrixXd orthogonal_matrix(const Partition& lambda, const Permutation& sigma) {
    if (sigma.degree() != lambda.size()) throw InvalidInput("irrep_matrix: permutation degree differs from |lambda|");
    const auto& data = irrep_data(lambda);
    auto dim = static_cast<Eigen::Index>(data.tableaux.rows.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    for (int k : sigma.reduced_word()) m = m * data.orth_gens[static_cast<std::size_t>(k)];
    return m;
}

RationalMatrix seminormal_matrix(const Partition& lambda, const Permutation& sigma) {
    if (sigma.degree() != lambda.size()) throw InvalidInput("irrep_matrix: permutation degree differs from |lambda|");
    const auto& data = irrep_data(lambda);
    RationalMatrix m = RationalMatrix::identity(data.tableaux.rows.size());
    for (int k : sigma.reduced_word()) m = m * data.semi_gens[static_cast<std::size_t>(k)];
    return m;
}

IrrepMatrix irrep_matrix(const Partition& lambda, const Permutation& sigma, IrrepForm form) {
    IrrepMatrix out{lambda, sigma, form, {}, {}};
    if (form == IrrepForm::seminormal)
        out.exact = seminormal_matrix(lambda, sigma);
    else
        out.real = orthogonal_matrix(lambda, sigma);
    return out;
}

const std::vector<Eigen::MatrixXd>& orthogonal_group_table(const Partition& lambda) {
    if (lambda.size() > 7) throw ResourceLimit("group tables are only materialised for N <= 7");
    auto& data = irrep_data(lambda);
    std::lock_guard lock(g_cache_mutex);
    if (!data.orth_table) {
        auto dim = static_cast<Eigen::Index>(data.tableaux.rows.size());
        data.orth_table = std::make_unique<std::vector<Eigen::MatrixXd>>(group_table<Eigen::MatrixXd>(
            lambda.size(), data.orth_gens, Eigen::MatrixXd::Identity(dim, dim),
            [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return Eigen::MatrixXd(a * b); }));
    }
    return *data.orth_table;
}

const std::vector<RationalMatrix>& seminormal_group_table(const Partition& lambda) {
    if (lambda.size() > 7) throw ResourceLimit("group tables are only materialised for N <= 7");
    auto& data = irrep_data(lambda);
    std::lock_guard lock(g_cache_mutex);
    if (!data.semi_table) {
        data.semi_table = std::make_unique<std::vector<RationalMatrix>>(group_table<RationalMatrix>(
            lambda.size(), data.semi_gens, RationalMatrix::identity(data.tableaux.rows.size()),
            [](const RationalMatrix& a, const RationalMatrix& b) { return a * b; }));
    }
    return *data.semi_table;
}

// ---------------------------------------------------------------------------
// Kronecker helpers

Eigen::MatrixXd kron(std::span<const Eigen::MatrixXd> factors) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Ones(1, 1);
    for (const auto& f : factors) {
        Eigen::MatrixXd next(r.rows() * f.rows(), r.cols() * f.cols());
        for (Eigen::Index i = 0; i < r.rows(); ++i)
            for (Eigen::Index j = 0; j < r.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = r(i, j) * f;
        r = std::move(next);
    }
    return r;
}

Eigen::VectorXd kron_apply(std::span<const Eigen::MatrixXd> factors, const Eigen::VectorXd& v) {
    Eigen::VectorXd cur = v;
    Eigen::Index total = cur.size();
    Eigen::Index outer = 1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& a = factors[i];
        Eigen::Index s = a.cols();
        Eigen::Index inner = total / (outer * s);
        Eigen::VectorXd next = Eigen::VectorXd::Zero(total);
        for (Eigen::Index o = 0; o < outer; ++o)
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                for (Eigen::Index c = 0; c < s; ++c) {
                    double coef = a(r, c);
                    if (coef == 0) continue;
                    next.segment((o * s + r) * inner, inner) += coef * cur.segment((o * s + c) * inner, inner);
                }
        cur = std::move(next);
        outer *= s;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Block projectors

namespace {

int check_tuple(std::span<const Partition> tuple) {
    if (tuple.empty()) throw InvalidInput("block_projector: empty tuple");
    int n = tuple[0].size();
    for (const auto& p : tuple)
        if (p.size() != n) throw InvalidInput("block_projector: partitions of different N");
    return n;
}

std::size_t tuple_side(std::span<const Partition> tuple) {
    std::size_t side = 1;
    for (const auto& p : tuple) side *= irrep_dimension(p);
    return side;
}

Eigen::MatrixXd averaged_operator(std::span<const Partition> tuple) {
    int n = tuple[0].size();
    std::vector<const std::vector<Eigen::MatrixXd>*> tables;
    for (const auto& p : tuple) tables.push_back(&orthogonal_group_table(p));
    std::size_t order = tables[0]->size();
    auto side = static_cast<Eigen::Index>(tuple_side(tuple));
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(side, side);
    std::vector<Eigen::MatrixXd> f(tuple.size());
    for (std::size_t g = 0; g < order; ++g) {
        for (std::size_t i = 0; i < tuple.size(); ++i) f[i] = (*tables[i])[g];
        sum += kron(f);
    }
    (void)n;
    return sum / static_cast<double>(order);
}

Eigen::MatrixXd kernel_basis(std::span<const Partition> tuple, std::size_t k) {
    int n = tuple[0].size();
    auto side = static_cast<Eigen::Index>(tuple_side(tuple));
    if (n == 1) return Eigen::MatrixXd::Identity(side, side);
    std::vector<Eigen::MatrixXd> fs, fc;
    auto s = Permutation::transposition(n, 0, 1);
    auto c = Permutation::long_cycle(n);
    for (const auto& p : tuple) {
        fs.push_back(orthogonal_matrix(p, s));
        fc.push_back(orthogonal_matrix(p, c));
    }
    Eigen::MatrixXd as = kron(fs), ac = kron(fc);
    // -(K + K^T) with K = A_s + A_c - 2; PSD, kernel = common fixed space.
    Eigen::MatrixXd m = 4.0 * Eigen::MatrixXd::Identity(side, side) - as - as.transpose() - ac - ac.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    std::size_t zero = 0;
    for (Eigen::Index i = 0; i < side; ++i)
        if (std::abs(eig.eigenvalues()(i)) < 1e-8) ++zero;
    if (zero != k)
        throw InternalError("block_projector: kernel dimension " + std::to_string(zero) +
                            " differs from character multiplicity " + std::to_string(k));
    return eig.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
}

std::optional<Eigen::MatrixXd> twirl_basis(std::span<const Partition> tuple, const Eigen::MatrixXd& avg,
                                           std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto side = avg.rows();
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::MatrixXd r(side, static_cast<Eigen::Index>(k));
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
        Eigen::MatrixXd b = avg * r;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        std::size_t rk = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-8 * std::max(1.0, sv(0))) ++rk;
        if (rk == k) return Eigen::MatrixXd(svd.matrixU().leftCols(static_cast<Eigen::Index>(k)));
    }
    (void)tuple;
    return std::nullopt;
}

} // namespace

BlockProjector block_projector(std::span<const Partition> tuple, const ProjectorOptions& opts) {
    int n = check_tuple(tuple);
    std::size_t side = tuple_side(tuple);
    if (side > opts.size_cap)
        throw ResourceLimit("block_projector: block side " + std::to_string(side) + " exceeds cap " +
                            std::to_string(opts.size_cap));
    BlockProjector out;
    out.tuple.assign(tuple.begin(), tuple.end());
    out.multiplicity = trivial_multiplicity(tuple).convert_to<std::size_t>();
    auto es = static_cast<Eigen::Index>(side);

    bool need_avg = opts.with_matrix || opts.method == BasisMethod::twirl || opts.cross_check;
    if (need_avg) {
        if (n > 7) throw ResourceLimit("block_projector: averaged operator needs N <= 7");
        out.matrix = averaged_operator(tuple);
    }
    if (out.multiplicity == 0) {
        out.basis = Eigen::MatrixXd::Zero(es, 0);
        return out;
    }

    std::optional<Eigen::MatrixXd> twirled;
    if (opts.method == BasisMethod::twirl || opts.cross_check)
        twirled = twirl_basis(tuple, out.matrix, out.multiplicity, opts.seed);
    if (opts.method == BasisMethod::twirl && twirled) {
        out.basis = *twirled;
    } else {
        out.basis = kernel_basis(tuple, out.multiplicity);
    }
    if (opts.cross_check) {
        if (!twirled) throw InternalError("block_projector: twirling never reached full rank");
        Eigen::MatrixXd k_basis = opts.method == BasisMethod::kernel ? out.basis : kernel_basis(tuple, out.multiplicity);
        Eigen::MatrixXd pk = k_basis * k_basis.transpose();
        Eigen::MatrixXd pt = (*twirled) * twirled->transpose();
        if ((pk - pt).norm() > 1e-10 || (pk - out.matrix).norm() > 1e-10)
            throw InternalError("block_projector: twirl and kernel bases span different spaces");
    }
    return out;
}

RationalMatrix exact_block_projector(std::span<const Partition> tuple, std::size_t size_cap) {
    check_tuple(tuple);
    std::size_t side = tuple_side(tuple);
    if (side > size_cap) throw ResourceLimit("exact_block_projector: block side exceeds cap");
    std::vector<const std::vector<RationalMatrix>*> tables;
    for (const auto& p : tuple) tables.push_back(&seminormal_group_table(p));
    std::size_t order = tables[0]->size();
    RationalMatrix sum(side, side);
    std::vector<RationalMatrix> f(tuple.size());
    for (std::size_t g = 0; g < order; ++g) {
        for (std::size_t i = 0; i < tuple.size(); ++i) f[i] = (*tables[i])[g];
        sum += kron(f);
    }
    sum *= Rational(1, static_cast<long>(order));
    return sum;
}

} // namespace qmarg::symgroup
