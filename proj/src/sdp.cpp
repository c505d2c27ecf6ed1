#include "qmarg/solve.hpp"

#include "qmarg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qmarg::solve {

void SdpProblem::reset(int m, std::vector<BlockSpec> block_specs) {
    c.assign(static_cast<std::size_t>(m), 0.0);
    blocks = std::move(block_specs);
    f.assign(static_cast<std::size_t>(m + 1), std::vector<std::vector<SymEntry>>(blocks.size()));
}

void SdpProblem::add(int k, int b, int i, int j, double value) {
    if (k < 0 || k > constraints() || b < 0 || b >= static_cast<int>(blocks.size()))
        throw InvalidInput("SdpProblem::add: matrix or block index out of range");
    if (i > j) std::swap(i, j);
    const auto& spec = blocks[static_cast<std::size_t>(b)];
    if (i < 0 || j >= spec.size) throw InvalidInput("SdpProblem::add: entry outside its block");
    if (spec.diagonal && i != j) throw InvalidInput("SdpProblem::add: off-diagonal entry in a diagonal block");
    if (value == 0) return;
    f[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)].push_back({i, j, value});
}

Eigen::MatrixXd SdpProblem::dense(int k, int b) const {
    int s = blocks[static_cast<std::size_t>(b)].size;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s, s);
    for (const auto& e : f[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]) {
        m(e.i, e.j) += e.value;
        if (e.i != e.j) m(e.j, e.i) += e.value;
    }
    return m;
}

void SdpProblem::validate() const {
    if (f.size() != c.size() + 1) throw InvalidInput("SdpProblem: expected m+1 constraint matrices");
    for (const auto& fk : f) {
        if (fk.size() != blocks.size()) throw InvalidInput("SdpProblem: block count mismatch");
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (const auto& e : fk[b])
                if (e.i < 0 || e.j < e.i || e.j >= blocks[b].size || (blocks[b].diagonal && e.i != e.j))
                    throw InvalidInput("SdpProblem: entry outside its block");
    }
}

std::string to_string(SdpStatus s) {
    switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::primal_infeasible: return "primal_infeasible";
    case SdpStatus::dual_infeasible: return "dual_infeasible";
    case SdpStatus::max_iter: return "max_iter";
    }
    return "?";
}

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

double inner(const Blocks& a, const Blocks& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
    return s;
}

double norm(const Blocks& a) { return std::sqrt(inner(a, a)); }

// A constraint matrix kept only on the blocks where it is nonzero.
struct SparseBlocks {
    std::vector<std::pair<std::size_t, Eigen::MatrixXd>> parts;

    double dot(const Blocks& x) const {
        double s = 0;
        for (const auto& [b, m] : parts) s += m.cwiseProduct(x[b]).sum();
        return s;
    }
    void axpy(double alpha, Blocks& out) const {
        for (const auto& [b, m] : parts) out[b] += alpha * m;
    }
    double frob() const {
        double s = 0;
        for (const auto& [b, m] : parts) s += m.squaredNorm();
        return std::sqrt(s);
    }
};

// Largest step alpha with x + alpha d PSD, capped at one.
double max_step(const Blocks& x, const Blocks& d) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(x[k]);
        Eigen::MatrixXd linv_d = llt.matrixL().solve(d[k]);
        Eigen::MatrixXd core = llt.matrixL().solve(linv_d.transpose());
        core = 0.5 * (core + core.transpose());
        double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(core, Eigen::EigenvaluesOnly).eigenvalues()(0);
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

Blocks sym(Blocks a) {
    for (auto& m : a) m = 0.5 * (m + m.transpose()).eval();
    return a;
}

} // namespace

SdpResult sdp_solve(const SdpProblem& sdp, const SdpOptions& opts) {
    sdp.validate();
    for (const auto& b : sdp.blocks)
        if (static_cast<std::size_t>(b.size) > opts.block_cap)
            throw ResourceLimit("sdp_solve: block of side " + std::to_string(b.size) + " exceeds the cap");
    const std::size_t m = sdp.c.size();
    const std::size_t nb = sdp.blocks.size();

    // Standard form: min <C,X> s.t. <A_i,X> = b_i, X PSD; C = -F_0, A_i = F_i, b = c.
    Blocks cmat(nb);
    std::vector<SparseBlocks> a(m);
    for (std::size_t b = 0; b < nb; ++b) cmat[b] = -sdp.dense(0, static_cast<int>(b));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t b = 0; b < nb; ++b)
            if (!sdp.f[i + 1][b].empty()) a[i].parts.emplace_back(b, sdp.dense(static_cast<int>(i + 1), static_cast<int>(b)));
    Eigen::VectorXd bvec(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) bvec(static_cast<Eigen::Index>(i)) = sdp.c[i];

    double n_total = 0;
    for (const auto& b : sdp.blocks) n_total += b.size;
    double cnorm = norm(cmat), bnorm = bvec.norm();
    double amax = 0, ratio = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double an = a[i].frob();
        amax = std::max(amax, an);
        ratio = std::max(ratio, (1 + std::abs(sdp.c[i])) / (1 + an));
    }
    double xi = std::max({10.0, std::sqrt(n_total), n_total * ratio});
    double eta = std::max({10.0, std::sqrt(n_total), amax, cnorm});

    Blocks x(nb), s(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        int sz = sdp.blocks[b].size;
        x[b] = xi * Eigen::MatrixXd::Identity(sz, sz);
        s[b] = eta * Eigen::MatrixXd::Identity(sz, sz);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

    SdpResult res;
    if (n_total == 0) {
        res.status = m == 0 ? SdpStatus::optimal : SdpStatus::dual_infeasible;
        res.x.assign(m, 0.0);
        return res;
    }
    auto finish = [&](SdpStatus st) {
        res.status = st;
        res.x.resize(m);
        for (std::size_t i = 0; i < m; ++i) res.x[i] = -y(static_cast<Eigen::Index>(i));
        res.primal_objective = -bvec.dot(y);
        res.dual_objective = -inner(cmat, x);
        res.slack = s;
        res.dual = x;
        return res;
    };
    auto apply_a = [&](const Blocks& z) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) v(static_cast<Eigen::Index>(i)) = a[i].dot(z);
        return v;
    };
    auto apply_at = [&](const Eigen::VectorXd& v) {
        Blocks out(nb);
        for (std::size_t b = 0; b < nb; ++b) out[b] = Eigen::MatrixXd::Zero(x[b].rows(), x[b].cols());
        for (std::size_t i = 0; i < m; ++i) a[i].axpy(v(static_cast<Eigen::Index>(i)), out);
        return out;
    };

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        res.iterations = iter;
        Blocks sinv(nb);
        for (std::size_t b = 0; b < nb; ++b) sinv[b] = s[b].llt().solve(Eigen::MatrixXd::Identity(s[b].rows(), s[b].cols()));
        Eigen::VectorXd rp = bvec - apply_a(x);
        Blocks rd = apply_at(y);
        for (std::size_t b = 0; b < nb; ++b) rd[b] = cmat[b] - s[b] - rd[b];
        double mu = inner(x, s) / n_total;
        double pobj = inner(cmat, x), dobj = bvec.dot(y);
        res.primal_infeasibility = rp.norm() / (1 + bnorm);
        res.dual_infeasibility = norm(rd) / (1 + cnorm);
        res.gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
        if (opts.verbose) {
            std::ostringstream os;
            os << iter << " pobj " << pobj << " dobj " << dobj << " pinf " << res.primal_infeasibility << " dinf "
               << res.dual_infeasibility << " mu " << mu << '\n';
            res.diagnostics += os.str();
        }
        if (res.primal_infeasibility < opts.tol && res.dual_infeasibility < opts.tol && res.gap < opts.tol)
            return finish(SdpStatus::optimal);
        // improving rays
        if (-pobj > 1e8 * (1 + cnorm)) {
            double scale = -pobj;
            if (apply_a(x).norm() / scale < opts.tol * (1 + bnorm)) return finish(SdpStatus::primal_infeasible);
        }
        if (dobj > 1e8 * (1 + bnorm)) {
            Blocks aty = apply_at(y);
            for (std::size_t b = 0; b < nb; ++b) aty[b] += s[b];
            if (norm(aty) / dobj < opts.tol * (1 + cnorm)) return finish(SdpStatus::dual_infeasible);
        }

        // Schur complement M_ij = <A_i, X A_j S^-1>
        Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) {
            Blocks gj(nb);
            for (const auto& [b, mat] : a[j].parts) gj[b] = x[b] * mat * sinv[b];
            for (std::size_t i = 0; i <= j; ++i) {
                double v = 0;
                for (const auto& [b, mat] : a[i].parts)
                    if (gj[b].size() > 0) v += mat.cwiseProduct(gj[b]).sum();
                schur(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                schur(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
        if (ldlt.info() != Eigen::Success) {
            res.diagnostics += "Schur complement factorisation failed\n";
            return finish(SdpStatus::max_iter);
        }

        // Direction for target sigma*mu with second-order term q.
        auto direction = [&](double target, const Blocks* q, Blocks& dx, Eigen::VectorXd& dy, Blocks& ds) {
            Blocks tmp(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                tmp[b] = target * sinv[b] - x[b] - x[b] * rd[b] * sinv[b];
                if (q) tmp[b] -= (*q)[b] * sinv[b];
            }
            // A(X A^T dy S^-1) = rp - A(tmp)
            Eigen::VectorXd rhs = rp - apply_a(tmp);
            dy = ldlt.solve(rhs);
            ds = apply_at(dy);
            for (std::size_t b = 0; b < nb; ++b) ds[b] = rd[b] - ds[b];
            dx.resize(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                Eigen::MatrixXd r = target * Eigen::MatrixXd::Identity(x[b].rows(), x[b].cols()) - x[b] * s[b] -
                                    x[b] * ds[b];
                if (q) r -= (*q)[b];
                dx[b] = r * sinv[b];
            }
            dx = sym(std::move(dx));
        };

        Blocks dxa, dsa;
        Eigen::VectorXd dya;
        direction(0.0, nullptr, dxa, dya, dsa);
        double ap = std::min(1.0, max_step(x, dxa)), ad = std::min(1.0, max_step(s, dsa));
        Blocks xa = x, sa = s;
        for (std::size_t b = 0; b < nb; ++b) {
            xa[b] += ap * dxa[b];
            sa[b] += ad * dsa[b];
        }
        double mu_aff = inner(xa, sa) / n_total;
        double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
        Blocks q(nb);
        for (std::size_t b = 0; b < nb; ++b) q[b] = dxa[b] * dsa[b];

        Blocks dx, ds;
        Eigen::VectorXd dy;
        direction(sigma * mu, &q, dx, dy, ds);
        const double gamma = 0.95;
        ap = std::min(1.0, gamma * max_step(x, dx));
        ad = std::min(1.0, gamma * max_step(s, ds));
        for (std::size_t b = 0; b < nb; ++b) {
            x[b] += ap * dx[b];
            s[b] += ad * ds[b];
        }
        x = sym(std::move(x));
        s = sym(std::move(s));
        y += ad * dy;
    }
    res.diagnostics += "iteration limit reached\n";
    return finish(SdpStatus::max_iter);
}

} // namespace qmarg::solve
