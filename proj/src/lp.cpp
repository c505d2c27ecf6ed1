#include "qmarg/solve.hpp"

#include "qmarg/error.hpp"

namespace qmarg::solve {

std::size_t LinearProgram::add_variable(const Rational& cost, std::optional<Rational> lo, std::optional<Rational> hi) {
    objective.push_back(cost);
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    for (auto& r : rows) r.push_back(0);
    return objective.size() - 1;
}

void LinearProgram::add_row(std::vector<Rational> coefficients, Sense s, const Rational& b) {
    if (coefficients.size() != objective.size()) throw InvalidInput("LinearProgram: row length differs from variable count");
    rows.push_back(std::move(coefficients));
    sense.push_back(s);
    rhs.push_back(b);
}

std::string to_string(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

namespace {

struct Tableau {
    std::size_t m = 0, n = 0;  // rows, structural columns (rhs stored separately)
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    std::vector<std::size_t> basis;
    std::size_t pivots = 0;

    void pivot(std::size_t r, std::size_t col) {
        Rational inv = Rational(1) / a[r][col];
        for (auto& v : a[r]) v *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (std::size_t j = 0; j < n; ++j)
                if (a[r][j] != 0) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        basis[r] = col;
        ++pivots;
    }
};

enum class Phase { optimal, unbounded };

// Bland's rule: lowest-index entering column, lowest-index leaving variable on ties.
Phase run_simplex(Tableau& t, const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    for (;;) {
        std::optional<std::size_t> enter;
        for (std::size_t j = 0; j < t.n && !enter; ++j) {
            if (!allowed[j]) continue;
            Rational r = cost[j];
            for (std::size_t i = 0; i < t.m; ++i)
                if (t.a[i][j] != 0) r -= cost[t.basis[i]] * t.a[i][j];
            if (r < 0) enter = j;
        }
        if (!enter) return Phase::optimal;
        std::optional<std::size_t> leave;
        Rational best;
        for (std::size_t i = 0; i < t.m; ++i) {
            if (t.a[i][*enter] <= 0) continue;
            Rational ratio = t.b[i] / t.a[i][*enter];
            if (!leave || ratio < best || (ratio == best && t.basis[i] < t.basis[*leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (!leave) return Phase::unbounded;
        t.pivot(*leave, *enter);
    }
}

} // namespace

LpResult lp_solve_exact(const LinearProgram& lp) {
    std::size_t nv = lp.variables();
    if (lp.lower.size() != nv || lp.upper.size() != nv || lp.sense.size() != lp.rows.size() ||
        lp.rhs.size() != lp.rows.size())
        throw InvalidInput("lp_solve_exact: inconsistent dimensions");
    for (const auto& r : lp.rows)
        if (r.size() != nv) throw InvalidInput("lp_solve_exact: row length differs from variable count");

    // x_j = offset_j + sum (coef * standard variable), standard variables >= 0
    struct Map {
        Rational offset;
        std::vector<std::pair<std::size_t, Rational>> parts;
    };
    std::vector<Map> map(nv);
    std::size_t ns = 0;
    std::vector<std::pair<std::size_t, Rational>> upper_rows;  // x' <= bound
    for (std::size_t j = 0; j < nv; ++j) {
        const auto& lo = lp.lower[j];
        const auto& hi = lp.upper[j];
        if (lo && hi && *hi < *lo) {
            LpResult r;
            r.status = LpStatus::infeasible;
            return r;
        }
        if (lo) {
            map[j] = {*lo, {{ns, Rational(1)}}};
            if (hi) upper_rows.emplace_back(ns, *hi - *lo);
            ++ns;
        } else if (hi) {
            map[j] = {*hi, {{ns, Rational(-1)}}};
            ++ns;
        } else {
            map[j] = {0, {{ns, Rational(1)}, {ns + 1, Rational(-1)}}};
            ns += 2;
        }
    }

    struct Row {
        std::vector<Rational> coef;
        Sense s;
        Rational b;
    };
    std::vector<Row> rows;
    for (std::size_t k = 0; k < lp.rows.size(); ++k) {
        Row row{std::vector<Rational>(ns), lp.sense[k], lp.rhs[k]};
        for (std::size_t j = 0; j < nv; ++j) {
            const Rational& a = lp.rows[k][j];
            if (a == 0) continue;
            row.b -= a * map[j].offset;
            for (const auto& [col, c] : map[j].parts) row.coef[col] += a * c;
        }
        rows.push_back(std::move(row));
    }
    for (const auto& [col, bound] : upper_rows) {
        Row row{std::vector<Rational>(ns), Sense::le, bound};
        row.coef[col] = 1;
        rows.push_back(std::move(row));
    }

    std::size_t slacks = 0;
    for (const auto& r : rows)
        if (r.s != Sense::eq) ++slacks;
    std::size_t m = rows.size();
    std::size_t n_struct = ns + slacks;
    Tableau t;
    t.m = m;
    t.n = n_struct + m;  // artificials last
    t.a.assign(m, std::vector<Rational>(t.n));
    t.b.resize(m);
    t.basis.resize(m);
    std::size_t slack_col = ns;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ns; ++j) t.a[i][j] = rows[i].coef[j];
        if (rows[i].s == Sense::le) t.a[i][slack_col++] = 1;
        else if (rows[i].s == Sense::ge) t.a[i][slack_col++] = -1;
        t.b[i] = rows[i].b;
        if (t.b[i] < 0) {
            for (auto& v : t.a[i]) v = -v;
            t.b[i] = -t.b[i];
        }
        t.a[i][n_struct + i] = 1;
        t.basis[i] = n_struct + i;
    }

    std::vector<Rational> phase1(t.n);
    for (std::size_t i = 0; i < m; ++i) phase1[n_struct + i] = 1;
    std::vector<bool> all(t.n, true);
    run_simplex(t, phase1, all);
    Rational infeas = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] >= n_struct) infeas += t.b[i];
    LpResult result;
    if (infeas > 0) {
        result.status = LpStatus::infeasible;
        result.pivots = t.pivots;
        return result;
    }
    // drive zero-level artificials out; drop rows that are redundant
    for (std::size_t i = 0; i < t.m;) {
        if (t.basis[i] < n_struct) {
            ++i;
            continue;
        }
        std::optional<std::size_t> col;
        for (std::size_t j = 0; j < n_struct && !col; ++j)
            if (t.a[i][j] != 0) col = j;
        if (col) {
            t.pivot(i, *col);
            ++i;
        } else {
            t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
            t.b.erase(t.b.begin() + static_cast<std::ptrdiff_t>(i));
            t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            --t.m;
        }
    }

    std::vector<Rational> cost(t.n);
    for (std::size_t j = 0; j < nv; ++j) {
        for (const auto& [col, c] : map[j].parts) cost[col] += lp.objective[j] * c;
    }
    std::vector<bool> allowed(t.n, false);
    for (std::size_t j = 0; j < n_struct; ++j) allowed[j] = true;
    if (run_simplex(t, cost, allowed) == Phase::unbounded) {
        result.status = LpStatus::unbounded;
        result.pivots = t.pivots;
        return result;
    }
    std::vector<Rational> stdval(t.n);
    for (std::size_t i = 0; i < t.m; ++i) stdval[t.basis[i]] = t.b[i];
    result.status = LpStatus::optimal;
    result.point.resize(nv);
    result.value = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        Rational v = map[j].offset;
        for (const auto& [col, c] : map[j].parts) v += c * stdval[col];
        result.point[j] = v;
        result.value += lp.objective[j] * v;
    }
    result.pivots = t.pivots;
    return result;
}

} // namespace qmarg::solve
