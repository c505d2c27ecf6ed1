#include "qmarg/solve.hpp"

#include "qmarg/error.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace qmarg::solve {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string write_sdpa(const SdpProblem& sdp) {
    sdp.validate();
    std::ostringstream os;
    os << sdp.constraints() << '\n' << sdp.blocks.size() << '\n';
    for (std::size_t b = 0; b < sdp.blocks.size(); ++b)
        os << (b ? " " : "") << (sdp.blocks[b].diagonal ? -sdp.blocks[b].size : sdp.blocks[b].size);
    os << '\n';
    for (std::size_t i = 0; i < sdp.c.size(); ++i) os << (i ? " " : "") << num(sdp.c[i]);
    os << '\n';
    for (std::size_t k = 0; k < sdp.f.size(); ++k)
        for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
            std::map<std::pair<int, int>, double> merged;
            for (const auto& e : sdp.f[k][b]) merged[{e.i, e.j}] += e.value;
            for (const auto& [ij, v] : merged) {
                if (v == 0) continue;
                os << k << ' ' << b + 1 << ' ' << ij.first + 1 << ' ' << ij.second + 1 << ' ' << num(v) << '\n';
            }
        }
    return os.str();
}

void export_sdpa(const SdpProblem& sdp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_sdpa: cannot open " + path);
    out << write_sdpa(sdp);
    if (!out) throw std::runtime_error("export_sdpa: write failed for " + path);
}

SdpProblem parse_sdpa(const std::string& text) {
    std::istringstream lines(text);
    std::string line, cleaned;
    while (std::getline(lines, line)) {
        if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
        if (auto eq = line.find('='); eq != std::string::npos) line.erase(eq);  // "2 =mDIM"
        for (char ch : line) cleaned += (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ? ' ' : ch;
        cleaned += '\n';
    }
    std::istringstream in(cleaned);
    auto next_long = [&](const char* what) {
        long v;
        if (!(in >> v)) throw InvalidInput(std::string("parse_sdpa: expected ") + what);
        return v;
    };
    long m = next_long("constraint count");
    long nb = next_long("block count");
    if (m < 0 || nb < 0) throw InvalidInput("parse_sdpa: negative counts");
    std::vector<BlockSpec> blocks;
    for (long b = 0; b < nb; ++b) {
        long s = next_long("block size");
        if (s == 0) throw InvalidInput("parse_sdpa: zero block size");
        blocks.push_back({static_cast<int>(s < 0 ? -s : s), s < 0});
    }
    SdpProblem sdp;
    sdp.reset(static_cast<int>(m), blocks);
    for (long i = 0; i < m; ++i) {
        std::string tok;
        if (!(in >> tok)) throw InvalidInput("parse_sdpa: expected objective coefficient");
        sdp.c[static_cast<std::size_t>(i)] = std::stod(tok);
    }
    long k, b, i, j;
    std::string tok;
    while (in >> k) {
        if (!(in >> b >> i >> j >> tok)) throw InvalidInput("parse_sdpa: truncated entry line");
        if (k < 0 || k > m || b < 1 || b > nb) throw InvalidInput("parse_sdpa: entry index out of range");
        try {
            sdp.add(static_cast<int>(k), static_cast<int>(b - 1), static_cast<int>(i - 1), static_cast<int>(j - 1),
                    std::stod(tok));
        } catch (const std::logic_error& e) {
            throw InvalidInput(std::string("parse_sdpa: ") + e.what());
        }
    }
    if (!in.eof()) throw InvalidInput("parse_sdpa: unexpected token");
    return sdp;
}

SdpProblem read_sdpa(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_sdpa: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_sdpa(os.str());
}

SdpaSolution parse_sdpa_solution(const std::string& text) {
    SdpaSolution sol;
    auto value_after = [&](const std::string& key) -> std::optional<double> {
        auto pos = text.find(key);
        if (pos == std::string::npos) return std::nullopt;
        auto eq = text.find('=', pos);
        if (eq == std::string::npos) throw InvalidInput("parse_sdpa_solution: missing '=' after " + key);
        return std::stod(text.substr(eq + 1));
    };
    sol.primal_objective = value_after("objValPrimal");
    sol.dual_objective = value_after("objValDual");
    auto pos = text.find("xVec");
    if (pos != std::string::npos) {
        auto open = text.find('{', pos), close = text.find('}', pos);
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw InvalidInput("parse_sdpa_solution: malformed xVec");
        std::string body = text.substr(open + 1, close - open - 1);
        for (char& ch : body)
            if (ch == ',') ch = ' ';
        std::istringstream in(body);
        std::string tok;
        while (in >> tok) sol.x.push_back(std::stod(tok));
    }
    return sol;
}

} // namespace qmarg::solve
