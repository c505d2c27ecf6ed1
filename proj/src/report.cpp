#include "qmarg/report.hpp"

#include "qmarg/error.hpp"

#include <cctype>
#include <sstream>

namespace qmarg {

Rational parse_fraction(const std::string& text) {
    auto bad = [&] { return InvalidInput("not a fraction: '" + text + "'"); };
    auto integer = [&](const std::string& s) {
        std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (i == s.size()) throw bad();
        for (std::size_t k = i; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw bad();
        return BigInt(s[0] == '+' ? s.substr(1) : s);
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(integer(text));
    BigInt num = integer(text.substr(0, slash));
    std::string dtext = text.substr(slash + 1);
    if (!dtext.empty() && (dtext[0] == '-' || dtext[0] == '+')) throw bad();
    BigInt den = integer(dtext);
    if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
    return Rational(num) / Rational(den);
}

namespace report {

json fraction(const Rational& q) { return {{"exact", to_fraction(q)}, {"value", to_double(q)}}; }

json fractions(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(fraction(q));
    return a;
}

json envelope(const std::string& command, json result) {
    return {{"schema", schema_id}, {"command", command}, {"result", std::move(result)}};
}

json to_json(const ame::FeasibilityReport& r) {
    json j{{"kind", "ame_check"}, {"n", r.n}, {"d", r.d}, {"verdict", ame::to_string(r.verdict)},
           {"witness_value", fraction(r.witness_value)}};
    j["violated"] = r.violated ? json(r.violated->to_string()) : json(nullptr);
    return j;
}

json to_json(const ame::AmeCandidate& c, bool eigenvalues) {
    json j{{"kind", "ame_candidate"}, {"n", c.n}, {"d", c.d}, {"r", c.r}, {"x", fractions(c.x)}};
    if (eigenvalues) {
        j["p"] = fractions(c.p);
        j["q"] = fractions(c.q);
    }
    return j;
}

json to_json(const hierarchy::Certificate& c) {
    json j{{"kind", "ame_witness"},
           {"n", c.n},
           {"d", c.d},
           {"copies", c.N},
           {"verdict", hierarchy::to_string(c.verdict)},
           {"optimum", c.optimum},
           {"within_tolerance", c.within_tolerance},
           {"w", c.w},
           {"message", c.message}};
    if (c.exact_optimum) {
        j["exact_optimum"] = fraction(*c.exact_optimum);
        j["exact_w"] = fractions(c.exact_w);
    }
    return j;
}

json to_json(const codes::CodeParams& p) {
    return {{"n", p.n}, {"K", p.K}, {"m", p.m}, {"d", p.d}, {"pure", p.pure}, {"label", p.label()}};
}

json to_json(const codes::CodeReport& r) {
    json j{{"kind", "code_check"},
           {"params", to_json(r.params)},
           {"level", codes::to_string(r.level)},
           {"verdict", codes::to_string(r.verdict)},
           {"singleton_ok", r.singleton_ok},
           {"reason", r.reason},
           {"free_parameters", r.free_parameters}};
    if (r.level == codes::Level::extension) {
        j["copies"] = r.copies;
        j["margin"] = r.margin;
    }
    if (!r.x.empty()) {
        j["x"] = fractions(r.x);
        j["y"] = fractions(r.y);
    }
    return j;
}

json to_json(const codes::VerifyReport& r) {
    json subsets = json::array();
    for (const auto& s : r.subsets) subsets.push_back({{"subset", s.subset}, {"deviation", s.deviation}});
    return {{"kind", "code_verify"},     {"params", to_json(r.params)}, {"max_deviation", r.max_deviation},
            {"tolerance", r.tolerance},  {"passed", r.passed},          {"subsets", subsets}};
}

std::string scan_tsv(const std::vector<ame::FeasibilityReport>& rows) {
    std::ostringstream os;
    os << scan_tsv_header << '\n';
    for (const auto& r : rows) {
        os << r.n << '\t' << r.d << '\t' << ame::to_string(r.verdict) << '\t' << (r.violated ? "yes" : "no") << '\t'
           << (r.violated ? r.violated->to_string() : "-") << '\t' << to_fraction(r.witness_value) << '\n';
    }
    return os.str();
}

} // namespace report
} // namespace qmarg
