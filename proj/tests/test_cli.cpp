#include <doctest.h>

#include "cli.hpp"
#include "qmarg/codes.hpp"
#include "qmarg/report.hpp"
#include "qmarg/solve.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using qmarg::report::json;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
    json result() const { return json::parse(out).at("result"); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = qmarg::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

} // namespace

TEST_CASE("ame verbs") {
    auto r = run({"ame", "check", "--n", "4", "--d", "2"});
    CHECK(r.code == 0);
    auto res = r.result();
    CHECK(res["verdict"] == "infeasible");
    CHECK(res["witness_value"]["exact"] == "-1/32");

    r = run({"ame", "check", "--n", "7", "--d", "2"});
    CHECK(r.result()["verdict"] == "inconclusive");

    r = run({"ame", "candidate", "--n", "4", "--d", "2", "--eigenvalues"});
    std::vector<std::string> p;
    auto cand = r.result();
    for (const auto& e : cand["p"]) p.push_back(e["exact"].get<std::string>());
    CHECK(p == std::vector<std::string>{"5/864", "0", "1/96", "0", "-1/32"});
    CHECK(!run({"ame", "candidate", "--n", "4", "--d", "2"}).result().contains("p"));

    r = run({"ame", "scan", "--n-range", "2:5", "--d-range", "2:3", "--jobs", "2", "--format", "tsv"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == qmarg::report::scan_tsv_header);
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 8);
    CHECK(r.err.find("scan: 8/8") != std::string::npos);
    CHECK(run({"--quiet", "ame", "scan", "--n-range", "2:3", "--d-range", "2"}).err.empty());

    r = run({"ame", "witness", "--n", "4", "--d", "2", "--copies", "2", "--exact"});
    CHECK(r.result()["verdict"] == "no_ame");
    CHECK(r.result()["exact_optimum"]["value"].get<double>() < -1e-6);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"ame", "check", "--n", "4"}).code == 2);
    CHECK(run({"ame", "check", "--n", "1", "--d", "2"}).code == 2);
    CHECK(run({"ame", "scan", "--n-range", "x:y", "--d-range", "2"}).code == 2);
    CHECK(run({"code", "check", "--n", "3", "--K", "0", "--m", "1", "--d", "2"}).code == 2);
    CHECK(run({"code", "verify", "--state", tmp("qmarg-missing-state"), "--n", "5", "--K", "2", "--m", "2", "--d", "2"})
              .code == 2);
    CHECK(run({"ame", "witness", "--n", "3", "--d", "2", "--copies", "9"}).code == 3);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("code verbs") {
    auto r = run({"code", "check", "--n", "4", "--K", "2", "--m", "2", "--d", "2", "--pure"});
    CHECK(r.code == 0);
    CHECK(r.result()["verdict"] == "infeasible");
    CHECK(r.result()["singleton_ok"] == false);

    r = run({"code", "check", "--n", "5", "--K", "2", "--m", "2", "--d", "2", "--pure", "--level", "ppt"});
    CHECK(r.result()["verdict"] == "feasible");

    auto path = tmp("qmarg-five-qubit.txt");
    {
        std::ofstream f(path);
        f << "# five-qubit code, slot 0 first\n";
        f.precision(17);
        auto q = qmarg::codes::five_qubit_code_state();
        for (Eigen::Index i = 0; i < q.size(); ++i) f << q(i).real() << ' ' << q(i).imag() << '\n';
    }
    r = run({"code", "verify", "--state", path, "--n", "5", "--K", "2", "--m", "2", "--d", "2"});
    CHECK(r.code == 0);
    CHECK(r.result()["passed"] == true);
    CHECK(r.result()["max_deviation"].get<double>() <= 1e-12);
    r = run({"code", "verify", "--state", path, "--n", "5", "--K", "2", "--m", "2", "--d", "3"});
    CHECK(r.code == 2);
    std::remove(path.c_str());
}

TEST_CASE("export is deterministic and seeds reproduce twirled bases") {
    auto a = tmp("qmarg-a.dat-s"), b = tmp("qmarg-b.dat-s"), c = tmp("qmarg-c.dat-s");
    CHECK(run({"hierarchy", "export", "--n", "4", "--d", "6", "--copies", "3", "--out", a}).code == 0);
    CHECK(run({"hierarchy", "export", "--n", "4", "--d", "6", "--copies", "3", "--out", b, "--jobs", "3"}).code == 0);
    CHECK(slurp(a) == slurp(b));
    auto parsed = qmarg::solve::read_sdpa(a);
    CHECK(qmarg::solve::write_sdpa(parsed) == slurp(a));

    std::vector<std::string> tw{"hierarchy", "export", "--n", "4", "--d", "2", "--copies", "3", "--basis", "twirl"};
    auto with = [&](std::vector<std::string> extra) {
        auto v = tw;
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    CHECK(run(with({"--seed", "7", "--out", a})).code == 0);
    CHECK(run(with({"--seed", "7", "--out", b})).code == 0);
    CHECK(run(with({"--seed", "8", "--out", c})).code == 0);
    CHECK(slurp(a) == slurp(b));

    // a different seed rotates the bases but not the optimum
    auto o7 = run({"ame", "witness", "--n", "4", "--d", "2", "--copies", "3", "--basis", "twirl", "--seed", "7"});
    auto o8 = run({"ame", "witness", "--n", "4", "--d", "2", "--copies", "3", "--basis", "twirl", "--seed", "8"});
    auto ok = run({"ame", "witness", "--n", "4", "--d", "2", "--copies", "3"});
    double v7 = o7.result()["optimum"], v8 = o8.result()["optimum"], vk = ok.result()["optimum"];
    CHECK(v7 == doctest::Approx(vk).epsilon(1e-6));
    CHECK(v8 == doctest::Approx(vk).epsilon(1e-6));
    for (const auto& p : {a, b, c}) std::remove(p.c_str());
}
