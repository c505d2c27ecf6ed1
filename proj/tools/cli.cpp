#include "cli.hpp"

#include "qmarg/ame.hpp"
#include "qmarg/codes.hpp"
#include "qmarg/error.hpp"
#include "qmarg/hierarchy.hpp"
#include "qmarg/report.hpp"
#include "qmarg/solve.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace qmarg::cli {

namespace {

using report::json;

ame::Range parse_range(const std::string& s) {
    auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            long v = std::stol(s);
            return {v, v};
        }
        return {std::stol(s.substr(0, colon)), std::stol(s.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw InvalidInput("bad range '" + s + "', expected lo:hi");
    }
}

Eigen::VectorXcd read_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open state file " + path);
    std::vector<std::complex<double>> amps;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double re = 0, im = 0;
        if (!(ls >> re)) {
            std::string rest;
            ls.clear();
            if (ls >> rest) throw InvalidInput("state file: cannot parse '" + line + "'");
            continue;
        }
        if (!(ls >> im)) im = 0;
        amps.emplace_back(re, im);
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
    return v;
}

symgroup::BasisMethod parse_basis(const std::string& s) {
    if (s == "kernel") return symgroup::BasisMethod::kernel;
    if (s == "twirl") return symgroup::BasisMethod::twirl;
    throw InvalidInput("unknown basis method '" + s + "'");
}

void emit(std::ostream& out, const std::string& command, json result) {
    out << report::envelope(command, std::move(result)).dump(2) << '\n';
}

struct Flags {
    int n = 0, m = 0, copies = 2;
    long d = 2, K = 1;
    unsigned jobs = 1;
    std::uint64_t seed = 0x5eed;
    std::string basis = "kernel";
    std::string n_range, d_range, format = "json", out_path, state_path, level = "ppt";
    bool eigenvalues = false, rank1_only = false, exact = false, pure = false, general = false, primal = false,
         quiet = false;
    double tol = 1e-10;
};

hierarchy::HierarchyOptions hierarchy_options(const Flags& f) {
    hierarchy::HierarchyOptions o;
    o.jobs = std::max(1u, f.jobs);
    o.basis = parse_basis(f.basis);
    o.seed = f.seed;
    return o;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pure-state marginal problems: AME states, hierarchies and codes", "qmarg"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_flag("--quiet", f.quiet, "No progress output");

    auto* ame_cmd = app.add_subcommand("ame", "AME(n,d) tools")->require_subcommand(1)->fallthrough();
    auto* check = ame_cmd->add_subcommand("check", "Exact positivity and PPT test of the two-copy candidate");
    check->add_option("--n", f.n)->required();
    check->add_option("--d", f.d)->required();

    auto* scan = ame_cmd->add_subcommand("scan", "check over ranges of n and d");
    scan->add_option("--n-range", f.n_range, "lo:hi")->required();
    scan->add_option("--d-range", f.d_range, "lo:hi")->required();
    scan->add_option("--jobs", f.jobs);
    scan->add_option("--format", f.format)->check(CLI::IsMember({"json", "tsv"}));

    auto* cand = ame_cmd->add_subcommand("candidate", "Coefficients of the two-copy candidate");
    cand->add_option("--n", f.n)->required();
    cand->add_option("--d", f.d)->required();
    cand->add_flag("--eigenvalues", f.eigenvalues, "Also print p and q");

    auto* wit = ame_cmd->add_subcommand("witness", "Dual witness at N copies");
    wit->add_option("--n", f.n)->required();
    wit->add_option("--d", f.d)->required();
    wit->add_option("--copies", f.copies)->required();
    wit->add_flag("--rank1-only", f.rank1_only, "Only the one-dimensional blocks (an LP)");
    wit->add_flag("--exact", f.exact, "Solve the rank-1 LP in exact arithmetic");
    wit->add_option("--jobs", f.jobs);
    wit->add_option("--basis", f.basis, "kernel or twirl");
    wit->add_option("--seed", f.seed, "Seed for twirled bases");

    auto* hier = app.add_subcommand("hierarchy", "Hierarchy export")->require_subcommand(1)->fallthrough();
    auto* exp = hier->add_subcommand("export", "Write the level-N SDP in SDPA sparse format");
    exp->add_option("--n", f.n)->required();
    exp->add_option("--d", f.d)->required();
    exp->add_option("--copies", f.copies)->required();
    exp->add_option("--out", f.out_path)->required();
    exp->add_flag("--primal", f.primal, "Export the primal feasibility problem instead of the dual witness");
    exp->add_option("--jobs", f.jobs);
    exp->add_option("--basis", f.basis, "kernel or twirl");
    exp->add_option("--seed", f.seed, "Seed for twirled bases");

    auto* code = app.add_subcommand("code", "Quantum code existence")->require_subcommand(1)->fallthrough();
    auto* ccheck = code->add_subcommand("check", "Relaxation test for ((n,K,m+1))_d");
    ccheck->add_option("--n", f.n)->required();
    ccheck->add_option("--K", f.K)->required();
    ccheck->add_option("--m", f.m)->required();
    ccheck->add_option("--d", f.d)->required();
    ccheck->add_flag("--pure", f.pure);
    ccheck->add_option("--level", f.level)->check(CLI::IsMember({"pos", "ppt", "extension"}));
    ccheck->add_option("--copies", f.copies, "Copies for --level extension");
    ccheck->add_option("--jobs", f.jobs);

    auto* verify = code->add_subcommand("verify", "Marginal deviations of an encoded state");
    verify->add_option("--state", f.state_path, "One amplitude per line: re [im]")->required();
    verify->add_option("--n", f.n)->required();
    verify->add_option("--K", f.K)->required();
    verify->add_option("--m", f.m)->required();
    verify->add_option("--d", f.d)->required();
    verify->add_flag("--general", f.general, "Compare with 1_K/K (x) rho_I instead of the maximally mixed state");
    verify->add_option("--tol", f.tol);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return invalid_input;
    }

    std::mutex progress_lock;  // scan workers report concurrently
    auto progress = [&](const std::string& msg) {
        if (f.quiet) return;
        std::lock_guard<std::mutex> hold(progress_lock);
        err << msg << std::endl;
    };

    try {
        if (*check) {
            emit(out, "ame check", report::to_json(ame::check_existence(f.n, f.d)));
        } else if (*scan) {
            auto nr = parse_range(f.n_range), dr = parse_range(f.d_range);
            auto rows = ame::scan(nr, dr, std::max(1u, f.jobs), [&](std::size_t done, std::size_t total) {
                progress("scan: " + std::to_string(done) + "/" + std::to_string(total));
            });
            if (f.format == "tsv") {
                out << report::scan_tsv(rows);
            } else {
                json a = json::array();
                for (const auto& r : rows) a.push_back(report::to_json(r));
                emit(out, "ame scan", {{"kind", "ame_scan"}, {"rows", a}});
            }
        } else if (*cand) {
            emit(out, "ame candidate", report::to_json(ame::make_candidate(f.n, f.d), f.eigenvalues));
        } else if (*wit) {
            auto opts = hierarchy_options(f);
            hierarchy::WitnessSolution sol;
            if (f.rank1_only || f.exact) {
                progress("witness: rank-1 LP for AME(" + std::to_string(f.n) + "," + std::to_string(f.d) + "), N = " +
                         std::to_string(f.copies));
                auto lp = hierarchy::assemble_witness_lp(f.n, f.d, f.copies);
                sol = hierarchy::solve_witness(lp);
            } else {
                progress("witness: assembling blocks");
                auto sdp = hierarchy::assemble_witness_sdp(f.n, f.d, f.copies, opts);
                progress("witness: solving " + std::to_string(sdp.blocks.size()) + " blocks");
                sol = hierarchy::solve_witness(sdp);
            }
            emit(out, "ame witness", report::to_json(hierarchy::certify(sol)));
        } else if (*exp) {
            auto opts = hierarchy_options(f);
            solve::SdpProblem problem;
            if (f.primal) {
                progress("export: assembling primal");
                problem = hierarchy::reduce_primal(hierarchy::assemble_primal(hierarchy::MarginalSpec::ame(f.n, f.d),
                                                                              f.copies, true, opts))
                              .problem;
            } else {
                progress("export: assembling dual witness");
                problem = hierarchy::assemble_witness_sdp(f.n, f.d, f.copies, opts).problem();
            }
            solve::export_sdpa(problem, f.out_path);
            emit(out, "hierarchy export",
                 {{"kind", "hierarchy_export"},
                  {"n", f.n},
                  {"d", f.d},
                  {"copies", f.copies},
                  {"problem", f.primal ? "primal" : "dual"},
                  {"path", f.out_path},
                  {"constraints", problem.constraints()},
                  {"blocks", problem.blocks.size()}});
        } else if (*ccheck) {
            codes::CodeParams p{f.n, f.K, f.m, f.d, f.pure};
            auto level = codes::parse_level(f.level);
            if (level == codes::Level::extension) progress("code: assembling the " + std::to_string(f.copies) + "-copy level");
            auto opts = hierarchy_options(f);
            emit(out, "code check", report::to_json(codes::check_code(p, level, f.copies, opts)));
        } else if (*verify) {
            codes::CodeParams p{f.n, f.K, f.m, f.d, !f.general};
            auto state = read_state(f.state_path);
            emit(out, "code verify", report::to_json(codes::verify_code_state(state, p, f.tol)));
        }
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << '\n';
        return invalid_input;
    } catch (const Unsupported& e) {
        err << "unsupported: " << e.what() << '\n';
        return invalid_input;
    } catch (const ResourceLimit& e) {
        err << "resource cap: " << e.what() << '\n';
        return resource_cap;
    } catch (const SolverError& e) {
        err << "solver: " << e.what() << '\n';
        return solver_failure;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal;
    }
    return ok;
}

} // namespace qmarg::cli
