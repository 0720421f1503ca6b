// SPDX-License-Identifier: Apache-2.0
// Command-line front end: analyze, emit, run, prune, bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "apc/dsl.hpp"
#include "apc/engine.hpp"
#include "apc/guidance.hpp"
#include "apc/oracle.hpp"
#include "apc/qelim.hpp"
#include "apc/smt.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

enum Exit : int {
    exit_sat = 0,
    exit_parse = 1,
    exit_solver = 2,
    exit_caps = 3,
    exit_internal = 4,
    exit_unsat = 10,
    exit_unknown = 20,
};

std::string status_text(const apc::SolverVerdict& v) {
    return v.cancelled ? "cancelled" : apc::to_string(v.status);
}

int exit_code(const apc::SolverVerdict& v) {
    switch (v.status) {
    case apc::SolverStatus::Sat: return exit_sat;
    case apc::SolverStatus::Unsat: return exit_unsat;
    case apc::SolverStatus::Unknown:
    case apc::SolverStatus::Timeout: return exit_unknown;
    case apc::SolverStatus::Error: return exit_solver;
    }
    return exit_solver;
}

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

apc::Flowgraph load(const std::string& path, const std::string& target) {
    try {
        apc::Flowgraph fg = apc::parse_flowgraph(read_file(path));
        return target.empty() ? fg : fg.with_target(target);
    } catch (const apc::ParseError& e) {
        throw apc::ParseError(path + ":" + e.what(), e.line(), e.column());
    } catch (const apc::InvalidFlowgraph& e) {
        throw apc::ParseError(path + ": " + e.what(), 0, 0);
    }
}

std::string path_text(const apc::Path& p) {
    std::string s;
    for (const auto& n : p) {
        s += (s.empty() ? "" : " ") + n;
    }
    return s;
}

double seconds(std::chrono::duration<double> d) { return d.count(); }

json verdict_json(const apc::SolverVerdict& v) {
    json j{{"status", apc::to_string(v.status)},
           {"source", apc::to_string(v.source)},
           {"elapsed", seconds(v.elapsed)},
           {"cancelled", v.cancelled}};
    if (!v.diagnostics.empty()) {
        j["diagnostics"] = v.diagnostics;
    }
    return j;
}

json input_json(const apc::ConcreteInput& in) {
    json scalars = json::object();
    for (const auto& [n, v] : in.scalars) {
        scalars[n] = v;
    }
    json arrays = json::object();
    for (const auto& [n, a] : in.arrays) {
        json cells = json::array();
        for (const auto& [idx, v] : a.cells) {
            cells.push_back({{"index", idx}, {"value", v}});
        }
        arrays[n] = {{"default", a.default_value}, {"cells", cells}};
    }
    return {{"scalars", scalars}, {"arrays", arrays}};
}

struct Common {
    std::string target;
    apc::Int k = apc::default_k;
    std::string solver_cmd;
    double timeout = 60;
    std::size_t max_backbones = apc::default_backbone_cap;
    std::size_t step_bound = apc::default_step_bound;

    [[nodiscard]] apc::SolverConfig solver() const {
        apc::SolverConfig c = apc::SolverConfig::from_environment();
        if (!solver_cmd.empty()) {
            c.command = apc::SolverConfig::split_command(solver_cmd);
        }
        c.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
        return c;
    }
    [[nodiscard]] apc::EngineOptions engine() const {
        apc::EngineOptions o;
        o.max_backbones = max_backbones;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c, bool solving) {
    cmd->add_option("--target", c.target, "Override the target node");
    cmd->add_option("--k", c.k, "Instances per universal quantifier in the bounded query")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-backbones", c.max_backbones, "Abort when a flowgraph has more backbones")
        ->check(CLI::PositiveNumber);
    if (solving) {
        cmd->add_option("--solver-cmd", c.solver_cmd, "SMT-LIB2 solver command (default: $APC_SOLVER or z3)");
        cmd->add_option("--timeout", c.timeout, "Per-query solver timeout in seconds")->check(CLI::PositiveNumber);
    }
}

// ---------------------------------------------------------------- analyze

struct Analysis {
    std::string name;
    apc::Flowgraph fg;
    apc::Formula phi_hat;
    std::vector<apc::BackboneResult> results;
    std::chrono::duration<double> build_time{0};
};

Analysis analyze_file(const std::string& file, const Common& c) {
    apc::Flowgraph fg = load(file, c.target);
    apc::Engine engine(c.engine());
    const auto t0 = Clock::now();
    apc::Formula phi = engine.necessary_condition(fg);
    const auto t1 = Clock::now();
    return {fs::path(file).stem().string(), std::move(fg), std::move(phi), engine.last_results(), t1 - t0};
}

int cmd_analyze(const std::string& file, const Common& c, const std::string& emit_dir, const std::string& json_path,
                bool dump_backbones, bool quiet) {
    const Analysis a = analyze_file(file, c);
    if (dump_backbones) {
        for (const auto& r : a.results) {
            std::cout << path_text(r.backbone) << '\n';
        }
    }
    if (!emit_dir.empty()) {
        const fs::path dir(emit_dir);
        write_file(dir / "phi_hat.smt2", apc::emit_smtlib(a.phi_hat));
        write_file(dir / ("phi_hat_k" + std::to_string(c.k) + ".smt2"),
                   apc::emit_smtlib(apc::k_bound_transform(a.phi_hat, c.k)));
        std::cout << "wrote " << (dir / "phi_hat.smt2").string() << " and "
                  << (dir / ("phi_hat_k" + std::to_string(c.k) + ".smt2")).string() << '\n';
        return exit_sat;
    }
    const apc::GeneratedTest test = apc::generate_test(a.phi_hat, a.fg, c.solver(), c.k, c.step_bound);
    const apc::RaceOutcome& outcome = test.outcome;
    const apc::SolverVerdict& v = outcome.verdict;
    const int code = exit_code(v);

    json report{{"benchmark", a.name},
                {"file", file},
                {"target", a.fg.target()},
                {"k", c.k},
                {"backbones", a.results.size()},
                {"formula_sizes", {{"phi_hat", apc::formula_size(a.phi_hat)}, {"phi_hat_k", outcome.bounded_size}}},
                {"verdict", verdict_json(v)},
                {"queries", {{"quantified", verdict_json(outcome.quantified)},
                             {"k_bounded", verdict_json(outcome.bounded)}}},
                {"timings",
                 {{"build", seconds(a.build_time)},
                  {"transform", seconds(outcome.transform_time)},
                  {"solve_k_bounded", seconds(outcome.bounded.elapsed)},
                  {"solve_quantified", seconds(outcome.quantified.elapsed)}}},
                {"input", nullptr},
                {"input_reaches_target", nullptr},
                {"exit_code", code}};
    json per_backbone = json::array();
    for (const auto& r : a.results) {
        per_backbone.push_back({{"backbone", path_text(r.backbone)}, {"size", apc::formula_size(r.condition)}});
    }
    report["formula_sizes"]["per_backbone"] = per_backbone;

    std::cout << "benchmark   " << a.name << " (target " << a.fg.target() << ")\n"
              << "backbones   " << a.results.size() << '\n'
              << "|phi_hat|   " << apc::formula_size(a.phi_hat) << '\n';
    if (!quiet) {
        std::cout << "phi_hat     " << a.phi_hat.to_string() << '\n';
    }
    std::cout << std::fixed << std::setprecision(3) << "build       " << seconds(a.build_time) << " s\n"
              << "quantified  " << status_text(outcome.quantified) << " in "
              << seconds(outcome.quantified.elapsed) << " s\n"
              << "k-bounded   " << status_text(outcome.bounded) << " in "
              << seconds(outcome.transform_time) << " + " << seconds(outcome.bounded.elapsed) << " s (K = " << c.k
              << ")\n"
              << "verdict     " << apc::to_string(v.status) << " (" << apc::to_string(v.source) << ")\n";
    if (!v.diagnostics.empty() && !v.definitive()) {
        std::cout << "diagnostics " << v.diagnostics << '\n';
    }
    if (v.status == apc::SolverStatus::Unsat) {
        std::cout << "target " << a.fg.target() << " is unreachable\n";
    }
    if (test.input) {
        report["input"] = input_json(*test.input);
        report["input_reaches_target"] = test.trace->reached_target;
        if (test.bound) {
            report["input_scalar_bound"] = *test.bound;
            std::cout << "input taken from a model with scalars bounded by " << *test.bound << '\n';
        }
        std::cout << "input:\n"
                  << apc::format_input(*test.input)
                  << "input reaches target: " << (test.trace->reached_target ? "yes" : "no") << " ("
                  << test.trace->visited.size() - 1 << " steps)\n";
    }
    if (!json_path.empty()) {
        write_file(json_path, report.dump(2) + "\n");
    }
    if (v.solver_unavailable) {
        std::cerr << "error: solver unavailable: " << v.diagnostics << '\n';
    }
    return code;
}

// ---------------------------------------------------------------- emit

int cmd_emit(const std::string& file, const Common& c, const std::string& out_dir, bool smt) {
    const Analysis a = analyze_file(file, c);
    const apc::KBoundedFormula kb = apc::k_bound_transform(a.phi_hat, c.k);
    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        write_file(dir / "phi_hat.smt2", apc::emit_smtlib(a.phi_hat));
        write_file(dir / ("phi_hat_k" + std::to_string(c.k) + ".smt2"), apc::emit_smtlib(kb));
    }
    if (smt) {
        std::cout << apc::emit_smtlib(a.phi_hat);
        return exit_sat;
    }
    for (const auto& r : a.results) {
        std::cout << "backbone " << path_text(r.backbone) << "\n  condition " << r.condition.to_string() << '\n';
    }
    std::cout << "phi_hat " << a.phi_hat.to_string() << '\n'
              << "phi_hat_k" << c.k << " size " << apc::formula_size(kb.formula) << ", " << kb.freed.size()
              << " freed counters\n";
    return exit_sat;
}

// ---------------------------------------------------------------- run

int cmd_run(const std::string& file, const std::string& target, const std::string& input_file,
            std::size_t step_bound) {
    const apc::Flowgraph fg = load(file, target);
    const apc::ConcreteInput in = input_file.empty() ? apc::ConcreteInput{} : apc::parse_input(read_file(input_file));
    const apc::Trace t = apc::concrete_run(fg, in, step_bound);
    std::cout << "steps    " << t.visited.size() - 1 << '\n' << "path     ";
    const std::size_t shown = std::min<std::size_t>(t.visited.size(), 200);
    for (std::size_t i = 0; i < shown; ++i) {
        std::cout << (i ? " " : "") << t.visited[i];
    }
    std::cout << (shown < t.visited.size() ? " ..." : "") << '\n';
    for (const auto& [v, value] : t.final_store) {
        std::cout << "final    " << v << " = " << value << '\n';
    }
    for (const auto& [entry, counts] : t.iteration_counts) {
        for (const auto& [bb, n] : counts) {
            std::cout << "loop     " << entry << ": " << n << " x " << path_text(bb) << '\n';
        }
    }
    if (t.stuck) {
        std::cout << "stuck    " << t.stuck_reason << '\n';
    }
    std::cout << "reached  " << (t.reached_target ? "yes" : "no") << '\n';
    return t.reached_target ? exit_sat : exit_unsat;
}

// ---------------------------------------------------------------- prune

int cmd_prune(const std::string& file, const Common& c, const std::string& frontier_file, std::size_t workers) {
    const Analysis a = analyze_file(file, c);
    std::vector<apc::FrontierEntry> frontier;
    try {
        frontier = apc::parse_frontier(read_file(frontier_file), apc::Declarations::of(a.fg));
    } catch (const apc::ParseError& e) {
        throw apc::ParseError(frontier_file + ":" + e.what(), e.line(), e.column());
    }
    const apc::PruneResult r = apc::prune_frontier(frontier, a.phi_hat, c.solver(), c.k, workers);
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    bool unavailable = !r.verdicts.empty();
    for (const auto& v : r.verdicts) {
        unavailable = unavailable && v.solver_unavailable;
    }
    if (unavailable) {
        std::cerr << "error: solver unavailable: " << r.verdicts.front().diagnostics << '\n';
        return exit_solver;
    }
    for (const auto& e : r.kept) {
        std::cout << e.source << '\n';
    }
    return exit_sat;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const std::string& dir, const Common& c, const std::string& json_path) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".apc") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    json rows = json::array();
    std::cout << std::left << std::setw(20) << "benchmark" << std::right << std::setw(6) << "bb" << std::setw(9)
              << "|phi|" << std::setw(10) << "bld" << std::setw(21) << "trans + smt K" << std::setw(9) << ""
              << std::setw(10) << "smt phi" << std::setw(9) << "" << '\n';
    bool unavailable = true;
    for (const auto& f : files) {
        std::cout << std::left << std::setw(20) << f.stem().string() << std::flush;
        try {
            const Analysis a = analyze_file(f.string(), c);
            const auto o = apc::run_both(a.phi_hat, c.k, c.solver());
            unavailable = unavailable && o.quantified.solver_unavailable && o.bounded.solver_unavailable;
            std::ostringstream trans;
            trans << std::fixed << std::setprecision(3) << seconds(o.transform_time) << " + "
                  << seconds(o.bounded.elapsed);
            std::cout << std::right << std::fixed << std::setprecision(3) << std::setw(6) << a.results.size()
                      << std::setw(9) << apc::formula_size(a.phi_hat) << std::setw(10) << seconds(a.build_time)
                      << std::setw(21) << trans.str() << std::setw(9) << apc::to_string(o.bounded.status)
                      << std::setw(10) << seconds(o.quantified.elapsed) << std::setw(9)
                      << apc::to_string(o.quantified.status) << '\n';
            rows.push_back({{"benchmark", a.name},
                            {"backbones", a.results.size()},
                            {"phi_hat_size", apc::formula_size(a.phi_hat)},
                            {"phi_hat_k_size", o.bounded_size},
                            {"build", seconds(a.build_time)},
                            {"transform", seconds(o.transform_time)},
                            {"k_bounded", verdict_json(o.bounded)},
                            {"quantified", verdict_json(o.quantified)},
                            {"verdict", apc::to_string(o.verdict.status)}});
        } catch (const std::exception& e) {
            std::cout << "  failed: " << e.what() << '\n';
            rows.push_back({{"benchmark", f.stem().string()}, {"error", e.what()}});
        }
    }
    if (!json_path.empty()) {
        write_file(json_path, json{{"k", c.k}, {"timeout", c.timeout}, {"rows", rows}}.dump(2) + "\n");
    }
    return unavailable && !files.empty() ? exit_solver : exit_sat;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Necessary conditions for reaching a program location"};
    app.require_subcommand(1);

    Common common;
    std::string file;
    std::string emit_dir;
    std::string json_path;
    bool dump_backbones = false;
    bool quiet = false;

    auto* analyze = app.add_subcommand("analyze", "Build the necessary condition and decide it");
    analyze->add_option("file", file, "Flowgraph file")->required();
    add_common(analyze, common, true);
    analyze->add_option("--emit-smt", emit_dir, "Write phi_hat.smt2 and phi_hat_k<K>.smt2 here and stop");
    analyze->add_option("--json", json_path, "Write a JSON report");
    analyze->add_flag("--dump-backbones", dump_backbones, "Print one backbone per line");
    analyze->add_option("--step-bound", common.step_bound, "Step bound when replaying the extracted input");
    analyze->add_flag("--quiet", quiet, "Do not print the formula");

    std::string out_dir;
    bool smt = false;
    auto* emit = app.add_subcommand("emit", "Print the necessary condition");
    emit->add_option("file", file, "Flowgraph file")->required();
    add_common(emit, common, false);
    emit->add_option("--out", out_dir, "Also write phi_hat.smt2 and phi_hat_k<K>.smt2 here");
    emit->add_flag("--smt", smt, "Print SMT-LIB2 instead of the readable form");

    std::string input_file;
    auto* run = app.add_subcommand("run", "Execute the program on one concrete input");
    run->add_option("file", file, "Flowgraph file")->required();
    run->add_option("--target", common.target, "Override the target node");
    run->add_option("--input", input_file, "Input file (`n = 3`, `A[0] = 1`, `A default 0`)");
    run->add_option("--step-bound", common.step_bound, "Maximum number of steps");

    std::string frontier_file;
    std::size_t workers = 2;
    auto* prune = app.add_subcommand("prune", "Drop frontier entries inconsistent with the necessary condition");
    prune->add_option("file", file, "Flowgraph file")->required();
    prune->add_option("--frontier", frontier_file, "Frontier file, one `<node> ; <formula>` per line")->required();
    prune->add_option("--workers", workers, "Concurrent solver checks")->check(CLI::PositiveNumber);
    add_common(prune, common, true);

    std::string bench_dir = "benchmarks";
    auto* bench = app.add_subcommand("bench", "Run every .apc file of a directory and tabulate");
    bench->add_option("dir", bench_dir, "Benchmark directory");
    bench->add_option("--json", json_path, "Write the table as JSON");
    add_common(bench, common, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            return cmd_analyze(file, common, emit_dir, json_path, dump_backbones, quiet);
        }
        if (*emit) {
            return cmd_emit(file, common, out_dir, smt);
        }
        if (*run) {
            return cmd_run(file, common.target, input_file, common.step_bound);
        }
        if (*prune) {
            return cmd_prune(file, common, frontier_file, workers);
        }
        if (*bench) {
            return cmd_bench(bench_dir, common, json_path);
        }
    } catch (const apc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_parse;
    } catch (const apc::CapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_caps;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_parse;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_sat;
}
