// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the test binaries: corpus access, solver detection,
// random program generators and small reference oracles.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apc/dsl.hpp"
#include "apc/eval.hpp"
#include "apc/flowgraph.hpp"
#include "apc/paths.hpp"
#include "apc/smt.hpp"

namespace apc::testing {

inline std::filesystem::path source_dir() { return APC_SOURCE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Flowgraph corpus(const std::string& name) {
    return parse_flowgraph(read_text(source_dir() / "benchmarks" / (name + ".apc")));
}

inline const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names{"running_example", "hello",    "hw",        "hwm",           "matrir",
                                                "oneloop",         "twoloops", "windriver", "incompleteness"};
    return names;
}

inline SolverConfig solver_config() {
    SolverConfig c = SolverConfig::from_environment();
    c.timeout = std::chrono::seconds(60);
    return c;
}

/// True when the configured solver answers a trivial query.
inline bool solver_available() {
    static const bool ok = [] {
        SolverConfig c = solver_config();
        c.timeout = std::chrono::seconds(20);
        return check_sat(Formula::truth(true), c).status == SolverStatus::Sat;
    }();
    return ok;
}

#define APC_REQUIRE_SOLVER()                                          \
    do {                                                              \
        if (!::apc::testing::solver_available()) {                    \
            GTEST_SKIP() << "no SMT solver (set APC_SOLVER or install z3)"; \
        }                                                             \
    } while (0)

using Rng = std::mt19937_64;

inline Int uniform(Rng& rng, Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<Int>(v.size()) - 1))];
}

inline Expr var(const std::string& v) { return Expr::var(v); }
inline Expr lit(Int v) { return Expr::integer(v); }
inline Formula cmp(CmpOp op, Expr a, Expr b) { return Formula::cmp(op, std::move(a), std::move(b)); }

/// Node names that sort like their index.
inline NodeId node_name(int i) {
    std::string s = std::to_string(i);
    return "n" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

/// Random graph over one scalar `x`; start n00, target n<size-1>. Branching
/// nodes get complementary assumptions, others an increment.
inline Flowgraph random_graph(Rng& rng, int size) {
    std::vector<Edge> edges;
    for (int i = 0; i < size; ++i) {
        const int degree = static_cast<int>(uniform(rng, 0, 2));
        std::set<int> succ;
        while (static_cast<int>(succ.size()) < degree) {
            succ.insert(static_cast<int>(uniform(rng, 0, size - 1)));
        }
        const Formula g = cmp(CmpOp::Lt, var("x"), lit(uniform(rng, 0, 5)));
        bool first = true;
        for (int s : succ) {
            Instruction instr = degree == 1 ? Instruction{Assign{"x", var("x") + lit(1)}}
                                            : Instruction{Assume{first ? g : Formula::negation(g)}};
            edges.push_back({node_name(i), node_name(s), instr});
            first = false;
        }
    }
    std::vector<NodeId> all;
    for (int i = 0; i < size; ++i) {
        all.push_back(node_name(i));
    }
    return Flowgraph({"x"}, {}, std::move(edges), node_name(0), node_name(size - 1), all);
}

/// Reference: all simple start-target paths by plain recursion.
inline std::vector<Path> simple_paths(const Flowgraph& fg) {
    std::vector<Path> out;
    Path cur{fg.start()};
    std::function<void()> go = [&] {
        if (cur.back() == fg.target()) {
            out.push_back(cur);
            return;
        }
        for (const auto& e : fg.edges()) {
            if (e.from == cur.back() && std::find(cur.begin(), cur.end(), e.to) == cur.end()) {
                cur.push_back(e.to);
                go();
                cur.pop_back();
            }
        }
    };
    go();
    std::sort(out.begin(), out.end());
    return out;
}

/// Reference: nodes on some closed walk through `v` that avoids `banned`,
/// i.e. nodes u with recursive-search paths v ->+ u and u ->* v.
inline std::set<NodeId> cycle_nodes(const Flowgraph& fg, const NodeId& v, const std::set<NodeId>& banned) {
    std::function<bool(const NodeId&, const NodeId&, std::set<NodeId>&, bool)> reach =
        [&](const NodeId& from, const NodeId& to, std::set<NodeId>& seen, bool allow_empty) {
            if (allow_empty && from == to) {
                return true;
            }
            for (const auto& e : fg.edges()) {
                if (e.from != from || banned.contains(e.to)) {
                    continue;
                }
                if (e.to == to) {
                    return true;
                }
                if (seen.insert(e.to).second && reach(e.to, to, seen, false)) {
                    return true;
                }
            }
            return false;
        };
    std::set<NodeId> out;
    for (const auto& u : fg.nodes()) {
        if (banned.contains(u)) {
            continue;
        }
        std::set<NodeId> s1;
        std::set<NodeId> s2;
        if (reach(v, u, s1, false) && reach(u, v, s2, true)) {
            out.insert(u);
        }
    }
    if (!out.empty()) {
        out.insert(v);
    }
    return out;
}

/// Random linear expression over `vars`.
inline Expr random_linear(Rng& rng, const std::vector<std::string>& vars) {
    Expr e = lit(uniform(rng, -3, 3));
    const int terms = static_cast<int>(uniform(rng, 1, 2));
    for (int t = 0; t < terms; ++t) {
        e = e + lit(pick(rng, std::vector<Int>{-2, -1, 1, 1, 2})) * var(pick(rng, vars));
    }
    return e;
}

inline Formula random_test(Rng& rng, const std::vector<std::string>& vars) {
    static const std::vector<CmpOp> ops{CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
    return cmp(pick(rng, ops), random_linear(rng, vars), random_linear(rng, vars));
}

/// Random acyclic program over at most three scalars. Node i only has edges
/// to nodes j > i, so every path is a backbone.
inline Flowgraph random_loop_free(Rng& rng) {
    const std::vector<std::string> all{"x", "y", "z"};
    const std::vector<std::string> vars(all.begin(), all.begin() + uniform(rng, 1, 3));
    const int size = static_cast<int>(uniform(rng, 3, 7));
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < size; ++i) {
        const int j = static_cast<int>(uniform(rng, i + 1, size - 1));
        if (coin(rng, 0.4) && j + 1 < size) {
            const int j2 = static_cast<int>(uniform(rng, j + 1, size - 1));
            const Formula g = random_test(rng, vars);
            edges.push_back({node_name(i), node_name(j), Assume{g}});
            edges.push_back({node_name(i), node_name(j2), Assume{Formula::negation(g)}});
        } else if (coin(rng, 0.7)) {
            const std::string& v = pick(rng, vars);
            Expr rhs = coin(rng, 0.2) ? var(pick(rng, vars)) * var(pick(rng, vars)) : random_linear(rng, vars);
            edges.push_back({node_name(i), node_name(j), Assign{v, rhs}});
        } else {
            edges.push_back({node_name(i), node_name(j), Assume{random_test(rng, vars)}});
        }
    }
    std::vector<NodeId> nodes;
    for (int i = 0; i < size; ++i) {
        nodes.push_back(node_name(i));
    }
    return Flowgraph(vars, {}, std::move(edges), node_name(0), node_name(size - 1), nodes);
}

/// Random single-loop program over x, y, n and a 1-d array A:
///   s -> h, h -[g]-> b, h -[!g]-> x -[post]-> t, body from b back to h with
///   one or two paths of assignments.
inline Flowgraph random_single_loop(Rng& rng) {
    const std::vector<std::string> vars{"x", "y", "n"};
    auto guard = [&]() -> Formula {
        switch (uniform(rng, 0, 4)) {
        case 0: return cmp(CmpOp::Lt, var("x"), var("n"));
        case 1: return cmp(CmpOp::Ne, var("x"), var("n"));
        case 2: return cmp(CmpOp::Lt, var("x") + var("y"), lit(uniform(rng, 2, 8)));
        case 3: return cmp(CmpOp::Eq, Expr::array_read("A", {var("x")}), lit(1));
        default: return random_test(rng, vars);
        }
    };
    auto assignment = [&]() -> Assign {
        switch (uniform(rng, 0, 6)) {
        case 0: return {"x", var("x") + lit(uniform(rng, -2, 3))};
        case 1: return {"y", var("y") + lit(uniform(rng, -1, 2))};
        case 2: return {"y", var("y") + var("n")};
        case 3: return {"y", var("y") + var("x")};
        case 4: return {"y", lit(2) * var("y")};
        case 5: return {"x", lit(uniform(rng, 0, 3))};
        default: return {"y", var("y") + Expr::array_read("A", {var("x")})};
        }
    };
    std::vector<Edge> edges{{"s", "h", Assume{Formula::truth(true)}}};
    const Formula g = guard();
    edges.push_back({"h", "b", Assume{g}});
    edges.push_back({"h", "x", Assume{Formula::negation(g)}});
    edges.push_back({"x", "t", Assume{coin(rng) ? Formula::truth(true) : random_test(rng, vars)}});
    auto chain = [&](const std::string& from, const std::string& prefix, int len) {
        std::string cur = from;
        for (int i = 0; i < len; ++i) {
            const std::string next = i + 1 == len ? std::string("h") : prefix + std::to_string(i);
            edges.push_back({cur, next, assignment()});
            cur = next;
        }
    };
    if (coin(rng)) {
        chain("b", "p", static_cast<int>(uniform(rng, 1, 3)));
    } else {
        const Formula c = guard();
        edges.push_back({"b", "c", Assume{c}});
        edges.push_back({"b", "d", Assume{Formula::negation(c)}});
        chain("c", "p", static_cast<int>(uniform(rng, 1, 2)));
        chain("d", "q", static_cast<int>(uniform(rng, 1, 2)));
    }
    return Flowgraph(vars, {{"A", 1}}, std::move(edges), "s", "t");
}

/// Executes the edges of `path` on `val` (program variables in
/// `val.symbols`). False when an assumption fails or is undefined.
inline bool run_path(const Flowgraph& fg, const Path& path, Valuation& val) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Edge& e = fg.edge(path[i], path[i + 1]);
        if (const auto* a = std::get_if<Assign>(&e.instr)) {
            const auto v = eval_concrete(a->rhs, val);
            if (!v) {
                return false;
            }
            val.symbols[a->var] = *v;
        } else if (eval_concrete(std::get<Assume>(e.instr).cond, val) != std::optional<bool>(true)) {
            return false;
        }
    }
    return true;
}

/// Order-insensitive canonical text of a formula: children of ∧/∨ sorted.
inline std::string canonical_text(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<std::string> parts;
        for (const auto& c : f.children()) {
            parts.push_back(canonical_text(c));
        }
        std::sort(parts.begin(), parts.end());
        std::string s = f.kind() == FormulaKind::And ? "(and" : "(or";
        for (const auto& p : parts) {
            s += " " + p;
        }
        return s + ")";
    }
    case FormulaKind::Not: return "(not " + canonical_text(f.children()[0]) + ")";
    case FormulaKind::Implies:
        return "(=> " + canonical_text(f.children()[0]) + " " + canonical_text(f.children()[1]) + ")";
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        std::string s = f.kind() == FormulaKind::Forall ? "(forall [" : "(exists [";
        for (const auto& b : f.bound()) {
            s += " " + b.var.display() + ":" + b.lower.to_string() + ".." +
                 (b.upper ? b.upper->to_string() + (b.upper_inclusive ? "]" : ")") : "inf");
        }
        return s + " ] " + canonical_text(f.body()) + ")";
    }
    default: return f.to_string();
    }
}

}  // namespace apc::testing
