// SPDX-License-Identifier: Apache-2.0
#include "apc/guidance.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include "apc/state.hpp"

namespace apc {

std::vector<FrontierEntry> parse_frontier(std::string_view text, const Declarations& decls) {
    std::vector<FrontierEntry> out;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line = 0;
    SymbolicState initial = SymbolicState::identity(decls.scalars);
    while (std::getline(is, raw)) {
        ++line;
        std::string l = raw.substr(0, raw.find('#'));
        if (l.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto semi = l.find(';');
        if (semi == std::string::npos) {
            throw ParseError("expected `<node> ; <formula>`", line, 1);
        }
        std::string node = l.substr(0, semi);
        node.erase(0, node.find_first_not_of(" \t"));
        node.erase(node.find_last_not_of(" \t") + 1);
        if (node.empty()) {
            throw ParseError("missing node name", line, 1);
        }
        Formula f;
        try {
            f = parse_formula(l.substr(semi + 1), decls);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line, e.column() + static_cast<int>(semi) + 1);
        }
        out.push_back({node, apply_state_vars(initial, f), raw});
    }
    return out;
}

PruneResult prune_frontier(const std::vector<FrontierEntry>& frontier, const Formula& phi_hat,
                           const SolverConfig& config, Int k, std::size_t workers) {
    std::vector<SolverVerdict> verdicts(frontier.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < frontier.size();) {
            try {
                verdicts[i] = race_check(frontier[i].condition && phi_hat, k, config).verdict;
            } catch (const std::exception& e) {
                verdicts[i].status = SolverStatus::Error;
                verdicts[i].diagnostics = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::max<std::size_t>(1, workers); ++w) {
            pool.emplace_back(work);
        }
    }
    PruneResult r;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (verdicts[i].status == SolverStatus::Error) {
            r.warnings.push_back("entry at " + frontier[i].location + " kept: solver error: " +
                                 verdicts[i].diagnostics);
        }
        if (verdicts[i].status != SolverStatus::Unsat) {
            r.kept.push_back(frontier[i]);
        }
    }
    r.verdicts = std::move(verdicts);
    return r;
}

ConcreteInput extract_input(const SolverVerdict& verdict, const Flowgraph& fg) {
    if (verdict.status != SolverStatus::Sat) {
        throw std::invalid_argument(std::string("cannot extract an input from a verdict that is ") +
                                    to_string(verdict.status));
    }
    ConcreteInput in;
    for (const auto& s : fg.scalars()) {
        in.scalars[s] = 0;
        if (verdict.model) {
            if (auto it = verdict.model->constants.find(smt_symbol(s)); it != verdict.model->constants.end()) {
                in.scalars[s] = it->second;
            }
        }
    }
    for (const auto& [a, _] : fg.arrays()) {
        in.arrays[a] = ArrayValue{};
        if (verdict.model) {
            if (auto it = verdict.model->functions.find(smt_symbol(a)); it != verdict.model->functions.end()) {
                in.arrays[a] = it->second;
            }
        }
    }
    return in;
}

GeneratedTest generate_test(const Formula& phi_hat, const Flowgraph& fg, const SolverConfig& config, Int k,
                            std::size_t step_bound, const std::vector<Int>& bounds) {
    GeneratedTest g{race_check(phi_hat, k, config), {}, {}, {}};
    if (g.outcome.verdict.status != SolverStatus::Sat) {
        return g;
    }
    g.input = extract_input(g.outcome.verdict, fg);
    g.trace = concrete_run(fg, *g.input, step_bound);
    if (g.trace->reached_target) {
        return g;
    }
    const std::set<std::string> symbols = symbols_of(phi_hat);
    for (Int b : bounds) {
        std::vector<Formula> parts{phi_hat};
        for (const auto& s : fg.scalars()) {
            if (symbols.contains(s)) {
                parts.push_back(Formula::cmp(CmpOp::Ge, Expr::symbol(s), Expr::integer(-b)));
                parts.push_back(Formula::cmp(CmpOp::Le, Expr::symbol(s), Expr::integer(b)));
            }
        }
        const SolverVerdict v = race_check(Formula::conj(std::move(parts)), k, config).verdict;
        if (v.status != SolverStatus::Sat) {
            continue;
        }
        ConcreteInput in = extract_input(v, fg);
        Trace t = concrete_run(fg, in, step_bound);
        if (t.reached_target) {
            g.input = std::move(in);
            g.trace = std::move(t);
            g.bound = b;
            break;
        }
    }
    return g;
}

}  // namespace apc
