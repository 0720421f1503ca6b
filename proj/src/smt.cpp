// SPDX-License-Identifier: Apache-2.0
#include "apc/smt.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "apc/process.hpp"

namespace apc {

const char* to_string(SolverStatus s) {
    switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::Error: return "error";
    }
    return "error";
}

const char* to_string(QuerySource s) { return s == QuerySource::Quantified ? "quantified" : "k-bounded"; }

std::string smt_symbol(const std::string& program_name) { return program_name; }

namespace {

void emit_int(std::ostream& os, Int v) {
    if (v < 0) {
        // the magnitude of INT64_MIN does not fit; spell it as (- (- a) 1)
        if (v == std::numeric_limits<Int>::min()) {
            os << "(- (- " << std::numeric_limits<Int>::max() << ") 1)";
        } else {
            os << "(- " << -v << ')';
        }
    } else {
        os << v;
    }
}

void emit_expr(std::ostream& os, const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Int: emit_int(os, e.value()); return;
    case ExprKind::Star: throw std::invalid_argument("cannot emit a formula containing ★");
    case ExprKind::Symbol:
    case ExprKind::Var: os << '|' << smt_symbol(e.name()) << '|'; return;
    case ExprKind::Counter: os << '|' << e.counter_value().smt_name() << '|'; return;
    case ExprKind::Apply:
    case ExprKind::ArrayRead: os << "(|" << smt_symbol(e.name()) << '|'; break;
    case ExprKind::Add: os << "(+"; break;
    case ExprKind::Mul: os << "(*"; break;
    case ExprKind::Div: os << "(div"; break;
    case ExprKind::Mod: os << "(mod"; break;
    }
    for (const auto& a : e.args()) {
        os << ' ';
        emit_expr(os, a);
    }
    os << ')';
}

void emit_bound_decls(std::ostream& os, const std::vector<BoundVar>& vars) {
    os << '(';
    for (std::size_t i = 0; i < vars.size(); ++i) {
        os << (i ? " " : "") << "(|" << vars[i].var.smt_name() << "| Int)";
    }
    os << ')';
}

void emit_range(std::ostream& os, const BoundVar& b) {
    const std::string x = "|" + b.var.smt_name() + "|";
    os << "(<= ";
    emit_expr(os, b.lower);
    os << ' ' << x << ')';
    if (b.upper) {
        os << " (" << (b.upper_inclusive ? "<=" : "<") << ' ' << x << ' ';
        emit_expr(os, *b.upper);
        os << ')';
    }
}

void emit_formula(std::ostream& os, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::Cmp: {
        static const char* ops[] = {"=", "distinct", "<", "<=", ">", ">="};
        os << '(' << ops[static_cast<int>(f.op())] << ' ';
        emit_expr(os, f.lhs());
        os << ' ';
        emit_expr(os, f.rhs());
        os << ')';
        return;
    }
    case FormulaKind::Not: os << "(not "; break;
    case FormulaKind::And: os << "(and "; break;
    case FormulaKind::Or: os << "(or "; break;
    case FormulaKind::Implies: os << "(=> "; break;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        const bool all = f.kind() == FormulaKind::Forall;
        os << (all ? "(forall " : "(exists ");
        emit_bound_decls(os, f.bound());
        os << (all ? " (=> (and " : " (and ");
        for (std::size_t i = 0; i < f.bound().size(); ++i) {
            os << (i ? " " : "");
            emit_range(os, f.bound()[i]);
        }
        os << (all ? ") " : " ");
        emit_formula(os, f.body());
        os << "))";
        return;
    }
    }
    for (std::size_t i = 0; i < f.children().size(); ++i) {
        os << (i ? " " : "");
        emit_formula(os, f.children()[i]);
    }
    os << ')';
}

}  // namespace

std::string smt_logic(const Formula& phi) {
    std::string logic = has_quantifiers(phi) ? "" : "QF_";
    logic += "UF";
    logic += is_nonlinear(phi) ? "NIA" : "LIA";
    return logic;
}

std::string emit_smtlib(const Formula& phi) {
    if (contains_star(phi)) {
        throw std::invalid_argument("cannot emit a formula containing ★");
    }
    std::map<std::string, std::string> decls;
    for (const auto& s : symbols_of(phi)) {
        decls.emplace(smt_symbol(s), "(declare-fun |" + smt_symbol(s) + "| () Int)");
    }
    for (const auto& c : free_counters(phi)) {
        decls.emplace(c.smt_name(), "(declare-fun |" + c.smt_name() + "| () Int)");
    }
    for (const auto& [name, arity] : functions_of(phi)) {
        std::string sig;
        for (std::size_t i = 0; i < arity; ++i) {
            sig += i ? " Int" : "Int";
        }
        decls.emplace(smt_symbol(name), "(declare-fun |" + smt_symbol(name) + "| (" + sig + ") Int)");
    }
    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    os << "(set-logic " << smt_logic(phi) << ")\n";
    for (const auto& [_, d] : decls) {
        os << d << '\n';
    }
    os << "(assert ";
    emit_formula(os, phi);
    os << ")\n(check-sat)\n(get-model)\n";
    return os.str();
}

std::string emit_smtlib(const KBoundedFormula& phi) { return emit_smtlib(phi.formula); }

// ---------------------------------------------------------------- models

namespace {

struct Definition {
    std::vector<std::string> params;
    SExpr body;
};

std::optional<Int> parse_int_atom(const SExpr& e) {
    if (e.is_list || e.quoted || e.atom.empty()) {
        return std::nullopt;
    }
    Int v = 0;
    auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), v);
    if (ec != std::errc() || p != e.atom.data() + e.atom.size()) {
        return std::nullopt;
    }
    return v;
}

class ModelEvaluator {
public:
    explicit ModelEvaluator(const std::map<std::string, Definition>& defs) : defs_(defs) {}

    Int call(const std::string& name, const std::vector<Int>& args, int depth = 0) {
        const auto it = defs_.find(name);
        if (it == defs_.end()) {
            throw SExprError("model refers to unknown function '" + name + "'");
        }
        if (it->second.params.size() != args.size()) {
            throw SExprError("arity mismatch calling '" + name + "'");
        }
        if (depth > 64) {
            throw SExprError("model definitions nest too deeply");
        }
        std::vector<std::pair<std::string, Int>> env;
        for (std::size_t i = 0; i < args.size(); ++i) {
            env.emplace_back(it->second.params[i], args[i]);
        }
        return eval(it->second.body, env, depth);
    }

private:
    Int eval(const SExpr& e, std::vector<std::pair<std::string, Int>>& env, int depth) {
        if (!e.is_list) {
            if (auto v = parse_int_atom(e)) {
                return *v;
            }
            if (e.is_atom("true")) {
                return 1;
            }
            if (e.is_atom("false")) {
                return 0;
            }
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                if (it->first == e.atom) {
                    return it->second;
                }
            }
            return call(e.atom, {}, depth + 1);
        }
        if (e.items.empty()) {
            throw SExprError("empty application in model");
        }
        const SExpr& head = e.items[0];
        const std::string op = head.is_list ? "" : head.atom;
        const std::size_t n = e.items.size() - 1;
        auto arg = [&](std::size_t i) { return eval(e.items[i + 1], env, depth); };
        if (!head.quoted) {
            if (op == "let") {
                const std::size_t mark = env.size();
                std::vector<std::pair<std::string, Int>> bound;
                for (const auto& b : e.items.at(1).items) {
                    bound.emplace_back(b.items.at(0).atom, eval(b.items.at(1), env, depth));
                }
                env.insert(env.end(), bound.begin(), bound.end());
                const Int v = eval(e.items.at(2), env, depth);
                env.resize(mark);
                return v;
            }
            if (op == "ite") {
                return arg(0) != 0 ? arg(1) : arg(2);
            }
            if (op == "and" || op == "or") {
                const bool is_and = op == "and";
                for (std::size_t i = 0; i < n; ++i) {
                    if ((arg(i) != 0) != is_and) {
                        return is_and ? 0 : 1;
                    }
                }
                return is_and ? 1 : 0;
            }
            if (op == "not") {
                return arg(0) == 0 ? 1 : 0;
            }
            if (op == "=>") {
                return (arg(0) == 0 || arg(1) != 0) ? 1 : 0;
            }
            if (op == "=" || op == "distinct" || op == "<" || op == "<=" || op == ">" || op == ">=") {
                const Int a = arg(0);
                const Int b = arg(1);
                if (op == "=") return a == b;
                if (op == "distinct") return a != b;
                if (op == "<") return a < b;
                if (op == "<=") return a <= b;
                if (op == ">") return a > b;
                return a >= b;
            }
            if (op == "+" || op == "*") {
                Int acc = op == "+" ? 0 : 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc = op == "+" ? checked_add(acc, arg(i)) : checked_mul(acc, arg(i));
                }
                return acc;
            }
            if (op == "-") {
                if (n == 1) {
                    return checked_mul(-1, arg(0));
                }
                Int acc = arg(0);
                for (std::size_t i = 1; i < n; ++i) {
                    acc = checked_add(acc, checked_mul(-1, arg(i)));
                }
                return acc;
            }
            if (op == "div" || op == "mod") {
                auto r = op == "div" ? euclid_div(arg(0), arg(1)) : euclid_mod(arg(0), arg(1));
                if (!r) {
                    throw SExprError("division by zero in model");
                }
                return *r;
            }
            if (op == "abs") {
                const Int a = arg(0);
                return a < 0 ? checked_mul(-1, a) : a;
            }
        }
        std::vector<Int> args;
        for (std::size_t i = 0; i < n; ++i) {
            args.push_back(arg(i));
        }
        return call(op, args, depth + 1);
    }

    const std::map<std::string, Definition>& defs_;
};

void collect_literals(const SExpr& e, std::set<Int>& out) {
    if (!e.is_list) {
        if (auto v = parse_int_atom(e)) {
            out.insert(*v);
        }
        return;
    }
    if (e.items.size() == 2 && e.items[0].is_atom("-")) {
        if (auto v = parse_int_atom(e.items[1])) {
            out.insert(-*v);
            return;
        }
    }
    for (const auto& c : e.items) {
        collect_literals(c, out);
    }
}

constexpr std::size_t max_model_cells = std::size_t{1} << 16;

std::vector<std::vector<Int>> grid(const std::vector<std::vector<Int>>& axes) {
    std::vector<std::vector<Int>> points{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<Int>> next;
        for (const auto& p : points) {
            for (Int v : axis) {
                if (next.size() >= max_model_cells) {
                    break;
                }
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

}  // namespace

Model parse_model(const SExpr& model) {
    std::map<std::string, Definition> defs;
    for (const auto& item : model.items) {
        if (!item.is_list || item.items.size() != 5 || !item.items[0].is_atom("define-fun")) {
            continue;
        }
        Definition d;
        for (const auto& p : item.items[2].items) {
            if (p.is_list && !p.items.empty()) {
                d.params.push_back(p.items[0].atom);
            }
        }
        d.body = item.items[4];
        defs.emplace(item.items[1].atom, std::move(d));
    }
    ModelEvaluator ev(defs);
    Model m;
    for (const auto& [name, d] : defs) {
        if (d.params.empty()) {
            try {
                m.constants[name] = ev.call(name, {});
            } catch (const std::exception&) {
                // non-integer constants (e.g. solver internals) are skipped
            }
        }
    }
    std::set<Int> scalar_values{0};
    for (const auto& [name, v] : m.constants) {
        if (v > -1024 && v < 1024) {
            scalar_values.insert(v);
        }
    }
    for (const auto& [name, d] : defs) {
        if (d.params.empty()) {
            continue;
        }
        std::set<Int> lits = scalar_values;
        collect_literals(d.body, lits);
        for (const auto& [other, od] : defs) {
            if (other != name && !od.params.empty()) {
                collect_literals(od.body, lits);
            }
        }
        const Int lo = *lits.begin() - 1;
        const Int hi = *lits.rbegin() + 1;
        std::vector<Int> axis;
        double cells = 1;
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            cells *= static_cast<double>(hi - lo + 1);
        }
        if (cells <= static_cast<double>(max_model_cells)) {
            for (Int v = lo; v <= hi; ++v) {
                axis.push_back(v);
            }
        } else {
            std::set<Int> pts;
            for (Int l : lits) {
                pts.insert({l - 1, l, l + 1});
            }
            axis.assign(pts.begin(), pts.end());
        }
        std::map<std::vector<Int>, Int> values;
        std::map<Int, std::size_t> freq;
        for (const auto& p : grid(std::vector<std::vector<Int>>(d.params.size(), axis))) {
            try {
                const Int v = ev.call(name, p);
                values.emplace(p, v);
                ++freq[v];
            } catch (const std::exception&) {
            }
        }
        ArrayValue arr;
        std::size_t best = 0;
        for (const auto& [v, count] : freq) {
            if (count > best) {
                best = count;
                arr.default_value = v;
            }
        }
        for (const auto& [p, v] : values) {
            if (v != arr.default_value) {
                arr.cells.emplace(p, v);
            }
        }
        m.functions.emplace(name, std::move(arr));
    }
    return m;
}

// ---------------------------------------------------------------- solving

std::vector<std::string> SolverConfig::split_command(const std::string& cmd) {
    std::vector<std::string> out;
    std::istringstream is(cmd);
    std::string word;
    while (is >> word) {
        out.push_back(word);
    }
    return out;
}

SolverConfig SolverConfig::from_environment() {
    SolverConfig c;
    if (const char* env = std::getenv("APC_SOLVER"); env != nullptr && *env != '\0') {
        c.command = split_command(env);
    }
    return c;
}

SolverVerdict parse_solver_output(const std::string& out) {
    SolverVerdict v;
    v.status = SolverStatus::Error;
    std::vector<SExpr> items;
    try {
        items = parse_sexprs(out);
    } catch (const SExprError& e) {
        v.diagnostics = std::string("unreadable solver output: ") + e.what();
        // the status line alone may still be usable
        std::istringstream is(out);
        std::string first;
        is >> first;
        items.clear();
        if (!first.empty()) {
            SExpr a;
            a.atom = first;
            items.push_back(a);
        }
    }
    std::size_t i = 0;
    for (; i < items.size(); ++i) {
        const SExpr& s = items[i];
        if (s.is_atom("sat") || s.is_atom("unsat") || s.is_atom("unknown")) {
            v.status = s.atom == "sat" ? SolverStatus::Sat : s.atom == "unsat" ? SolverStatus::Unsat
                                                                                : SolverStatus::Unknown;
            break;
        }
        if (s.is_list && !s.items.empty() && s.items[0].is_atom("error")) {
            v.diagnostics += s.to_string() + "\n";
        }
    }
    if (v.status == SolverStatus::Error) {
        if (v.diagnostics.empty()) {
            v.diagnostics = "no status in solver output";
        }
        return v;
    }
    if (v.status != SolverStatus::Sat) {
        return v;
    }
    for (++i; i < items.size(); ++i) {
        const SExpr& s = items[i];
        if (!s.is_list) {
            continue;
        }
        SExpr body = s;
        if (!body.items.empty() && body.items[0].is_atom("model")) {
            body.items.erase(body.items.begin());
        }
        if (body.items.empty() || (body.items[0].is_list && !body.items[0].items.empty() &&
                                   body.items[0].items[0].is_atom("define-fun"))) {
            try {
                v.model = parse_model(body);
            } catch (const std::exception& e) {
                v.diagnostics += std::string("cannot read model: ") + e.what() + "\n";
            }
            break;
        }
    }
    return v;
}

SolverVerdict check_sat_script(const std::string& script, const SolverConfig& config, std::stop_token stop) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> argv = config.command;
    if (argv.empty()) {
        throw std::invalid_argument("no solver command configured");
    }
    std::optional<TempFile> file;
    std::string input;
    if (config.use_temp_file) {
        file.emplace(script, ".smt2");
        argv.push_back(file->path());
    } else {
        input = script;
    }
    const ProcessResult pr = run_process(argv, input, config.timeout, std::move(stop));
    SolverVerdict v;
    if (pr.exec_failed) {
        v.status = SolverStatus::Error;
        v.solver_unavailable = true;
        v.diagnostics = pr.err;
    } else if (pr.cancelled) {
        v.status = SolverStatus::Unknown;
        v.cancelled = true;
        v.diagnostics = "cancelled";
    } else if (pr.timed_out) {
        v.status = SolverStatus::Timeout;
        v.diagnostics = "timed out after " + std::to_string(config.timeout.count()) + " ms";
    } else {
        v = parse_solver_output(pr.out);
        if (v.status == SolverStatus::Error) {
            v.diagnostics += "\nstdout: " + pr.out.substr(0, 2000) + "\nstderr: " + pr.err.substr(0, 2000);
        }
    }
    v.elapsed = std::chrono::steady_clock::now() - t0;
    return v;
}

SolverVerdict check_sat(const Formula& phi, const SolverConfig& config, std::stop_token stop) {
    return check_sat_script(emit_smtlib(phi), config, std::move(stop));
}

SolverVerdict check_sat(const KBoundedFormula& phi, const SolverConfig& config, std::stop_token stop) {
    SolverVerdict v = check_sat_script(emit_smtlib(phi), config, std::move(stop));
    v.source = QuerySource::KBounded;
    return v;
}

namespace {

SolverVerdict failed(QuerySource source, const std::exception& e) {
    SolverVerdict v;
    v.status = SolverStatus::Error;
    v.source = source;
    v.diagnostics = e.what();
    return v;
}

SolverVerdict combine(const RaceOutcome& o) {
    const SolverVerdict& q = o.quantified;
    const SolverVerdict& b = o.bounded;
    if (q.status == SolverStatus::Unsat) {
        return q;
    }
    if (b.status == SolverStatus::Unsat) {
        return b;
    }
    if (q.status == SolverStatus::Sat) {
        return q;
    }
    if (b.status == SolverStatus::Sat) {
        return b;
    }
    SolverVerdict v;
    v.status = q.status == SolverStatus::Error && b.status == SolverStatus::Error ? SolverStatus::Error
                                                                                   : SolverStatus::Unknown;
    v.solver_unavailable = q.solver_unavailable && b.solver_unavailable;
    v.elapsed = std::max(q.elapsed, b.elapsed);
    v.diagnostics = std::string("quantified: ") + to_string(q.status) + (q.diagnostics.empty() ? "" : " (") +
                    q.diagnostics + (q.diagnostics.empty() ? "" : ")") + "; k-bounded: " + to_string(b.status) +
                    (b.diagnostics.empty() ? "" : " (") + b.diagnostics + (b.diagnostics.empty() ? "" : ")");
    return v;
}

SolverVerdict bounded_job(const Formula& phi_hat, Int k, const SolverConfig& config, std::stop_token stop,
                          RaceOutcome& outcome) {
    const auto t0 = std::chrono::steady_clock::now();
    const KBoundedFormula kb = k_bound_transform(phi_hat, k);
    outcome.transform_time = std::chrono::steady_clock::now() - t0;
    outcome.bounded_size = formula_size(kb.formula);
    if (stop.stop_requested()) {
        SolverVerdict v;
        v.source = QuerySource::KBounded;
        v.cancelled = true;
        v.diagnostics = "cancelled";
        return v;
    }
    return check_sat(kb, config, std::move(stop));
}

}  // namespace

RaceOutcome race_check(const Formula& phi_hat, Int k, const SolverConfig& config) {
    RaceOutcome outcome;
    std::stop_source stop;
    std::mutex mutex;
    std::optional<QuerySource> winner;
    auto finish = [&](SolverVerdict v, QuerySource source) {
        v.source = source;
        const std::lock_guard lock(mutex);
        (source == QuerySource::Quantified ? outcome.quantified : outcome.bounded) = v;
        if (v.definitive() && !winner) {
            winner = source;
            stop.request_stop();
        }
    };
    {
        std::jthread quantified([&] {
            try {
                finish(check_sat(phi_hat, config, stop.get_token()), QuerySource::Quantified);
            } catch (const std::exception& e) {
                finish(failed(QuerySource::Quantified, e), QuerySource::Quantified);
            }
        });
        std::jthread bounded([&] {
            try {
                finish(bounded_job(phi_hat, k, config, stop.get_token(), outcome),
                       QuerySource::KBounded);
            } catch (const std::exception& e) {
                finish(failed(QuerySource::KBounded, e), QuerySource::KBounded);
            }
        });
    }
    if (winner) {
        outcome.verdict = *winner == QuerySource::Quantified ? outcome.quantified : outcome.bounded;
    } else {
        outcome.verdict = combine(outcome);
    }
    return outcome;
}

RaceOutcome run_both(const Formula& phi_hat, Int k, const SolverConfig& config) {
    RaceOutcome outcome;
    {
        std::jthread quantified([&] {
            try {
                outcome.quantified = check_sat(phi_hat, config);
            } catch (const std::exception& e) {
                outcome.quantified = failed(QuerySource::Quantified, e);
            }
        });
        try {
            outcome.bounded = bounded_job(phi_hat, k, config, {}, outcome);
        } catch (const std::exception& e) {
            outcome.bounded = failed(QuerySource::KBounded, e);
        }
    }
    outcome.bounded.source = QuerySource::KBounded;
    outcome.verdict = combine(outcome);
    return outcome;
}

}  // namespace apc
