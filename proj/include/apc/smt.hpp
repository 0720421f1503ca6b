// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "apc/eval.hpp"
#include "apc/qelim.hpp"
#include "apc/sexpr.hpp"

namespace apc {

/// SMT-LIB2 script for `phi`: declarations in name order, one assertion,
/// (check-sat) and (get-model). Throws std::invalid_argument on ★.
std::string emit_smtlib(const Formula& phi);
std::string emit_smtlib(const KBoundedFormula& phi);

/// Logic name chosen for `phi`, e.g. QF_UFLIA or UFNIA.
std::string smt_logic(const Formula& phi);

/// Name of a symbol as it appears in emitted scripts, without |quotes|.
std::string smt_symbol(const std::string& program_name);

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, Error };
enum class QuerySource { Quantified, KBounded };

const char* to_string(SolverStatus s);
const char* to_string(QuerySource s);

/// Constant and function interpretations, keyed by the unquoted solver name.
struct Model {
    std::map<std::string, Int> constants;
    std::map<std::string, ArrayValue> functions;
};

/// Reads the (get-model) response. Function bodies are evaluated on every
/// point of a window around the literals they mention and turned into a
/// partial map whose default is the most frequent value.
Model parse_model(const SExpr& model);

struct SolverVerdict {
    SolverStatus status = SolverStatus::Unknown;
    std::optional<Model> model;
    std::chrono::duration<double> elapsed{0};
    QuerySource source = QuerySource::Quantified;
    bool cancelled = false;
    bool solver_unavailable = false;
    std::string diagnostics;

    [[nodiscard]] bool definitive() const { return status == SolverStatus::Sat || status == SolverStatus::Unsat; }
};

struct SolverConfig {
    /// Program and leading arguments, e.g. {"z3"} or {"cvc5", "--lang=smt2"}.
    std::vector<std::string> command{"z3"};
    std::chrono::milliseconds timeout{60'000};
    /// Pass the script as a temporary file argument rather than on stdin.
    bool use_temp_file = true;

    /// Command from $APC_SOLVER when set, otherwise z3.
    static SolverConfig from_environment();
    /// Splits a command line on whitespace.
    static std::vector<std::string> split_command(const std::string& cmd);
};

/// Interprets raw solver output (status line, optional model).
SolverVerdict parse_solver_output(const std::string& out);

SolverVerdict check_sat_script(const std::string& script, const SolverConfig& config, std::stop_token stop = {});
SolverVerdict check_sat(const Formula& phi, const SolverConfig& config, std::stop_token stop = {});
SolverVerdict check_sat(const KBoundedFormula& phi, const SolverConfig& config, std::stop_token stop = {});

struct RaceOutcome {
    SolverVerdict verdict;  // winner, or the combined non-definitive result
    SolverVerdict quantified;
    SolverVerdict bounded;
    std::chrono::duration<double> transform_time{0};
    std::size_t bounded_size = 0;  // formula_size of φ̂^K, 0 if not built
};

/// Runs φ̂ and its K-bounded weakening concurrently. The first sat or unsat
/// answer wins and the other solver is killed.
RaceOutcome race_check(const Formula& phi_hat, Int k, const SolverConfig& config);

/// Same queries as race_check, run concurrently but both to completion (for
/// benchmarking). Any unsat wins, then any sat.
RaceOutcome run_both(const Formula& phi_hat, Int k, const SolverConfig& config);

}  // namespace apc
