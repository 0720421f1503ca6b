// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace apc {

using Int = std::int64_t;

/// Raised when exact integer arithmetic on literals leaves the 64-bit range.
class ArithmeticOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

enum class CounterKind : std::uint8_t { Kappa, Tau };

/// A path counter. `instance` is nonzero only for counters that the K-bounded
/// transform turned into free uninterpreted constants.
struct Counter {
    CounterKind kind = CounterKind::Kappa;
    std::uint32_t id = 0;
    std::uint32_t instance = 0;

    auto operator<=>(const Counter&) const = default;

    [[nodiscard]] Counter as_tau() const { return {CounterKind::Tau, id, instance}; }
    [[nodiscard]] Counter as_kappa() const { return {CounterKind::Kappa, id, instance}; }
    /// Human-readable name, e.g. `κ1`, `τ2`, `κ1#3`.
    [[nodiscard]] std::string display() const;
    /// Identifier used in SMT-LIB output, e.g. `kappa$1`.
    [[nodiscard]] std::string smt_name() const;
};

// Kinds are listed in canonical atom order: this order decides the layout of
// normalized sums.
enum class ExprKind : std::uint8_t {
    Counter,
    Symbol,     // â, the value of scalar `a` at the start of the analysed region
    Var,        // program variable a (instructions only)
    Apply,      // Â(e1..ek)
    ArrayRead,  // program array read A[e1]..[ek] (instructions only)
    Div,
    Mod,
    Mul,
    Add,
    Int,
    Star,
};

struct ExprNode;

/// Immutable symbolic or program expression. Every value is kept in canonical
/// form: sums are flattened polynomials with ordered monomials, literals are
/// folded, and any arithmetic operator applied to ★ is ★.
///
/// Canonical shapes:
///   Add(t1..tn[, c])   n >= 1 terms, optional trailing nonzero literal
///   Mul(c, f1..fm)     scaled monomial, c a literal not in {0, 1}
///   Mul(f1..fm)        m >= 2 ordered non-literal factors
class Expr {
public:
    Expr();  // literal 0

    static Expr integer(Int value);
    static Expr symbol(std::string name);
    static Expr var(std::string name);
    static Expr counter(Counter c);
    static Expr star();
    static Expr apply(std::string array, std::vector<Expr> args);
    static Expr array_read(std::string array, std::vector<Expr> args);

    [[nodiscard]] ExprKind kind() const;
    [[nodiscard]] Int value() const;                 // Int
    [[nodiscard]] const std::string& name() const;   // Symbol, Var, Apply, ArrayRead
    [[nodiscard]] Counter counter_value() const;     // Counter
    [[nodiscard]] const std::vector<Expr>& args() const;

    [[nodiscard]] bool is_int() const { return kind() == ExprKind::Int; }
    [[nodiscard]] bool is_int(Int v) const { return is_int() && value() == v; }
    [[nodiscard]] bool is_star() const { return kind() == ExprKind::Star; }

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Expr& a, const Expr& b);
    friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

    [[nodiscard]] const ExprNode* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    friend Expr make_node(ExprKind, Int, std::string, Counter, std::vector<Expr>);
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    ExprKind kind;
    Int value = 0;
    std::string name;
    Counter counter;
    std::vector<Expr> args;
    std::size_t hash = 0;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
/// Euclidean division and remainder (SMT-LIB `div`/`mod`).
Expr div(const Expr& a, const Expr& b);
Expr mod(const Expr& a, const Expr& b);

/// Exact checked arithmetic on literals; throws ArithmeticOverflow.
Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);
/// Euclidean quotient/remainder; nullopt when dividing by zero or overflowing.
std::optional<Int> euclid_div(Int a, Int b);
std::optional<Int> euclid_mod(Int a, Int b);

/// Polynomial view of a canonical expression: constant + Σ coeff·monomial.
/// A monomial is the ordered factor list of a product (length >= 1).
struct Polynomial {
    Int constant = 0;
    std::map<std::vector<Expr>, Int> terms;

    static Polynomial of(const Expr& e);
    [[nodiscard]] Expr to_expr() const;
    [[nodiscard]] bool is_constant() const { return terms.empty(); }
};

/// Key for substitution: a path counter or the symbol â of a scalar variable.
struct SubstKey {
    enum class Kind : std::uint8_t { Counter, Symbol } kind;
    Counter counter;
    std::string symbol;

    static SubstKey of(Counter c) { return {Kind::Counter, c, {}}; }
    static SubstKey of_symbol(std::string s) { return {Kind::Symbol, {}, std::move(s)}; }
    auto operator<=>(const SubstKey&) const = default;
};

using Substitution = std::map<SubstKey, Expr>;

/// Simultaneous replacement of counters/symbols.
Expr substitute(const Expr& e, const Substitution& s);

bool contains_star(const Expr& e);
bool mentions_symbol(const Expr& e, const std::string& name);
void collect_counters(const Expr& e, std::set<Counter>& out);
bool mentions_counter(const Expr& e);
void collect_symbols(const Expr& e, std::set<std::string>& out);
/// Array function symbols with their arities.
void collect_functions(const Expr& e, std::map<std::string, std::size_t>& out);
/// True when the expression uses products of non-literals or division by a
/// non-literal.
bool is_nonlinear(const Expr& e);
std::size_t expr_size(const Expr& e);

}  // namespace apc
