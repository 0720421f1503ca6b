// SPDX-License-Identifier: Apache-2.0
#include "apc/dsl.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace apc {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + message : message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Int, Op, End };

struct Token {
    Tok kind;
    std::string text;
    int column;
};

const std::set<std::string> keywords = {"var",   "array", "node",  "edge",  "assume", "skip",
                                        "true",  "false", "int",   "start", "target"};

std::vector<Token> tokenize(std::string_view line, int line_no) {
    static const char* two_char_ops[] = {":=", "->", "==", "!=", "<=", ">=", "&&", "||"};
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' ||
                                       line[j] == '\'')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
            // node names such as `1a` are allowed; treat them as identifiers
            if (j < line.size() && (std::isalpha(static_cast<unsigned char>(line[j])) || line[j] == '_')) {
                while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' ||
                                           line[j] == '\'')) {
                    ++j;
                }
                out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
            } else {
                out.push_back({Tok::Int, std::string(line.substr(i, j - i)), col});
            }
            i = j;
            continue;
        }
        bool matched = false;
        for (const char* op : two_char_ops) {
            if (line.substr(i, 2) == op) {
                out.push_back({Tok::Op, op, col});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) {
            continue;
        }
        if (std::string_view("+-*/%()[],:;<>!=").find(c) != std::string_view::npos) {
            out.push_back({Tok::Op, std::string(1, c), col});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
    }
    out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1});
    return out;
}

class Backtrack {};

class LineParser {
public:
    LineParser(std::vector<Token> toks, int line_no, const Declarations* decls)
        : toks_(std::move(toks)), line_(line_no), decls_(decls) {}

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    [[nodiscard]] bool at_end() const { return peek().kind == Tok::End; }
    [[nodiscard]] bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
    [[nodiscard]] bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, peek().column); }
    [[noreturn]] void fail_at(const std::string& msg, int col) const { throw ParseError(msg, line_, col); }

    Token next() {
        Token t = peek();
        if (t.kind != Tok::End) {
            ++pos_;
        }
        return t;
    }

    void expect_op(const char* op) {
        if (!is_op(op)) {
            fail(std::string("expected '") + op + "'" + describe_found());
        }
        ++pos_;
    }

    void expect_word(const char* w) {
        if (!is_word(w)) {
            fail(std::string("expected '") + w + "'" + describe_found());
        }
        ++pos_;
    }

    void expect_end() {
        if (!at_end()) {
            fail("unexpected '" + peek().text + "'");
        }
    }

    std::string ident(const char* what) {
        if (peek().kind != Tok::Ident || keywords.contains(peek().text)) {
            fail(std::string("expected ") + what + describe_found());
        }
        return next().text;
    }

    std::string node_name() {
        if (peek().kind != Tok::Ident && peek().kind != Tok::Int) {
            fail("expected node name" + describe_found());
        }
        return next().text;
    }

    Int integer() {
        const Token t = next();
        Int v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
            fail_at("integer literal out of range", t.column);
        }
        return v;
    }

    // ---- expressions

    Expr expr() {
        Expr acc = term();
        while (is_op("+") || is_op("-")) {
            const bool plus = next().text == "+";
            Expr rhs = term();
            acc = plus ? acc + rhs : acc - rhs;
        }
        return acc;
    }

    Expr term() {
        Expr acc = unary();
        while (is_op("*") || is_op("/") || is_op("%")) {
            const std::string op = next().text;
            Expr rhs = unary();
            acc = op == "*" ? acc * rhs : op == "/" ? div(acc, rhs) : mod(acc, rhs);
        }
        return acc;
    }

    Expr unary() {
        if (is_op("-")) {
            next();
            return -unary();
        }
        return primary();
    }

    Expr primary() {
        if (peek().kind == Tok::Int) {
            return Expr::integer(integer());
        }
        if (is_op("(")) {
            next();
            Expr e = expr();
            expect_op(")");
            return e;
        }
        if (peek().kind == Tok::Ident && !keywords.contains(peek().text)) {
            const Token t = next();
            if (is_op("[")) {
                std::vector<Expr> idx;
                while (is_op("[")) {
                    next();
                    idx.push_back(expr());
                    expect_op("]");
                }
                check_array(t, idx.size());
                return Expr::array_read(t.text, std::move(idx));
            }
            check_scalar(t);
            return Expr::var(t.text);
        }
        fail("expected expression" + describe_found());
    }

    // ---- formulas

    Formula formula() {
        Formula lhs = disjunction();
        if (is_op("->")) {
            next();
            return Formula::implies(lhs, formula());
        }
        return lhs;
    }

    Formula disjunction() {
        std::vector<Formula> parts{conjunction()};
        while (is_op("||")) {
            next();
            parts.push_back(conjunction());
        }
        return Formula::disj(std::move(parts));
    }

    Formula conjunction() {
        std::vector<Formula> parts{unary_formula()};
        while (is_op("&&")) {
            next();
            parts.push_back(unary_formula());
        }
        return Formula::conj(std::move(parts));
    }

    Formula unary_formula() {
        if (is_op("!")) {
            next();
            return Formula::negation(unary_formula());
        }
        if (is_word("true") || is_word("false")) {
            return Formula::truth(next().text == "true");
        }
        if (is_op("(")) {
            const std::size_t saved = pos_;
            try {
                return comparison();
            } catch (const ParseError&) {
                pos_ = saved;
            }
            next();
            Formula f = formula();
            expect_op(")");
            return f;
        }
        return comparison();
    }

    Formula comparison() {
        Expr lhs = expr();
        static const std::pair<const char*, CmpOp> ops[] = {{"==", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<=", CmpOp::Le},
                                                             {">=", CmpOp::Ge}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
        for (const auto& [text, op] : ops) {
            if (is_op(text)) {
                next();
                return Formula::cmp(op, lhs, expr());
            }
        }
        fail("expected comparison operator" + describe_found());
    }

private:
    [[nodiscard]] std::string describe_found() const {
        return at_end() ? " at end of line" : " but found '" + peek().text + "'";
    }

    void check_scalar(const Token& t) const {
        if (decls_ == nullptr) {
            return;
        }
        for (const auto& s : decls_->scalars) {
            if (s == t.text) {
                return;
            }
        }
        if (decls_->arrays.contains(t.text)) {
            fail_at("array '" + t.text + "' used without subscript", t.column);
        }
        fail_at("undeclared variable '" + t.text + "'", t.column);
    }

    void check_array(const Token& t, std::size_t dims) const {
        if (decls_ == nullptr) {
            return;
        }
        auto it = decls_->arrays.find(t.text);
        if (it == decls_->arrays.end()) {
            fail_at("undeclared array '" + t.text + "'", t.column);
        }
        if (it->second != dims) {
            fail_at("array '" + t.text + "' has dimension " + std::to_string(it->second) + ", got " +
                        std::to_string(dims) + " subscripts",
                    t.column);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int line_;
    const Declarations* decls_;
};

struct SourceLine {
    int number;
    std::vector<Token> tokens;
};

bool reserved_name(const std::string& n) {
    return keywords.contains(n) || !is_valid_identifier(n);
}

}  // namespace

bool is_valid_identifier(std::string_view name) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
        return false;
    }
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return !keywords.contains(std::string(name));
}

Flowgraph parse_flowgraph(std::string_view text) {
    std::vector<SourceLine> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        auto toks = tokenize(raw, number);
        if (toks.front().kind != Tok::End) {
            lines.push_back({number, std::move(toks)});
        }
        pos = end + 1;
    }

    Declarations decls;
    std::set<std::string> declared;
    std::optional<NodeId> start;
    std::optional<NodeId> target;
    std::vector<NodeId> declared_nodes;

    auto declare = [&](LineParser& p, const std::string& name, int col) {
        if (reserved_name(name)) {
            p.fail_at("invalid variable name '" + name + "'", col);
        }
        if (!declared.insert(name).second) {
            p.fail_at("variable '" + name + "' declared twice", col);
        }
    };

    for (const auto& line : lines) {
        LineParser p(line.tokens, line.number, nullptr);
        if (p.is_word("var")) {
            p.next();
            std::vector<std::string> names;
            do {
                if (!names.empty()) {
                    p.next();
                }
                const int col = p.peek().column;
                names.push_back(p.ident("variable name"));
                declare(p, names.back(), col);
            } while (p.is_op(","));
            p.expect_op(":");
            p.expect_word("int");
            p.expect_end();
            decls.scalars.insert(decls.scalars.end(), names.begin(), names.end());
        } else if (p.is_word("array")) {
            p.next();
            std::vector<std::pair<std::string, int>> names;
            do {
                if (!names.empty()) {
                    p.next();
                }
                const int col = p.peek().column;
                names.emplace_back(p.ident("array name"), col);
            } while (p.is_op(","));
            p.expect_op(":");
            p.expect_word("int");
            p.expect_op("[");
            if (p.peek().kind != Tok::Int) {
                p.fail("expected array dimension");
            }
            const Int dims = p.integer();
            if (dims < 1 || dims > 8) {
                p.fail("array dimension must be between 1 and 8");
            }
            p.expect_op("]");
            p.expect_end();
            for (const auto& [n, col] : names) {
                declare(p, n, col);
                decls.arrays[n] = static_cast<std::size_t>(dims);
            }
        } else if (p.is_word("node")) {
            p.next();
            const NodeId n = p.node_name();
            declared_nodes.push_back(n);
            while (!p.at_end()) {
                if (p.is_word("start")) {
                    if (start && *start != n) {
                        p.fail("start node already declared as '" + *start + "'");
                    }
                    start = n;
                } else if (p.is_word("target")) {
                    if (target && *target != n) {
                        p.fail("target node already declared as '" + *target + "'");
                    }
                    target = n;
                } else {
                    p.fail("expected 'start' or 'target' but found '" + p.peek().text + "'");
                }
                p.next();
            }
        } else if (!p.is_word("edge")) {
            p.fail("expected 'var', 'array', 'node' or 'edge'");
        }
    }

    std::vector<Edge> edges;
    std::map<std::pair<NodeId, NodeId>, int> edge_lines;
    for (const auto& line : lines) {
        LineParser p(line.tokens, line.number, &decls);
        if (!p.is_word("edge")) {
            continue;
        }
        p.next();
        Edge e;
        e.from = p.node_name();
        p.expect_op("->");
        e.to = p.node_name();
        p.expect_op(":");
        if (p.is_word("assume")) {
            p.next();
            e.instr = Assume{p.formula()};
        } else if (p.is_word("skip")) {
            p.next();
            e.instr = Assume{Formula::truth(true)};
        } else {
            const Token lhs = p.peek();
            const std::string var = p.ident("assignment target or 'assume'");
            if (decls.arrays.contains(var)) {
                p.fail_at("assignment to read-only array '" + var + "'", lhs.column);
            }
            if (p.is_op("[")) {
                p.fail_at("assignment to array element of '" + var + "'", lhs.column);
            }
            bool known = false;
            for (const auto& s : decls.scalars) {
                known = known || s == var;
            }
            if (!known) {
                p.fail_at("undeclared variable '" + var + "'", lhs.column);
            }
            p.expect_op(":=");
            e.instr = Assign{var, p.expr()};
        }
        p.expect_end();
        if (!edge_lines.emplace(std::make_pair(e.from, e.to), line.number).second) {
            throw ParseError("duplicate edge " + e.from + " -> " + e.to, line.number, 1);
        }
        edges.push_back(std::move(e));
    }

    if (!start) {
        throw ParseError("no start node declared (use `node <name> start`)", 0, 0);
    }
    if (!target) {
        throw ParseError("no target node declared (use `node <name> target`)", 0, 0);
    }
    try {
        return Flowgraph(decls.scalars, decls.arrays, std::move(edges), *start, *target, declared_nodes);
    } catch (const InvalidFlowgraph& err) {
        throw ParseError(err.what(), 0, 0);
    }
}

Formula parse_formula(std::string_view text, const Declarations& decls) {
    LineParser p(tokenize(text, 1), 1, &decls);
    Formula f = p.formula();
    p.expect_end();
    return f;
}

Expr parse_expr(std::string_view text, const Declarations& decls) {
    LineParser p(tokenize(text, 1), 1, &decls);
    Expr e = p.expr();
    p.expect_end();
    return e;
}

}  // namespace apc
