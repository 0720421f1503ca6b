// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apc/flowgraph.hpp"

namespace apc {

/// Syntax or semantic error in DSL text. `line`/`column` are 1-based; 0 when
/// the problem is not tied to one location (e.g. a missing target node).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses the line-oriented flowgraph language:
///
///     var k, i, n : int
///     array A : int[1]
///     node a start
///     node h target
///     edge a -> b : k := 0
///     edge c -> d : assume i < n
///
/// `#` starts a comment. Nodes are declared implicitly by edges.
Flowgraph parse_flowgraph(std::string_view text);

/// Variables visible to a standalone formula or expression.
struct Declarations {
    std::vector<std::string> scalars;
    std::map<std::string, std::size_t> arrays;

    static Declarations of(const Flowgraph& fg) { return {fg.scalars(), fg.arrays()}; }
};

/// A quantifier-free formula over program variables, in the same syntax as
/// `assume` conditions.
Formula parse_formula(std::string_view text, const Declarations& decls);
Expr parse_expr(std::string_view text, const Declarations& decls);

/// True for identifiers usable as variable names.
bool is_valid_identifier(std::string_view name);

}  // namespace apc
