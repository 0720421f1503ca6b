// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apc {

/// Minimal S-expression tree for reading solver output. Quoted symbols
/// `|x|` are stored unquoted with `quoted` set; string literals keep quotes.
struct SExpr {
    bool is_list = false;
    bool quoted = false;
    std::string atom;
    std::vector<SExpr> items;

    [[nodiscard]] bool is_atom(std::string_view s) const { return !is_list && !quoted && atom == s; }
    [[nodiscard]] std::string to_string() const;
};

class SExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses every top-level S-expression in `text`; `;` comments are skipped.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace apc
