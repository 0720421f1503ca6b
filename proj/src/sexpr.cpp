// SPDX-License-Identifier: Apache-2.0
#include "apc/sexpr.hpp"

#include <cctype>

namespace apc {

std::string SExpr::to_string() const {
    if (!is_list) {
        return quoted ? "|" + atom + "|" : atom;
    }
    std::string s = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
        s += (i ? " " : "") + items[i].to_string();
    }
    return s + ")";
}

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    void skip() {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    [[nodiscard]] bool done() {
        skip();
        return pos_ >= text_.size();
    }

    SExpr read() {
        skip();
        if (pos_ >= text_.size()) {
            throw SExprError("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            SExpr list;
            list.is_list = true;
            for (;;) {
                skip();
                if (pos_ >= text_.size()) {
                    throw SExprError("unterminated list");
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.items.push_back(read());
            }
        }
        if (c == ')') {
            throw SExprError("unexpected ')' at offset " + std::to_string(pos_));
        }
        SExpr atom;
        if (c == '|') {
            const auto end = text_.find('|', pos_ + 1);
            if (end == std::string_view::npos) {
                throw SExprError("unterminated quoted symbol");
            }
            atom.quoted = true;
            atom.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return atom;
        }
        if (c == '"') {
            std::size_t end = pos_ + 1;
            // "" is an escaped quote inside SMT-LIB strings
            while (end < text_.size()) {
                if (text_[end] == '"') {
                    if (end + 1 < text_.size() && text_[end + 1] == '"') {
                        end += 2;
                        continue;
                    }
                    break;
                }
                ++end;
            }
            if (end >= text_.size()) {
                throw SExprError("unterminated string literal");
            }
            atom.atom = std::string(text_.substr(pos_, end - pos_ + 1));
            pos_ = end + 1;
            return atom;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')' && text_[pos_] != ';') {
            ++pos_;
        }
        atom.atom = std::string(text_.substr(start, pos_ - start));
        return atom;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
    Reader r(text);
    std::vector<SExpr> out;
    while (!r.done()) {
        out.push_back(r.read());
    }
    return out;
}

}  // namespace apc
