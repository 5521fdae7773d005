// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "luciscan/span.hpp"

namespace luciscan::frontend {

enum class TokenKind {
    Eof,
    Name,
    Number,
    String,
    // keywords
    KwAnd, KwBreak, KwDo, KwElse, KwElseif, KwEnd, KwFalse, KwFor, KwFunction,
    KwIf, KwIn, KwLocal, KwNil, KwNot, KwOr, KwRepeat, KwReturn, KwThen,
    KwTrue, KwUntil, KwWhile,
    // symbols
    Plus, Minus, Star, Slash, Percent, Caret, Hash,
    Eq, Ne, Le, Ge, Lt, Gt, Assign,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Semi, Colon, Comma, Dot, Concat, Ellipsis,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;    // identifier spelling, decoded string value, number spelling
    std::string raw;     // exact source slice
    Span span;
};

const char* token_kind_name(TokenKind k);

/// Lua 5.1 lexer. Unknown short-string escapes are kept literally, as the
/// 5.1 reference implementation does; `::` and other 5.2+ tokens are errors.
std::vector<Token> lex(std::string_view source, const std::string& file);

}  // namespace luciscan::frontend
