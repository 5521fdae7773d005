// SPDX-License-Identifier: Apache-2.0
#include "luciscan/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_map>

#include "luciscan/diag.hpp"

namespace luciscan::frontend {

namespace {

const std::unordered_map<std::string_view, TokenKind>& keyword_table() {
    static const std::unordered_map<std::string_view, TokenKind> table = {
        {"and", TokenKind::KwAnd},       {"break", TokenKind::KwBreak},
        {"do", TokenKind::KwDo},         {"else", TokenKind::KwElse},
        {"elseif", TokenKind::KwElseif}, {"end", TokenKind::KwEnd},
        {"false", TokenKind::KwFalse},   {"for", TokenKind::KwFor},
        {"function", TokenKind::KwFunction}, {"if", TokenKind::KwIf},
        {"in", TokenKind::KwIn},         {"local", TokenKind::KwLocal},
        {"nil", TokenKind::KwNil},       {"not", TokenKind::KwNot},
        {"or", TokenKind::KwOr},         {"repeat", TokenKind::KwRepeat},
        {"return", TokenKind::KwReturn}, {"then", TokenKind::KwThen},
        {"true", TokenKind::KwTrue},     {"until", TokenKind::KwUntil},
        {"while", TokenKind::KwWhile},
    };
    return table;
}

class Cursor {
  public:
    Cursor(std::string_view src, const std::string& file) : src_(src), file_(file) {}

    bool eof() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    bool match(char c) {
        if (!eof() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    std::size_t pos() const { return pos_; }
    int line() const { return line_; }
    int col() const { return col_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(file_, line_, col_, msg);
    }

    std::string_view slice(std::size_t from) const { return src_.substr(from, pos_ - from); }

  private:
    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)); }

// Counts '=' in a long-bracket opener "[==[", or -1 when not an opener.
int long_bracket_level(const Cursor& c) {
    if (c.peek() != '[') return -1;
    std::size_t i = 1;
    int level = 0;
    while (c.peek(i) == '=') {
        ++level;
        ++i;
    }
    return c.peek(i) == '[' ? level : -1;
}

std::string read_long_string(Cursor& c, int level, bool) {
    // consume "[" "="* "["
    c.advance();
    for (int i = 0; i < level; ++i) c.advance();
    c.advance();
    if (c.peek() == '\n') c.advance();  // leading newline dropped, per the 5.1 manual
    std::string value;
    while (true) {
        if (c.eof()) c.fail("unterminated long string/comment");
        if (c.peek() == ']') {
            std::size_t i = 1;
            int eq = 0;
            while (c.peek(i) == '=') {
                ++eq;
                ++i;
            }
            if (eq == level && c.peek(i) == ']') {
                c.advance();
                for (int k = 0; k < level; ++k) c.advance();
                c.advance();
                return value;
            }
        }
        value.push_back(c.advance());
    }
}

std::string read_short_string(Cursor& c, char quote) {
    c.advance();  // opening quote
    std::string value;
    while (true) {
        if (c.eof()) c.fail("unterminated string");
        char ch = c.peek();
        if (ch == quote) {
            c.advance();
            return value;
        }
        if (ch == '\n') c.fail("unfinished string");
        if (ch == '\\') {
            c.advance();
            if (c.eof()) c.fail("unterminated string");
            char e = c.advance();
            switch (e) {
                case 'a': value.push_back('\a'); break;
                case 'b': value.push_back('\b'); break;
                case 'f': value.push_back('\f'); break;
                case 'n': value.push_back('\n'); break;
                case 'r': value.push_back('\r'); break;
                case 't': value.push_back('\t'); break;
                case 'v': value.push_back('\v'); break;
                case '\n': value.push_back('\n'); break;
                default:
                    if (is_digit(e)) {
                        int code = e - '0';
                        for (int k = 0; k < 2 && is_digit(c.peek()); ++k)
                            code = code * 10 + (c.advance() - '0');
                        if (code > 255) c.fail("escape sequence too large");
                        value.push_back(static_cast<char>(code));
                    } else {
                        // 5.1 keeps unknown escapes literally (covers \\ \" \' too)
                        value.push_back(e);
                    }
            }
            continue;
        }
        value.push_back(c.advance());
    }
}

std::string read_number(Cursor& c) {
    std::size_t start = c.pos();
    if (c.peek() == '0' && (c.peek(1) == 'x' || c.peek(1) == 'X')) {
        c.advance();
        c.advance();
        while (is_hex(c.peek())) c.advance();
    } else {
        while (is_digit(c.peek())) c.advance();
        if (c.peek() == '.') {
            c.advance();
            while (is_digit(c.peek())) c.advance();
        }
        if (c.peek() == 'e' || c.peek() == 'E') {
            c.advance();
            if (c.peek() == '+' || c.peek() == '-') c.advance();
            if (!is_digit(c.peek())) c.fail("malformed number");
            while (is_digit(c.peek())) c.advance();
        }
    }
    return std::string(c.slice(start));
}

}  // namespace

const char* token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Eof: return "<eof>";
        case TokenKind::Name: return "name";
        case TokenKind::Number: return "number";
        case TokenKind::String: return "string";
        case TokenKind::KwAnd: return "and";
        case TokenKind::KwBreak: return "break";
        case TokenKind::KwDo: return "do";
        case TokenKind::KwElse: return "else";
        case TokenKind::KwElseif: return "elseif";
        case TokenKind::KwEnd: return "end";
        case TokenKind::KwFalse: return "false";
        case TokenKind::KwFor: return "for";
        case TokenKind::KwFunction: return "function";
        case TokenKind::KwIf: return "if";
        case TokenKind::KwIn: return "in";
        case TokenKind::KwLocal: return "local";
        case TokenKind::KwNil: return "nil";
        case TokenKind::KwNot: return "not";
        case TokenKind::KwOr: return "or";
        case TokenKind::KwRepeat: return "repeat";
        case TokenKind::KwReturn: return "return";
        case TokenKind::KwThen: return "then";
        case TokenKind::KwTrue: return "true";
        case TokenKind::KwUntil: return "until";
        case TokenKind::KwWhile: return "while";
        case TokenKind::Plus: return "+";
        case TokenKind::Minus: return "-";
        case TokenKind::Star: return "*";
        case TokenKind::Slash: return "/";
        case TokenKind::Percent: return "%";
        case TokenKind::Caret: return "^";
        case TokenKind::Hash: return "#";
        case TokenKind::Eq: return "==";
        case TokenKind::Ne: return "~=";
        case TokenKind::Le: return "<=";
        case TokenKind::Ge: return ">=";
        case TokenKind::Lt: return "<";
        case TokenKind::Gt: return ">";
        case TokenKind::Assign: return "=";
        case TokenKind::LParen: return "(";
        case TokenKind::RParen: return ")";
        case TokenKind::LBrace: return "{";
        case TokenKind::RBrace: return "}";
        case TokenKind::LBracket: return "[";
        case TokenKind::RBracket: return "]";
        case TokenKind::Semi: return ";";
        case TokenKind::Colon: return ":";
        case TokenKind::Comma: return ",";
        case TokenKind::Dot: return ".";
        case TokenKind::Concat: return "..";
        case TokenKind::Ellipsis: return "...";
    }
    return "?";
}

std::vector<Token> lex(std::string_view source, const std::string& file) {
    Cursor c(source, file);
    std::vector<Token> out;

    auto begin_token = [&]() {
        Token t;
        t.span.line_begin = c.line();
        t.span.col_begin = c.col();
        t.span.offset_begin = c.pos();
        return t;
    };
    auto finish_token = [&](Token& t, TokenKind kind, std::string text) {
        t.kind = kind;
        t.text = std::move(text);
        t.span.line_end = c.line();
        t.span.col_end = c.col();
        t.span.offset_end = c.pos();
        t.raw = std::string(source.substr(t.span.offset_begin,
                                          t.span.offset_end - t.span.offset_begin));
        out.push_back(std::move(t));
    };

    while (!c.eof()) {
        char ch = c.peek();
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            c.advance();
            continue;
        }
        if (ch == '-' && c.peek(1) == '-') {
            c.advance();
            c.advance();
            int level = long_bracket_level(c);
            if (level >= 0) {
                read_long_string(c, level, true);
            } else {
                while (!c.eof() && c.peek() != '\n') c.advance();
            }
            continue;
        }

        Token t = begin_token();
        if (is_name_start(ch)) {
            std::size_t start = c.pos();
            while (is_name_char(c.peek())) c.advance();
            std::string word(c.slice(start));
            auto it = keyword_table().find(word);
            finish_token(t, it != keyword_table().end() ? it->second : TokenKind::Name, word);
            continue;
        }
        if (is_digit(ch) || (ch == '.' && is_digit(c.peek(1)))) {
            finish_token(t, TokenKind::Number, read_number(c));
            continue;
        }
        if (ch == '"' || ch == '\'') {
            finish_token(t, TokenKind::String, read_short_string(c, ch));
            continue;
        }
        if (ch == '[') {
            int level = long_bracket_level(c);
            if (level >= 0) {
                finish_token(t, TokenKind::String, read_long_string(c, level, false));
                continue;
            }
            c.advance();
            finish_token(t, TokenKind::LBracket, "[");
            continue;
        }

        c.advance();
        switch (ch) {
            case '+': finish_token(t, TokenKind::Plus, "+"); break;
            case '-': finish_token(t, TokenKind::Minus, "-"); break;
            case '*': finish_token(t, TokenKind::Star, "*"); break;
            case '/': finish_token(t, TokenKind::Slash, "/"); break;
            case '%': finish_token(t, TokenKind::Percent, "%"); break;
            case '^': finish_token(t, TokenKind::Caret, "^"); break;
            case '#': finish_token(t, TokenKind::Hash, "#"); break;
            case '(': finish_token(t, TokenKind::LParen, "("); break;
            case ')': finish_token(t, TokenKind::RParen, ")"); break;
            case '{': finish_token(t, TokenKind::LBrace, "{"); break;
            case '}': finish_token(t, TokenKind::RBrace, "}"); break;
            case ']': finish_token(t, TokenKind::RBracket, "]"); break;
            case ';': finish_token(t, TokenKind::Semi, ";"); break;
            case ',': finish_token(t, TokenKind::Comma, ","); break;
            case '=':
                if (c.match('='))
                    finish_token(t, TokenKind::Eq, "==");
                else
                    finish_token(t, TokenKind::Assign, "=");
                break;
            case '~':
                if (!c.match('=')) c.fail("unexpected '~'");
                finish_token(t, TokenKind::Ne, "~=");
                break;
            case '<':
                if (c.match('='))
                    finish_token(t, TokenKind::Le, "<=");
                else
                    finish_token(t, TokenKind::Lt, "<");
                break;
            case '>':
                if (c.match('='))
                    finish_token(t, TokenKind::Ge, ">=");
                else
                    finish_token(t, TokenKind::Gt, ">");
                break;
            case ':':
                if (c.peek() == ':') c.fail("'::' labels are not Lua 5.1");
                finish_token(t, TokenKind::Colon, ":");
                break;
            case '.':
                if (c.match('.')) {
                    if (c.match('.'))
                        finish_token(t, TokenKind::Ellipsis, "...");
                    else
                        finish_token(t, TokenKind::Concat, "..");
                } else {
                    finish_token(t, TokenKind::Dot, ".");
                }
                break;
            default:
                c.fail(std::string("unexpected character '") + ch + "'");
        }
    }

    Token eof = begin_token();
    finish_token(eof, TokenKind::Eof, "");
    return out;
}

}  // namespace luciscan::frontend
