// SPDX-License-Identifier: Apache-2.0
#include "luciscan/parser.hpp"

#include <cassert>

#include "luciscan/diag.hpp"
#include "luciscan/lexer.hpp"

namespace luciscan::frontend {

namespace {

struct BinOpInfo {
    int left;
    int right;
};

// Lua 5.1 binary operator priorities; '..' and '^' are right associative.
BinOpInfo binop_priority(TokenKind k) {
    switch (k) {
        case TokenKind::KwOr: return {1, 1};
        case TokenKind::KwAnd: return {2, 2};
        case TokenKind::Lt:
        case TokenKind::Gt:
        case TokenKind::Le:
        case TokenKind::Ge:
        case TokenKind::Ne:
        case TokenKind::Eq: return {3, 3};
        case TokenKind::Concat: return {9, 8};
        case TokenKind::Plus:
        case TokenKind::Minus: return {6, 6};
        case TokenKind::Star:
        case TokenKind::Slash:
        case TokenKind::Percent: return {7, 7};
        case TokenKind::Caret: return {10, 9};
        default: return {0, 0};
    }
}
constexpr int kUnaryPriority = 8;

class Parser {
  public:
    Parser(std::vector<Token> tokens, std::string file)
        : toks_(std::move(tokens)), file_(std::move(file)) {}

    AstNodePtr run() {
        auto chunk = make(NodeKind::Chunk);
        auto block = parse_block();
        expect(TokenKind::Eof, "'<eof>'");
        // The chunk owns the block's statements directly.
        chunk->children = std::move(block->children);
        finish(*chunk);
        if (chunk->children.empty()) {
            chunk->span = block->span;
            chunk->first_token = 0;
            chunk->last_token = 0;
        }
        return chunk;
    }

  private:
    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
    TokenKind kind() const { return cur().kind; }
    bool check(TokenKind k) const { return kind() == k; }
    bool accept(TokenKind k) {
        if (check(k)) {
            ++pos_;
            return true;
        }
        return false;
    }
    const Token& expect(TokenKind k, const char* what) {
        if (!check(k))
            fail(std::string("expected ") + what + " near '" +
                 (cur().raw.empty() ? token_kind_name(kind()) : cur().raw) + "'");
        return toks_[pos_++];
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(file_, cur().span.line_begin, cur().span.col_begin, msg);
    }

    AstNodePtr make(NodeKind k) {
        auto n = std::make_unique<AstNode>(k);
        n->span = cur().span;
        n->first_token = pos_;
        n->last_token = pos_;
        return n;
    }
    void finish(AstNode& n) {
        n.last_token = pos_ ? pos_ - 1 : 0;
        if (n.last_token >= n.first_token) {
            n.span = Span::join(toks_[n.first_token].span, toks_[n.last_token].span);
        }
    }

    bool block_follow() const {
        switch (kind()) {
            case TokenKind::Eof:
            case TokenKind::KwEnd:
            case TokenKind::KwElse:
            case TokenKind::KwElseif:
            case TokenKind::KwUntil:
                return true;
            default:
                return false;
        }
    }

    AstNodePtr parse_block() {
        auto block = make(NodeKind::Block);
        while (!block_follow()) {
            if (check(TokenKind::KwReturn) || check(TokenKind::KwBreak)) {
                block->children.push_back(parse_last_statement());
                accept(TokenKind::Semi);
                break;  // laststat closes the block
            }
            block->children.push_back(parse_statement());
            accept(TokenKind::Semi);
        }
        finish(*block);
        return block;
    }

    AstNodePtr parse_last_statement() {
        if (check(TokenKind::KwBreak)) {
            auto n = make(NodeKind::Break);
            ++pos_;
            finish(*n);
            return n;
        }
        auto n = make(NodeKind::Return);
        expect(TokenKind::KwReturn, "'return'");
        if (!block_follow() && !check(TokenKind::Semi)) {
            n->children.push_back(parse_expression());
            while (accept(TokenKind::Comma)) n->children.push_back(parse_expression());
        }
        finish(*n);
        return n;
    }

    AstNodePtr parse_statement() {
        switch (kind()) {
            case TokenKind::KwIf: return parse_if();
            case TokenKind::KwWhile: return parse_while();
            case TokenKind::KwDo: return parse_do();
            case TokenKind::KwFor: return parse_for();
            case TokenKind::KwRepeat: return parse_repeat();
            case TokenKind::KwFunction: return parse_function_statement();
            case TokenKind::KwLocal: return parse_local();
            default: return parse_expr_statement();
        }
    }

    AstNodePtr parse_if() {
        auto n = make(NodeKind::If);
        expect(TokenKind::KwIf, "'if'");
        n->children.push_back(parse_expression());
        expect(TokenKind::KwThen, "'then'");
        n->children.push_back(parse_block());
        while (accept(TokenKind::KwElseif)) {
            n->children.push_back(parse_expression());
            expect(TokenKind::KwThen, "'then'");
            n->children.push_back(parse_block());
        }
        if (accept(TokenKind::KwElse)) n->children.push_back(parse_block());
        expect(TokenKind::KwEnd, "'end'");
        finish(*n);
        return n;
    }

    AstNodePtr parse_while() {
        auto n = make(NodeKind::While);
        expect(TokenKind::KwWhile, "'while'");
        n->children.push_back(parse_expression());
        expect(TokenKind::KwDo, "'do'");
        n->children.push_back(parse_block());
        expect(TokenKind::KwEnd, "'end'");
        finish(*n);
        return n;
    }

    AstNodePtr parse_do() {
        auto n = make(NodeKind::Do);
        expect(TokenKind::KwDo, "'do'");
        n->children.push_back(parse_block());
        expect(TokenKind::KwEnd, "'end'");
        finish(*n);
        return n;
    }

    AstNodePtr parse_repeat() {
        auto n = make(NodeKind::Repeat);
        expect(TokenKind::KwRepeat, "'repeat'");
        n->children.push_back(parse_block());
        expect(TokenKind::KwUntil, "'until'");
        n->children.push_back(parse_expression());
        finish(*n);
        return n;
    }

    AstNodePtr parse_for() {
        std::size_t start = pos_;
        expect(TokenKind::KwFor, "'for'");
        auto first_name = parse_name();
        if (check(TokenKind::Assign)) {
            auto n = std::make_unique<AstNode>(NodeKind::NumericFor);
            n->first_token = start;
            ++pos_;  // '='
            n->children.push_back(std::move(first_name));
            n->children.push_back(parse_expression());
            expect(TokenKind::Comma, "','");
            n->children.push_back(parse_expression());
            if (accept(TokenKind::Comma)) n->children.push_back(parse_expression());
            expect(TokenKind::KwDo, "'do'");
            // body is always the last child
            n->children.push_back(parse_block());
            expect(TokenKind::KwEnd, "'end'");
            finish(*n);
            return n;
        }
        auto n = std::make_unique<AstNode>(NodeKind::GenericFor);
        n->first_token = start;
        auto names = std::make_unique<AstNode>(NodeKind::NameList);
        names->first_token = start + 1;
        names->span = first_name->span;
        names->children.push_back(std::move(first_name));
        while (accept(TokenKind::Comma)) names->children.push_back(parse_name());
        finish(*names);
        expect(TokenKind::KwIn, "'in'");
        auto exprs = make(NodeKind::ExprList);
        exprs->children.push_back(parse_expression());
        while (accept(TokenKind::Comma)) exprs->children.push_back(parse_expression());
        finish(*exprs);
        n->children.push_back(std::move(names));
        n->children.push_back(std::move(exprs));
        expect(TokenKind::KwDo, "'do'");
        n->children.push_back(parse_block());
        expect(TokenKind::KwEnd, "'end'");
        finish(*n);
        return n;
    }

    // funcname ::= Name {'.' Name} [':' Name]
    AstNodePtr parse_function_statement() {
        auto n = make(NodeKind::FunctionDef);
        expect(TokenKind::KwFunction, "'function'");
        std::string qname = expect(TokenKind::Name, "function name").text;
        while (accept(TokenKind::Dot))
            qname += "." + expect(TokenKind::Name, "name after '.'").text;
        if (accept(TokenKind::Colon)) {
            qname += "." + expect(TokenKind::Name, "method name").text;
            n->is_method = true;
        }
        n->text = qname;
        parse_function_body(*n);
        finish(*n);
        return n;
    }

    AstNodePtr parse_local() {
        std::size_t start = pos_;
        expect(TokenKind::KwLocal, "'local'");
        if (accept(TokenKind::KwFunction)) {
            auto n = std::make_unique<AstNode>(NodeKind::FunctionDef);
            n->first_token = start;
            n->text = expect(TokenKind::Name, "function name").text;
            n->is_local = true;
            parse_function_body(*n);
            finish(*n);
            return n;
        }
        auto n = std::make_unique<AstNode>(NodeKind::LocalAssign);
        n->first_token = start;
        auto names = make(NodeKind::NameList);
        names->children.push_back(parse_name());
        while (accept(TokenKind::Comma)) names->children.push_back(parse_name());
        finish(*names);
        n->children.push_back(std::move(names));
        if (accept(TokenKind::Assign)) {
            auto exprs = make(NodeKind::ExprList);
            exprs->children.push_back(parse_expression());
            while (accept(TokenKind::Comma)) exprs->children.push_back(parse_expression());
            finish(*exprs);
            n->children.push_back(std::move(exprs));
        }
        finish(*n);
        return n;
    }

    // exprstat ::= functioncall | varlist '=' explist
    AstNodePtr parse_expr_statement() {
        std::size_t start = pos_;
        auto first = parse_suffixed_expression();
        if (check(TokenKind::Assign) || check(TokenKind::Comma)) {
            auto n = std::make_unique<AstNode>(NodeKind::Assign);
            n->first_token = start;
            auto targets = std::make_unique<AstNode>(NodeKind::TargetList);
            targets->first_token = start;
            targets->span = first->span;
            require_assignable(*first);
            targets->children.push_back(std::move(first));
            while (accept(TokenKind::Comma)) {
                auto t = parse_suffixed_expression();
                require_assignable(*t);
                targets->children.push_back(std::move(t));
            }
            finish(*targets);
            expect(TokenKind::Assign, "'='");
            auto exprs = make(NodeKind::ExprList);
            exprs->children.push_back(parse_expression());
            while (accept(TokenKind::Comma)) exprs->children.push_back(parse_expression());
            finish(*exprs);
            n->children.push_back(std::move(targets));
            n->children.push_back(std::move(exprs));
            finish(*n);
            return n;
        }
        if (first->kind != NodeKind::Call && first->kind != NodeKind::MethodCall)
            fail("syntax error: expression is not a statement");
        auto n = std::make_unique<AstNode>(NodeKind::CallStat);
        n->first_token = start;
        n->span = first->span;
        n->last_token = first->last_token;
        n->children.push_back(std::move(first));
        return n;
    }

    void require_assignable(const AstNode& n) {
        if (n.kind != NodeKind::Name && n.kind != NodeKind::Index)
            fail("cannot assign to this expression");
    }

    void parse_function_body(AstNode& fn) {
        auto params = make(NodeKind::ParamList);
        expect(TokenKind::LParen, "'('");
        if (!check(TokenKind::RParen)) {
            while (true) {
                if (check(TokenKind::Ellipsis)) {
                    auto va = make(NodeKind::Varargs);
                    ++pos_;
                    finish(*va);
                    params->children.push_back(std::move(va));
                    break;
                }
                params->children.push_back(parse_name());
                if (!accept(TokenKind::Comma)) break;
            }
        }
        expect(TokenKind::RParen, "')'");
        finish(*params);
        fn.children.push_back(std::move(params));
        fn.children.push_back(parse_block());
        expect(TokenKind::KwEnd, "'end'");
    }

    AstNodePtr parse_name() {
        auto n = make(NodeKind::Name);
        n->text = expect(TokenKind::Name, "name").text;
        finish(*n);
        return n;
    }

    AstNodePtr parse_expression(int limit = 0) {
        AstNodePtr left;
        std::size_t start = pos_;
        if (check(TokenKind::KwNot) || check(TokenKind::Minus) || check(TokenKind::Hash)) {
            auto n = make(NodeKind::UnOp);
            n->text = cur().raw.empty() ? token_kind_name(kind()) : cur().raw;
            ++pos_;
            n->children.push_back(parse_expression(kUnaryPriority));
            finish(*n);
            left = std::move(n);
        } else {
            left = parse_simple_expression();
        }
        while (true) {
            BinOpInfo op = binop_priority(kind());
            if (op.left <= limit) break;
            auto n = std::make_unique<AstNode>(NodeKind::BinOp);
            n->first_token = start;
            n->text = cur().raw.empty() ? token_kind_name(kind()) : cur().raw;
            ++pos_;
            auto right = parse_expression(op.right);
            n->children.push_back(std::move(left));
            n->children.push_back(std::move(right));
            finish(*n);
            left = std::move(n);
        }
        return left;
    }

    AstNodePtr parse_simple_expression() {
        switch (kind()) {
            case TokenKind::Number: {
                auto n = make(NodeKind::NumberLit);
                n->text = cur().text;
                ++pos_;
                finish(*n);
                return n;
            }
            case TokenKind::String: {
                auto n = make(NodeKind::StringLit);
                n->text = cur().text;
                ++pos_;
                finish(*n);
                return n;
            }
            case TokenKind::KwNil: {
                auto n = make(NodeKind::NilLit);
                ++pos_;
                finish(*n);
                return n;
            }
            case TokenKind::KwTrue:
            case TokenKind::KwFalse: {
                auto n = make(NodeKind::BoolLit);
                n->text = check(TokenKind::KwTrue) ? "true" : "false";
                ++pos_;
                finish(*n);
                return n;
            }
            case TokenKind::Ellipsis: {
                auto n = make(NodeKind::Varargs);
                ++pos_;
                finish(*n);
                return n;
            }
            case TokenKind::LBrace:
                return parse_table_constructor();
            case TokenKind::KwFunction: {
                auto n = make(NodeKind::Function);
                ++pos_;
                parse_function_body(*n);
                finish(*n);
                return n;
            }
            default:
                return parse_suffixed_expression();
        }
    }

    AstNodePtr parse_primary_expression() {
        if (check(TokenKind::Name)) return parse_name();
        if (check(TokenKind::LParen)) {
            auto n = make(NodeKind::Paren);
            ++pos_;
            n->children.push_back(parse_expression());
            expect(TokenKind::RParen, "')'");
            finish(*n);
            return n;
        }
        fail("unexpected symbol");
    }

    AstNodePtr parse_suffixed_expression() {
        std::size_t start = pos_;
        auto expr = parse_primary_expression();
        while (true) {
            switch (kind()) {
                case TokenKind::Dot: {
                    ++pos_;
                    auto n = std::make_unique<AstNode>(NodeKind::Index);
                    n->first_token = start;
                    n->text = expect(TokenKind::Name, "name after '.'").text;
                    n->children.push_back(std::move(expr));
                    finish(*n);
                    expr = std::move(n);
                    break;
                }
                case TokenKind::LBracket: {
                    ++pos_;
                    auto n = std::make_unique<AstNode>(NodeKind::Index);
                    n->first_token = start;
                    auto key = parse_expression();
                    if (key->kind == NodeKind::StringLit) n->text = key->text;
                    n->children.push_back(std::move(expr));
                    n->children.push_back(std::move(key));
                    expect(TokenKind::RBracket, "']'");
                    finish(*n);
                    expr = std::move(n);
                    break;
                }
                case TokenKind::Colon: {
                    ++pos_;
                    auto n = std::make_unique<AstNode>(NodeKind::MethodCall);
                    n->first_token = start;
                    n->text = expect(TokenKind::Name, "method name").text;
                    n->children.push_back(std::move(expr));
                    parse_call_args(*n);
                    finish(*n);
                    resolve_callee(*n);
                    expr = std::move(n);
                    break;
                }
                case TokenKind::LParen:
                case TokenKind::String:
                case TokenKind::LBrace: {
                    auto n = std::make_unique<AstNode>(NodeKind::Call);
                    n->first_token = start;
                    n->children.push_back(std::move(expr));
                    parse_call_args(*n);
                    finish(*n);
                    resolve_callee(*n);
                    expr = std::move(n);
                    break;
                }
                default:
                    return expr;
            }
        }
    }

    void parse_call_args(AstNode& call) {
        if (check(TokenKind::String)) {
            auto s = make(NodeKind::StringLit);
            s->text = cur().text;
            ++pos_;
            finish(*s);
            call.children.push_back(std::move(s));
            return;
        }
        if (check(TokenKind::LBrace)) {
            call.children.push_back(parse_table_constructor());
            return;
        }
        expect(TokenKind::LParen, "'('");
        if (!check(TokenKind::RParen)) {
            call.children.push_back(parse_expression());
            while (accept(TokenKind::Comma)) call.children.push_back(parse_expression());
        }
        expect(TokenKind::RParen, "')'");
    }

    void resolve_callee(AstNode& call) {
        if (call.kind == NodeKind::MethodCall) {
            std::string base = name_chain(*call.child(0));
            if (base.empty()) {
                call.dynamic_callee = true;
            } else {
                call.callee_qname = base + "." + call.text;
            }
            return;
        }
        std::string chain = name_chain(*call.child(0));
        if (chain.empty())
            call.dynamic_callee = true;
        else
            call.callee_qname = chain;
    }

    AstNodePtr parse_table_constructor() {
        auto n = make(NodeKind::TableConstructor);
        expect(TokenKind::LBrace, "'{'");
        while (!check(TokenKind::RBrace)) {
            auto field = make(NodeKind::TableField);
            if (check(TokenKind::LBracket)) {
                ++pos_;
                auto key = parse_expression();
                if (key->kind == NodeKind::StringLit) field->text = key->text;
                expect(TokenKind::RBracket, "']'");
                expect(TokenKind::Assign, "'='");
                field->children.push_back(std::move(key));
                field->children.push_back(parse_expression());
            } else if (check(TokenKind::Name) && toks_[pos_ + 1].kind == TokenKind::Assign) {
                field->text = cur().text;
                pos_ += 2;
                field->children.push_back(parse_expression());
            } else {
                field->children.push_back(parse_expression());
            }
            finish(*field);
            n->children.push_back(std::move(field));
            if (!accept(TokenKind::Comma) && !accept(TokenKind::Semi)) break;
        }
        expect(TokenKind::RBrace, "'}'");
        finish(*n);
        return n;
    }
};

}  // namespace

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Chunk: return "Chunk";
        case NodeKind::Block: return "Block";
        case NodeKind::FunctionDef: return "FunctionDef";
        case NodeKind::LocalAssign: return "LocalAssign";
        case NodeKind::Assign: return "Assign";
        case NodeKind::CallStat: return "CallStat";
        case NodeKind::If: return "If";
        case NodeKind::While: return "While";
        case NodeKind::NumericFor: return "NumericFor";
        case NodeKind::GenericFor: return "GenericFor";
        case NodeKind::Repeat: return "Repeat";
        case NodeKind::Do: return "Do";
        case NodeKind::Return: return "Return";
        case NodeKind::Break: return "Break";
        case NodeKind::Name: return "Name";
        case NodeKind::StringLit: return "StringLit";
        case NodeKind::NumberLit: return "NumberLit";
        case NodeKind::BoolLit: return "BoolLit";
        case NodeKind::NilLit: return "NilLit";
        case NodeKind::Varargs: return "Varargs";
        case NodeKind::BinOp: return "BinOp";
        case NodeKind::UnOp: return "UnOp";
        case NodeKind::Call: return "Call";
        case NodeKind::MethodCall: return "MethodCall";
        case NodeKind::Index: return "Index";
        case NodeKind::Paren: return "Paren";
        case NodeKind::TableConstructor: return "TableConstructor";
        case NodeKind::TableField: return "TableField";
        case NodeKind::Function: return "Function";
        case NodeKind::NameList: return "NameList";
        case NodeKind::ExprList: return "ExprList";
        case NodeKind::TargetList: return "TargetList";
        case NodeKind::ParamList: return "ParamList";
    }
    return "?";
}

std::string name_chain(const AstNode& expr) {
    switch (expr.kind) {
        case NodeKind::Name:
            return expr.text;
        case NodeKind::Index: {
            if (expr.text.empty()) return "";
            std::string base = name_chain(*expr.child(0));
            if (base.empty()) return "";
            return base + "." + expr.text;
        }
        default:
            return "";
    }
}

bool ast_equal(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.text != b.text || a.callee_qname != b.callee_qname ||
        a.dynamic_callee != b.dynamic_callee || a.is_method != b.is_method ||
        a.is_local != b.is_local || a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!ast_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

static void dump_rec(const AstNode& n, std::string& out) {
    out.push_back('(');
    out += node_kind_name(n.kind);
    if (!n.text.empty()) {
        out.push_back(' ');
        out.push_back('\'');
        out += n.text;
        out.push_back('\'');
    }
    for (const auto& ch : n.children) {
        out.push_back(' ');
        dump_rec(*ch, out);
    }
    out.push_back(')');
}

std::string ast_dump(const AstNode& node) {
    std::string out;
    dump_rec(node, out);
    return out;
}

AstNodePtr parse_chunk(std::string_view text, const std::string& file) {
    return Parser(lex(text, file), file).run();
}

}  // namespace luciscan::frontend
