// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "luciscan/span.hpp"

namespace luciscan::frontend {

enum class NodeKind {
    Chunk,
    Block,
    // statements
    FunctionDef,   // text = registered name ("f", "a.b", "T.m"), empty for anonymous
    LocalAssign,   // children: [NameList, ExprList?]
    Assign,        // children: [TargetList, ExprList]
    CallStat,      // children: [Call|MethodCall]
    If,            // children: cond0, block0, cond1, block1, ..., [else Block]
    While,         // children: [cond, Block]
    NumericFor,    // children: [Name, init, limit, step?, Block]
    GenericFor,    // children: [NameList, ExprList, Block]
    Repeat,        // children: [Block, cond]
    Do,            // children: [Block]
    Return,        // children: exprs
    Break,
    // expressions
    Name,          // text = identifier
    StringLit,     // text = decoded value
    NumberLit,     // text = spelling
    BoolLit,       // text = "true"/"false"
    NilLit,
    Varargs,
    BinOp,         // text = operator, children: [lhs, rhs]
    UnOp,          // text = operator, children: [operand]
    Call,          // children: [callee, args...]
    MethodCall,    // text = method name, children: [receiver, args...]
    Index,         // children: [obj, key]; text = field name for dot/const-string access
    Paren,         // children: [inner]
    TableConstructor,  // children: TableField*
    TableField,    // text = field name when named; children: [key?, value]
    Function,      // anonymous function expr; children: [ParamList, Block]
    // helpers
    NameList,
    ExprList,
    TargetList,
    ParamList,     // children: Name*, optional Varargs
};

const char* node_kind_name(NodeKind k);

struct AstNode;
using AstNodePtr = std::unique_ptr<AstNode>;

struct AstNode {
    NodeKind kind;
    Span span;
    std::string text;
    std::vector<AstNodePtr> children;

    // Call / MethodCall: static callee chain ("os.execute") or empty + dynamic
    std::string callee_qname;
    bool dynamic_callee = false;

    // FunctionDef / Function
    bool is_method = false;  // defined with ':'  (implicit self)
    bool is_local = false;   // 'local function' / local-rooted name

    // token range the node was built from (for span soundness checks)
    std::size_t first_token = 0;
    std::size_t last_token = 0;

    explicit AstNode(NodeKind k) : kind(k) {}

    AstNode* child(std::size_t i) const { return children[i].get(); }
};

/// Static name chain of an expression ("a.b.c"), or "" when dynamic.
/// Dot access, constant string [""] indexing, and method receivers qualify.
std::string name_chain(const AstNode& expr);

/// Structural equality (kind, text, flags, children); spans ignored.
bool ast_equal(const AstNode& a, const AstNode& b);

/// Compact s-expression rendering, for tests and debugging.
std::string ast_dump(const AstNode& node);

}  // namespace luciscan::frontend
