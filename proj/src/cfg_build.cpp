// SPDX-License-Identifier: Apache-2.0
#include "luciscan/cfg_build.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace luciscan::cfg {

using frontend::AstNode;
using frontend::NodeKind;
using frontend::name_chain;

namespace {

std::string excerpt_of(std::string_view source, const Span& span, std::size_t cap = 60) {
    if (span.offset_end <= span.offset_begin || span.offset_begin >= source.size()) return "";
    std::string_view slice = source.substr(
        span.offset_begin, std::min(span.offset_end, source.size()) - span.offset_begin);
    std::string tidy;
    bool blank = false;
    for (char c : slice) {
        if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            if (!blank && !tidy.empty()) tidy += ' ';
            blank = true;
            continue;
        }
        tidy += c;
        blank = false;
        if (tidy.size() >= cap) {
            tidy += "...";
            break;
        }
    }
    return tidy;
}

struct ExprResult {
    std::vector<ReadRef> reads;
    std::vector<CallUse> calls;
    bool literal_only = true;
    Identity bare_identity;
    int result_of_call = -1;

    void merge(ExprResult&& other) {
        for (auto& r : other.reads) reads.push_back(std::move(r));
        for (auto& c : other.calls) calls.push_back(std::move(c));
        literal_only = literal_only && other.literal_only;
        bare_identity.clear();
        result_of_call = -1;
    }
};

struct BuildContext {
    std::vector<std::unique_ptr<Cfg>> fns;  // nested function cfgs, encounter order
    DiagnosticList diags;
    std::string file;
    std::string_view source;
    int anon_counter = 0;
};

class FunctionLowering {
  public:
    FunctionLowering(BuildContext& ctx, Cfg& cfg) : ctx_(ctx), cfg_(cfg) {}

    void lower_function(const AstNode* params, const AstNode& body) {
        cfg_.entry_id = new_node(CfgNodeKind::Entry, body.span, "entry");
        frontier_ = {cfg_.entry_id};
        if (cfg_.is_method) make_param_node("self", body.span);
        if (params) {
            for (const auto& p : params->children) {
                if (p->kind == NodeKind::Varargs) {
                    cfg_.has_varargs = true;
                    cfg_.locals.insert("...");
                    continue;
                }
                make_param_node(p->text, p->span);
            }
        }
        lower_block(body);
        int exit = new_node(CfgNodeKind::Exit, body.span, "exit");
        cfg_.exit_id = exit;
        seal(exit);
        for (int r : returns_) connect(r, exit);
        prune_and_renumber();
    }

  private:
    BuildContext& ctx_;
    Cfg& cfg_;
    std::vector<int> frontier_;
    std::vector<int> returns_;
    struct Loop {
        std::vector<int> breaks;
    };
    std::vector<Loop> loops_;
    std::set<const AstNode*> claimed_fns_;

    void make_param_node(const std::string& name, const Span& span) {
        cfg_.params.push_back(name);
        cfg_.locals.insert(name);
        int n = new_node(CfgNodeKind::Assignment, span, "param " + name);
        auto& node = cfg_.node(n);
        node.lh.push_back({name, false});
        node.synthetic_param = true;
        node.param_name = name;
        RhsBinding b;
        b.target = {name, false};
        b.literal_only = false;
        node.bindings.push_back(std::move(b));
        seal(n);
    }

    int new_node(CfgNodeKind kind, const Span& span, std::string label) {
        CfgNode n;
        n.id = static_cast<int>(cfg_.nodes.size());
        n.kind = kind;
        n.span = span;
        n.label = std::move(label);
        n.file = ctx_.file;
        n.func = cfg_.name;
        cfg_.nodes.push_back(std::move(n));
        return cfg_.nodes.back().id;
    }

    void connect(int from, int to) {
        auto& f = cfg_.node(from);
        auto& t = cfg_.node(to);
        if (std::find(f.succs.begin(), f.succs.end(), to) == f.succs.end())
            f.succs.push_back(to);
        if (std::find(t.preds.begin(), t.preds.end(), from) == t.preds.end())
            t.preds.push_back(from);
    }

    void seal(int id) {
        for (int f : frontier_) connect(f, id);
        frontier_ = {id};
    }

    std::string excerpt(const Span& s) const { return excerpt_of(ctx_.source, s); }

    // ---- expressions ----------------------------------------------------

    struct WalkState {
        CfgNode* node;
        std::vector<std::string> encl_q;
        std::vector<int> encl_id;
    };

    ExprResult walk_expr(const AstNode& e, WalkState& st) {
        ExprResult r;
        switch (e.kind) {
            case NodeKind::Name:
                r.reads.push_back({e.text, st.encl_q, st.encl_id});
                r.literal_only = false;
                r.bare_identity = e.text;
                return r;
            case NodeKind::Index: {
                std::string chain = name_chain(e);
                if (!chain.empty()) {
                    r.reads.push_back({chain, st.encl_q, st.encl_id});
                    r.literal_only = false;
                    r.bare_identity = chain;
                    return r;
                }
                for (const auto& ch : e.children) r.merge(walk_expr(*ch, st));
                r.literal_only = false;
                return r;
            }
            case NodeKind::StringLit:
            case NodeKind::NumberLit:
            case NodeKind::BoolLit:
            case NodeKind::NilLit:
                return r;
            case NodeKind::Varargs:
                r.reads.push_back({"...", st.encl_q, st.encl_id});
                r.literal_only = false;
                return r;
            case NodeKind::Paren:
                return walk_expr(*e.child(0), st);
            case NodeKind::BinOp:
            case NodeKind::UnOp:
                for (const auto& ch : e.children) r.merge(walk_expr(*ch, st));
                return r;
            case NodeKind::TableConstructor:
                for (const auto& field : e.children)
                    for (const auto& ch : field->children) r.merge(walk_expr(*ch, st));
                return r;
            case NodeKind::Function:
                r.literal_only = false;  // closure value; body handled separately
                return r;
            case NodeKind::Call:
            case NodeKind::MethodCall:
                return walk_call(e, st);
            default:
                for (const auto& ch : e.children) r.merge(walk_expr(*ch, st));
                r.literal_only = false;
                return r;
        }
    }

    ExprResult walk_call(const AstNode& e, WalkState& st) {
        ExprResult r;
        r.literal_only = false;

        CallRef ref;
        ref.call_id = cfg_.next_call_id++;
        ref.qname = e.callee_qname;
        ref.dynamic = e.dynamic_callee;
        ref.is_method = e.kind == NodeKind::MethodCall;
        ref.span = e.span;
        const std::string shown = ref.qname.empty() ? "<dynamic>" : ref.qname;

        r.calls.push_back({shown, st.encl_q});

        if (ref.is_method) {
            st.encl_q.push_back(shown);
            st.encl_id.push_back(ref.call_id);
            ExprResult recv = walk_expr(*e.child(0), st);
            st.encl_q.pop_back();
            st.encl_id.pop_back();
            ref.receiver_reads = recv.reads;
            for (auto& rd : recv.reads) r.reads.push_back(std::move(rd));
            for (auto& c : recv.calls) r.calls.push_back(std::move(c));
        } else if (ref.dynamic) {
            ExprResult callee = walk_expr(*e.child(0), st);
            for (auto& rd : callee.reads) r.reads.push_back(std::move(rd));
            for (auto& c : callee.calls) r.calls.push_back(std::move(c));
        }

        for (std::size_t i = 1; i < e.children.size(); ++i) {
            st.encl_q.push_back(shown);
            st.encl_id.push_back(ref.call_id);
            ExprResult sub = walk_expr(*e.child(i), st);
            st.encl_q.pop_back();
            st.encl_id.pop_back();

            ArgInfo arg;
            arg.reads = sub.reads;
            arg.calls = sub.calls;
            arg.literal_only = sub.literal_only;
            arg.bare_identity = sub.bare_identity;
            arg.result_of_call = sub.result_of_call;
            arg.excerpt = excerpt(e.child(i)->span);
            ref.args.push_back(std::move(arg));

            for (auto& rd : sub.reads) r.reads.push_back(std::move(rd));
            for (auto& c : sub.calls) r.calls.push_back(std::move(c));
        }

        r.result_of_call = ref.call_id;
        st.node->calls.push_back(std::move(ref));
        return r;
    }

    static void apply_reads(CfgNode& node, const ExprResult& r) {
        for (const auto& rd : r.reads) node.rh.push_back(rd.ident);
        for (const auto& c : r.calls)
            if (c.qname != "<dynamic>") node.rh.push_back(c.qname);
    }

    // ---- statements ------------------------------------------------------

    void lower_block(const AstNode& block) {
        for (const auto& stmt : block.children) lower_statement(*stmt);
    }

    void lower_statement(const AstNode& s) {
        switch (s.kind) {
            case NodeKind::LocalAssign: lower_local_assign(s); break;
            case NodeKind::Assign: lower_assign(s); break;
            case NodeKind::CallStat: lower_call_stat(s); break;
            case NodeKind::FunctionDef: lower_function_def(s); return;
            case NodeKind::If: lower_if(s); break;
            case NodeKind::While: lower_while(s); break;
            case NodeKind::Repeat: lower_repeat(s); break;
            case NodeKind::NumericFor: lower_numeric_for(s); break;
            case NodeKind::GenericFor: lower_generic_for(s); break;
            case NodeKind::Do: lower_block(*s.child(0)); break;
            case NodeKind::Return: lower_return(s); break;
            case NodeKind::Break: lower_break(s); break;
            default: {
                ctx_.diags.push_back({DiagKind::LoweringError, ctx_.file,
                                      s.span.line_begin, s.span.col_begin,
                                      std::string("unmodeled statement kind ") +
                                          frontend::node_kind_name(s.kind)});
                int n = new_node(CfgNodeKind::Statement, s.span, excerpt(s.span));
                seal(n);
            }
        }
        sweep_anonymous(s);
    }

    // anonymous function expressions not claimed by a named binding
    void sweep_anonymous(const AstNode& n) {
        if (n.kind == NodeKind::Function) {
            if (!claimed_fns_.count(&n)) build_function_cfg(n, "", false, false);
            return;  // inner content belongs to that function's own lowering
        }
        if (n.kind == NodeKind::Block || n.kind == NodeKind::FunctionDef) return;
        for (const auto& ch : n.children) sweep_anonymous(*ch);
    }

    void bind_value(CfgNode& node, const Def& target, const AstNode* expr,
                    const ExprResult* pre) {
        RhsBinding b;
        b.target = target;
        if (pre) {
            b.reads = pre->reads;
            b.calls = pre->calls;
            b.literal_only = pre->literal_only;
            b.alias_of = pre->bare_identity;
            b.result_of_call = pre->result_of_call;
        }
        node.bindings.push_back(std::move(b));

        if (expr && expr->kind == NodeKind::TableConstructor && !target.path.empty()) {
            // field-level bindings: t = { f = x } also defines t.f
            for (const auto& field : expr->children) {
                if (field->text.empty()) continue;
                const AstNode& value = *field->children.back();
                std::string path = target.path + "." + field->text;
                WalkState st{&node, {}, {}};
                ExprResult vr = walk_expr(value, st);
                RhsBinding fb;
                fb.target = {path, false};
                fb.reads = vr.reads;
                fb.calls = vr.calls;
                fb.literal_only = vr.literal_only;
                fb.alias_of = vr.bare_identity;
                fb.result_of_call = vr.result_of_call;
                node.lh.push_back(fb.target);
                for (const auto& rd : vr.reads) node.rh.push_back(rd.ident);
                node.bindings.push_back(std::move(fb));
                maybe_named_function(value, path);
            }
        }
    }

    static bool multi_valued(const AstNode& e) {
        return e.kind == NodeKind::Call || e.kind == NodeKind::MethodCall ||
               e.kind == NodeKind::Varargs;
    }

    void lower_local_assign(const AstNode& s) {
        int id = new_node(CfgNodeKind::Assignment, s.span, excerpt(s.span));
        auto& node = cfg_.node(id);
        const AstNode& names = *s.child(0);
        const AstNode* exprs = s.children.size() > 1 ? s.child(1) : nullptr;

        std::vector<ExprResult> results;
        if (exprs) {
            for (const auto& e : exprs->children) {
                WalkState st{&node, {}, {}};
                results.push_back(walk_expr(*e, st));
                apply_reads(node, results.back());
            }
        }
        for (std::size_t i = 0; i < names.children.size(); ++i) {
            const std::string& name = names.child(i)->text;
            cfg_.locals.insert(name);
            Def d{name, false};
            node.lh.push_back(d);
            if (exprs && i < exprs->children.size()) {
                bind_value(node, d, exprs->child(i), &results[i]);
                maybe_named_function(*exprs->child(i), name);
            } else if (exprs && !exprs->children.empty() &&
                       multi_valued(*exprs->children.back())) {
                bind_value(node, d, nullptr, &results.back());
            } else {
                bind_value(node, d, nullptr, nullptr);
            }
        }
        seal(id);
    }

    void lower_assign(const AstNode& s) {
        int id = new_node(CfgNodeKind::Assignment, s.span, excerpt(s.span));
        auto& node = cfg_.node(id);
        const AstNode& targets = *s.child(0);
        const AstNode& exprs = *s.child(1);

        std::vector<ExprResult> results;
        for (const auto& e : exprs.children) {
            WalkState st{&node, {}, {}};
            results.push_back(walk_expr(*e, st));
            apply_reads(node, results.back());
        }

        for (std::size_t i = 0; i < targets.children.size(); ++i) {
            const AstNode& t = *targets.child(i);
            Def d;
            bool have_def = true;
            if (t.kind == NodeKind::Name) {
                d = {t.text, false};
            } else {
                std::string chain = name_chain(t);
                if (!chain.empty()) {
                    d = {chain, false};
                } else {
                    WalkState st{&node, {}, {}};
                    if (t.children.size() > 1) {
                        ExprResult key = walk_expr(*t.child(1), st);
                        apply_reads(node, key);
                    }
                    std::string base = name_chain(*t.child(0));
                    if (!base.empty()) {
                        d = {base + ".[]", true};
                        node.rh.push_back(base);
                    } else {
                        ExprResult obj = walk_expr(*t.child(0), st);
                        apply_reads(node, obj);
                        have_def = false;
                        ctx_.diags.push_back(
                            {DiagKind::LoweringError, ctx_.file, t.span.line_begin,
                             t.span.col_begin, "assignment target too dynamic"});
                    }
                }
            }
            if (!have_def) continue;
            node.lh.push_back(d);
            if (i < exprs.children.size()) {
                bind_value(node, d, exprs.child(i), &results[i]);
                maybe_named_function(*exprs.child(i), d.path);
            } else if (!exprs.children.empty() && multi_valued(*exprs.children.back())) {
                bind_value(node, d, nullptr, &results.back());
            } else {
                bind_value(node, d, nullptr, nullptr);
            }
        }
        seal(id);
    }

    void lower_call_stat(const AstNode& s) {
        int id = new_node(CfgNodeKind::CallSite, s.span, excerpt(s.span));
        auto& node = cfg_.node(id);
        WalkState st{&node, {}, {}};
        ExprResult r = walk_expr(*s.child(0), st);
        apply_reads(node, r);
        node.top_call_id = r.result_of_call;
        seal(id);
    }

    void lower_function_def(const AstNode& s) {
        int id = new_node(CfgNodeKind::Assignment, s.span, "function " + s.text);
        auto& node = cfg_.node(id);
        if (s.is_local) cfg_.locals.insert(s.text);
        Def d{s.text, false};
        node.lh.push_back(d);
        RhsBinding b;
        b.target = d;
        b.literal_only = false;
        node.bindings.push_back(std::move(b));
        seal(id);
        build_function_cfg(s, s.text, s.is_method,
                           !s.is_local && !root_is_local(s.text));
    }

    bool root_is_local(const std::string& qname) const {
        return cfg_.locals.count(identity_root(qname)) > 0;
    }

    void maybe_named_function(const AstNode& expr, const std::string& name) {
        if (expr.kind == NodeKind::Function) {
            claimed_fns_.insert(&expr);
            build_function_cfg(expr, name, false, !root_is_local(name));
        }
    }

    void build_function_cfg(const AstNode& fn, std::string name, bool is_method,
                            bool is_public) {
        if (name.empty())
            name = "<anon:" + ctx_.file + ":" + std::to_string(fn.span.line_begin) + ":" +
                   std::to_string(++ctx_.anon_counter) + ">";
        auto sub = std::make_unique<Cfg>();
        sub->name = name;
        sub->source_path = ctx_.file;
        sub->def_span = fn.span;
        sub->is_method = is_method;
        sub->is_public = is_public;
        FunctionLowering lower(ctx_, *sub);
        lower.lower_function(fn.child(0), *fn.child(1));
        ctx_.fns.push_back(std::move(sub));
    }

    int make_condition(const AstNode& cond) {
        int c = new_node(CfgNodeKind::Condition, cond.span, excerpt(cond.span));
        auto& node = cfg_.node(c);
        WalkState st{&node, {}, {}};
        ExprResult r = walk_expr(cond, st);
        apply_reads(node, r);
        return c;
    }

    void lower_if(const AstNode& s) {
        std::vector<int> branch_ends;
        std::size_t pairs = s.children.size() / 2;
        bool has_else = s.children.size() % 2 == 1;
        int prev_cond = -1;
        for (std::size_t p = 0; p < pairs; ++p) {
            int c = make_condition(*s.child(2 * p));
            if (prev_cond == -1)
                seal(c);
            else
                connect(prev_cond, c);
            prev_cond = c;
            frontier_ = {c};
            lower_block(*s.child(2 * p + 1));
            for (int f : frontier_) branch_ends.push_back(f);
        }
        if (has_else) {
            frontier_ = {prev_cond};
            lower_block(*s.children.back());
            for (int f : frontier_) branch_ends.push_back(f);
        } else {
            branch_ends.push_back(prev_cond);
        }
        frontier_ = branch_ends;
    }

    void lower_while(const AstNode& s) {
        int c = make_condition(*s.child(0));
        seal(c);
        loops_.push_back({});
        lower_block(*s.child(1));
        for (int f : frontier_) connect(f, c);
        std::vector<int> after{c};
        for (int b : loops_.back().breaks) after.push_back(b);
        loops_.pop_back();
        frontier_ = after;
    }

    void lower_repeat(const AstNode& s) {
        std::size_t first_in_body = cfg_.nodes.size();
        loops_.push_back({});
        lower_block(*s.child(0));
        bool body_nonempty = cfg_.nodes.size() > first_in_body;
        int c = make_condition(*s.child(1));
        seal(c);
        int head = body_nonempty ? static_cast<int>(first_in_body) : c;
        connect(c, head);
        std::vector<int> after{c};
        for (int b : loops_.back().breaks) after.push_back(b);
        loops_.pop_back();
        frontier_ = after;
    }

    void lower_numeric_for(const AstNode& s) {
        const AstNode& var = *s.child(0);
        const AstNode& init = *s.child(1);
        const AstNode& limit = *s.child(2);
        const AstNode* step = s.children.size() > 4 ? s.child(3) : nullptr;
        const AstNode& body = *s.children.back();
        cfg_.locals.insert(var.text);

        int init_id = new_node(CfgNodeKind::Assignment, init.span,
                               "for " + var.text + " = " + excerpt(init.span));
        {
            auto& node = cfg_.node(init_id);
            WalkState st{&node, {}, {}};
            ExprResult r = walk_expr(init, st);
            apply_reads(node, r);
            Def d{var.text, false};
            node.lh.push_back(d);
            bind_value(node, d, &init, &r);
        }
        seal(init_id);

        int c = new_node(CfgNodeKind::Condition, limit.span,
                         var.text + " <= " + excerpt(limit.span));
        {
            auto& node = cfg_.node(c);
            node.rh.push_back(var.text);
            WalkState st{&node, {}, {}};
            ExprResult r = walk_expr(limit, st);
            apply_reads(node, r);
        }
        seal(c);

        loops_.push_back({});
        lower_block(body);

        int incr = new_node(CfgNodeKind::Assignment, s.span, var.text + " step");
        {
            auto& node = cfg_.node(incr);
            node.lh.push_back({var.text, false});
            node.rh.push_back(var.text);
            RhsBinding b;
            b.target = {var.text, false};
            b.reads.push_back({var.text, {}, {}});
            b.literal_only = false;
            if (step) {
                WalkState st{&node, {}, {}};
                ExprResult r = walk_expr(*step, st);
                for (const auto& rd : r.reads) b.reads.push_back(rd);
                apply_reads(node, r);
            }
            node.bindings.push_back(std::move(b));
        }
        for (int f : frontier_) connect(f, incr);
        connect(incr, c);

        std::vector<int> after{c};
        for (int b : loops_.back().breaks) after.push_back(b);
        loops_.pop_back();
        frontier_ = after;
    }

    void lower_generic_for(const AstNode& s) {
        const AstNode& names = *s.child(0);
        const AstNode& exprs = *s.child(1);
        const AstNode& body = *s.child(2);

        int iter = new_node(CfgNodeKind::Assignment, s.span, excerpt(s.span));
        {
            auto& node = cfg_.node(iter);
            std::vector<ExprResult> results;
            for (const auto& e : exprs.children) {
                WalkState st{&node, {}, {}};
                results.push_back(walk_expr(*e, st));
                apply_reads(node, results.back());
            }
            for (const auto& nm : names.children) {
                cfg_.locals.insert(nm->text);
                Def d{nm->text, false};
                node.lh.push_back(d);
                RhsBinding b;
                b.target = d;
                b.literal_only = false;
                for (const auto& r : results) {
                    for (const auto& rd : r.reads) b.reads.push_back(rd);
                    for (const auto& cu : r.calls) b.calls.push_back(cu);
                }
                node.bindings.push_back(std::move(b));
            }
        }
        seal(iter);

        int c = new_node(CfgNodeKind::Condition, s.span, names.child(0)->text + " ~= nil");
        cfg_.node(c).rh.push_back(names.child(0)->text);
        seal(c);

        loops_.push_back({});
        lower_block(body);
        for (int f : frontier_) connect(f, iter);
        std::vector<int> after{c};
        for (int b : loops_.back().breaks) after.push_back(b);
        loops_.pop_back();
        frontier_ = after;
    }

    void lower_return(const AstNode& s) {
        int id = new_node(CfgNodeKind::Assignment, s.span,
                          s.children.empty() ? "return" : excerpt(s.span));
        auto& node = cfg_.node(id);
        Def d{"$ret", false};
        node.lh.push_back(d);
        RhsBinding b;
        b.target = d;
        std::vector<ExprResult> results;
        for (const auto& e : s.children) {
            WalkState st{&node, {}, {}};
            results.push_back(walk_expr(*e, st));
            apply_reads(node, results.back());
        }
        for (auto& r : results) {
            for (const auto& rd : r.reads) b.reads.push_back(rd);
            for (const auto& cu : r.calls) b.calls.push_back(cu);
            b.literal_only = b.literal_only && r.literal_only;
        }
        if (results.size() == 1) {
            b.alias_of = results[0].bare_identity;
            b.result_of_call = results[0].result_of_call;
        }
        node.bindings.push_back(std::move(b));
        seal(id);
        returns_.push_back(id);
        frontier_ = {};
    }

    void lower_break(const AstNode& s) {
        int id = new_node(CfgNodeKind::Statement, s.span, "break");
        seal(id);
        if (loops_.empty()) {
            ctx_.diags.push_back({DiagKind::LoweringError, ctx_.file, s.span.line_begin,
                                  s.span.col_begin, "break outside loop"});
            returns_.push_back(id);
        } else {
            loops_.back().breaks.push_back(id);
        }
        frontier_ = {};
    }

    void prune_and_renumber() {
        std::vector<bool> keep(cfg_.nodes.size(), false);
        std::vector<int> stack{cfg_.entry_id};
        keep[static_cast<std::size_t>(cfg_.entry_id)] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int s : cfg_.node(v).succs)
                if (!keep[static_cast<std::size_t>(s)]) {
                    keep[static_cast<std::size_t>(s)] = true;
                    stack.push_back(s);
                }
        }
        std::vector<int> remap(cfg_.nodes.size(), -1);
        std::vector<CfgNode> kept;
        kept.reserve(cfg_.nodes.size());
        for (const auto& n : cfg_.nodes) {
            if (!keep[static_cast<std::size_t>(n.id)]) continue;
            remap[static_cast<std::size_t>(n.id)] = static_cast<int>(kept.size());
            kept.push_back(n);
        }
        for (auto& n : kept) {
            n.id = remap[static_cast<std::size_t>(n.id)];
            std::vector<int> ps, ss;
            for (int p : n.preds)
                if (remap[static_cast<std::size_t>(p)] >= 0)
                    ps.push_back(remap[static_cast<std::size_t>(p)]);
            for (int s : n.succs)
                if (remap[static_cast<std::size_t>(s)] >= 0)
                    ss.push_back(remap[static_cast<std::size_t>(s)]);
            n.preds = std::move(ps);
            n.succs = std::move(ss);
        }
        cfg_.nodes = std::move(kept);
        cfg_.entry_id = remap[static_cast<std::size_t>(cfg_.entry_id)];
        cfg_.exit_id = remap[static_cast<std::size_t>(cfg_.exit_id)];
    }
};

}  // namespace

BuildResult build_cfgs(const frontend::AstNode& chunk, const std::string& file,
                       std::string_view source) {
    BuildContext ctx;
    ctx.file = file;
    ctx.source = source;

    auto top = std::make_unique<Cfg>();
    top->name = "<chunk>";
    top->source_path = file;
    top->def_span = chunk.span;
    FunctionLowering lower(ctx, *top);
    lower.lower_function(nullptr, chunk);

    BuildResult result;
    result.cfgs.push_back(std::move(top));
    for (auto& fn : ctx.fns) result.cfgs.push_back(std::move(fn));
    result.diags = std::move(ctx.diags);
    return result;
}

FunctionDict build_function_dictionary(const std::vector<Cfg*>& cfgs, bool approximate) {
    FunctionDict dict(approximate);
    for (Cfg* c : cfgs)
        if (c->name != "<chunk>") dict.add(c);
    return dict;
}

namespace {

const AstNode* nth_arg(const AstNode& call, std::size_t i) {
    // children: [callee, args...]
    return call.children.size() > i + 1 ? call.child(i + 1) : nullptr;
}

void collect_entries(const AstNode& n, const std::string& file,
                     std::vector<DispatchEntry>& out, DiagnosticList& diags) {
    if (n.kind == NodeKind::Call) {
        const std::string& q = n.callee_qname;
        if (q == "entry" || (q.size() > 6 && q.compare(q.size() - 6, 6, ".entry") == 0)) {
            DispatchEntry e;
            e.source_span = n.span;
            e.file = file;
            const AstNode* path = nth_arg(n, 0);
            const AstNode* target = nth_arg(n, 1);
            if (!path || !target) {
                diags.push_back({DiagKind::MalformedEntry, file, n.span.line_begin,
                                 n.span.col_begin, "entry() needs a path and a target"});
            } else {
                if (path->kind == NodeKind::TableConstructor) {
                    for (const auto& field : path->children) {
                        const AstNode& v = *field->children.back();
                        if (v.kind == NodeKind::StringLit) {
                            e.path_segments.push_back(v.text);
                            e.segment_dynamic.push_back(false);
                        } else {
                            e.path_segments.push_back("<dynamic>");
                            e.segment_dynamic.push_back(true);
                        }
                    }
                    if (e.path_segments.empty()) {
                        e.path_segments.push_back("<dynamic>");
                        e.segment_dynamic.push_back(true);
                        e.path_dynamic = true;
                    }
                } else {
                    e.path_segments.push_back("<dynamic>");
                    e.segment_dynamic.push_back(true);
                    e.path_dynamic = true;
                }
                if (target->kind == NodeKind::Call && !target->callee_qname.empty()) {
                    const std::string& tq = target->callee_qname;
                    const AstNode* a0 = nth_arg(*target, 0);
                    if (tq == "call" || tq == "post" || tq == "post_on") {
                        e.target_kind = tq;
                        if (a0 && a0->kind == NodeKind::StringLit)
                            e.target = a0->text;
                        else if (tq == "post_on" && nth_arg(*target, 1) &&
                                 nth_arg(*target, 1)->kind == NodeKind::StringLit)
                            e.target = nth_arg(*target, 1)->text;
                        else
                            diags.push_back({DiagKind::MalformedEntry, file,
                                             target->span.line_begin, target->span.col_begin,
                                             "non-literal function name in " + tq + "()"});
                    } else {
                        // template(...), cbi(...), form(...), firstchild(), alias(...)
                        e.target_kind = tq;
                        if (a0 && a0->kind == NodeKind::StringLit) e.target = a0->text;
                    }
                } else if (!name_chain(*target).empty()) {
                    e.target_kind = "ref";
                    e.target = name_chain(*target);
                } else {
                    e.target_kind = "dynamic";
                }
                const AstNode* title = nth_arg(n, 2);
                if (title && title->kind == NodeKind::StringLit) e.title = title->text;
                const AstNode* order = nth_arg(n, 3);
                if (order && order->kind == NodeKind::NumberLit) {
                    e.order = std::strtod(order->text.c_str(), nullptr);
                    e.has_order = true;
                }
                out.push_back(std::move(e));
            }
        }
    }
    for (const auto& ch : n.children) collect_entries(*ch, file, out, diags);
}

}  // namespace

std::vector<DispatchEntry> extract_dispatch_entries(const frontend::AstNode& chunk,
                                                    const std::string& file,
                                                    DiagnosticList& diags) {
    std::vector<DispatchEntry> out;
    collect_entries(chunk, file, out, diags);
    bool controller = file.find("controller/") != std::string::npos;
    for (auto& e : out) e.from_controller = controller;
    return out;
}

std::vector<Cfg*> attach_dispatched(std::vector<Cfg*> roots,
                                    const std::vector<DispatchEntry>& entries,
                                    const FunctionDict& dict, DiagnosticList& diags) {
    for (const auto& e : entries) {
        if (e.target.empty()) continue;
        if (e.target_kind != "call" && e.target_kind != "post" &&
            e.target_kind != "post_on" && e.target_kind != "ref")
            continue;
        Cfg* target = dict.resolve(e.target);
        if (!target) {
            diags.push_back({DiagKind::TargetNotFound, e.file, e.source_span.line_begin,
                             e.source_span.col_begin,
                             "dispatch target '" + e.target + "' not found"});
            continue;
        }
        target->web_reachable = true;
        if (std::find(roots.begin(), roots.end(), target) == roots.end())
            roots.push_back(target);
    }
    return roots;
}

std::string to_dot(const Cfg& cfg) {
    std::string out = "digraph \"" + cfg.name + "\" {\n  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& n : cfg.nodes) {
        std::string label = std::to_string(n.id) + ": " + to_string(n.kind);
        if (!n.label.empty()) label += "\\n" + n.label;
        std::string escaped;
        for (char c : label) {
            if (c == '"') escaped += "\\\"";
            else escaped += c;
        }
        out += "  n" + std::to_string(n.id) + " [label=\"" + escaped + "\"];\n";
    }
    for (const auto& n : cfg.nodes)
        for (int s : n.succs)
            out += "  n" + std::to_string(n.id) + " -> n" + std::to_string(s) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace luciscan::cfg
