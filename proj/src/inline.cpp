// SPDX-License-Identifier: Apache-2.0
#include "luciscan/inline.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace luciscan::cfg {

namespace {

std::string flat_name(const std::string& qname) {
    std::string out = qname;
    std::replace(out.begin(), out.end(), '.', '$');
    return out;
}

struct Work {
    std::vector<CfgNode> nodes;  // append-only; id == index here
    std::vector<int> order;      // live ids in program order
    std::vector<bool> dead;
    Cfg meta;  // name/params/flags of the root
    int next_call_id = 0;
    int site_counter = 0;
    DiagnosticList diags;
    int splices = 0;

    CfgNode& node(int id) { return nodes[static_cast<std::size_t>(id)]; }

    void replace_succ(int node_id, int from, int to) {
        for (int& s : node(node_id).succs)
            if (s == from) s = to;
    }

    static void erase_value(std::vector<int>& v, int x) {
        v.erase(std::remove(v.begin(), v.end(), x), v.end());
    }
};

struct PendingCall {
    int node_id;
    int call_id;
    int depth;
};

Work load(const Cfg& root) {
    Work w;
    w.meta = root;
    w.meta.nodes.clear();
    w.nodes = root.nodes;
    w.next_call_id = root.next_call_id;
    w.dead.assign(w.nodes.size(), false);
    for (const auto& n : w.nodes) w.order.push_back(n.id);
    return w;
}

Cfg finish(Work&& w) {
    Cfg out = std::move(w.meta);
    std::vector<int> remap(w.nodes.size(), -1);
    for (int id : w.order) {
        if (w.dead[static_cast<std::size_t>(id)]) continue;
        remap[static_cast<std::size_t>(id)] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(std::move(w.nodes[static_cast<std::size_t>(id)]));
    }
    for (auto& n : out.nodes) {
        n.id = remap[static_cast<std::size_t>(n.id)];
        for (int& p : n.preds) p = remap[static_cast<std::size_t>(p)];
        for (int& s : n.succs) s = remap[static_cast<std::size_t>(s)];
        std::sort(n.preds.begin(), n.preds.end());
        std::sort(n.succs.begin(), n.succs.end());
    }
    out.entry_id = remap[static_cast<std::size_t>(out.entry_id)];
    out.exit_id = remap[static_cast<std::size_t>(out.exit_id)];
    out.next_call_id = w.next_call_id;
    return out;
}

class Expander {
  public:
    Expander(Work& w, const FunctionDict& dict, const InlineOptions& opts)
        : w_(w), dict_(dict), opts_(opts) {}

    // is this call's result consumed somewhere we can rewire?
    static bool eligible(const CfgNode& n, const CallRef& c) {
        if (n.top_call_id == c.call_id) return true;
        for (const auto& b : n.bindings)
            if (b.result_of_call == c.call_id) return true;
        for (const auto& other : n.calls)
            for (const auto& a : other.args)
                if (a.result_of_call == c.call_id) return true;
        return false;
    }

    InlineStatus splice(int node_id, int call_id, int depth,
                        std::deque<PendingCall>* queue) {
        CfgNode& n0 = w_.node(node_id);
        auto cit = std::find_if(n0.calls.begin(), n0.calls.end(),
                                [&](const CallRef& c) { return c.call_id == call_id; });
        if (cit == n0.calls.end()) return InlineStatus::NotEligible;
        CallRef call = *cit;  // copy; splicing rewrites the node

        if (call.dynamic || call.qname.empty() || opts_.never_inline.count(call.qname))
            return InlineStatus::NotEligible;
        if (!eligible(n0, call)) return InlineStatus::NotEligible;
        const Cfg* callee = dict_.resolve(call.qname);
        if (!callee) return InlineStatus::UnresolvedCallee;
        if (depth >= opts_.max_depth) {
            w_.diags.push_back({DiagKind::DepthExceeded, n0.file, call.span.line_begin,
                                call.span.col_begin,
                                "inline depth limit reached for '" + call.qname + "'"});
            return InlineStatus::DepthExceeded;
        }

        int site = ++w_.site_counter;
        std::string suffix = "#" + std::to_string(site);
        std::string ret_ident = flat_name(call.qname) + "$ret" + suffix;

        // -- copy the callee --------------------------------------------
        int base = static_cast<int>(w_.nodes.size());
        std::unordered_map<int, int> callmap;  // callee call ids -> fresh
        std::vector<int> copy_ids;
        std::vector<int> param_copies;
        for (const auto& src : callee->nodes) {
            CfgNode cp = src;
            cp.id = base + src.id;
            for (int& p : cp.preds) p += base;
            for (int& s : cp.succs) s += base;
            rename_node(cp, *callee, suffix, ret_ident, callmap);
            if (cp.synthetic_param) param_copies.push_back(cp.id);
            copy_ids.push_back(cp.id);
            w_.nodes.push_back(std::move(cp));
            w_.dead.push_back(false);
        }

        int entry_copy = base + callee->entry_id;
        int exit_copy = base + callee->exit_id;

        // -- bind actuals to the copied parameter nodes ------------------
        std::vector<ArgInfo> actuals;
        if (call.is_method) {
            ArgInfo recv;
            recv.reads = call.receiver_reads;
            recv.literal_only = false;
            if (call.receiver_reads.size() == 1 &&
                call.receiver_reads[0].enclosing_calls.size() <= 1)
                recv.bare_identity = call.receiver_reads[0].ident;
            actuals.push_back(std::move(recv));
        }
        for (const auto& a : call.args) actuals.push_back(a);

        for (std::size_t i = 0; i < param_copies.size(); ++i) {
            CfgNode& pn = w_.node(param_copies[i]);
            pn.synthetic_param = false;
            RhsBinding b;
            b.target = pn.lh.empty() ? Def{} : pn.lh[0];
            if (i < actuals.size()) {
                b.reads = actuals[i].reads;
                b.calls = actuals[i].calls;
                b.literal_only = actuals[i].literal_only;
                b.alias_of = actuals[i].bare_identity;
                pn.label += " := " + (actuals[i].excerpt.empty() ? std::string("<recv>")
                                                                 : actuals[i].excerpt);
            } else {
                b.literal_only = true;  // missing actual: nil
                pn.label += " := nil";
            }
            pn.bindings.clear();
            pn.bindings.push_back(std::move(b));
            pn.rh.clear();
            for (const auto& r : pn.bindings[0].reads) pn.rh.push_back(r.ident);
        }

        if (callee->has_varargs && actuals.size() > param_copies.size()) {
            int after = param_copies.empty() ? entry_copy : param_copies.back();
            int next = w_.node(after).succs.empty() ? -1 : w_.node(after).succs[0];
            CfgNode va;
            va.id = static_cast<int>(w_.nodes.size());
            va.kind = CfgNodeKind::Assignment;
            va.span = call.span;
            va.file = n0.file;
            va.func = callee->name;
            va.label = "varargs" + suffix;
            va.lh.push_back({"..." + suffix, false});
            RhsBinding b;
            b.target = va.lh[0];
            for (std::size_t i = param_copies.size(); i < actuals.size(); ++i) {
                for (const auto& r : actuals[i].reads) b.reads.push_back(r);
                b.literal_only = b.literal_only && actuals[i].literal_only;
            }
            for (const auto& r : b.reads) va.rh.push_back(r.ident);
            va.bindings.push_back(std::move(b));
            w_.nodes.push_back(std::move(va));
            w_.dead.push_back(false);
            int va_id = w_.nodes.back().id;
            copy_ids.push_back(va_id);
            if (next >= 0) {
                w_.replace_succ(after, next, va_id);
                auto& np = w_.node(next).preds;
                std::replace(np.begin(), np.end(), after, va_id);
                w_.node(va_id).preds.push_back(after);
                w_.node(va_id).succs.push_back(next);
            }
        }

        // -- wire the copy into the caller -------------------------------
        CfgNode& n = w_.node(node_id);
        int ces = w_.node(entry_copy).succs.empty() ? exit_copy
                                                    : w_.node(entry_copy).succs[0];
        Work::erase_value(w_.node(ces).preds, entry_copy);

        std::vector<int> callers = n.preds;
        // returns flow into the call node
        n.preds.clear();
        for (int u : w_.node(exit_copy).preds) {
            if (u == entry_copy) continue;
            w_.replace_succ(u, exit_copy, node_id);
            n.preds.push_back(u);
        }
        if (ces == exit_copy) {
            // empty callee body: callers keep feeding the call node
            for (int p : callers) n.preds.push_back(p);
        } else {
            for (int p : callers) {
                w_.replace_succ(p, node_id, ces);
                w_.node(ces).preds.push_back(p);
            }
        }
        w_.dead[static_cast<std::size_t>(entry_copy)] = true;
        w_.dead[static_cast<std::size_t>(exit_copy)] = true;

        // order: copied body goes right before the call node
        auto pos = std::find(w_.order.begin(), w_.order.end(), node_id);
        std::vector<int> live_copies;
        for (int id : copy_ids)
            if (!w_.dead[static_cast<std::size_t>(id)]) live_copies.push_back(id);
        w_.order.insert(pos, live_copies.begin(), live_copies.end());

        // -- consume the call's result at the caller ----------------------
        for (auto& b : n.bindings)
            if (b.result_of_call == call_id) {
                b.reads = {{ret_ident, {}, {}}};
                b.alias_of = ret_ident;
                b.result_of_call = -1;
                b.literal_only = false;
            }
        for (auto& other : n.calls)
            for (auto& a : other.args)
                if (a.result_of_call == call_id) {
                    a.reads = {{ret_ident, {}, {}}};
                    a.bare_identity = ret_ident;
                    a.result_of_call = -1;
                    a.literal_only = false;
                }
        if (n.top_call_id == call_id) n.top_call_id = -1;
        n.calls.erase(std::find_if(n.calls.begin(), n.calls.end(),
                                   [&](const CallRef& c) { return c.call_id == call_id; }));
        auto rit = std::find(n.rh.begin(), n.rh.end(), call.qname);
        if (rit != n.rh.end()) n.rh.erase(rit);
        n.rh.push_back(ret_ident);

        ++w_.splices;
        if (queue) {
            for (int id : copy_ids)
                if (!w_.dead[static_cast<std::size_t>(id)])
                    for (const auto& c : w_.node(id).calls)
                        queue->push_back({id, c.call_id, depth + 1});
        }
        return InlineStatus::Ok;
    }

  private:
    // shadow-renames locals of the callee; leaves globals and call names alone
    void rename_node(CfgNode& cp, const Cfg& callee, const std::string& suffix,
                     const std::string& ret_ident,
                     std::unordered_map<int, int>& callmap) {
        auto rename = [&](Identity& id) {
            std::string root = identity_root(id);
            if (root == "$ret") {
                id = ret_ident + id.substr(4);
            } else if (callee.locals.count(root)) {
                id = rename_root(id, suffix);
            }
        };
        auto rename_reads = [&](std::vector<ReadRef>& reads) {
            for (auto& r : reads) {
                rename(r.ident);
                for (int& cid : r.enclosing_call_ids) cid = remap_call(cid, callmap);
            }
        };
        for (auto& d : cp.lh) rename(d.path);
        for (auto& id : cp.rh) rename(id);
        for (auto& b : cp.bindings) {
            rename(b.target.path);
            rename_reads(b.reads);
            if (!b.alias_of.empty()) rename(b.alias_of);
            if (b.result_of_call >= 0) b.result_of_call = remap_call(b.result_of_call, callmap);
        }
        for (auto& c : cp.calls) {
            c.call_id = remap_call(c.call_id, callmap);
            rename_reads(c.receiver_reads);
            for (auto& a : c.args) {
                rename_reads(a.reads);
                if (!a.bare_identity.empty()) rename(a.bare_identity);
                if (a.result_of_call >= 0) a.result_of_call = remap_call(a.result_of_call, callmap);
            }
        }
        if (cp.top_call_id >= 0) cp.top_call_id = remap_call(cp.top_call_id, callmap);
    }

    int remap_call(int old_id, std::unordered_map<int, int>& callmap) {
        auto it = callmap.find(old_id);
        if (it != callmap.end()) return it->second;
        int fresh = w_.next_call_id++;
        callmap.emplace(old_id, fresh);
        return fresh;
    }

    Work& w_;
    const FunctionDict& dict_;
    const InlineOptions& opts_;
};

}  // namespace

InlineExpansion expand(const Cfg& root, const FunctionDict& dict, const InlineOptions& opts) {
    Work w = load(root);
    Expander ex(w, dict, opts);

    std::deque<PendingCall> queue;
    for (int id : w.order)
        for (const auto& c : w.node(id).calls)
            queue.push_back({id, c.call_id, 0});

    while (!queue.empty()) {
        PendingCall pc = queue.front();
        queue.pop_front();
        ex.splice(pc.node_id, pc.call_id, pc.depth, &queue);
    }

    InlineExpansion out;
    out.diags = std::move(w.diags);
    out.splice_count = w.splices;
    out.cfg = finish(std::move(w));
    return out;
}

InlineStatus inline_call(Cfg& caller, int node_id, int call_id, const FunctionDict& dict,
                         int depth, const InlineOptions& opts, DiagnosticList& diags) {
    Work w = load(caller);
    if (call_id < 0) {
        if (node_id < 0 || node_id >= static_cast<int>(w.nodes.size()))
            return InlineStatus::NotEligible;
        const CfgNode& n = w.node(node_id);
        if (n.top_call_id >= 0)
            call_id = n.top_call_id;
        else if (!n.calls.empty())
            call_id = n.calls.back().call_id;
        else
            return InlineStatus::NotEligible;
    }
    Expander ex(w, dict, opts);
    InlineStatus st = ex.splice(node_id, call_id, depth, nullptr);
    for (auto& d : w.diags) diags.push_back(d);
    if (st == InlineStatus::Ok) caller = finish(std::move(w));
    return st;
}

}  // namespace luciscan::cfg
