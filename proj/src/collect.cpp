// SPDX-License-Identifier: Apache-2.0
#include "luciscan/collect.hpp"

#include <algorithm>
#include <filesystem>
#include <system_error>

namespace fs = std::filesystem;

namespace luciscan::frontend {

namespace {

// component-wise glob with '**' spanning any number of components
bool match_components(const std::vector<std::string>& pat, std::size_t pi,
                      const std::vector<std::string>& comp, std::size_t ci);

bool match_one(const std::string& pat, const std::string& s) {
    std::size_t p = 0, i = 0, star = std::string::npos, mark = 0;
    while (i < s.size()) {
        if (p < pat.size() && (pat[p] == '?' || pat[p] == s[i])) {
            ++p;
            ++i;
        } else if (p < pat.size() && pat[p] == '*') {
            star = p++;
            mark = i;
        } else if (star != std::string::npos) {
            p = star + 1;
            i = ++mark;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

bool match_components(const std::vector<std::string>& pat, std::size_t pi,
                      const std::vector<std::string>& comp, std::size_t ci) {
    if (pi == pat.size()) return ci == comp.size();
    if (pat[pi] == "**") {
        for (std::size_t skip = ci; skip <= comp.size(); ++skip)
            if (match_components(pat, pi + 1, comp, skip)) return true;
        return false;
    }
    if (ci == comp.size()) return false;
    return match_one(pat[pi], comp[ci]) && match_components(pat, pi + 1, comp, ci + 1);
}

std::vector<std::string> split_path(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

bool glob_match(const std::string& pattern, const std::string& path) {
    return match_components(split_path(pattern), 0, split_path(path), 0);
}

std::vector<std::string> collect_files(const std::string& root, const CollectOptions& opts,
                                       DiagnosticList& diags) {
    std::error_code ec;
    if (!fs::exists(root, ec) || !fs::is_directory(root, ec))
        throw RootNotFound("scan root not found or not a directory: " + root);

    std::vector<std::string> out;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied,
                                        ec);
    if (ec)
        throw RootNotFound("cannot read scan root " + root + ": " + ec.message());
    fs::recursive_directory_iterator end;
    for (; it != end; it.increment(ec)) {
        if (ec) {
            diags.push_back({DiagKind::PermissionDenied, it->path().string(), 0, 0,
                             ec.message()});
            ec.clear();
            continue;
        }
        std::error_code fec;
        if (!it->is_regular_file(fec)) continue;
        std::string rel = fs::relative(it->path(), root, fec).generic_string();
        if (fec) continue;
        bool matched = false;
        for (const auto& p : opts.patterns)
            if (glob_match(p, rel)) {
                matched = true;
                break;
            }
        if (!matched) continue;
        if (!opts.include.empty()) {
            bool keep = false;
            for (const auto& p : opts.include)
                if (glob_match(p, rel)) {
                    keep = true;
                    break;
                }
            if (!keep) continue;
        }
        bool excluded = false;
        for (const auto& p : opts.exclude)
            if (glob_match(p, rel)) {
                excluded = true;
                break;
            }
        if (excluded) continue;
        out.push_back(rel);
    }

    if (opts.luci_only) {
        const std::string prefix = "usr/lib/lua/luci/";
        bool have_luci = std::any_of(out.begin(), out.end(), [&](const std::string& p) {
            return p.rfind(prefix, 0) == 0;
        });
        if (have_luci) {
            std::erase_if(out, [&](const std::string& p) { return p.rfind(prefix, 0) != 0; });
        }
    }

    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace luciscan::frontend
