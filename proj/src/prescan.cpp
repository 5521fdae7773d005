// SPDX-License-Identifier: Apache-2.0
#include "luciscan/prescan.hpp"

#include <fstream>

#include "luciscan/diag.hpp"

namespace luciscan::frontend {

namespace {

// Minimal scanner that only distinguishes code / comment / short string /
// long string. Runs on files the real parser would reject; that is the point.
struct Scanner {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < text.size() ? text[pos + ahead] : '\0';
    }
    char step() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    // level of a long-bracket opener at pos, or -1
    int long_level() const {
        if (peek() != '[') return -1;
        std::size_t i = 1;
        int level = 0;
        while (peek(i) == '=') {
            ++level;
            ++i;
        }
        return peek(i) == '[' ? level : -1;
    }
};

std::string decode_column(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            char n = s[++i];
            switch (n) {
                case 't': out.push_back('\t'); break;
                case 'n': out.push_back('\n'); break;
                case '\\': out.push_back('\\'); break;
                default:
                    out.push_back('\\');
                    out.push_back(n);
            }
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace

FixupTable FixupTable::defaults() {
    return FixupTable{{{"\\*", "%*"}, {"\\-", "%-"}}};
}

FixupTable FixupTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open fixup table: " + path);
    FixupTable table = defaults();
    std::string ln;
    int lineno = 0;
    while (std::getline(in, ln)) {
        ++lineno;
        if (!ln.empty() && ln.back() == '\r') ln.pop_back();
        std::size_t first = ln.find_first_not_of(" \t");
        if (first == std::string::npos || ln[first] == '#') continue;
        std::size_t tab = ln.find('\t', first);
        if (tab == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected FROM<TAB>TO");
        std::string from = decode_column(ln.substr(first, tab - first));
        std::string to = decode_column(ln.substr(tab + 1));
        if (from.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty FROM");
        table.rules.push_back({from, to});
    }
    table.validate();
    return table;
}

void FixupTable::validate() const {
    for (const auto& a : rules) {
        for (const auto& b : rules) {
            if (!a.to.empty() && a.to.find(b.from) != std::string::npos)
                throw ConfigError("fixup rule '" + b.from + "' occurs in replacement '" +
                                  a.to + "'; table would not be idempotent");
        }
    }
}

PrescanResult prescan_source(std::string_view raw_text, const FixupTable& table) {
    Scanner sc{raw_text};
    PrescanResult result;
    result.sanitized_text.reserve(raw_text.size());
    std::string& out = result.sanitized_text;

    auto copy_long_bracket = [&](int level) {
        // opener
        out.push_back(sc.step());
        for (int i = 0; i < level; ++i) out.push_back(sc.step());
        out.push_back(sc.step());
        while (!sc.eof()) {
            if (sc.peek() == ']') {
                std::size_t i = 1;
                int eq = 0;
                while (sc.peek(i) == '=') {
                    ++eq;
                    ++i;
                }
                if (eq == level && sc.peek(i) == ']') {
                    for (int k = 0; k < level + 2; ++k) out.push_back(sc.step());
                    return;
                }
            }
            out.push_back(sc.step());
        }
    };

    while (!sc.eof()) {
        char c = sc.peek();
        if (c == '-' && sc.peek(1) == '-') {
            out.push_back(sc.step());
            out.push_back(sc.step());
            int level = sc.long_level();
            if (level >= 0) {
                copy_long_bracket(level);
            } else {
                while (!sc.eof() && sc.peek() != '\n') out.push_back(sc.step());
            }
            continue;
        }
        if (c == '[') {
            int level = sc.long_level();
            if (level >= 0) {
                copy_long_bracket(level);
                continue;
            }
            out.push_back(sc.step());
            continue;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            out.push_back(sc.step());
            while (!sc.eof()) {
                char s = sc.peek();
                if (s == quote) {
                    out.push_back(sc.step());
                    break;
                }
                if (s == '\n') break;  // unterminated; leave for the parser to report
                const FixupRule* hit = nullptr;
                for (const auto& rule : table.rules) {
                    if (raw_text.compare(sc.pos, rule.from.size(), rule.from) == 0 &&
                        (!hit || rule.from.size() > hit->from.size()))
                        hit = &rule;
                }
                if (hit) {
                    Fixup fx;
                    fx.line = sc.line;
                    fx.col = sc.col;
                    fx.original = hit->from;
                    fx.replacement = hit->to;
                    fx.raw_offset = sc.pos;
                    fx.sanitized_offset = out.size();
                    result.fixups.push_back(fx);
                    for (std::size_t i = 0; i < hit->from.size(); ++i) sc.step();
                    out.append(hit->to);
                    continue;
                }
                if (s == '\\' && sc.pos + 1 < raw_text.size()) {
                    out.push_back(sc.step());  // backslash
                    out.push_back(sc.step());  // escaped char, possibly '\\'
                    continue;
                }
                out.push_back(sc.step());
            }
            continue;
        }
        out.push_back(sc.step());
    }
    return result;
}

std::string undo_fixups(std::string_view sanitized_text, const std::vector<Fixup>& fixups) {
    std::string raw;
    raw.reserve(sanitized_text.size());
    std::size_t pos = 0;
    for (const auto& fx : fixups) {
        raw.append(sanitized_text.substr(pos, fx.sanitized_offset - pos));
        raw.append(fx.original);
        pos = fx.sanitized_offset + fx.replacement.size();
    }
    raw.append(sanitized_text.substr(pos));
    return raw;
}

}  // namespace luciscan::frontend
