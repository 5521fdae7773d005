// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace luciscan::frontend {

/// One `FROM -> TO` escape-rewrite rule applied inside short string literals.
struct FixupRule {
    std::string from;
    std::string to;
};

struct FixupTable {
    std::vector<FixupRule> rules;

    /// The two stock rules: "\*" -> "%*" and "\-" -> "%-".
    static FixupTable defaults();

    /// Parses `FROM<TAB>TO` lines, '#' comments. Escapes \t \n \\ are decoded
    /// in both columns. Rules are appended after the defaults.
    static FixupTable load(const std::string& path);

    /// Throws ConfigError when any TO contains any FROM as a substring
    /// (such a table would not be idempotent).
    void validate() const;
};

struct Fixup {
    int line = 0;
    int col = 0;
    std::string original;
    std::string replacement;
    std::size_t raw_offset = 0;        // byte offset in raw text
    std::size_t sanitized_offset = 0;  // byte offset in sanitized text
};

struct PrescanResult {
    std::string sanitized_text;
    std::vector<Fixup> fixups;
};

/// Rewrites escape sequences inside short string literals only; everything
/// else (code, comments, long strings) passes through byte for byte. Works on
/// arbitrary bytes and never fails: unrecognized escapes outside the table
/// are preserved.
PrescanResult prescan_source(std::string_view raw_text, const FixupTable& table);

inline PrescanResult prescan_source(std::string_view raw_text) {
    return prescan_source(raw_text, FixupTable::defaults());
}

/// Reverses every recorded fixup; reconstructs the raw text exactly.
std::string undo_fixups(std::string_view sanitized_text, const std::vector<Fixup>& fixups);

}  // namespace luciscan::frontend
