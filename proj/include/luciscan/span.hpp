// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

namespace luciscan {

/// Half-open byte range with 1-based line/column endpoints.
struct Span {
    int line_begin = 0;
    int col_begin = 0;
    int line_end = 0;
    int col_end = 0;
    std::size_t offset_begin = 0;
    std::size_t offset_end = 0;

    bool valid() const { return line_begin > 0; }

    bool contains(const Span& other) const {
        return offset_begin <= other.offset_begin && other.offset_end <= offset_end;
    }

    static Span join(const Span& a, const Span& b) {
        Span s;
        s.line_begin = a.line_begin;
        s.col_begin = a.col_begin;
        s.offset_begin = a.offset_begin;
        s.line_end = b.line_end;
        s.col_end = b.col_end;
        s.offset_end = b.offset_end;
        return s;
    }
};

inline std::string to_string(const Span& s) {
    return std::to_string(s.line_begin) + ":" + std::to_string(s.col_begin);
}

}  // namespace luciscan
