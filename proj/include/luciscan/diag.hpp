// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "luciscan/span.hpp"

namespace luciscan {

enum class DiagKind {
    Warning,
    SyntaxError,
    LoweringError,
    UnresolvedCallee,
    DepthExceeded,
    MalformedEntry,
    TargetNotFound,
    PermissionDenied,
};

struct Diagnostic {
    DiagKind kind = DiagKind::Warning;
    std::string file;
    int line = 0;
    int col = 0;
    std::string message;
};

inline const char* to_string(DiagKind k) {
    switch (k) {
        case DiagKind::Warning: return "warning";
        case DiagKind::SyntaxError: return "syntax-error";
        case DiagKind::LoweringError: return "lowering-error";
        case DiagKind::UnresolvedCallee: return "unresolved-callee";
        case DiagKind::DepthExceeded: return "depth-exceeded";
        case DiagKind::MalformedEntry: return "malformed-entry";
        case DiagKind::TargetNotFound: return "target-not-found";
        case DiagKind::PermissionDenied: return "permission-denied";
    }
    return "unknown";
}

using DiagnosticList = std::vector<Diagnostic>;

/// Fatal configuration problem (bad trigger-words file, bad flags).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Scan root missing or unreadable.
class RootNotFound : public std::runtime_error {
  public:
    explicit RootNotFound(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the parser; caught per file and turned into a Diagnostic.
class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(std::string file, int line, int col, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(col) +
                             ": " + message),
          file_(std::move(file)),
          line_(line),
          col_(col),
          message_(message) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& message() const { return message_; }

  private:
    std::string file_;
    int line_;
    int col_;
    std::string message_;
};

}  // namespace luciscan
