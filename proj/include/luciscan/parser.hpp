// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "luciscan/ast.hpp"

namespace luciscan::frontend {

/// Parses one Lua 5.1 chunk. Throws SyntaxError on malformed input.
/// `text` should already have passed prescan_source.
AstNodePtr parse_chunk(std::string_view text, const std::string& file);

}  // namespace luciscan::frontend
