#pragma once

#include <string_view>

#include "netscan/ast.hpp"
#include "netscan/lexer.hpp"

namespace netscan {

/// Recursive-descent parser for the structural subset (see docs/grammar.ebnf).
/// Validates declaration/reference consistency per module:
/// every referenced identifier must be a declared net, port, or parameter.
NetlistAst parse_netlist(std::vector<Token> tokens);

NetlistAst parse_text(std::string_view text);
NetlistAst parse_file(const std::string& path);

}  // namespace netscan
