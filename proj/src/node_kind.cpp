#include "netscan/node_kind.hpp"

#include <string>

#include "netscan/errors.hpp"

namespace netscan {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kNames = {
    "Input",      "Output",     "Inout",      "Terminal",   "Constant", "Dff",
    "Latch",      "Branch",     "Cond",       "Concat",     "Partselect", "Bitselect",
    "And",        "Or",         "Nand",       "Nor",        "Xor",      "Xnor",
    "Not",        "Buf",        "LogicalAnd", "LogicalOr",  "LogicalNot", "Plus",
    "Minus",      "Times",      "Divide",     "Mod",        "Eq",       "Neq",
    "Lt",         "Gt",         "Le",         "Ge",         "Sll",      "Srl",
    "UnaryReduceOr"};

}  // namespace

std::string_view kind_name(NodeKind k) { return kNames[static_cast<size_t>(k)]; }

NodeKind kind_from_name(std::string_view name) {
  for (int i = 0; i < kNodeKindCount; ++i)
    if (kNames[static_cast<size_t>(i)] == name) return static_cast<NodeKind>(i);
  throw ScanError(Err::UnknownKind, std::string(name));
}

}  // namespace netscan
