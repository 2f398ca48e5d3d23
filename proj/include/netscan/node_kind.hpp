#pragma once

#include <array>
#include <string_view>

namespace netscan {

/// Fixed 37-entry node vocabulary of the data-flow graph. The integer values
/// are the feature indices and are versioned in the checkpoint format;
/// changing the order or cardinality is a breaking vocabulary change.
enum class NodeKind : int {
  Input = 0,
  Output = 1,
  Inout = 2,
  Terminal = 3,
  Constant = 4,
  Dff = 5,
  Latch = 6,
  Branch = 7,
  Cond = 8,
  Concat = 9,
  Partselect = 10,
  Bitselect = 11,
  And = 12,
  Or = 13,
  Nand = 14,
  Nor = 15,
  Xor = 16,
  Xnor = 17,
  Not = 18,
  Buf = 19,
  LogicalAnd = 20,
  LogicalOr = 21,
  LogicalNot = 22,
  Plus = 23,
  Minus = 24,
  Times = 25,
  Divide = 26,
  Mod = 27,
  Eq = 28,
  Neq = 29,
  Lt = 30,
  Gt = 31,
  Le = 32,
  Ge = 33,
  Sll = 34,
  Srl = 35,
  UnaryReduceOr = 36,
};

inline constexpr int kNodeKindCount = 37;
inline constexpr int kVocabVersion = 1;

std::string_view kind_name(NodeKind k);

/// Inverse of kind_name; throws UnknownKind for names outside the vocabulary.
NodeKind kind_from_name(std::string_view name);

inline int kind_index(NodeKind k) { return static_cast<int>(k); }

/// True for the kinds that break a combinational path.
inline bool is_sequential(NodeKind k) { return k == NodeKind::Dff || k == NodeKind::Latch; }

}  // namespace netscan
