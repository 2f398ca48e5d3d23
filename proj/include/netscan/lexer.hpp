#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netscan/errors.hpp"

namespace netscan {

enum class Tok {
  KwModule, KwEndmodule, KwInput, KwOutput, KwInout, KwWire, KwReg,
  KwParameter, KwLocalparam, KwAssign, KwAlways, KwPosedge, KwIf, KwElse,
  KwBegin, KwEnd,
  KwAnd, KwOr, KwNand, KwNor, KwXor, KwXnor, KwNot, KwBuf,
  Ident, Num,
  LParen, RParen, LBrack, RBrack, LBrace, RBrace,
  Semi, Comma, Dot, Colon, Hash, Question, At, Star,
  Eq,       // '='  (also blocking assignment)
  TildeOp,  // '~'
  Amp, Pipe, Caret, TildeCaret,
  AmpAmp, PipePipe, Bang,
  Plus, Minus, Slash, Percent,
  EqEq, BangEq, Lt, Gt, LtEq, GtEq,  // LtEq doubles as the nonblocking assign
  Shl, Shr,
  EndOfFile,
};

std::string_view tok_name(Tok t);

struct Token {
  Tok type;
  std::string text;       // identifier spelling or raw number text
  uint64_t value = 0;     // numeric value for Num
  int width = 0;          // declared width for sized literals, 0 if unsized
  bool sized = false;
  Pos pos;
};

/// Lex the structural-Verilog subset. Comments and whitespace are dropped;
/// tokens carry 1-based line/column. Throws IllegalCharacter for bytes
/// outside the grammar's alphabet.
std::vector<Token> tokenize(std::string_view text);

}  // namespace netscan
