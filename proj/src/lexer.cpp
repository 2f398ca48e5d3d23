#include "netscan/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace netscan {

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::KwModule: return "KwModule";
    case Tok::KwEndmodule: return "KwEndmodule";
    case Tok::KwInput: return "KwInput";
    case Tok::KwOutput: return "KwOutput";
    case Tok::KwInout: return "KwInout";
    case Tok::KwWire: return "KwWire";
    case Tok::KwReg: return "KwReg";
    case Tok::KwParameter: return "KwParameter";
    case Tok::KwLocalparam: return "KwLocalparam";
    case Tok::KwAssign: return "KwAssign";
    case Tok::KwAlways: return "KwAlways";
    case Tok::KwPosedge: return "KwPosedge";
    case Tok::KwIf: return "KwIf";
    case Tok::KwElse: return "KwElse";
    case Tok::KwBegin: return "KwBegin";
    case Tok::KwEnd: return "KwEnd";
    case Tok::KwAnd: return "KwAnd";
    case Tok::KwOr: return "KwOr";
    case Tok::KwNand: return "KwNand";
    case Tok::KwNor: return "KwNor";
    case Tok::KwXor: return "KwXor";
    case Tok::KwXnor: return "KwXnor";
    case Tok::KwNot: return "KwNot";
    case Tok::KwBuf: return "KwBuf";
    case Tok::Ident: return "Ident";
    case Tok::Num: return "Num";
    case Tok::LParen: return "LParen";
    case Tok::RParen: return "RParen";
    case Tok::LBrack: return "LBrack";
    case Tok::RBrack: return "RBrack";
    case Tok::LBrace: return "LBrace";
    case Tok::RBrace: return "RBrace";
    case Tok::Semi: return "Semi";
    case Tok::Comma: return "Comma";
    case Tok::Dot: return "Dot";
    case Tok::Colon: return "Colon";
    case Tok::Hash: return "Hash";
    case Tok::Question: return "Question";
    case Tok::At: return "At";
    case Tok::Star: return "Star";
    case Tok::Eq: return "Eq";
    case Tok::TildeOp: return "TildeOp";
    case Tok::Amp: return "Amp";
    case Tok::Pipe: return "Pipe";
    case Tok::Caret: return "Caret";
    case Tok::TildeCaret: return "TildeCaret";
    case Tok::AmpAmp: return "AmpAmp";
    case Tok::PipePipe: return "PipePipe";
    case Tok::Bang: return "Bang";
    case Tok::Plus: return "Plus";
    case Tok::Minus: return "Minus";
    case Tok::Slash: return "Slash";
    case Tok::Percent: return "Percent";
    case Tok::EqEq: return "EqEq";
    case Tok::BangEq: return "BangEq";
    case Tok::Lt: return "Lt";
    case Tok::Gt: return "Gt";
    case Tok::LtEq: return "LtEq";
    case Tok::GtEq: return "GtEq";
    case Tok::Shl: return "Shl";
    case Tok::Shr: return "Shr";
    case Tok::EndOfFile: return "EndOfFile";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> kw = {
      {"module", Tok::KwModule},       {"endmodule", Tok::KwEndmodule},
      {"input", Tok::KwInput},         {"output", Tok::KwOutput},
      {"inout", Tok::KwInout},         {"wire", Tok::KwWire},
      {"reg", Tok::KwReg},             {"parameter", Tok::KwParameter},
      {"localparam", Tok::KwLocalparam}, {"assign", Tok::KwAssign},
      {"always", Tok::KwAlways},       {"posedge", Tok::KwPosedge},
      {"if", Tok::KwIf},               {"else", Tok::KwElse},
      {"begin", Tok::KwBegin},         {"end", Tok::KwEnd},
      {"and", Tok::KwAnd},             {"or", Tok::KwOr},
      {"nand", Tok::KwNand},           {"nor", Tok::KwNor},
      {"xor", Tok::KwXor},             {"xnor", Tok::KwXnor},
      {"not", Tok::KwNot},             {"buf", Tok::KwBuf},
  };
  return kw;
}

struct Cursor {
  std::string_view s;
  size_t i = 0;
  int line = 1;
  int col = 1;

  bool done() const { return i >= s.size(); }
  char peek(size_t ahead = 0) const { return i + ahead < s.size() ? s[i + ahead] : '\0'; }
  char take() {
    char c = s[i++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  Pos pos() const { return Pos{line, col}; }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

uint64_t digit_val(char c) {
  if (c >= '0' && c <= '9') return static_cast<uint64_t>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<uint64_t>(c - 'a' + 10);
  if (c >= 'A' && c <= 'F') return static_cast<uint64_t>(c - 'A' + 10);
  return ~0ULL;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  Cursor c{text};

  auto emit = [&](Tok t, Pos p, std::string s = {}) {
    Token tok;
    tok.type = t;
    tok.text = std::move(s);
    tok.pos = p;
    out.push_back(std::move(tok));
  };

  while (!c.done()) {
    const char ch = c.peek();
    const Pos p = c.pos();

    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.done() && c.peek() != '\n') c.take();
      continue;
    }
    if (ch == '/' && c.peek(1) == '*') {
      c.take();
      c.take();
      while (!c.done() && !(c.peek() == '*' && c.peek(1) == '/')) c.take();
      if (c.done()) throw ScanError(Err::SyntaxError, p, "unterminated block comment");
      c.take();
      c.take();
      continue;
    }

    if (ident_start(ch)) {
      std::string word;
      while (!c.done() && ident_char(c.peek())) word.push_back(c.take());
      auto it = keywords().find(word);
      if (it != keywords().end()) {
        emit(it->second, p);
      } else {
        emit(Tok::Ident, p, std::move(word));
      }
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '\'') {
      // decimal literal, optionally followed by a based literal body:
      //   123   8'hFF   4'b10_10   'd7
      Token tok;
      tok.type = Tok::Num;
      tok.pos = p;
      std::string raw;
      uint64_t dec = 0;
      bool have_dec = false;
      while (!c.done() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '_')) {
        char d = c.take();
        raw.push_back(d);
        if (d != '_') {
          dec = dec * 10 + static_cast<uint64_t>(d - '0');
          have_dec = true;
        }
      }
      if (!c.done() && c.peek() == '\'') {
        raw.push_back(c.take());
        tok.sized = have_dec;
        tok.width = have_dec ? static_cast<int>(dec) : 0;
        if (c.done()) throw ScanError(Err::SyntaxError, p, "truncated based literal");
        char basec = c.take();
        raw.push_back(basec);
        uint64_t base;
        switch (basec) {
          case 'b': case 'B': base = 2; break;
          case 'o': case 'O': base = 8; break;
          case 'd': case 'D': base = 10; break;
          case 'h': case 'H': base = 16; break;
          default:
            throw ScanError(Err::SyntaxError, p, std::string("bad numeric base '") + basec + "'");
        }
        uint64_t v = 0;
        bool any = false;
        while (!c.done() && (digit_val(c.peek()) != ~0ULL || c.peek() == '_')) {
          char d = c.take();
          raw.push_back(d);
          if (d == '_') continue;
          uint64_t dv = digit_val(d);
          if (dv >= base) throw ScanError(Err::SyntaxError, p, "digit out of range for base");
          v = v * base + dv;
          any = true;
        }
        if (!any) throw ScanError(Err::SyntaxError, p, "based literal needs digits");
        tok.value = v;
      } else {
        if (!have_dec) throw ScanError(Err::SyntaxError, p, "bad number");
        tok.value = dec;
      }
      tok.text = std::move(raw);
      out.push_back(std::move(tok));
      continue;
    }

    auto two = [&](char a, char b) { return ch == a && c.peek(1) == b; };
    if (two('~', '^') || two('^', '~')) { c.take(); c.take(); emit(Tok::TildeCaret, p); continue; }
    if (two('&', '&')) { c.take(); c.take(); emit(Tok::AmpAmp, p); continue; }
    if (two('|', '|')) { c.take(); c.take(); emit(Tok::PipePipe, p); continue; }
    if (two('=', '=')) { c.take(); c.take(); emit(Tok::EqEq, p); continue; }
    if (two('!', '=')) { c.take(); c.take(); emit(Tok::BangEq, p); continue; }
    if (two('<', '=')) { c.take(); c.take(); emit(Tok::LtEq, p); continue; }
    if (two('>', '=')) { c.take(); c.take(); emit(Tok::GtEq, p); continue; }
    if (two('<', '<')) { c.take(); c.take(); emit(Tok::Shl, p); continue; }
    if (two('>', '>')) { c.take(); c.take(); emit(Tok::Shr, p); continue; }

    c.take();
    switch (ch) {
      case '(': emit(Tok::LParen, p); break;
      case ')': emit(Tok::RParen, p); break;
      case '[': emit(Tok::LBrack, p); break;
      case ']': emit(Tok::RBrack, p); break;
      case '{': emit(Tok::LBrace, p); break;
      case '}': emit(Tok::RBrace, p); break;
      case ';': emit(Tok::Semi, p); break;
      case ',': emit(Tok::Comma, p); break;
      case '.': emit(Tok::Dot, p); break;
      case ':': emit(Tok::Colon, p); break;
      case '#': emit(Tok::Hash, p); break;
      case '?': emit(Tok::Question, p); break;
      case '@': emit(Tok::At, p); break;
      case '*': emit(Tok::Star, p); break;
      case '=': emit(Tok::Eq, p); break;
      case '~': emit(Tok::TildeOp, p); break;
      case '&': emit(Tok::Amp, p); break;
      case '|': emit(Tok::Pipe, p); break;
      case '^': emit(Tok::Caret, p); break;
      case '!': emit(Tok::Bang, p); break;
      case '+': emit(Tok::Plus, p); break;
      case '-': emit(Tok::Minus, p); break;
      case '/': emit(Tok::Slash, p); break;
      case '%': emit(Tok::Percent, p); break;
      case '<': emit(Tok::Lt, p); break;
      case '>': emit(Tok::Gt, p); break;
      default:
        throw ScanError(Err::IllegalCharacter, p, std::string("'") + ch + "'");
    }
  }

  return out;
}

}  // namespace netscan
