#pragma once

#include <stdexcept>
#include <string>

namespace netscan {

/// Source position (1-based line/column) for frontend diagnostics.
struct Pos {
  int line = 0;
  int col = 0;
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

enum class Err {
  IllegalCharacter,
  SyntaxError,
  UndeclaredIdentifier,
  DuplicateDeclaration,
  UnknownTop,
  RecursiveInstantiation,
  UnboundPort,
  MultipleDrivers,
  ShapeMismatch,
  UnknownKind,
  MissingFile,
  ChecksumMismatch,
  LabelMissing,
  TooFewSamples,
  SingleClassTrainSet,
  DivergedLoss,
  TapeExhausted,
  EmptyGraph,
  LengthMismatch,
  ConfigError,
  GeneratorError,
  IoError,
};

const char* err_name(Err e);

class ScanError : public std::runtime_error {
 public:
  ScanError(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  ScanError(Err code, Pos pos, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + " at " + pos.str() + ": " + msg),
        code_(code),
        pos_(pos) {}

  Err code() const { return code_; }
  Pos pos() const { return pos_; }

 private:
  Err code_;
  Pos pos_{};
};

}  // namespace netscan
