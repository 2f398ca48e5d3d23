#include "netscan/errors.hpp"

namespace netscan {

const char* err_name(Err e) {
  switch (e) {
    case Err::IllegalCharacter: return "IllegalCharacter";
    case Err::SyntaxError: return "SyntaxError";
    case Err::UndeclaredIdentifier: return "UndeclaredIdentifier";
    case Err::DuplicateDeclaration: return "DuplicateDeclaration";
    case Err::UnknownTop: return "UnknownTop";
    case Err::RecursiveInstantiation: return "RecursiveInstantiation";
    case Err::UnboundPort: return "UnboundPort";
    case Err::MultipleDrivers: return "MultipleDrivers";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::UnknownKind: return "UnknownKind";
    case Err::MissingFile: return "MissingFile";
    case Err::ChecksumMismatch: return "ChecksumMismatch";
    case Err::LabelMissing: return "LabelMissing";
    case Err::TooFewSamples: return "TooFewSamples";
    case Err::SingleClassTrainSet: return "SingleClassTrainSet";
    case Err::DivergedLoss: return "DivergedLoss";
    case Err::TapeExhausted: return "TapeExhausted";
    case Err::EmptyGraph: return "EmptyGraph";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::ConfigError: return "ConfigError";
    case Err::GeneratorError: return "GeneratorError";
    case Err::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace netscan
