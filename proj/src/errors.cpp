#include "bktower/errors.hpp"

namespace bkt {

const char* err_name(Err e) {
  switch (e) {
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::HeightTooLarge: return "HeightTooLarge";
    case Err::DepthExceeded: return "DepthExceeded";
    case Err::PrecisionExhausted: return "PrecisionExhausted";
    case Err::DenominatorOverflow: return "DenominatorOverflow";
    case Err::NotIntegral: return "NotIntegral";
    case Err::NotInFiltration: return "NotInFiltration";
    case Err::InvalidModule: return "InvalidModule";
    case Err::Incompatible: return "Incompatible";
    case Err::DescentInconclusive: return "DescentInconclusive";
    case Err::ParseError: return "ParseError";
    case Err::SchemaMismatch: return "SchemaMismatch";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Err code, const std::string& what)
    : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

void fail(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace bkt
