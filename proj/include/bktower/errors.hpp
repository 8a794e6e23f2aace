#pragma once

#include <stdexcept>
#include <string>

namespace bkt {

/// Failure categories surfaced by the library.  Decision procedures that can
/// legitimately answer "no" return result structs instead; exceptions are for
/// contract violations and exhausted precision.
enum class Err {
  ConfigInvalid,        // bad prime / Eisenstein data / window parameters
  HeightTooLarge,       // r outside [0, p-2]
  DepthExceeded,        // tower level outside the configured range
  PrecisionExhausted,   // an operation needs digits the window no longer has
  DenominatorOverflow,  // p-power denominator exceeded the divided-power budget
  NotIntegral,          // element expected in the integral subring W[[u]]
  NotInFiltration,      // claimed filtration membership fails
  InvalidModule,        // module presentation violates A*B = B*A = E^r
  Incompatible,         // chain fails the Frobenius compatibility relation
  DescentInconclusive,  // descent window too small for the requested residual
  ParseError,           // malformed JSON / polynomial text
  SchemaMismatch,       // JSON present but keys/shape wrong
  IoError,              // file read/write failure
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what);
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& what);

}  // namespace bkt
