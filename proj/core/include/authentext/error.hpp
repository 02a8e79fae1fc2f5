#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace authentext {

// Every failure surfaced by the library carries one of these codes. The CLI
// prints the code name as a stable, greppable prefix.
enum class ErrorCode {
  usage,     // bad command-line arguments or invalid option values
  parse,     // malformed input file (row/line number in the message)
  input,     // well-formed input that violates a data contract
  config,    // run configuration problems (key path in the message)
  mismatch,  // inconsistent artifacts (vocabulary hash, feature count, ids)
  version,   // unsupported format_version or artifact kind
  io,        // filesystem failures
  training,  // preconditions of a training routine not met
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace authentext
