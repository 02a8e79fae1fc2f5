#include "authentext/error.hpp"

namespace authentext {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::usage: return "E_USAGE";
    case ErrorCode::parse: return "E_PARSE";
    case ErrorCode::input: return "E_INPUT";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::mismatch: return "E_MISMATCH";
    case ErrorCode::version: return "E_VERSION";
    case ErrorCode::io: return "E_IO";
    case ErrorCode::training: return "E_TRAINING";
  }
  return "E_UNKNOWN";
}

}  // namespace authentext
