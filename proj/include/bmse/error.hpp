#ifndef BMSE_ERROR_HPP
#define BMSE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmse {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kDegenerate,
  kSingular,
  kNonStationary,
  kUnsupported,
  kNoCutoff,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can report it as JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bmse

#endif  // BMSE_ERROR_HPP
