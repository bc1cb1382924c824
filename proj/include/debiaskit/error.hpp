#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace debiaskit {

// Error categories. The service maps these onto HTTP status codes and the CLI
// onto exit codes, so every throw site picks one deliberately.
enum class ErrorKind {
  InvalidArgument,  // bad parameters or violated preconditions
  Parse,            // malformed embedding stream or payload
  UnknownToken,     // one or more tokens not in the vocabulary
  Degenerate,       // geometry does not define the requested object
  JobInvariant,     // DebiasJob field combination not allowed
  Convergence,      // iterative solver hit its cap
  NotFound,         // unknown session or registry entry
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries every missing token, not only the first one encountered.
class UnknownTokenError : public Error {
 public:
  explicit UnknownTokenError(std::vector<std::string> missing)
      : Error(ErrorKind::UnknownToken, format(missing)), missing_(std::move(missing)) {}

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  static std::string format(const std::vector<std::string>& missing) {
    std::string msg = "unknown token(s):";
    for (const auto& t : missing) msg += " " + t;
    return msg;
  }
  std::vector<std::string> missing_;
};

const char* to_string(ErrorKind kind);

}  // namespace debiaskit
