#pragma once

#include <stdexcept>
#include <string>

namespace sforge {

enum class ErrorKind {
  Precondition = 1,
  Parse = 2,
  NonConvergence = 3,
  Verification = 4,
  Domain = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error precondition_error(const std::string& msg) { return Error(ErrorKind::Precondition, msg); }
inline Error domain_error(const std::string& msg) { return Error(ErrorKind::Domain, msg); }
inline Error parse_error(const std::string& msg) { return Error(ErrorKind::Parse, msg); }
inline Error internal_error(const std::string& msg) { return Error(ErrorKind::Internal, msg); }

}  // namespace sforge
