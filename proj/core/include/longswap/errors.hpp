#ifndef LONGSWAP_ERRORS_HPP
#define LONGSWAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace longswap {

// Raised when an input violates a documented precondition: bad dimensions,
// parameters outside their admissible range, malformed configuration values.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// Raised on file problems: missing or unreadable files, wrong magic bytes,
// truncated payloads, values that cannot have been written by this library.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// Raised when an iterative routine cannot reach its target, for example a
// root bracket that cannot be established or a tolerance that is not met.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace longswap

#endif  // LONGSWAP_ERRORS_HPP
