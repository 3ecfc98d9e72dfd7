#pragma once

#include <stdexcept>
#include <string>

namespace rcsid {

// Bad input values or violated preconditions. The CLI maps these to exit code 2.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (log of a negative, x <= 0 ...).
class domain_error : public validation_error {
 public:
  using validation_error::validation_error;
};

// Iterative routine failed or a result left the representable range. Exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw validation_error(what);
}

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw domain_error(what);
}

}  // namespace detail
}  // namespace rcsid
