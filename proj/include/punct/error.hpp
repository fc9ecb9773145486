#ifndef PUNCT_ERROR_HPP_
#define PUNCT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace punct {

// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data. Carries the 1-based line (and column when known)
// at which the problem was detected; 0 means "not applicable".
class DataError : public Error {
 public:
  DataError(const std::string& message, std::size_t line = 0,
            std::size_t column = 0)
      : Error(message), message_(message), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

  // "line:col: message" style text, prefixed with `source` if non-empty.
  std::string located(const std::string& source = "") const {
    std::string out = source;
    if (line_ != 0) {
      if (!out.empty()) out += ':';
      out += std::to_string(line_);
      if (column_ != 0) out += ':' + std::to_string(column_);
    }
    if (!out.empty()) out += ": ";
    return out + message_;
  }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// The chart parser ran past its configured work limit.
class ResourceExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace punct

#endif  // PUNCT_ERROR_HPP_
